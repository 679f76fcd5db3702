#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "todaq/expalg.hpp"
#include "todaq/serialize.hpp"

namespace todaq {

enum class SeriesTag {
  A, B, C, D, BC,
  A1aff, A2even, A2odd, B1aff, BC1aff, BC2aff, C1aff, D1aff,
  Ainf, Binf, Cinf, Dinf, BCinf,
};

std::string to_string(SeriesTag t);
SeriesTag parse_series(std::string_view name);  // throws UnsupportedError
const std::vector<SeriesTag>& all_series();
bool is_finite(SeriesTag t);
bool is_affine(SeriesTag t);
bool is_infinite(SeriesTag t);
// Smallest rank (window size for infinite tags) the catalog accepts.
int min_rank(SeriesTag t);
void check_rank(SeriesTag t, int n);

inline VarId basis(int i) { return VarId{Family::e, 0, i}; }

struct DynkinEdge {
  int i = 0;  // positions in the simple-root list
  int j = 0;
  int multiplicity = 1;
  int direction = 0;  // +1: arrow i -> j (j shorter), -1: arrow j -> i, 0: equal lengths
  bool operator==(const DynkinEdge&) const = default;
};

struct RootSystem {
  SeriesTag tag = SeriesTag::A;
  int rank = 1;
  std::vector<LinForm> simple_roots;
  std::vector<DynkinEdge> dynkin_edges;
};

std::vector<LinForm> simple_roots(SeriesTag t, int n);
int positive_root_count(SeriesTag t, int n);
// Edges from the diagram pictures' adjacency, with multiplicity and
// direction read off the root lengths.
std::vector<DynkinEdge> dynkin(SeriesTag t, int n);
// Edges recomputed from 4(a,b)^2 / ((a,a)(b,b)).
std::vector<DynkinEdge> dynkin_from_roots(const std::vector<LinForm>& roots);
Rational inner(const LinForm& a, const LinForm& b);
RootSystem root_system(SeriesTag t, int n);

Json to_json(const RootSystem& r);

}  // namespace todaq
