#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "todaq/expalg.hpp"
#include "todaq/rootsys.hpp"
#include "todaq/serialize.hpp"

namespace todaq {

enum class ArrowKind { standard, source, double_ };

std::string to_string(ArrowKind k);

// Weights: standard e^{head - tail}, source e^{head}, double e^{-head - tail}.
struct Arrow {
  ArrowKind kind = ArrowKind::standard;
  std::optional<VarId> tail;
  VarId head;
  std::string label;  // "b_{2,1}"
  GMonomial coupling;

  LinForm exponent() const;
};

// A is indexed by gl_n (levels 1..n); B, C, D by rank.
struct Diagram {
  SeriesTag series = SeriesTag::A;
  int rank = 0;
  std::vector<VarId> vertices;  // sorted
  std::vector<Arrow> arrows;

  const Arrow* find(const std::string& label) const;
};

// lhs = rhs as products of arrow weights; rhs is either labels or e^{L}.
struct MonomialRelation {
  std::vector<std::string> lhs;
  std::variant<std::vector<std::string>, LinForm> rhs;
};

std::string to_string(const MonomialRelation& r);

// with_couplings attaches the g_i carried by the matching kernel terms;
// otherwise every arrow weight has coefficient 1.
Diagram build_diagram(SeriesTag series, int n, bool with_couplings = false);
// C_n as D_{n+1} with the top x row and its arrows erased.
Diagram build_c_from_d(int n, bool with_couplings = false);

ExpPoly diagram_potential(const Diagram& d);
std::vector<MonomialRelation> relations(SeriesTag series, int n);
bool verify_relation(const Diagram& d, const MonomialRelation& r);  // throws on unknown label

// Copy of d with arrow `index` pointed at a different head vertex.
Diagram mutate(const Diagram& d, std::size_t index, const VarId& new_head);

// Folding of the ambient A diagram by x_{k,i} <-> -x_{k,k+1-i}:
//   B_n from gl_{2n+1}, C_n from gl_{2n}, D_n from gl_{2n-1}, A_n from itself.
struct FoldReport {
  SeriesTag target = SeriesTag::A;
  int rank = 0;
  int ambient_gl = 0;
  std::map<LinForm, int> folded;  // exponent form -> multiplicity
  std::map<LinForm, int> target_forms;
  bool sets_equal = false;
};
FoldReport fold(SeriesTag target, int n);
// Substitution used by fold, exposed for tests: ambient variable -> form.
LinForm fold_image(SeriesTag target, int n, const VarId& ambient);

std::string export_dot(const Diagram& d);
Json to_json(const Diagram& d);
Json to_json(const FoldReport& f);

}  // namespace todaq
