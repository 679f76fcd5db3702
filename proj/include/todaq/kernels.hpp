#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "todaq/expalg.hpp"
#include "todaq/hamiltonians.hpp"
#include "todaq/rootsys.hpp"
#include "todaq/serialize.hpp"

namespace todaq {

struct Side {
  SeriesTag tag = SeriesTag::A;
  int rank = 0;
  Family family = Family::x;
  int level = 0;
  TodaOperator h;

  // Chain compatibility ignores the coupling convention of h.
  bool joins(const Side& o) const {
    return tag == o.tag && rank == o.rank && family == o.family && level == o.level &&
           h.vars == o.h.vars;
  }
};

// The kernel is exp(phase); it intertwines left.h (acting on the left
// variables) with right.h (acting on the right variables).
struct KernelSpec {
  std::string id;
  int rank = 0;
  Side left;
  Side right;
  ExpPoly phase;
};

const std::vector<std::string>& kernel_ids();
bool is_known_kernel(std::string_view id);
bool is_window_kernel(std::string_view id);
// Smallest rank (or window) accepted by kernel(id, n).
int kernel_min_rank(std::string_view id);
KernelSpec kernel(std::string_view id, int n);  // throws UnsupportedError

KernelSpec transpose(const KernelSpec& k);
// Renames every variable; side family and level follow the rename of each
// side's first slot.
KernelSpec relabel(const KernelSpec& k, const std::function<VarId(const VarId&)>& rename);
// Maps whole families, keeping levels and indices.
KernelSpec relabel_families(const KernelSpec& k, const std::vector<std::pair<Family, Family>>& map);

struct Residual {
  ExpPoly value;
  ExpPoly left_symbol;
  ExpPoly right_symbol;
  bool zero() const { return value.is_zero(); }
};

// H_L e^F = H_R e^F is the whole intertwining statement: both operators are
// -1/2 Laplacian plus potential with no first-order part, so the transpose
// acting on the kernel from the right is the operator itself, and the
// relation reduces to equality of the two conjugated symbols.
Residual intertwining_residual(const KernelSpec& k);

struct InducedPotentials {
  // Potentials forced by the phase: for an intertwiner these equal the
  // sides' Hamiltonian potentials.
  ExpPoly left;
  ExpPoly right;
  // Parts of the two symbols that mix both sides, plus constants.
  ExpPoly left_mixed;
  ExpPoly right_mixed;
  bool mixed_agree() const { return left_mixed == right_mixed; }
};
InducedPotentials induced_potentials(const KernelSpec& k);

Json verify_report(const KernelSpec& k);

struct ComposedKernel {
  std::vector<KernelSpec> factors;
  // When set the last right-side variables are integrated against 1.
  bool closed = false;
  // Left side of the first factor; the only side left when factors is empty.
  Side head;

  ExpPoly total_phase() const;
  std::vector<VarId> integration_variables() const;
};

// Throws PreconditionError when consecutive sides do not join.
ComposedKernel compose(const std::vector<KernelSpec>& factors, bool closed = false);
ComposedKernel compose(const std::vector<std::pair<std::string, int>>& ids, bool closed = false);
bool composed_intertwining_check(const ComposedKernel& c);

// Wave-function representation as a closed chain of elementary kernels.
// A is indexed by gl_n (n variables); B, C, D by rank.
ComposedKernel wavefunction_chain(SeriesTag series, int n);
// Baxter operator as a two-factor convolution; the outgoing side is renamed
// to the y family.
ComposedKernel q_operator(SeriesTag series, int n);
std::vector<SeriesTag> q_operator_series();

// Sets g_i = 0 and sends v -> -infinity: every phase or Hamiltonian term
// containing v must then vanish, i.e. carry a positive coefficient on v.
KernelSpec limit_drop(const KernelSpec& k, CouplingIndex i, const VarId& v);
// A1:baxter(n) with g_n -> 0 and x_n dropped, relabelled onto the A:rec(n-1)
// variable grid (y -> level n, x -> level n-1) with sides swapped.
KernelSpec baxter_limit(int n);

// e^{v} -> lambda e^{v} in the phase and in both Hamiltonians.
KernelSpec gauge_shift(const KernelSpec& k, const VarId& v, const Rational& lambda);

// Residual of the window-N truncation; boundary_supported is true when every
// residual exponent only involves indices >= N - 1.
struct WindowedResidual {
  Residual residual;
  bool boundary_supported = true;
};
WindowedResidual windowed_residual(std::string_view id, int window);

}  // namespace todaq
