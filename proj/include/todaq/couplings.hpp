#pragma once

#include <string>
#include <vector>

#include "todaq/kernels.hpp"

namespace todaq {

// First coupling index used for the per-term unknown coefficients u_t.
constexpr CouplingIndex kUnknownBase = 1 << 20;

// Result of re-deriving the phase coefficients from the two Hamiltonians.
// Each phase term t gets an unknown u_t = s_t * prod_p p^{e_tp} * prod_i g_i^{f_ti};
// residual equations with exactly two coefficient groups become log-linear
// constraints on (f, e, s). Directions left free by the constraints (the
// constant-shift gauge and sign flips of variables) are pinned to the printed
// coefficients where that stays consistent.
struct CouplingSolution {
  bool consistent = false;
  std::vector<LinForm> exponents;
  std::vector<CoefPoly> printed;
  std::vector<CoefPoly> solved;     // empty when inconsistent
  std::vector<std::size_t> deviating;
  // Residual monomials no choice of coefficients can cancel.
  std::vector<std::string> unmatched;
  // An inconsistent subset of the log-linear constraints.
  std::vector<std::string> conflict;
  std::vector<std::string> notes;
  // Residual after substituting the solved coefficients; zero when consistent.
  ExpPoly residual_after;

  KernelSpec corrected(const KernelSpec& k) const;
};

CouplingSolution solve_couplings(const KernelSpec& k);

Json to_json(const CouplingSolution& s);

}  // namespace todaq
