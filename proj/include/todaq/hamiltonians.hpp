#pragma once

#include <vector>

#include "todaq/expalg.hpp"
#include "todaq/rootsys.hpp"
#include "todaq/serialize.hpp"

namespace todaq {

// -1/2 * sum_{v in vars} d^2/dv^2 + potential. There is no first-order part,
// so the formal transpose of every operator here is the operator itself.
struct TodaOperator {
  std::vector<VarId> vars;
  ExpPoly potential;
  bool operator==(const TodaOperator&) const = default;
};

// Some series appear with two coupling conventions depending on which kernel
// they sit next to:
//   C    dual: last term 2 g_n g_{n+1} e^{-2x_n}       (right side of D>C)
//   D    dual: last term g_n e^{-x_n-x_{n-1}}           (left side of D>C)
//   A2odd dual: g_1 g_2 e^{z_1+z_2} ... 2 g_{n+1} e^{-2z_n}
enum class HamForm { standard, dual };

// Variable counts: A and A1aff use n variables (gl_n and its affine
// closure), every other series uses n. B accepts n = 0 (no variables) and D
// accepts n = 1 (one free variable) as chain terminals.
TodaOperator hamiltonian(SeriesTag t, int n, Family family, int level = 0,
                         HamForm form = HamForm::standard);

std::vector<VarId> chain_vars(Family family, int level, int count);

// -1/2 * sum_{v in vars} (d^2 F/dv^2 + (dF/dv)^2)
ExpPoly kinetic_symbol(const std::vector<VarId>& vars, const ExpPoly& f);
// e^{-F} H e^{F} as an exponential polynomial.
ExpPoly conjugated_symbol(const TodaOperator& h, const ExpPoly& f);

TodaOperator rename_vars(const TodaOperator& h, const std::function<VarId(const VarId&)>& rename);

Json to_json(const TodaOperator& h);

}  // namespace todaq
