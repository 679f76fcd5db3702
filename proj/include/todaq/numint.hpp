#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "todaq/expalg.hpp"
#include "todaq/kernels.hpp"
#include "todaq/serialize.hpp"

namespace todaq {

// Real contour with every integration variable v shifted by i*pi*parity[v]
// and the couplings fixed so that each phase term becomes -e^{L}.
struct ContourSpec {
  std::map<CouplingIndex, Rational> couplings;
  std::map<VarId, int> parity;
  // Outer potential with the couplings substituted.
  ExpPoly v_eff;
};

// Throws NumericError naming the obstructing terms when no assignment exists.
ContourSpec sign_normalize(const ComposedKernel& c);

enum class QuadMethod { tensor_grid, monte_carlo, stratified_mc };
std::string to_string(QuadMethod m);
QuadMethod parse_method(const std::string& s);

struct QuadConfig {
  QuadMethod method = QuadMethod::tensor_grid;
  int nodes = 121;           // per axis on [-box, box]
  long samples = 1000000;    // Monte Carlo
  std::uint64_t seed = 1;
  double box = 12.0;
  int strata = 0;            // per axis; 0 picks about 8 samples per stratum
  int threads = 1;
  bool check_box = true;     // repeat on the doubled box (grid only)
};

struct Estimate {
  std::string series;
  int rank = 0;
  std::vector<double> point;
  double value = 0;
  double error = 0;
  int dim = 0;
  QuadConfig cfg;
};

// Integrand exp(sum of normalized phase terms) over the integration
// variables of wavefunction_chain(series, n); A is indexed by gl_n.
Estimate wavefunction(SeriesTag series, int n, const std::vector<double>& point,
                      const QuadConfig& cfg);

struct NumericResidual {
  double residual = 0;       // |H Psi| / |Psi| at step h
  double residual_half = 0;  // same at h / 2
  double budget = 0;         // quadrature error propagated through the stencil
  double psi = 0;
  double psi_error = 0;
  double h = 0;
  Estimate center;
};

// -1/2 sum of central second differences plus V_eff Psi, relative to Psi.
// Stencil values share one grid (tensor grid) or one sample set (Monte Carlo).
NumericResidual hamiltonian_residual_numeric(SeriesTag series, int n,
                                             const std::vector<double>& point, double h,
                                             const QuadConfig& cfg);

// K_0(u) from the integral of exp(-u cosh t) over t >= 0; u > 0.
double bessel_k0(double u);

Json to_json(const ContourSpec& c);
Json to_json(const Estimate& e);
Json to_json(const NumericResidual& r);

}  // namespace todaq
