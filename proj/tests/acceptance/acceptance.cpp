// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "todaq/couplings.hpp"
#include "todaq/error.hpp"
#include "todaq/givental.hpp"
#include "todaq/kernels.hpp"
#include "todaq/numint.hpp"

using namespace todaq;

namespace {

// Pinned tolerances and budgets.
constexpr double kOracleRelTol = 1e-6;
constexpr double kGridResidualTol = 1e-3;
constexpr double kMcResidualTol = 5e-2;
constexpr double kHonestyMin = 0.5;
constexpr double kHonestyMax = 2.0;
constexpr double kStep = 1e-3;
constexpr double kGridSecondsPerSystem = 120.0;
constexpr long kMcSamples = 1000000;
constexpr int kReseeds = 30;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

void fail(Outcome& o, const std::string& why) {
  o.pass = false;
  if (o.detail.size() < 400) o.detail += (o.detail.empty() ? "" : "; ") + why;
}

ExpPoly unit_couplings(ExpPoly f) {
  for (int i : f.couplings()) f = substitute_coupling(f, i, Rational(1));
  return f;
}

int diagram_low(SeriesTag s) { return s == SeriesTag::D ? 2 : 1; }
int diagram_high(SeriesTag s) { return s == SeriesTag::A ? 5 : 4; }
const SeriesTag kDiagramSeries[] = {SeriesTag::A, SeriesTag::B, SeriesTag::C, SeriesTag::D};

Outcome finite_exact() {
  Outcome o;
  int checked = 0;
  for (const char* id : {"A:rec", "BC>B", "B>BC", "C>D", "D>C"}) {
    for (int n = kernel_min_rank(id); n <= 8; ++n) {
      ++checked;
      if (!intertwining_residual(kernel(id, n)).zero()) fail(o, std::string(id) + " n=" + std::to_string(n));
    }
  }
  if (o.pass) o.detail = std::to_string(checked) + " kernels";
  return o;
}

Outcome affine_exact() {
  Outcome o;
  std::ostringstream md;
  int checked = 0;
  int deviations = 0;
  for (const char* id : {"A1:baxter", "A2even:aff", "A2odd:aff", "B1:aff", "BC1>B1:aff", "C1>D1:aff",
                         "D1>C1:aff"}) {
    for (int n = std::max(2, kernel_min_rank(id)); n <= 6; ++n) {
      ++checked;
      KernelSpec k = kernel(id, n);
      Residual r = intertwining_residual(k);
      if (r.zero()) continue;
      CouplingSolution s = solve_couplings(k);
      if (!s.consistent) {
        fail(o, std::string(id) + " n=" + std::to_string(n) + " has no consistent coefficients");
        continue;
      }
      ++deviations;
      md << "\n## " << id << " n=" << n << "\n\n| term | printed | corrected |\n|---|---|---|\n";
      for (std::size_t t : s.deviating) {
        md << "| e^(" << to_string(s.exponents[t]) << ") | " << to_string(s.printed[t]) << " | "
           << to_string(s.solved[t]) << " |\n";
      }
    }
  }
  if (deviations > 0) {
    std::ofstream f("DEVIATIONS.md");
    f << "# Coefficient deviations\n" << md.str();
  }
  if (o.pass) {
    o.detail = std::to_string(checked) + " kernels, " + std::to_string(deviations) + " corrected";
  }
  return o;
}

Outcome windows() {
  Outcome o;
  for (const char* id : {"Ainf", "Binf", "Cinf", "Dinf"}) {
    for (int N : {3, 6}) {
      if (!windowed_residual(id, N).boundary_supported) fail(o, std::string(id) + " N=" + std::to_string(N));
    }
  }
  return o;
}

Outcome limits() {
  Outcome o;
  for (int n = 2; n <= 6; ++n) {
    KernelSpec a = baxter_limit(n);
    KernelSpec b = kernel("A:rec", n - 1);
    if (!(a.phase == b.phase && a.left.h == b.left.h && a.right.h == b.right.h)) {
      fail(o, "n=" + std::to_string(n));
    }
  }
  return o;
}

Outcome potentials() {
  Outcome o;
  for (SeriesTag s : kDiagramSeries) {
    for (int n = diagram_low(s); n <= diagram_high(s); ++n) {
      if (diagram_potential(build_diagram(s, n)) != unit_couplings(wavefunction_chain(s, n).total_phase())) {
        fail(o, to_string(s) + std::to_string(n));
      }
    }
  }
  return o;
}

Outcome relations_and_mutations() {
  Outcome o;
  std::mt19937 rng(2718);
  int relations_checked = 0;
  int mutations = 0;
  for (SeriesTag s : kDiagramSeries) {
    for (int n = diagram_low(s); n <= diagram_high(s); ++n) {
      Diagram d = build_diagram(s, n);
      auto rs = relations(s, n);
      for (const auto& r : rs) {
        ++relations_checked;
        if (!verify_relation(d, r)) fail(o, to_string(s) + std::to_string(n) + " " + to_string(r));
      }
      if (d.vertices.size() < 3) continue;
      for (std::size_t a = 0; a < d.arrows.size(); ++a) {
        for (int sample = 0; sample < 3; ++sample) {
          VarId target = d.vertices[rng() % d.vertices.size()];
          if (target == d.arrows[a].head || (d.arrows[a].tail && target == *d.arrows[a].tail)) continue;
          ++mutations;
          Diagram m = mutate(d, a, target);
          bool caught = std::any_of(rs.begin(), rs.end(), [&](const auto& r) { return !verify_relation(m, r); });
          if (!caught) fail(o, "mutation of " + d.arrows[a].label + " in " + to_string(s) + std::to_string(n));
        }
      }
    }
  }
  if (o.pass) {
    o.detail = std::to_string(relations_checked) + " relations, " + std::to_string(mutations) + " mutations";
  }
  return o;
}

Outcome folds() {
  Outcome o;
  for (SeriesTag s : {SeriesTag::B, SeriesTag::C, SeriesTag::D}) {
    for (int n = diagram_low(s); n <= 3; ++n) {
      if (!fold(s, n).sets_equal) fail(o, to_string(s) + std::to_string(n));
    }
  }
  return o;
}

Outcome dimensions() {
  Outcome o;
  auto expect = [&](SeriesTag s, int chain_rank, std::size_t want, int n) {
    std::size_t got = wavefunction_chain(s, chain_rank).integration_variables().size();
    if (got != want) {
      fail(o, to_string(s) + std::to_string(n) + " has " + std::to_string(got) + " not " + std::to_string(want));
    }
  };
  for (int n = 1; n <= 6; ++n) {
    const auto un = static_cast<std::size_t>(n);
    expect(SeriesTag::A, n + 1, un * (un + 1) / 2, n);
    expect(SeriesTag::B, n, un * un, n);
    expect(SeriesTag::C, n, un * un, n);
    if (n >= 2) expect(SeriesTag::D, n, un * (un - 1), n);
  }
  return o;
}

Outcome rank_one_oracles() {
  Outcome o;
  QuadConfig cfg;
  double worst = 0;
  for (double delta : {-1.0, 0.0, 1.0}) {
    double got = wavefunction(SeriesTag::A, 2, {0.25, 0.25 + delta}, cfg).value;
    double want = 2 * std::cyl_bessel_k(0.0, 2 * std::exp(delta / 2));
    worst = std::max(worst, std::abs(got - want) / want);
  }
  for (double x : {-0.8, 0.0, 0.9}) {
    double got = wavefunction(SeriesTag::B, 1, {x}, cfg).value;
    double want = 2 * std::cyl_bessel_k(0.0, 2 * std::exp(x / 2));
    worst = std::max(worst, std::abs(got - want) / want);
  }
  if (worst >= kOracleRelTol) fail(o, "relative error " + fmt(worst));
  o.detail = "max relative error " + fmt(worst);
  return o;
}

std::vector<double> sample_point(std::mt19937& rng, int dim) {
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  std::vector<double> x(static_cast<std::size_t>(dim));
  for (double& c : x) c = box(rng);
  return x;
}

Outcome numeric_residuals() {
  Outcome o;
  std::mt19937 rng(31415);
  std::ostringstream detail;

  struct System {
    SeriesTag series;
    int rank;
    int dim;
  };
  for (System sys : {System{SeriesTag::A, 3, 3}, System{SeriesTag::B, 2, 2}, System{SeriesTag::C, 2, 2}}) {
    QuadConfig cfg;
    auto t0 = Clock::now();
    double worst = 0;
    for (int p = 0; p < 3; ++p) {
      NumericResidual r = hamiltonian_residual_numeric(sys.series, sys.rank, sample_point(rng, sys.dim), kStep, cfg);
      worst = std::max(worst, r.residual);
    }
    double secs = seconds_since(t0);
    std::string name = (sys.series == SeriesTag::A ? "gl" : to_string(sys.series)) + std::to_string(sys.rank);
    if (worst >= kGridResidualTol) fail(o, name + " residual " + fmt(worst));
    if (secs >= kGridSecondsPerSystem) fail(o, name + " took " + fmt(secs) + " s");
    detail << name << " " << fmt(worst) << " (" << fmt(secs) << " s), ";
  }

  // D3: three points, then reseed the first point to test the error bar.
  QuadConfig mc;
  mc.method = QuadMethod::stratified_mc;
  mc.samples = kMcSamples;
  std::vector<std::vector<double>> points;
  for (int p = 0; p < 3; ++p) points.push_back(sample_point(rng, 3));
  double worst = 0;
  for (const auto& x : points) {
    worst = std::max(worst, hamiltonian_residual_numeric(SeriesTag::D, 3, x, kStep, mc).residual);
  }
  if (worst >= kMcResidualTol) fail(o, "D3 residual " + fmt(worst));

  std::vector<double> values;
  double mean_err = 0;
  for (int s = 1; s <= kReseeds; ++s) {
    mc.seed = static_cast<std::uint64_t>(s);
    Estimate e = wavefunction(SeriesTag::D, 3, points[0], mc);
    values.push_back(e.value);
    mean_err += e.error / kReseeds;
  }
  double mean = 0;
  for (double v : values) mean += v / kReseeds;
  double var = 0;
  for (double v : values) var += (v - mean) * (v - mean) / (kReseeds - 1);
  double ratio = std::sqrt(var) / mean_err;
  if (ratio < kHonestyMin || ratio > kHonestyMax) fail(o, "spread/stderr " + fmt(ratio));
  detail << "D3 " << fmt(worst) << ", spread/stderr " << fmt(ratio);
  if (o.pass) o.detail = detail.str();
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"finite kernels intertwine exactly", finite_exact},
      {"affine kernels intertwine exactly", affine_exact},
      {"infinite windows are boundary supported", windows},
      {"baxter limit gives the open recursion", limits},
      {"diagram potentials equal composed phases", potentials},
      {"monomial relations and mutations", relations_and_mutations},
      {"folding", folds},
      {"integration dimensions", dimensions},
      {"rank-1 Bessel oracles", rank_one_oracles},
      {"numeric Hamiltonian residuals", numeric_residuals},
  };
  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first;
    if (!o.detail.empty()) std::cout << ": " << o.detail;
    std::cout << " [" << fmt(seconds_since(t0)) << " s]" << std::endl;
  }
  return all ? 0 : 1;
}
