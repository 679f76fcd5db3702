#include "todaq/numint.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <thread>

#include "todaq/error.hpp"
#include "todaq/linalg.hpp"

namespace todaq {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Grid nodes whose partial phase is this far below the peak are skipped.
constexpr double kPruneDepth = 50.0;

int parity_of(const Rational& q) {
  if (q.get_den() != 1) throw NumericError("non-integral exponent " + q.get_str());
  mpz_class r = q.get_num() % 2;
  return r != 0 ? 1 : 0;
}

std::map<long, int> valuations(const Rational& q) {
  std::map<long, int> v;
  auto add = [&](mpz_class n, int sign) {
    if (n < 0) n = -n;
    for (long p = 2; n > 1 && mpz_class(p) * p <= n; ++p) {
      while (n % p == 0) {
        v[p] += sign;
        n /= p;
      }
    }
    if (n > 1) v[n.get_si()] += sign;
  };
  add(q.get_num(), 1);
  add(q.get_den(), -1);
  return v;
}

// GF(2) solve with greedy preference for zero on the listed columns.
linalg::BitVec solve_prefer_zero(const linalg::BitMat& a, const linalg::BitVec& b,
                                 std::size_t cols, std::vector<int>* conflict) {
  auto first = linalg::solve_gf2(a, b, cols);
  if (!first.consistent) {
    for (std::size_t r = 0; r < first.certificate.size(); ++r) {
      if (first.certificate[r]) conflict->push_back(static_cast<int>(r));
    }
    return {};
  }
  linalg::BitMat ra = a;
  linalg::BitVec rb = b;
  for (std::size_t c = 0; c < cols; ++c) {
    linalg::BitVec row(cols, 0);
    row[c] = 1;
    ra.push_back(row);
    rb.push_back(0);
    if (!linalg::solve_gf2(ra, rb, cols).consistent) {
      ra.pop_back();
      rb.pop_back();
    }
  }
  return linalg::solve_gf2(ra, rb, cols).x;
}

linalg::QVec solve_q_prefer_zero(const linalg::QMat& a, const linalg::QVec& b, std::size_t cols) {
  auto first = linalg::solve(a, b, cols);
  if (!first.consistent) return {};
  linalg::QMat ra = a;
  linalg::QVec rb = b;
  for (std::size_t c = 0; c < cols; ++c) {
    linalg::QVec row(cols, Rational(0));
    row[c] = 1;
    ra.push_back(row);
    rb.push_back(0);
    if (!linalg::solve(ra, rb, cols).consistent) {
      ra.pop_back();
      rb.pop_back();
    }
  }
  return linalg::solve(ra, rb, cols).x;
}

ExpPoly substitute_all(ExpPoly f, const std::map<CouplingIndex, Rational>& g) {
  for (const auto& [i, v] : g) f = substitute_coupling(f, i, v);
  for (int i : f.couplings()) f = substitute_coupling(f, i, Rational(1));
  return f;
}

struct LinearTerm {
  double coef = 0;
  std::vector<double> a;  // inner coefficients
  std::vector<double> b;  // outer coefficients
};

// Normalized integrand exp(-sum_t e^{b_t x + a_t u}) with potential V_eff(x).
struct Model {
  std::string series;
  int rank = 0;
  std::vector<VarId> outer;
  std::vector<VarId> inner;
  std::vector<LinearTerm> terms;  // coef is -1
  std::vector<LinearTerm> veff;

  int dim() const { return static_cast<int>(inner.size()); }

  double potential(const std::vector<double>& x) const {
    double v = 0;
    for (const auto& t : veff) {
      double e = 0;
      for (std::size_t k = 0; k < x.size(); ++k) e += t.b[k] * x[k];
      v += t.coef * std::exp(e);
    }
    return v;
  }

  std::vector<double> offsets(const std::vector<double>& x) const {
    std::vector<double> c(terms.size(), 0.0);
    for (std::size_t t = 0; t < terms.size(); ++t) {
      for (std::size_t k = 0; k < x.size(); ++k) c[t] += terms[t].b[k] * x[k];
    }
    return c;
  }

  double phase(const std::vector<double>& c, const double* u) const {
    double s = 0;
    for (std::size_t t = 0; t < terms.size(); ++t) {
      double e = c[t];
      for (int k = 0; k < dim(); ++k) e += terms[t].a[k] * u[k];
      s -= std::exp(e);
    }
    return s;
  }
};

LinearTerm linear_term(const LinForm& l, const CoefPoly& c, const std::vector<VarId>& outer,
                       const std::vector<VarId>& inner) {
  auto q = c.as_rational();
  if (!q) throw NumericError("unsubstituted coupling in " + to_string(ExpPoly::term(c, l)));
  LinearTerm t;
  t.coef = q->get_d();
  t.a.assign(inner.size(), 0.0);
  t.b.assign(outer.size(), 0.0);
  for (const auto& [v, a] : l.coeffs()) {
    auto io = std::find(inner.begin(), inner.end(), v);
    auto oo = std::find(outer.begin(), outer.end(), v);
    if (io != inner.end()) {
      t.a[io - inner.begin()] = a.get_d();
    } else if (oo != outer.end()) {
      t.b[oo - outer.begin()] = a.get_d();
    } else {
      throw NumericError("variable " + to_string(v) + " is neither outer nor integrated");
    }
  }
  return t;
}

Model build_model(SeriesTag series, int n) {
  ComposedKernel chain = wavefunction_chain(series, n);
  ContourSpec cs = sign_normalize(chain);
  Model m;
  m.series = to_string(series);
  m.rank = n;
  m.outer = chain.head.h.vars;
  m.inner = chain.integration_variables();
  ExpPoly phase = substitute_all(chain.total_phase(), cs.couplings);
  for (const auto& [l, c] : phase.terms()) {
    LinearTerm t = linear_term(l, c, m.outer, m.inner);
    t.coef = -1.0;
    m.terms.push_back(t);
  }
  for (const auto& [l, c] : cs.v_eff.terms()) m.veff.push_back(linear_term(l, c, m.outer, {}));
  return m;
}

struct Mode {
  Eigen::VectorXd u;
  double peak = 0;
  Eigen::MatrixXd chol;  // L with L L^T = (-Hessian)^{-1}
  double log_det = 0;    // log det L
};

Mode find_mode(const Model& m, const std::vector<double>& c) {
  const int d = m.dim();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(d);
  auto eval = [&](const Eigen::VectorXd& p, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) {
    double f = 0;
    if (grad) grad->setZero(d);
    if (hess) hess->setZero(d, d);
    for (std::size_t t = 0; t < m.terms.size(); ++t) {
      Eigen::Map<const Eigen::VectorXd> a(m.terms[t].a.data(), d);
      double e = std::exp(c[t] + a.dot(p));
      f -= e;
      if (grad) *grad -= e * a;
      if (hess) *hess -= e * a * a.transpose();
    }
    return f;
  };
  Eigen::VectorXd grad(d);
  Eigen::MatrixXd hess(d, d);
  double f = eval(u, &grad, &hess);
  for (int it = 0; it < 200; ++it) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(-hess);
    Eigen::VectorXd step = ldlt.solve(grad);
    double slope = grad.dot(step);
    if (!(slope > 1e-26)) break;
    double t = 1.0;
    double fn = f;
    Eigen::VectorXd un;
    for (int ls = 0; ls < 60; ++ls) {
      un = u + t * step;
      fn = eval(un, nullptr, nullptr);
      if (std::isfinite(fn) && fn >= f + 1e-4 * t * slope) break;
      t *= 0.5;
    }
    u = un;
    f = eval(u, &grad, &hess);
    if (grad.norm() < 1e-12) break;
  }
  Mode mo;
  mo.u = u;
  mo.peak = f;
  Eigen::MatrixXd cov = (-hess).inverse();
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw NumericError("phase is not strictly concave at its mode");
  mo.chol = llt.matrixL();
  mo.log_det = 0;
  for (int k = 0; k < d; ++k) mo.log_det += std::log(mo.chol(k, k));
  return mo;
}

// Trapezoid sum on nodes lo + k h, k = 0..nodes-1, together with the sum on
// the even nodes (step 2h) for the error estimate.
struct GridSum {
  double fine = 0;
  double coarse = 0;
};

GridSum grid_integrate(const Model& m, const std::vector<double>& c, double lo, double h,
                       int nodes, int threads) {
  const int d = m.dim();
  const std::size_t T = m.terms.size();
  // Each term is added at its deepest integration variable.
  std::vector<std::vector<std::size_t>> at(d);
  double root = 0;
  for (std::size_t t = 0; t < T; ++t) {
    int deepest = -1;
    for (int k = 0; k < d; ++k) {
      if (m.terms[t].a[k] != 0) deepest = k;
    }
    if (deepest < 0) {
      root -= std::exp(c[t]);
    } else {
      at[deepest].push_back(t);
    }
  }
  const double cutoff = find_mode(m, c).peak - kPruneDepth;

  std::vector<GridSum> rows(nodes);
  auto work = [&](int first, int stride) {
    std::vector<std::vector<double>> lin(d + 1, std::vector<double>(T));
    for (std::size_t t = 0; t < T; ++t) lin[0][t] = c[t];
    // Depth-first over axes 1..d-1 for a fixed node on axis 0.
    auto recurse = [&](auto&& self, int k, double partial, bool even, GridSum& acc) -> void {
      for (int idx = 0; idx < nodes; ++idx) {
        double x = lo + idx * h;
        const auto& prev = lin[k];
        auto& cur = lin[k + 1];
        for (std::size_t t = 0; t < T; ++t) cur[t] = prev[t] + m.terms[t].a[k] * x;
        double p = partial;
        for (std::size_t t : at[k]) p -= std::exp(cur[t]);
        if (p < cutoff) continue;
        bool ev = even && idx % 2 == 0;
        if (k + 1 == d) {
          double f = std::exp(p);
          acc.fine += f;
          if (ev) acc.coarse += f;
        } else {
          self(self, k + 1, p, ev, acc);
        }
      }
    };
    for (int i0 = first; i0 < nodes; i0 += stride) {
      double x = lo + i0 * h;
      for (std::size_t t = 0; t < T; ++t) lin[1][t] = c[t] + m.terms[t].a[0] * x;
      double p = root;
      for (std::size_t t : at[0]) p -= std::exp(lin[1][t]);
      GridSum acc;
      if (p >= cutoff) {
        bool ev = i0 % 2 == 0;
        if (d == 1) {
          double f = std::exp(p);
          acc.fine = f;
          acc.coarse = ev ? f : 0;
        } else {
          recurse(recurse, 1, p, ev, acc);
        }
      }
      rows[i0] = acc;
    }
  };
  threads = std::max(1, threads);
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }
  GridSum total;
  for (const auto& r : rows) {
    total.fine += r.fine;
    total.coarse += r.coarse;
  }
  total.fine *= std::pow(h, d);
  total.coarse *= std::pow(2 * h, d);
  return total;
}

struct GridValue {
  double value = 0;
  double coarse = 0;
  double error = 0;
};

GridValue grid_value(const Model& m, const std::vector<double>& x, const QuadConfig& cfg,
                     bool check_box) {
  const double h = 2 * cfg.box / (cfg.nodes - 1);
  auto c = m.offsets(x);
  GridSum s = grid_integrate(m, c, -cfg.box, h, cfg.nodes, cfg.threads);
  GridValue g{s.fine, s.coarse, std::abs(s.fine - s.coarse)};
  if (check_box) {
    GridSum big = grid_integrate(m, c, -2 * cfg.box, h, 2 * cfg.nodes - 1, cfg.threads);
    double drift = std::abs(big.fine - s.fine);
    if (drift > 1e-8 * std::abs(s.fine) && drift > g.error) {
      throw NumericError("integral not contained in the box [-" + std::to_string(cfg.box) + ", " +
                         std::to_string(cfg.box) + "]: doubling moves it by " +
                         std::to_string(drift));
    }
    g.error = std::max(g.error, drift);
  }
  return g;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

double uniform01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Inverse standard normal CDF (rational start, one Halley refinement).
double inv_normal(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double cc[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double dd[] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  double x;
  if (p < 0.02425) {
    double q = std::sqrt(-2 * std::log(p));
    x = (((((cc[0] * q + cc[1]) * q + cc[2]) * q + cc[3]) * q + cc[4]) * q + cc[5]) /
        ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1);
  } else if (p > 1 - 0.02425) {
    double q = std::sqrt(-2 * std::log(1 - p));
    x = -(((((cc[0] * q + cc[1]) * q + cc[2]) * q + cc[3]) * q + cc[4]) * q + cc[5]) /
        ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1);
  } else {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  }
  double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  double u = e * std::sqrt(2 * kPi) * std::exp(x * x / 2);
  return x - u / (1 + x * u / 2);
}

// Proposal width in whitened coordinates; wider than the Laplace fit so the
// importance weights stay bounded in the slowly decaying directions.
constexpr double kProposalScale = 1.25;

struct Moments {
  std::vector<double> sum;
  std::vector<double> var;  // variance of the stratum mean, already scaled
};

Moments combine(const Moments& a, const Moments& b) {
  Moments r = a;
  for (std::size_t k = 0; k < r.sum.size(); ++k) {
    r.sum[k] += b.sum[k];
    r.var[k] += b.var[k];
  }
  return r;
}

Moments tree_reduce(std::vector<Moments>& parts, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return parts[lo];
  std::size_t mid = lo + (hi - lo) / 2;
  return combine(tree_reduce(parts, lo, mid), tree_reduce(parts, mid, hi));
}

// Monte Carlo over whitened coordinates w = mode + L u, u ~ N(0, s^2 I),
// stratified on the Gaussian CDF cube. Each sample returns a vector of
// quantities; the result holds their estimated integrals and variances.
template <typename Sample>
Moments mc_integrate(const Model& m, const Mode& mode, const QuadConfig& cfg, std::size_t nq,
                     Sample&& sample) {
  const int d = m.dim();
  int s = 1;
  if (cfg.method == QuadMethod::stratified_mc) {
    s = cfg.strata > 0 ? cfg.strata
                       : std::max(1, static_cast<int>(std::floor(
                                         std::pow(static_cast<double>(cfg.samples) / 8.0, 1.0 / d))));
  }
  long strata = 1;
  for (int k = 0; k < d; ++k) strata *= s;
  // Plain Monte Carlo still runs in independent blocks for threading.
  const long blocks = cfg.method == QuadMethod::stratified_mc
                          ? strata
                          : std::max(1L, std::min<long>(256, cfg.samples / 1024));
  const long per = (cfg.samples + blocks - 1) / blocks;
  const double log_norm = mode.log_det + d * std::log(kProposalScale) + 0.5 * d * std::log(2 * kPi);

  std::vector<Moments> parts(blocks);
  auto work = [&](long first, long stride) {
    std::vector<double> u(d);
    std::vector<double> w(d);
    std::vector<double> q(nq);
    std::vector<int> cell(d);
    for (long blk = first; blk < blocks; blk += stride) {
      std::mt19937_64 rng(splitmix64(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(blk))));
      long rem = blk;
      for (int k = 0; k < d; ++k) {
        cell[k] = static_cast<int>(rem % s);
        rem /= s;
      }
      std::vector<double> sum(nq, 0.0);
      std::vector<double> sumsq(nq, 0.0);
      for (long j = 0; j < per; ++j) {
        double log_q = 0;
        for (int k = 0; k < d; ++k) {
          double p = (cell[k] + uniform01(rng)) / s;
          double z = inv_normal(p);
          u[k] = kProposalScale * z;
          log_q -= 0.5 * z * z;
        }
        for (int r = 0; r < d; ++r) {
          double acc = mode.u[r];
          for (int k = 0; k <= r; ++k) acc += mode.chol(r, k) * u[k];
          w[r] = acc;
        }
        // weight = det(L) / proposal density
        double log_weight = log_norm - log_q;
        sample(w.data(), log_weight, q.data());
        for (std::size_t k = 0; k < nq; ++k) {
          sum[k] += q[k];
          sumsq[k] += q[k] * q[k];
        }
      }
      Moments mo{std::vector<double>(nq), std::vector<double>(nq)};
      const double frac = cfg.method == QuadMethod::stratified_mc ? 1.0 / static_cast<double>(strata)
                                                                  : 1.0 / static_cast<double>(blocks);
      for (std::size_t k = 0; k < nq; ++k) {
        double mean = sum[k] / per;
        double var = per > 1 ? (sumsq[k] - per * mean * mean) / (per - 1) : 0.0;
        mo.sum[k] = frac * mean;
        mo.var[k] = frac * frac * std::max(var, 0.0) / per;
      }
      parts[blk] = mo;
    }
  };
  int threads = std::max(1, cfg.threads);
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }
  return tree_reduce(parts, 0, parts.size());
}

void check_point(const Model& m, const std::vector<double>& point) {
  if (point.size() != m.outer.size()) {
    throw PreconditionError("point has " + std::to_string(point.size()) + " coordinates, " +
                            m.series + std::to_string(m.rank) + " needs " +
                            std::to_string(m.outer.size()));
  }
}

void check_dimension(const Model& m, const QuadConfig& cfg) {
  if (cfg.method == QuadMethod::tensor_grid && m.dim() > 4) {
    throw PreconditionError("tensor grid supports at most 4 integration variables, " + m.series +
                            std::to_string(m.rank) + " has " + std::to_string(m.dim()));
  }
  if (cfg.method == QuadMethod::tensor_grid && (cfg.nodes < 3 || cfg.nodes % 2 == 0)) {
    throw PreconditionError("tensor grid needs an odd node count >= 3");
  }
  if (cfg.method != QuadMethod::tensor_grid && cfg.samples < 2) {
    throw PreconditionError("Monte Carlo needs at least 2 samples");
  }
}

Estimate make_estimate(const Model& m, const std::vector<double>& point, const QuadConfig& cfg) {
  Estimate e;
  e.series = m.series;
  e.rank = m.rank;
  e.point = point;
  e.dim = m.dim();
  e.cfg = cfg;
  return e;
}

}  // namespace

ContourSpec sign_normalize(const ComposedKernel& c) {
  ContourSpec cs;
  ExpPoly phase = c.total_phase();
  std::vector<VarId> inner = c.integration_variables();
  std::vector<int> gs;
  for (int i : phase.couplings()) gs.push_back(i);
  const std::size_t G = gs.size();
  const std::size_t cols = G + inner.size();

  struct Row {
    LinForm l;
    Rational q;
    GMonomial m;
  };
  std::vector<Row> rows;
  for (const auto& [l, coef] : phase.terms()) {
    if (coef.size() != 1) {
      throw NumericError("phase coefficient of e^(" + to_string(l) + ") is not a monomial: " +
                         to_string(coef));
    }
    rows.push_back({l, coef.terms().begin()->second, coef.terms().begin()->first});
  }

  // signs: sign(q) + sum a_i sigma_i + sum L(v) p_v = 1 (mod 2)
  linalg::BitMat sa;
  linalg::BitVec sb;
  for (const auto& r : rows) {
    linalg::BitVec row(cols, 0);
    for (std::size_t k = 0; k < G; ++k) row[k] = r.m.exponent(gs[k]) % 2;
    for (std::size_t k = 0; k < inner.size(); ++k) row[G + k] = parity_of(r.l.coeff(inner[k]));
    for (const auto& [v, a] : r.l.coeffs()) {
      if (std::find(inner.begin(), inner.end(), v) == inner.end()) parity_of(a);
    }
    sa.push_back(row);
    sb.push_back((r.q < 0 ? 1 : 0) ^ 1);
  }
  std::vector<int> conflict;
  linalg::BitVec sx = solve_prefer_zero(sa, sb, cols, &conflict);
  if (sx.empty() && cols > 0) {
    std::string msg = "no sign-normalizing contour; obstructing terms:";
    for (int r : conflict) msg += " " + to_string(ExpPoly::term(CoefPoly::monomial(rows[r].q, rows[r].m), rows[r].l));
    throw NumericError(msg);
  }

  // magnitudes: sum a_i e_ip = -v_p(q) for each prime p
  std::set<long> primes;
  for (const auto& r : rows) {
    for (auto [p, e] : valuations(r.q)) primes.insert(p);
  }
  std::map<CouplingIndex, Rational> mag;
  for (int i : gs) mag[i] = 1;
  linalg::QMat ma;
  for (const auto& r : rows) {
    linalg::QVec row(G, Rational(0));
    for (std::size_t k = 0; k < G; ++k) row[k] = r.m.exponent(gs[k]);
    ma.push_back(row);
  }
  for (long p : primes) {
    linalg::QVec b;
    for (const auto& r : rows) {
      auto v = valuations(r.q);
      b.push_back(v.count(p) ? -v.at(p) : 0);
    }
    linalg::QVec x = solve_q_prefer_zero(ma, b, G);
    if (x.empty() && G > 0) {
      throw NumericError("no coupling magnitudes normalize every phase term (prime " +
                         std::to_string(p) + ")");
    }
    if (G == 0) {
      throw NumericError("phase coefficient magnitudes cannot be normalized without couplings");
    }
    for (std::size_t k = 0; k < G; ++k) {
      if (x[k].get_den() != 1) throw NumericError("normalizing couplings would be irrational");
      long e = x[k].get_num().get_si();
      mpz_class pw;
      mpz_ui_pow_ui(pw.get_mpz_t(), static_cast<unsigned long>(p),
                    static_cast<unsigned long>(e < 0 ? -e : e));
      mag[gs[k]] = e < 0 ? Rational(mag[gs[k]] / pw) : Rational(mag[gs[k]] * pw);
    }
  }
  for (std::size_t k = 0; k < G; ++k) cs.couplings[gs[k]] = sx[k] ? Rational(-mag[gs[k]]) : mag[gs[k]];
  for (std::size_t k = 0; k < inner.size(); ++k) cs.parity[inner[k]] = sx[G + k];

  // every term must now read -e^{L}
  for (const auto& r : rows) {
    CoefPoly c = CoefPoly::monomial(r.q, r.m);
    ExpPoly t = substitute_all(ExpPoly::term(c, LinForm{}), cs.couplings);
    Rational v = t.coefficient(LinForm{}).as_rational().value_or(Rational(0));
    int par = 0;
    for (const auto& [var, a] : r.l.coeffs()) {
      if (cs.parity.count(var)) par ^= parity_of(a) & cs.parity.at(var);
    }
    if (par) v = -v;
    if (v != -1) throw NumericError("normalization failed on " + to_string(ExpPoly::term(c, r.l)));
  }

  // The same potential must sit on both sides of every interface.
  for (std::size_t i = 0; i + 1 < c.factors.size(); ++i) {
    ExpPoly a = substitute_all(c.factors[i].right.h.potential, cs.couplings);
    ExpPoly b = substitute_all(c.factors[i + 1].left.h.potential, cs.couplings);
    if (!(a == b)) {
      throw NumericError("interface " + c.factors[i].id + " | " + c.factors[i + 1].id +
                         " carries different potentials after normalization: " + to_string(a) +
                         " vs " + to_string(b));
    }
  }
  if (c.closed && !c.factors.empty()) {
    ExpPoly last = substitute_all(c.factors.back().right.h.potential, cs.couplings);
    if (!last.is_zero()) {
      throw NumericError("closed chain ends on a nonzero potential " + to_string(last));
    }
  }
  std::map<CouplingIndex, Rational> all = cs.couplings;
  for (int i : c.head.h.potential.couplings()) {
    if (!all.count(i)) all[i] = 1;
  }
  cs.couplings = all;
  cs.v_eff = substitute_all(c.head.h.potential, cs.couplings);
  return cs;
}

std::string to_string(QuadMethod m) {
  switch (m) {
    case QuadMethod::tensor_grid: return "tensor-grid";
    case QuadMethod::monte_carlo: return "monte-carlo";
    case QuadMethod::stratified_mc: return "stratified-mc";
  }
  return "?";
}

QuadMethod parse_method(const std::string& s) {
  if (s == "tensor-grid") return QuadMethod::tensor_grid;
  if (s == "mc" || s == "monte-carlo") return QuadMethod::monte_carlo;
  if (s == "stratified-mc") return QuadMethod::stratified_mc;
  throw PreconditionError("unknown quadrature method '" + s + "'");
}

Estimate wavefunction(SeriesTag series, int n, const std::vector<double>& point,
                      const QuadConfig& cfg) {
  Model m = build_model(series, n);
  check_point(m, point);
  Estimate e = make_estimate(m, point, cfg);
  if (m.dim() == 0) {
    e.value = std::exp(m.phase(m.offsets(point), nullptr));
    return e;
  }
  check_dimension(m, cfg);
  if (cfg.method == QuadMethod::tensor_grid) {
    GridValue g = grid_value(m, point, cfg, cfg.check_box);
    e.value = g.value;
    e.error = g.error;
    return e;
  }
  auto c = m.offsets(point);
  Mode mode = find_mode(m, c);
  Moments mo = mc_integrate(m, mode, cfg, 1, [&](const double* w, double log_weight, double* q) {
    q[0] = std::exp(m.phase(c, w) + log_weight);
  });
  e.value = mo.sum[0];
  e.error = std::sqrt(mo.var[0]);
  return e;
}

NumericResidual hamiltonian_residual_numeric(SeriesTag series, int n,
                                             const std::vector<double>& point, double h,
                                             const QuadConfig& cfg) {
  if (!(h > 0)) throw PreconditionError("finite-difference step must be positive");
  Model m = build_model(series, n);
  check_point(m, point);
  const std::size_t k = point.size();
  const double v0 = m.potential(point);
  NumericResidual r;
  r.h = h;
  r.center = make_estimate(m, point, cfg);

  // stencil: 0 = centre, then (+h, -h, +h/2, -h/2) per coordinate
  std::vector<std::vector<double>> pts{point};
  for (std::size_t j = 0; j < k; ++j) {
    for (double s : {h, -h, h / 2, -h / 2}) {
      auto p = point;
      p[j] += s;
      pts.push_back(p);
    }
  }
  auto combine_stencil = [&](const std::vector<double>& f, double step, int off) {
    double lap = 0;
    for (std::size_t j = 0; j < k; ++j) {
      lap += (f[1 + 4 * j + off] - 2 * f[0] + f[2 + 4 * j + off]) / (step * step);
    }
    return -0.5 * lap + v0 * f[0];
  };

  if (m.dim() == 0) {
    std::vector<double> f;
    for (const auto& p : pts) f.push_back(std::exp(m.phase(m.offsets(p), nullptr)));
    r.psi = f[0];
    r.residual = std::abs(combine_stencil(f, h, 0)) / std::abs(f[0]);
    r.residual_half = std::abs(combine_stencil(f, h / 2, 2)) / std::abs(f[0]);
    r.center.value = f[0];
    return r;
  }
  check_dimension(m, cfg);

  if (cfg.method == QuadMethod::tensor_grid) {
    std::vector<double> f;
    std::vector<double> coarse;
    std::vector<double> err;
    for (std::size_t s = 0; s < pts.size(); ++s) {
      GridValue g = grid_value(m, pts[s], cfg, s == 0 && cfg.check_box);
      f.push_back(g.value);
      coarse.push_back(g.coarse);
      err.push_back(g.error);
    }
    r.psi = f[0];
    r.psi_error = err[0];
    r.residual = std::abs(combine_stencil(f, h, 0)) / std::abs(f[0]);
    r.residual_half = std::abs(combine_stencil(f, h / 2, 2)) / std::abs(f[0]);
    // The stencil shares one grid, so its quadrature error is estimated on
    // the combination itself rather than summed point by point.
    double fine_res = combine_stencil(f, h, 0) / f[0];
    double coarse_res = combine_stencil(coarse, h, 0) / coarse[0];
    r.budget = std::abs(fine_res - coarse_res) + std::abs(v0) * err[0] / std::abs(f[0]);
    r.center.value = f[0];
    r.center.error = err[0];
    return r;
  }

  std::vector<std::vector<double>> offs;
  for (const auto& p : pts) offs.push_back(m.offsets(p));
  Mode mode = find_mode(m, offs[0]);
  Moments mo = mc_integrate(m, mode, cfg, 3, [&](const double* w, double log_weight, double* q) {
    thread_local std::vector<double> f;
    f.resize(pts.size());
    for (std::size_t s = 0; s < pts.size(); ++s) f[s] = std::exp(m.phase(offs[s], w) + log_weight);
    q[0] = f[0];
    q[1] = combine_stencil(f, h, 0);
    q[2] = combine_stencil(f, h / 2, 2);
  });
  r.psi = mo.sum[0];
  r.psi_error = std::sqrt(mo.var[0]);
  r.residual = std::abs(mo.sum[1]) / std::abs(r.psi);
  r.residual_half = std::abs(mo.sum[2]) / std::abs(r.psi);
  r.budget = std::sqrt(mo.var[1]) / std::abs(r.psi);
  r.center.value = r.psi;
  r.center.error = r.psi_error;
  return r;
}

double bessel_k0(double u) {
  if (!(u > 0)) throw PreconditionError("bessel_k0 needs u > 0");
  // The integrand decays doubly exponentially; the trapezoid rule on the
  // half line converges geometrically in 1/step.
  const double step = 0.02;
  double sum = 0.5 * std::exp(-u);
  for (int k = 1;; ++k) {
    double t = k * step;
    double f = std::exp(-u * std::cosh(t));
    sum += f;
    if (u * std::cosh(t) > 750) break;
  }
  return step * sum;
}

Json to_json(const ContourSpec& c) {
  Json g = Json::object();
  for (const auto& [i, v] : c.couplings) g[std::to_string(i)] = to_string(v);
  Json p = Json::object();
  for (const auto& [v, s] : c.parity) p[to_string(v)] = s;
  return {{"couplings", g}, {"parity", p}, {"v_eff", to_json(c.v_eff)}};
}

Json to_json(const Estimate& e) {
  return {{"series", e.series},
          {"rank", e.rank},
          {"point", e.point},
          {"value", e.value},
          {"error", e.error},
          {"method", to_string(e.cfg.method)},
          {"seed", e.cfg.seed},
          {"samples", e.cfg.method == QuadMethod::tensor_grid ? 0L : e.cfg.samples},
          {"nodes", e.cfg.method == QuadMethod::tensor_grid ? e.cfg.nodes : 0},
          {"box", e.cfg.box},
          {"dim", e.dim}};
}

Json to_json(const NumericResidual& r) {
  Json j = to_json(r.center);
  j["h"] = r.h;
  j["residual"] = r.residual;
  j["residual_half_h"] = r.residual_half;
  j["budget"] = r.budget;
  j["psi"] = r.psi;
  j["psi_error"] = r.psi_error;
  return j;
}

}  // namespace todaq
