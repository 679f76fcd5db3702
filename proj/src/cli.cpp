#include "todaq/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <sstream>
#include <thread>

#include "todaq/couplings.hpp"
#include "todaq/error.hpp"
#include "todaq/givental.hpp"
#include "todaq/hamiltonians.hpp"
#include "todaq/kernels.hpp"
#include "todaq/numint.hpp"
#include "todaq/rootsys.hpp"

namespace todaq::cli {

namespace {

struct Options {
  std::string kernel;
  std::string series;
  int rank = -1;
  int window = -1;
  std::string point;
  std::string method = "auto";
  long samples = 1000000;
  int nodes = 121;
  std::uint64_t seed = 1;
  double h = 1e-3;
  bool json = false;
  bool dot = false;
  std::string out;
  int max_rank = 6;
  std::string deviations = "DEVIATIONS.md";
  int threads = 0;
};

struct UsageError : Error {
  using Error::Error;
};

// Runs f(0..n-1) on a small pool; results come back in index order.
template <typename F>
auto parallel_map(std::size_t n, F&& f) -> std::vector<decltype(f(std::size_t{}))> {
  using R = decltype(f(std::size_t{}));
  std::vector<R> results(n);
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(n, 1));
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < n; i += workers) results[i] = f(i);
    }));
  }
  for (auto& j : jobs) j.get();
  return results;
}

std::vector<double> parse_point(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad coordinate '" + item + "' in --point");
    }
  }
  return v;
}

double tolerance_for_dim(int dim) {
  if (dim <= 1) return 1e-6;
  if (dim <= 4) return 1e-3;
  return 5e-2;
}

ExpPoly unit_couplings(ExpPoly f) {
  for (int i : f.couplings()) f = substitute_coupling(f, i, Rational(1));
  return f;
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

int require_rank(const Options& o) {
  if (o.rank < 0) throw UsageError("--rank is required");
  return o.rank;
}

SeriesTag require_series(const Options& o) {
  if (o.series.empty()) throw UsageError("--series is required");
  return parse_series(o.series);
}

void require_kernel(const Options& o) {
  if (o.kernel.empty()) throw UsageError("--kernel is required");
  if (!is_known_kernel(o.kernel)) throw UsageError("unknown kernel id '" + o.kernel + "'");
}

QuadConfig quad_config(const Options& o, int dim) {
  QuadConfig cfg;
  if (o.method == "auto") {
    cfg.method = dim <= 4 ? QuadMethod::tensor_grid : QuadMethod::stratified_mc;
  } else {
    cfg.method = parse_method(o.method);
  }
  cfg.samples = o.samples;
  cfg.nodes = o.nodes;
  cfg.seed = o.seed;
  cfg.threads = o.threads > 0 ? o.threads : std::max(1u, std::thread::hardware_concurrency());
  return cfg;
}

// ---- commands -----------------------------------------------------------

int cmd_catalog(const Options& o, std::ostream& out) {
  Json list = Json::array();
  for (const auto& id : kernel_ids()) {
    int n = kernel_min_rank(id);
    KernelSpec k = kernel(id, n);
    list.push_back({{"id", id},
                    {"min_rank", n},
                    {"window", is_window_kernel(id)},
                    {"left", to_string(k.left.tag)},
                    {"right", to_string(k.right.tag)}});
  }
  if (o.json) {
    out << list.dump(2) << "\n";
    return 0;
  }
  out << std::left << std::setw(12) << "id" << std::setw(10) << "min_rank" << "sides\n";
  for (const auto& e : list) {
    std::string id = e["id"];
    std::string l = e["left"];
    std::string r = e["right"];
    out << std::setw(12) << id << std::setw(10) << e["min_rank"].get<int>() << l << " -> " << r
        << (e["window"].get<bool>() ? "  (window)" : "") << "\n";
  }
  return 0;
}

struct KernelCheck {
  std::string id;
  int rank = 0;
  bool pass = false;
  bool deviation = false;
  std::string detail;
  Json report;
  std::optional<CouplingSolution> solution;
};

KernelCheck check_kernel(const std::string& id, int n, bool always_solve) {
  KernelCheck c;
  c.id = id;
  c.rank = n;
  if (is_window_kernel(id)) {
    WindowedResidual w = windowed_residual(id, n);
    c.pass = w.boundary_supported;
    c.report = {{"id", id},
                {"window", n},
                {"residual_zero", w.residual.zero()},
                {"boundary_supported", w.boundary_supported},
                {"residual", to_json(w.residual.value)}};
    c.detail = w.residual.zero() ? "residual 0" : "boundary residual " + to_string(w.residual.value);
    return c;
  }
  KernelSpec k = kernel(id, n);
  c.report = verify_report(k);
  bool zero = c.report["residual_zero"].get<bool>() && c.report["mixed_agree"].get<bool>();
  c.pass = zero;
  c.detail = zero ? "residual 0" : "residual " + to_string(intertwining_residual(k).value);
  if (!zero || always_solve) {
    CouplingSolution s = solve_couplings(k);
    if (!s.deviating.empty() || !zero) {
      c.deviation = s.consistent && !s.deviating.empty();
      if (!zero) c.pass = s.consistent;
      c.detail += s.consistent ? "; consistent coefficients found"
                               : "; no consistent coefficients: " + join(s.unmatched, ", ");
    }
    c.solution = std::move(s);
  }
  return c;
}

int cmd_verify(const Options& o, std::ostream& out) {
  require_kernel(o);
  int n = is_window_kernel(o.kernel) ? (o.window >= 0 ? o.window : require_rank(o)) : require_rank(o);
  if (n < kernel_min_rank(o.kernel)) {
    throw UsageError("kernel " + o.kernel + " needs rank >= " +
                     std::to_string(kernel_min_rank(o.kernel)));
  }
  KernelCheck c = check_kernel(o.kernel, n, false);
  if (o.json) {
    out << c.report.dump(2) << "\n";
  } else {
    out << (c.pass ? "PASS " : "FAIL ") << o.kernel << " n=" << n << ": " << c.detail << "\n";
  }
  return c.pass ? 0 : 1;
}

std::vector<std::pair<std::string, int>> kernel_jobs(int max_rank) {
  std::vector<std::pair<std::string, int>> jobs;
  for (const auto& id : kernel_ids()) {
    int lo = is_window_kernel(id) ? std::max(3, kernel_min_rank(id)) : kernel_min_rank(id);
    for (int n = lo; n <= max_rank; ++n) jobs.emplace_back(id, n);
  }
  return jobs;
}

int cmd_verify_all(const Options& o, std::ostream& out) {
  auto jobs = kernel_jobs(o.max_rank);
  auto results = parallel_map(jobs.size(), [&](std::size_t i) {
    return check_kernel(jobs[i].first, jobs[i].second, false);
  });
  bool ok = true;
  Json arr = Json::array();
  for (const auto& r : results) {
    ok = ok && r.pass;
    arr.push_back({{"id", r.id}, {"rank", r.rank}, {"pass", r.pass}, {"detail", r.detail}});
  }
  if (o.json) {
    out << arr.dump(2) << "\n";
  } else {
    for (const auto& r : results) {
      out << (r.pass ? "PASS " : "FAIL ") << std::left << std::setw(12) << r.id << " n=" << r.rank
          << "  " << r.detail << "\n";
    }
  }
  return ok ? 0 : 1;
}

int cmd_solve(const Options& o, std::ostream& out) {
  require_kernel(o);
  if (is_window_kernel(o.kernel)) throw UsageError("solve-couplings needs a finite or affine kernel");
  KernelSpec k = kernel(o.kernel, require_rank(o));
  CouplingSolution s = solve_couplings(k);
  if (o.json) {
    out << to_json(s).dump(2) << "\n";
  } else {
    out << (s.consistent ? "consistent" : "inconsistent") << "\n";
    for (std::size_t t = 0; t < s.exponents.size(); ++t) {
      out << "  e^(" << to_string(s.exponents[t]) << "): printed " << to_string(s.printed[t]);
      if (s.consistent) out << ", solved " << to_string(s.solved[t]);
      if (std::find(s.deviating.begin(), s.deviating.end(), t) != s.deviating.end()) out << "  DEVIATES";
      out << "\n";
    }
    for (const auto& u : s.unmatched) out << "  unmatched: " << u << "\n";
    for (const auto& c : s.conflict) out << "  conflict: " << c << "\n";
  }
  return s.consistent ? 0 : 1;
}

int cmd_diagram(const Options& o, std::ostream& out) {
  SeriesTag s = require_series(o);
  Diagram d = build_diagram(s, require_rank(o), true);
  if (o.dot) {
    out << export_dot(d);
  } else if (o.json) {
    out << to_json(d).dump(2) << "\n";
  } else {
    out << to_string(s) << o.rank << ": " << d.vertices.size() << " vertices, " << d.arrows.size()
        << " arrows\n";
    for (const auto& a : d.arrows) {
      out << "  " << a.label << " [" << to_string(a.kind) << "] "
          << (a.tail ? to_string(*a.tail) : std::string("*")) << " -> " << to_string(a.head)
          << "  weight " << to_string(ExpPoly::term(CoefPoly::monomial(1, a.coupling), a.exponent()))
          << "\n";
    }
  }
  return 0;
}

int cmd_relations(const Options& o, std::ostream& out) {
  SeriesTag s = require_series(o);
  int n = require_rank(o);
  Diagram d = build_diagram(s, n);
  bool ok = true;
  Json arr = Json::array();
  for (const auto& r : relations(s, n)) {
    bool v = verify_relation(d, r);
    ok = ok && v;
    arr.push_back({{"relation", to_string(r)}, {"holds", v}});
    if (!o.json) out << (v ? "PASS " : "FAIL ") << to_string(r) << "\n";
  }
  if (o.json) out << arr.dump(2) << "\n";
  return ok ? 0 : 1;
}

int cmd_fold(const Options& o, std::ostream& out) {
  SeriesTag s = require_series(o);
  FoldReport f = fold(s, require_rank(o));
  if (o.json) {
    out << to_json(f).dump(2) << "\n";
  } else {
    out << (f.sets_equal ? "PASS " : "FAIL ") << "gl" << f.ambient_gl << " folds onto "
        << to_string(s) << f.rank << ": " << f.folded.size() << " folded forms, "
        << f.target_forms.size() << " target forms\n";
  }
  return f.sets_equal ? 0 : 1;
}

int integration_dim(SeriesTag s, int n) {
  return static_cast<int>(wavefunction_chain(s, n).integration_variables().size());
}

int cmd_wavefn(const Options& o, std::ostream& out) {
  SeriesTag s = require_series(o);
  int n = require_rank(o);
  Estimate e = wavefunction(s, n, parse_point(o.point), quad_config(o, integration_dim(s, n)));
  if (o.json) {
    out << to_json(e).dump(2) << "\n";
  } else {
    out << std::setprecision(15) << "psi = " << e.value << " +- " << std::setprecision(3) << e.error
        << " (" << to_string(e.cfg.method) << ", dim " << e.dim << ")\n";
  }
  return 0;
}

int cmd_residual(const Options& o, std::ostream& out) {
  SeriesTag s = require_series(o);
  int n = require_rank(o);
  int dim = integration_dim(s, n);
  NumericResidual r =
      hamiltonian_residual_numeric(s, n, parse_point(o.point), o.h, quad_config(o, dim));
  double tol = tolerance_for_dim(dim);
  bool pass = r.residual < tol;
  if (o.json) {
    Json j = to_json(r);
    j["tolerance"] = tol;
    j["pass"] = pass;
    out << j.dump(2) << "\n";
  } else {
    out << std::setprecision(3) << (pass ? "PASS " : "FAIL ") << "|H psi|/|psi| = " << r.residual
        << " at h, " << r.residual_half << " at h/2, budget " << r.budget << ", tolerance " << tol
        << "\n";
  }
  return pass ? 0 : 1;
}

struct Line {
  std::string name;
  bool pass = false;
  std::string detail;
};

std::string deviations_markdown(const std::vector<KernelCheck>& checks) {
  std::ostringstream md;
  md << "# Coefficient deviations\n\n";
  md << "Kernels whose printed phase coefficients do not intertwine as given, with the "
        "coefficients recovered from the two Hamiltonians.\n";
  for (const auto& c : checks) {
    if (!c.solution || (!c.deviation && c.pass)) continue;
    const CouplingSolution& s = *c.solution;
    md << "\n## " << c.id << " n=" << c.rank << "\n\n";
    md << "Residual with printed coefficients: `"
       << to_string(intertwining_residual(kernel(c.id, c.rank)).value) << "`\n\n";
    if (!s.consistent) {
      md << "No consistent coefficient assignment. Unmatched terms: "
         << join(s.unmatched, ", ") << "\n";
      continue;
    }
    md << "| term | printed | corrected |\n|---|---|---|\n";
    for (std::size_t t : s.deviating) {
      md << "| e^(" << to_string(s.exponents[t]) << ") | " << to_string(s.printed[t]) << " | "
         << to_string(s.solved[t]) << " |\n";
    }
  }
  return md.str();
}

int cmd_check_all(const Options& o, std::ostream& out, std::ostream& err) {
  std::vector<Line> lines;
  const int max_rank = o.max_rank;

  auto jobs = kernel_jobs(max_rank);
  auto checks = parallel_map(jobs.size(), [&](std::size_t i) {
    return check_kernel(jobs[i].first, jobs[i].second, jobs[i].second <= 4);
  });
  for (const auto& id : kernel_ids()) {
    Line l{"kernel " + id, true, ""};
    int count = 0;
    std::vector<std::string> notes;
    for (const auto& c : checks) {
      if (c.id != id) continue;
      ++count;
      if (!c.pass) {
        l.pass = false;
        notes.push_back("n=" + std::to_string(c.rank) + ": " + c.detail);
      } else if (c.deviation) {
        notes.push_back("n=" + std::to_string(c.rank) + " deviates from printed coefficients");
      }
    }
    l.detail = std::to_string(count) + " ranks" + (notes.empty() ? "" : "; " + join(notes, "; "));
    lines.push_back(l);
  }

  {
    Line l{"baxter limit", true, ""};
    for (int n = 2; n <= max_rank; ++n) {
      KernelSpec a = baxter_limit(n);
      KernelSpec b = kernel("A:rec", n - 1);
      if (!(a.phase == b.phase && a.left.h == b.left.h && a.right.h == b.right.h)) {
        l.pass = false;
        l.detail += "n=" + std::to_string(n) + " differs; ";
      }
    }
    if (l.pass) l.detail = "A1:baxter -> A:rec for n=2.." + std::to_string(max_rank);
    lines.push_back(l);
  }

  const SeriesTag finite[] = {SeriesTag::A, SeriesTag::B, SeriesTag::C, SeriesTag::D};
  for (SeriesTag s : finite) {
    const int top = s == SeriesTag::A ? 5 : 4;
    const int lo = s == SeriesTag::D ? 2 : 1;
    Line pot{"diagram potential " + to_string(s), true, ""};
    Line rel{"relations " + to_string(s), true, ""};
    int relcount = 0;
    int mutations = 0;
    for (int n = lo; n <= top; ++n) {
      ComposedKernel ch = wavefunction_chain(s, n);
      Diagram d = build_diagram(s, n);
      if (!(diagram_potential(d) == unit_couplings(ch.total_phase())) ||
          !(diagram_potential(build_diagram(s, n, true)) == ch.total_phase())) {
        pot.pass = false;
        pot.detail += "n=" + std::to_string(n) + " differs; ";
      }
      auto rs = relations(s, n);
      for (const auto& r : rs) {
        ++relcount;
        if (!verify_relation(d, r)) {
          rel.pass = false;
          rel.detail += "n=" + std::to_string(n) + " " + to_string(r) + " fails; ";
        }
      }
      // Every single-arrow mutation must break some relation.
      for (std::size_t a = 0; a < d.arrows.size(); ++a) {
        auto pos = std::find(d.vertices.begin(), d.vertices.end(), d.arrows[a].head) - d.vertices.begin();
        Diagram m = mutate(d, a, d.vertices[(pos + 1) % d.vertices.size()]);
        bool broken = std::any_of(rs.begin(), rs.end(), [&](const auto& r) { return !verify_relation(m, r); });
        ++mutations;
        if (!broken) {
          rel.pass = false;
          rel.detail += "n=" + std::to_string(n) + " mutation of " + d.arrows[a].label + " undetected; ";
        }
      }
    }
    if (pot.pass) pot.detail = "n=" + std::to_string(lo) + ".." + std::to_string(top);
    if (rel.pass) {
      rel.detail = std::to_string(relcount) + " relations, " + std::to_string(mutations) +
                   " mutations detected";
    }
    lines.push_back(pot);
    lines.push_back(rel);
  }

  for (SeriesTag s : {SeriesTag::B, SeriesTag::C, SeriesTag::D}) {
    Line l{"fold " + to_string(s), true, ""};
    for (int n = s == SeriesTag::D ? 2 : 1; n <= 3; ++n) {
      if (!fold(s, n).sets_equal) {
        l.pass = false;
        l.detail += "n=" + std::to_string(n) + " differs; ";
      }
    }
    if (l.pass) l.detail = "n<=3";
    lines.push_back(l);
  }

  for (SeriesTag s : finite) {
    Line l{"dimension " + to_string(s), true, ""};
    for (int n = s == SeriesTag::D ? 2 : 1; n <= max_rank; ++n) {
      // A is counted on gl_{n+1}, whose positive roots are those of A_n.
      int got = integration_dim(s, s == SeriesTag::A ? n + 1 : n);
      int want = positive_root_count(s, n);
      if (got != want) {
        l.pass = false;
        l.detail += "n=" + std::to_string(n) + " has " + std::to_string(got) + " vs " +
                    std::to_string(want) + "; ";
      }
    }
    if (l.pass) l.detail = "|R+| for n<=" + std::to_string(max_rank);
    lines.push_back(l);
  }

  {
    QuadConfig cfg = quad_config(o, 1);
    cfg.method = QuadMethod::tensor_grid;
    Line l{"numeric rank-1 oracles", true, ""};
    auto check = [&](const std::string& what, double got, double want) {
      double rel = std::abs(got - want) / std::abs(want);
      if (!(rel < 1e-6)) {
        l.pass = false;
        std::ostringstream s;
        s << what << " off by " << std::setprecision(3) << rel << "; ";
        l.detail += s.str();
      }
    };
    for (double delta : {-1.0, 0.0, 1.0}) {
      double got = wavefunction(SeriesTag::A, 2, {0.0, delta}, cfg).value;
      check("gl2 delta=" + std::to_string(delta), got, 2 * bessel_k0(2 * std::exp(delta / 2)));
    }
    check("B1", wavefunction(SeriesTag::B, 1, {0.4}, cfg).value, 2 * bessel_k0(2 * std::exp(0.2)));
    check("C1", wavefunction(SeriesTag::C, 1, {0.4}, cfg).value, 2 * bessel_k0(2 * std::exp(-0.4)));
    check("gl1", wavefunction(SeriesTag::A, 1, {0.7}, cfg).value, 1.0);
    NumericResidual r = hamiltonian_residual_numeric(SeriesTag::A, 2, {0.0, 0.0}, 1e-3, cfg);
    if (!(r.residual < 1e-6)) {
      l.pass = false;
      l.detail += "gl2 residual " + std::to_string(r.residual) + "; ";
    }
    if (l.pass) l.detail = "gl1, gl2, B1, C1 within 1e-6";
    lines.push_back(l);
  }

  bool ok = true;
  std::size_t width = 0;
  for (const auto& l : lines) width = std::max(width, l.name.size());
  Json arr = Json::array();
  for (const auto& l : lines) {
    ok = ok && l.pass;
    arr.push_back({{"check", l.name}, {"pass", l.pass}, {"detail", l.detail}});
  }
  if (o.json) {
    out << arr.dump(2) << "\n";
  } else {
    for (const auto& l : lines) {
      out << (l.pass ? "PASS  " : "FAIL  ") << std::left << std::setw(static_cast<int>(width) + 2)
          << l.name << l.detail << "\n";
    }
  }

  bool any_deviation = std::any_of(checks.begin(), checks.end(), [](const KernelCheck& c) {
    return c.deviation || (!c.pass && c.solution);
  });
  if (any_deviation) {
    std::ofstream f(o.deviations);
    if (!f) {
      err << "cannot write " << o.deviations << "\n";
      return 2;
    }
    f << deviations_markdown(checks);
    err << "wrote " << o.deviations << "\n";
  }
  return ok ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out_stream, std::ostream& err) {
  CLI::App app{"Toda chain intertwiners, Givental diagrams and wave-function quadrature", "todaq"};
  app.require_subcommand(1);
  Options o;

  auto kernel_opt = [&](CLI::App* c) { c->add_option("--kernel", o.kernel, "kernel id (see catalog)"); };
  auto rank_opt = [&](CLI::App* c) { c->add_option("--rank", o.rank, "rank; A series uses gl_n"); };
  auto series_opt = [&](CLI::App* c) { c->add_option("--series", o.series, "A, B, C, D, ..."); };
  auto out_opt = [&](CLI::App* c) {
    c->add_flag("--json", o.json, "JSON output");
    c->add_option("--out", o.out, "write output to this file");
  };
  auto quad_opts = [&](CLI::App* c) {
    c->add_option("--point", o.point, "outer coordinates v1,v2,...")->required();
    c->add_option("--method", o.method, "tensor-grid, mc, stratified-mc or auto");
    c->add_option("--samples", o.samples, "Monte Carlo samples");
    c->add_option("--nodes", o.nodes, "grid nodes per axis (odd)");
    c->add_option("--seed", o.seed, "Monte Carlo seed");
    c->add_option("--threads", o.threads, "worker threads (0: all cores)");
  };

  auto* catalog = app.add_subcommand("catalog", "list kernel ids");
  out_opt(catalog);
  auto* verify = app.add_subcommand("verify", "check one kernel's intertwining residual");
  kernel_opt(verify);
  rank_opt(verify);
  verify->add_option("--window", o.window, "window size for infinite kernels");
  out_opt(verify);
  auto* verify_all = app.add_subcommand("verify-all", "check every kernel up to --max-rank");
  verify_all->add_option("--max-rank", o.max_rank, "largest rank or window");
  out_opt(verify_all);
  auto* solve = app.add_subcommand("solve-couplings", "re-derive a kernel's phase coefficients");
  kernel_opt(solve);
  rank_opt(solve);
  out_opt(solve);
  auto* diagram = app.add_subcommand("diagram", "print a Givental diagram");
  series_opt(diagram);
  rank_opt(diagram);
  diagram->add_flag("--dot", o.dot, "Graphviz output");
  out_opt(diagram);
  auto* rels = app.add_subcommand("relations", "verify the monomial relations of a diagram");
  series_opt(rels);
  rank_opt(rels);
  out_opt(rels);
  auto* fold_cmd = app.add_subcommand("fold", "fold the ambient A diagram onto B, C or D");
  series_opt(fold_cmd);
  rank_opt(fold_cmd);
  out_opt(fold_cmd);
  auto* wavefn = app.add_subcommand("wavefn", "evaluate the wave function at a point");
  series_opt(wavefn);
  rank_opt(wavefn);
  quad_opts(wavefn);
  out_opt(wavefn);
  auto* residual = app.add_subcommand("residual", "finite-difference Hamiltonian residual");
  series_opt(residual);
  rank_opt(residual);
  quad_opts(residual);
  // -h would clash with the step flag
  residual->set_help_flag("--help", "print this help message and exit");
  residual->add_option("--h", o.h, "finite-difference step");
  out_opt(residual);
  auto* check_all = app.add_subcommand("check-all", "run every check and print a summary");
  check_all->add_option("--max-rank", o.max_rank, "largest kernel rank");
  check_all->add_option("--deviations", o.deviations, "where to write DEVIATIONS.md");
  check_all->add_option("--threads", o.threads, "worker threads (0: all cores)");
  out_opt(check_all);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out_stream << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 2;
  }

  std::ostringstream buffer;
  int code = 0;
  try {
    if (catalog->parsed()) code = cmd_catalog(o, buffer);
    else if (verify->parsed()) code = cmd_verify(o, buffer);
    else if (verify_all->parsed()) code = cmd_verify_all(o, buffer);
    else if (solve->parsed()) code = cmd_solve(o, buffer);
    else if (diagram->parsed()) code = cmd_diagram(o, buffer);
    else if (rels->parsed()) code = cmd_relations(o, buffer);
    else if (fold_cmd->parsed()) code = cmd_fold(o, buffer);
    else if (wavefn->parsed()) code = cmd_wavefn(o, buffer);
    else if (residual->parsed()) code = cmd_residual(o, buffer);
    else if (check_all->parsed()) code = cmd_check_all(o, buffer, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const UnsupportedError& e) {
    err << "unsupported: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionError& e) {
    err << "precondition: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  if (o.out.empty()) {
    out_stream << buffer.str();
  } else {
    std::ofstream f(o.out);
    if (!f) {
      err << "cannot write " << o.out << "\n";
      return 2;
    }
    f << buffer.str();
  }
  return code;
}

}  // namespace todaq::cli
