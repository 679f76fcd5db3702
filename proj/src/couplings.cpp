#include "todaq/couplings.hpp"

#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "todaq/linalg.hpp"

namespace todaq {

namespace {

using linalg::QMat;
using linalg::QVec;

bool is_unknown(CouplingIndex i) { return i >= kUnknownBase; }

std::string render(const CoefPoly& c) {
  if (c.is_zero()) return "0";
  std::ostringstream out;
  bool first = true;
  for (const auto& [m, q] : c.terms()) {
    Rational a = q;
    if (!first) out << (a < 0 ? " - " : " + ");
    if (first && a < 0) out << "-";
    a = abs(a);
    first = false;
    bool need_star = false;
    if (a != 1 || m.is_unit()) {
      out << a.get_str();
      need_star = true;
    }
    for (const auto& [i, e] : m.exponents()) {
      if (need_star) out << "*";
      if (is_unknown(i)) {
        out << "u" << (i - kUnknownBase);
      } else {
        out << "g" << i;
      }
      if (e != 1) out << "^" << e;
      need_star = true;
    }
  }
  return out.str();
}

std::map<long, int> factor(mpz_class n) {
  std::map<long, int> f;
  if (n < 0) n = -n;
  for (long p = 2; n > 1 && mpz_class(p) * p <= n; ++p) {
    while (n % p == 0) {
      ++f[p];
      n /= p;
    }
  }
  if (n > 1) f[n.get_si()] += 1;
  return f;
}

// |q| = prod_p p^{v_p}
std::map<long, int> valuations(const Rational& q) {
  auto v = factor(q.get_num());
  for (auto [p, e] : factor(q.get_den())) v[p] -= e;
  return v;
}

// Two-group residual equation  u^{d} = sign * prod p^{pv} * prod g^{gv}.
struct LogEq {
  std::map<int, int> d;
  std::map<int, int> gv;
  std::map<long, int> pv;
  int sign = 0;  // 1 when the ratio is negative
  std::string text;
};

struct Printed {
  bool monomial = false;
  std::map<int, int> gv;
  std::map<long, int> pv;
  int sign = 0;
};

Printed analyse_printed(const CoefPoly& c) {
  Printed p;
  if (c.size() != 1) return p;
  const auto& [m, q] = *c.terms().begin();
  p.monomial = true;
  for (auto [i, e] : m.exponents()) p.gv[i] = e;
  p.pv = valuations(q);
  p.sign = q < 0 ? 1 : 0;
  return p;
}

struct Component {
  bool ok = false;
  QVec x;
  std::vector<int> conflict;
};

Component solve_q(const QMat& a, const QVec& b, std::size_t cols,
                  const std::vector<std::optional<Rational>>& pref) {
  Component out;
  auto first = linalg::solve(a, b, cols);
  if (!first.consistent) {
    std::vector<int> active;
    for (std::size_t r = 0; r < a.size(); ++r) active.push_back(static_cast<int>(r));
    for (std::size_t k = 0; k < active.size();) {
      QMat sa;
      QVec sb;
      for (std::size_t j = 0; j < active.size(); ++j) {
        if (j == k) continue;
        sa.push_back(a[active[j]]);
        sb.push_back(b[active[j]]);
      }
      if (!linalg::solve(sa, sb, cols).consistent) {
        active.erase(active.begin() + static_cast<long>(k));
      } else {
        ++k;
      }
    }
    out.conflict = active;
    return out;
  }
  QMat ra = a;
  QVec rb = b;
  for (std::size_t t = 0; t < cols; ++t) {
    if (!pref[t]) continue;
    QVec row(cols, Rational(0));
    row[t] = 1;
    ra.push_back(row);
    rb.push_back(*pref[t]);
    if (!linalg::solve(ra, rb, cols).consistent) {
      ra.pop_back();
      rb.pop_back();
    }
  }
  out.ok = true;
  out.x = linalg::solve(ra, rb, cols).x;
  return out;
}

Component solve_f2(const linalg::BitMat& a, const linalg::BitVec& b, std::size_t cols,
                   const std::vector<std::optional<int>>& pref) {
  Component out;
  auto first = linalg::solve_gf2(a, b, cols);
  if (!first.consistent) {
    for (std::size_t r = 0; r < first.certificate.size(); ++r) {
      if (first.certificate[r]) out.conflict.push_back(static_cast<int>(r));
    }
    return out;
  }
  linalg::BitMat ra = a;
  linalg::BitVec rb = b;
  for (std::size_t t = 0; t < cols; ++t) {
    if (!pref[t]) continue;
    linalg::BitVec row(cols, 0);
    row[t] = 1;
    ra.push_back(row);
    rb.push_back(*pref[t]);
    if (!linalg::solve_gf2(ra, rb, cols).consistent) {
      ra.pop_back();
      rb.pop_back();
    }
  }
  out.ok = true;
  auto s = linalg::solve_gf2(ra, rb, cols);
  for (int v : s.x) out.x.push_back(Rational(v));
  return out;
}

ExpPoly with_unknowns(const std::vector<LinForm>& exps) {
  ExpPoly f;
  for (std::size_t t = 0; t < exps.size(); ++t) {
    f.add_term(exps[t], CoefPoly::g(kUnknownBase + static_cast<int>(t)));
  }
  return f;
}

}  // namespace

KernelSpec CouplingSolution::corrected(const KernelSpec& k) const {
  KernelSpec r = k;
  if (solved.empty()) return r;
  r.phase = ExpPoly{};
  for (std::size_t t = 0; t < exponents.size(); ++t) r.phase.add_term(exponents[t], solved[t]);
  return r;
}

CouplingSolution solve_couplings(const KernelSpec& k) {
  CouplingSolution sol;
  for (const auto& [l, c] : k.phase.terms()) {
    sol.exponents.push_back(l);
    sol.printed.push_back(c);
  }
  const std::size_t T = sol.exponents.size();

  KernelSpec probe = k;
  probe.phase = with_unknowns(sol.exponents);
  ExpPoly residual = intertwining_residual(probe).value;

  std::vector<LogEq> eqs;
  for (const auto& [l, c] : residual.terms()) {
    std::map<GMonomial, CoefPoly> groups;
    for (const auto& [m, q] : c.terms()) {
      std::map<CouplingIndex, int> u;
      std::map<CouplingIndex, int> g;
      for (auto [i, e] : m.exponents()) (is_unknown(i) ? u : g)[i] = e;
      groups[GMonomial(u)].add_term(GMonomial(g), q);
    }
    std::string where = "e^(" + to_string(l) + "): " + render(c) + " = 0";
    if (groups.size() == 1) {
      const auto& [um, gc] = *groups.begin();
      if (um.is_unit()) {
        sol.unmatched.push_back(to_string(ExpPoly::term(gc, l)));
      } else {
        sol.conflict.push_back(where + " has a single product of unknowns");
      }
      continue;
    }
    if (groups.size() != 2) {
      sol.notes.push_back("not binomial, checked after solving: " + where);
      continue;
    }
    auto it = groups.begin();
    const auto& [m1, c1] = *it++;
    const auto& [m2, c2] = *it;
    if (c1.size() != 1 || c2.size() != 1) {
      sol.notes.push_back("coefficient not a monomial, checked after solving: " + where);
      continue;
    }
    const auto& [a1, q1] = *c1.terms().begin();
    const auto& [a2, q2] = *c2.terms().begin();
    // c1 u^{m1} + c2 u^{m2} = 0  =>  u^{m1 - m2} = -(q2/q1) g^{a2 - a1}
    LogEq eq;
    for (auto [i, e] : m1.exponents()) eq.d[i - kUnknownBase] += e;
    for (auto [i, e] : m2.exponents()) eq.d[i - kUnknownBase] -= e;
    for (auto [i, e] : a2.exponents()) eq.gv[i] += e;
    for (auto [i, e] : a1.exponents()) eq.gv[i] -= e;
    Rational ratio = -q2 / q1;
    eq.pv = valuations(ratio);
    eq.sign = ratio < 0 ? 1 : 0;
    eq.text = where;
    eqs.push_back(eq);
  }

  std::vector<Printed> printed;
  std::set<int> gset;
  std::set<long> pset;
  for (const auto& c : sol.printed) {
    printed.push_back(analyse_printed(c));
    for (auto [i, e] : printed.back().gv) gset.insert(i);
    for (auto [p, e] : printed.back().pv) pset.insert(p);
  }
  for (const auto& e : eqs) {
    for (auto [i, v] : e.gv) gset.insert(i);
    for (auto [p, v] : e.pv) pset.insert(p);
  }

  QMat d(eqs.size(), QVec(T, Rational(0)));
  linalg::BitMat d2(eqs.size(), linalg::BitVec(T, 0));
  for (std::size_t r = 0; r < eqs.size(); ++r) {
    for (auto [t, e] : eqs[r].d) {
      d[r][t] = e;
      d2[r][t] = ((e % 2) + 2) % 2;
    }
  }

  std::vector<std::map<int, Rational>> gexp(T);
  std::vector<std::map<long, Rational>> pexp(T);
  std::vector<int> signs(T, 0);
  std::set<int> conflict_rows;

  for (int i : gset) {
    QVec b;
    for (const auto& e : eqs) b.push_back(e.gv.count(i) ? e.gv.at(i) : 0);
    std::vector<std::optional<Rational>> pref(T);
    for (std::size_t t = 0; t < T; ++t) {
      if (printed[t].monomial) pref[t] = printed[t].gv.count(i) ? printed[t].gv.at(i) : 0;
    }
    auto c = solve_q(d, b, T, pref);
    if (!c.ok) conflict_rows.insert(c.conflict.begin(), c.conflict.end());
    for (std::size_t t = 0; t < c.x.size(); ++t) gexp[t][i] = c.x[t];
  }
  for (long p : pset) {
    QVec b;
    for (const auto& e : eqs) b.push_back(e.pv.count(p) ? e.pv.at(p) : 0);
    std::vector<std::optional<Rational>> pref(T);
    for (std::size_t t = 0; t < T; ++t) {
      if (printed[t].monomial) pref[t] = printed[t].pv.count(p) ? printed[t].pv.at(p) : 0;
    }
    auto c = solve_q(d, b, T, pref);
    if (!c.ok) conflict_rows.insert(c.conflict.begin(), c.conflict.end());
    for (std::size_t t = 0; t < c.x.size(); ++t) pexp[t][p] = c.x[t];
  }
  {
    linalg::BitVec b;
    for (const auto& e : eqs) b.push_back(e.sign);
    std::vector<std::optional<int>> pref(T);
    for (std::size_t t = 0; t < T; ++t) {
      if (printed[t].monomial) pref[t] = printed[t].sign;
    }
    auto c = solve_f2(d2, b, T, pref);
    if (!c.ok) conflict_rows.insert(c.conflict.begin(), c.conflict.end());
    for (std::size_t t = 0; t < c.x.size(); ++t) signs[t] = c.x[t] != 0 ? 1 : 0;
  }
  for (int r : conflict_rows) sol.conflict.push_back(eqs[r].text);

  if (!sol.unmatched.empty() || !sol.conflict.empty()) return sol;

  for (std::size_t t = 0; t < T; ++t) {
    std::map<CouplingIndex, int> mono;
    Rational q = signs[t] ? -1 : 1;
    bool representable = true;
    for (const auto& [i, f] : gexp[t]) {
      if (f.get_den() != 1 || f < 0) {
        representable = false;
        continue;
      }
      if (f != 0) mono[i] = static_cast<int>(f.get_num().get_si());
    }
    for (const auto& [p, e] : pexp[t]) {
      if (e.get_den() != 1) {
        representable = false;
        continue;
      }
      long n = e.get_num().get_si();
      mpz_class pw;
      mpz_ui_pow_ui(pw.get_mpz_t(), static_cast<unsigned long>(p),
                    static_cast<unsigned long>(n < 0 ? -n : n));
      q = n < 0 ? Rational(q / pw) : Rational(q * pw);
    }
    if (!representable) {
      sol.conflict.push_back("coefficient of e^(" + to_string(sol.exponents[t]) +
                             ") is not a polynomial in the couplings");
    }
    sol.solved.push_back(CoefPoly::monomial(q, GMonomial(mono)));
  }
  if (!sol.conflict.empty()) {
    sol.solved.clear();
    return sol;
  }

  ExpPoly after = residual;
  for (std::size_t t = 0; t < T; ++t) {
    after = substitute_coupling(after, kUnknownBase + static_cast<int>(t), sol.solved[t]);
  }
  sol.residual_after = after;
  if (!after.is_zero()) {
    sol.conflict.push_back("substituted residual does not vanish: " + to_string(after));
    sol.solved.clear();
    return sol;
  }
  sol.consistent = true;
  for (std::size_t t = 0; t < T; ++t) {
    if (!(sol.solved[t] == sol.printed[t])) sol.deviating.push_back(t);
  }
  return sol;
}

Json to_json(const CouplingSolution& s) {
  Json terms = Json::array();
  for (std::size_t t = 0; t < s.exponents.size(); ++t) {
    Json term = {{"exp", to_json(s.exponents[t])}, {"printed", to_json(s.printed[t])}};
    if (!s.solved.empty()) term["solved"] = to_json(s.solved[t]);
    terms.push_back(term);
  }
  Json dev = Json::array();
  for (auto t : s.deviating) dev.push_back(t);
  return {{"consistent", s.consistent},
          {"terms", terms},
          {"deviating", dev},
          {"unmatched", s.unmatched},
          {"conflict", s.conflict},
          {"notes", s.notes}};
}

}  // namespace todaq
