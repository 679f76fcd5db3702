#include "todaq/expalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "todaq/error.hpp"

namespace todaq {

Rational frac(long num, long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto valid_int = [](const std::string& t) {
    std::size_t i = (!t.empty() && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
    if (i >= t.size()) return false;
    return std::all_of(t.begin() + static_cast<long>(i), t.end(),
                       [](char c) { return c >= '0' && c <= '9'; });
  };
  auto slash = s.find('/');
  std::string num = s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!valid_int(num) || !valid_int(den) || den[0] == '-' || den[0] == '+') {
    throw ParseError("malformed rational '" + s + "'", 0);
  }
  if (num[0] == '+') num.erase(0, 1);
  mpz_class n(num, 10);
  mpz_class d(den, 10);
  if (d == 0) throw ParseError("zero denominator in '" + s + "'", slash + 1);
  Rational q(n, d);
  q.canonicalize();
  return q;
}

// ---------------------------------------------------------------- GMonomial

GMonomial::GMonomial(const std::map<CouplingIndex, int>& exps) {
  for (auto [i, e] : exps) {
    if (i < 0) throw Error("negative coupling index");
    if (e < 0) throw Error("negative coupling exponent");
    if (e > 0) exps_[i] = e;
  }
}

GMonomial GMonomial::g(CouplingIndex i, int power) { return GMonomial(std::map<CouplingIndex, int>{{i, power}}); }

int GMonomial::degree() const {
  int d = 0;
  for (auto [i, e] : exps_) d += e;
  return d;
}

int GMonomial::exponent(CouplingIndex i) const {
  auto it = exps_.find(i);
  return it == exps_.end() ? 0 : it->second;
}

bool GMonomial::divides(const GMonomial& other) const {
  for (auto [i, e] : exps_) {
    if (other.exponent(i) < e) return false;
  }
  return true;
}

GMonomial GMonomial::operator*(const GMonomial& o) const {
  GMonomial r = *this;
  for (auto [i, e] : o.exps_) r.exps_[i] += e;
  return r;
}

GMonomial GMonomial::operator/(const GMonomial& o) const {
  if (!o.divides(*this)) throw Error("monomial division is not exact");
  GMonomial r = *this;
  for (auto [i, e] : o.exps_) {
    auto& slot = r.exps_[i];
    slot -= e;
    if (slot == 0) r.exps_.erase(i);
  }
  return r;
}

// ---------------------------------------------------------------- CoefPoly

CoefPoly::CoefPoly(const Rational& q) {
  if (q != 0) terms_[GMonomial{}] = q;
}

CoefPoly::CoefPoly(int q) : CoefPoly(Rational(q)) {}

CoefPoly CoefPoly::monomial(const Rational& q, const GMonomial& m) {
  CoefPoly c;
  c.add_term(m, q);
  return c;
}

CoefPoly CoefPoly::g(CouplingIndex i, int power) {
  return monomial(1, GMonomial::g(i, power));
}

std::optional<Rational> CoefPoly::as_rational() const {
  if (terms_.empty()) return Rational(0);
  if (terms_.size() == 1 && terms_.begin()->first.is_unit()) return terms_.begin()->second;
  return std::nullopt;
}

std::set<CouplingIndex> CoefPoly::couplings() const {
  std::set<CouplingIndex> out;
  for (const auto& [m, q] : terms_) {
    for (auto [i, e] : m.exponents()) out.insert(i);
  }
  return out;
}

void CoefPoly::add_term(const GMonomial& m, const Rational& q) {
  if (q == 0) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, q);
    return;
  }
  it->second += q;
  if (it->second == 0) terms_.erase(it);
}

CoefPoly CoefPoly::operator+(const CoefPoly& o) const {
  CoefPoly r = *this;
  r += o;
  return r;
}

CoefPoly& CoefPoly::operator+=(const CoefPoly& o) {
  for (const auto& [m, q] : o.terms_) add_term(m, q);
  return *this;
}

CoefPoly CoefPoly::operator-(const CoefPoly& o) const { return *this + (-o); }

CoefPoly CoefPoly::operator-() const {
  CoefPoly r = *this;
  for (auto& [m, q] : r.terms_) q = -q;
  return r;
}

CoefPoly CoefPoly::operator*(const CoefPoly& o) const {
  CoefPoly r;
  for (const auto& [m1, q1] : terms_) {
    for (const auto& [m2, q2] : o.terms_) r.add_term(m1 * m2, q1 * q2);
  }
  return r;
}

bool CoefPoly::operator<(const CoefPoly& o) const {
  return std::lexicographical_compare(
      terms_.begin(), terms_.end(), o.terms_.begin(), o.terms_.end(),
      [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
      });
}

CoefPoly CoefPoly::substitute(CouplingIndex i, const CoefPoly& value) const {
  CoefPoly r;
  for (const auto& [m, q] : terms_) {
    int e = m.exponent(i);
    if (e == 0) {
      r.add_term(m, q);
      continue;
    }
    std::map<CouplingIndex, int> rest = m.exponents();
    rest.erase(i);
    CoefPoly piece = monomial(q, GMonomial(rest));
    for (int k = 0; k < e; ++k) piece = piece * value;
    r += piece;
  }
  return r;
}

double CoefPoly::eval(const std::map<CouplingIndex, double>& g) const {
  double total = 0.0;
  for (const auto& [m, q] : terms_) {
    double t = q.get_d();
    for (auto [i, e] : m.exponents()) {
      auto it = g.find(i);
      if (it == g.end()) throw UnboundSymbolError("unbound coupling g" + std::to_string(i));
      t *= std::pow(it->second, e);
    }
    total += t;
  }
  return total;
}

namespace {

// Graded lexicographic order, used only to pick leading terms in division.
bool grlex_less(const GMonomial& a, const GMonomial& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  auto ia = a.exponents().begin();
  auto ib = b.exponents().begin();
  for (; ia != a.exponents().end() && ib != b.exponents().end(); ++ia, ++ib) {
    if (ia->first != ib->first) return ia->first > ib->first;
    if (ia->second != ib->second) return ia->second < ib->second;
  }
  return ia == a.exponents().end() && ib != b.exponents().end();
}

std::pair<GMonomial, Rational> leading(const CoefPoly& p) {
  auto best = p.terms().begin();
  for (auto it = p.terms().begin(); it != p.terms().end(); ++it) {
    if (grlex_less(best->first, it->first)) best = it;
  }
  return *best;
}

}  // namespace

std::optional<CoefPoly> exact_divide(const CoefPoly& num, const CoefPoly& den) {
  if (den.is_zero()) return std::nullopt;
  CoefPoly rem = num;
  CoefPoly quot;
  auto [lm, lc] = leading(den);
  while (!rem.is_zero()) {
    auto [rm, rc] = leading(rem);
    if (!lm.divides(rm)) return std::nullopt;
    Rational qc = rc / lc;
    CoefPoly t = CoefPoly::monomial(qc, rm / lm);
    quot += t;
    rem = rem - t * den;
  }
  return quot;
}

// ---------------------------------------------------------------- VarId

char family_char(Family f) {
  switch (f) {
    case Family::x: return 'x';
    case Family::y: return 'y';
    case Family::z: return 'z';
    case Family::e: return 'e';
  }
  return '?';
}

Family parse_family(char c) {
  switch (c) {
    case 'x': return Family::x;
    case 'y': return Family::y;
    case 'z': return Family::z;
    case 'e': return Family::e;
    default: throw ParseError(std::string("unknown variable family '") + c + "'", 0);
  }
}

std::string to_string(const VarId& v) {
  return std::string(1, family_char(v.family)) + "." + std::to_string(v.level) + "." +
         std::to_string(v.index);
}

VarId parse_var(std::string_view text) {
  std::string s(text);
  auto d1 = s.find('.');
  auto d2 = d1 == std::string::npos ? d1 : s.find('.', d1 + 1);
  if (d1 != 1 || d2 == std::string::npos) throw ParseError("malformed variable '" + s + "'", 0);
  VarId v;
  v.family = parse_family(s[0]);
  try {
    std::size_t used = 0;
    std::string lv = s.substr(d1 + 1, d2 - d1 - 1);
    std::string ix = s.substr(d2 + 1);
    v.level = std::stoi(lv, &used);
    if (used != lv.size()) throw ParseError("malformed variable level in '" + s + "'", d1 + 1);
    v.index = std::stoi(ix, &used);
    if (used != ix.size()) throw ParseError("malformed variable index in '" + s + "'", d2 + 1);
  } catch (const std::logic_error&) {
    throw ParseError("malformed variable '" + s + "'", 0);
  }
  if (v.level < 0 || v.index < 1) throw ParseError("variable out of range '" + s + "'", 0);
  return v;
}

// ---------------------------------------------------------------- LinForm

LinForm LinForm::var(const VarId& v, const Rational& c) {
  LinForm l;
  l.add(v, c);
  return l;
}

Rational LinForm::coeff(const VarId& v) const {
  auto it = coeffs_.find(v);
  return it == coeffs_.end() ? Rational(0) : it->second;
}

std::vector<VarId> LinForm::support() const {
  std::vector<VarId> out;
  for (const auto& [v, c] : coeffs_) out.push_back(v);
  return out;
}

void LinForm::add(const VarId& v, const Rational& c) {
  if (c == 0) return;
  auto it = coeffs_.find(v);
  if (it == coeffs_.end()) {
    coeffs_.emplace(v, c);
    return;
  }
  it->second += c;
  if (it->second == 0) coeffs_.erase(it);
}

LinForm& LinForm::operator+=(const LinForm& o) {
  for (const auto& [v, c] : o.coeffs_) add(v, c);
  return *this;
}

LinForm LinForm::operator+(const LinForm& o) const {
  LinForm r = *this;
  r += o;
  return r;
}

LinForm LinForm::operator-() const { return *this * Rational(-1); }

LinForm LinForm::operator-(const LinForm& o) const { return *this + (-o); }

LinForm LinForm::operator*(const Rational& c) const {
  if (c == 0) return {};
  LinForm r = *this;
  for (auto& [v, q] : r.coeffs_) q *= c;
  return r;
}

bool LinForm::operator<(const LinForm& o) const {
  return std::lexicographical_compare(
      coeffs_.begin(), coeffs_.end(), o.coeffs_.begin(), o.coeffs_.end(),
      [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second < b.second;
      });
}

LinForm operator+(const VarId& a, const VarId& b) { return LinForm::var(a) + LinForm::var(b); }
LinForm operator-(const VarId& a, const VarId& b) { return LinForm::var(a) - LinForm::var(b); }
LinForm operator-(const VarId& a) { return LinForm::var(a, -1); }

// ---------------------------------------------------------------- ExpPoly

ExpPoly ExpPoly::term(const CoefPoly& c, const LinForm& exponent) {
  ExpPoly f;
  f.add_term(exponent, c);
  return f;
}

CoefPoly ExpPoly::coefficient(const LinForm& exponent) const {
  auto it = terms_.find(exponent);
  return it == terms_.end() ? CoefPoly{} : it->second;
}

std::set<VarId> ExpPoly::variables() const {
  std::set<VarId> out;
  for (const auto& [l, c] : terms_) {
    for (const auto& [v, q] : l.coeffs()) out.insert(v);
  }
  return out;
}

std::set<CouplingIndex> ExpPoly::couplings() const {
  std::set<CouplingIndex> out;
  for (const auto& [l, c] : terms_) {
    auto cs = c.couplings();
    out.insert(cs.begin(), cs.end());
  }
  return out;
}

void ExpPoly::add_term(const LinForm& exponent, const CoefPoly& c) {
  if (c.is_zero()) return;
  auto it = terms_.find(exponent);
  if (it == terms_.end()) {
    terms_.emplace(exponent, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

ExpPoly& ExpPoly::operator+=(const ExpPoly& o) {
  for (const auto& [l, c] : o.terms_) add_term(l, c);
  return *this;
}

ExpPoly& ExpPoly::operator-=(const ExpPoly& o) {
  for (const auto& [l, c] : o.terms_) add_term(l, -c);
  return *this;
}

ExpPoly ExpPoly::operator+(const ExpPoly& o) const {
  ExpPoly r = *this;
  r += o;
  return r;
}

ExpPoly ExpPoly::operator-(const ExpPoly& o) const {
  ExpPoly r = *this;
  r -= o;
  return r;
}

ExpPoly ExpPoly::operator-() const {
  ExpPoly r;
  for (const auto& [l, c] : terms_) r.terms_.emplace(l, -c);
  return r;
}

ExpPoly ExpPoly::operator*(const ExpPoly& o) const {
  ExpPoly r;
  for (const auto& [l1, c1] : terms_) {
    for (const auto& [l2, c2] : o.terms_) r.add_term(l1 + l2, c1 * c2);
  }
  return r;
}

ExpPoly ExpPoly::filter(const std::function<bool(const LinForm&, const CoefPoly&)>& keep) const {
  ExpPoly r;
  for (const auto& [l, c] : terms_) {
    if (keep(l, c)) r.terms_.emplace(l, c);
  }
  return r;
}

ExpPoly add(const ExpPoly& a, const ExpPoly& b) { return a + b; }
ExpPoly mul(const ExpPoly& a, const ExpPoly& b) { return a * b; }

ExpPoly derivative(const ExpPoly& f, const VarId& v) {
  ExpPoly r;
  for (const auto& [l, c] : f.terms()) {
    Rational k = l.coeff(v);
    if (k != 0) r.add_term(l, c * CoefPoly(k));
  }
  return r;
}

ExpPoly substitute_coupling(const ExpPoly& f, CouplingIndex i, const CoefPoly& value) {
  ExpPoly r;
  for (const auto& [l, c] : f.terms()) r.add_term(l, c.substitute(i, value));
  return r;
}

ExpPoly substitute_coupling(const ExpPoly& f, CouplingIndex i, const Rational& value) {
  return substitute_coupling(f, i, CoefPoly(value));
}

double eval_numeric(const ExpPoly& f, const std::map<VarId, double>& vars,
                    const std::map<CouplingIndex, double>& couplings) {
  double total = 0.0;
  for (const auto& [l, c] : f.terms()) {
    double arg = 0.0;
    for (const auto& [v, q] : l.coeffs()) {
      auto it = vars.find(v);
      if (it == vars.end()) throw UnboundSymbolError("unbound variable " + to_string(v));
      arg += q.get_d() * it->second;
    }
    total += c.eval(couplings) * std::exp(arg);
  }
  return total;
}

ExpPoly rename_vars(const ExpPoly& f, const std::function<VarId(const VarId&)>& rename) {
  ExpPoly r;
  for (const auto& [l, c] : f.terms()) {
    LinForm nl;
    for (const auto& [v, q] : l.coeffs()) nl.add(rename(v), q);
    r.add_term(nl, c);
  }
  return r;
}

ExpPoly scale_var(const ExpPoly& f, const VarId& v, const Rational& lambda) {
  if (lambda == 0) throw Error("scale_var needs a nonzero factor");
  ExpPoly r;
  for (const auto& [l, c] : f.terms()) {
    Rational k = l.coeff(v);
    if (k.get_den() != 1) throw Error("scale_var needs integral exponents on " + to_string(v));
    long e = k.get_num().get_si();
    Rational factor = 1;
    Rational base = e >= 0 ? lambda : Rational(1 / lambda);
    for (long j = 0; j < std::labs(e); ++j) factor *= base;
    r.add_term(l, c * CoefPoly(factor));
  }
  return r;
}

// ---------------------------------------------------------------- printing

namespace {

std::string rational_text(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return to_string(q);
}

}  // namespace

std::string to_string(const GMonomial& m) {
  if (m.is_unit()) return "1";
  std::string s;
  for (auto [i, e] : m.exponents()) {
    if (!s.empty()) s += "*";
    s += "g" + std::to_string(i);
    if (e != 1) s += "^" + std::to_string(e);
  }
  return s;
}

std::string to_string(const CoefPoly& c) {
  if (c.is_zero()) return "0";
  std::string s;
  for (const auto& [m, q] : c.terms()) {
    Rational a = abs(q);
    bool neg = q < 0;
    if (s.empty()) {
      if (neg) s += "-";
    } else {
      s += neg ? " - " : " + ";
    }
    if (m.is_unit()) {
      s += rational_text(a);
    } else if (a == 1) {
      s += to_string(m);
    } else {
      s += rational_text(a) + "*" + to_string(m);
    }
  }
  return s;
}

std::string to_string(const LinForm& l) {
  if (l.is_zero()) return "0";
  std::string s;
  for (const auto& [v, q] : l.coeffs()) {
    Rational a = abs(q);
    bool neg = q < 0;
    if (s.empty()) {
      if (neg) s += "-";
    } else {
      s += neg ? " - " : " + ";
    }
    if (a != 1) s += rational_text(a) + "*";
    s += to_string(v);
  }
  return s;
}

std::string to_string(const ExpPoly& f) {
  if (f.is_zero()) return "0";
  std::string s;
  for (const auto& [l, c] : f.terms()) {
    std::string cs = to_string(c);
    if (!s.empty()) s += " + ";
    if (l.is_zero()) {
      s += c.size() > 1 ? "(" + cs + ")" : cs;
      continue;
    }
    if (cs == "1") {
      cs.clear();
    } else if (cs == "-1") {
      cs = "-";
    } else if (c.size() > 1) {
      cs = "(" + cs + ")*";
    } else {
      cs += "*";
    }
    s += cs + "e^(" + to_string(l) + ")";
  }
  return s;
}

}  // namespace todaq
