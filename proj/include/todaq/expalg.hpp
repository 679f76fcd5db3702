#pragma once

// Exact exponential polynomials: finite sums  c(g) * exp(L(v))  where c is a
// polynomial in the couplings g_i with rational coefficients and L is a
// linear form in the chain variables with rational coefficients.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace todaq {

using Rational = mpq_class;

Rational frac(long num, long den);
std::string to_string(const Rational& q);  // always "p/q"
Rational parse_rational(std::string_view text);

using CouplingIndex = int;

class GMonomial {
 public:
  GMonomial() = default;
  explicit GMonomial(const std::map<CouplingIndex, int>& exps);

  static GMonomial g(CouplingIndex i, int power = 1);

  const std::map<CouplingIndex, int>& exponents() const { return exps_; }
  bool is_unit() const { return exps_.empty(); }
  int degree() const;
  int exponent(CouplingIndex i) const;
  bool divides(const GMonomial& other) const;

  GMonomial operator*(const GMonomial& o) const;
  // Requires divides(o, *this).
  GMonomial operator/(const GMonomial& o) const;

  auto operator<=>(const GMonomial&) const = default;
  bool operator==(const GMonomial&) const = default;

 private:
  std::map<CouplingIndex, int> exps_;
};

class CoefPoly {
 public:
  CoefPoly() = default;
  CoefPoly(const Rational& q);  // NOLINT: constants convert implicitly
  CoefPoly(int q);              // NOLINT

  static CoefPoly monomial(const Rational& q, const GMonomial& m);
  static CoefPoly g(CouplingIndex i, int power = 1);

  const std::map<GMonomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  // Set iff the polynomial has no coupling dependence.
  std::optional<Rational> as_rational() const;
  std::set<CouplingIndex> couplings() const;

  void add_term(const GMonomial& m, const Rational& q);

  CoefPoly operator+(const CoefPoly& o) const;
  CoefPoly operator-(const CoefPoly& o) const;
  CoefPoly operator*(const CoefPoly& o) const;
  CoefPoly operator-() const;
  CoefPoly& operator+=(const CoefPoly& o);

  bool operator==(const CoefPoly& o) const { return terms_ == o.terms_; }
  bool operator<(const CoefPoly& o) const;

  CoefPoly substitute(CouplingIndex i, const CoefPoly& value) const;
  double eval(const std::map<CouplingIndex, double>& g) const;

 private:
  std::map<GMonomial, Rational> terms_;
};

// Exact division in Q[g]; nullopt when den does not divide num.
std::optional<CoefPoly> exact_divide(const CoefPoly& num, const CoefPoly& den);

enum class Family : std::uint8_t { x, y, z, e };

char family_char(Family f);
Family parse_family(char c);

struct VarId {
  Family family = Family::x;
  int level = 0;
  int index = 1;
  auto operator<=>(const VarId&) const = default;
};

std::string to_string(const VarId& v);  // "x.2.1"
VarId parse_var(std::string_view text);

class LinForm {
 public:
  LinForm() = default;
  static LinForm var(const VarId& v, const Rational& c = 1);

  const std::map<VarId, Rational>& coeffs() const { return coeffs_; }
  Rational coeff(const VarId& v) const;
  bool is_zero() const { return coeffs_.empty(); }
  bool involves(const VarId& v) const { return coeffs_.count(v) != 0; }
  std::vector<VarId> support() const;

  void add(const VarId& v, const Rational& c);
  LinForm operator+(const LinForm& o) const;
  LinForm operator-(const LinForm& o) const;
  LinForm operator-() const;
  LinForm operator*(const Rational& c) const;
  LinForm& operator+=(const LinForm& o);

  bool operator==(const LinForm& o) const { return coeffs_ == o.coeffs_; }
  bool operator!=(const LinForm& o) const { return !(*this == o); }
  bool operator<(const LinForm& o) const;

 private:
  std::map<VarId, Rational> coeffs_;
};

LinForm operator+(const VarId& a, const VarId& b);
LinForm operator-(const VarId& a, const VarId& b);
LinForm operator-(const VarId& a);

class ExpPoly {
 public:
  using TermMap = std::map<LinForm, CoefPoly>;

  ExpPoly() = default;
  static ExpPoly term(const CoefPoly& c, const LinForm& exponent);
  static ExpPoly exp(const LinForm& exponent) { return term(1, exponent); }
  static ExpPoly constant(const CoefPoly& c) { return term(c, LinForm{}); }

  const TermMap& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  CoefPoly coefficient(const LinForm& exponent) const;
  std::set<VarId> variables() const;
  std::set<CouplingIndex> couplings() const;

  void add_term(const LinForm& exponent, const CoefPoly& c);

  ExpPoly operator+(const ExpPoly& o) const;
  ExpPoly operator-(const ExpPoly& o) const;
  ExpPoly operator*(const ExpPoly& o) const;
  ExpPoly operator-() const;
  ExpPoly& operator+=(const ExpPoly& o);
  ExpPoly& operator-=(const ExpPoly& o);

  bool operator==(const ExpPoly& o) const { return terms_ == o.terms_; }

  ExpPoly filter(const std::function<bool(const LinForm&, const CoefPoly&)>& keep) const;

 private:
  TermMap terms_;
};

ExpPoly add(const ExpPoly& a, const ExpPoly& b);
ExpPoly mul(const ExpPoly& a, const ExpPoly& b);
ExpPoly derivative(const ExpPoly& f, const VarId& v);
ExpPoly substitute_coupling(const ExpPoly& f, CouplingIndex i, const Rational& value);
ExpPoly substitute_coupling(const ExpPoly& f, CouplingIndex i, const CoefPoly& value);
double eval_numeric(const ExpPoly& f, const std::map<VarId, double>& vars,
                    const std::map<CouplingIndex, double>& couplings);

ExpPoly rename_vars(const ExpPoly& f, const std::function<VarId(const VarId&)>& rename);
// Substitutes e^{v} -> lambda * e^{v}; needs integral coefficients on v.
ExpPoly scale_var(const ExpPoly& f, const VarId& v, const Rational& lambda);

// Human-readable rendering, e.g. "g1*e^(x.1.1 - x.2.1) + 2*e^(z.1.1)".
std::string to_string(const GMonomial& m);
std::string to_string(const CoefPoly& c);
std::string to_string(const LinForm& l);
std::string to_string(const ExpPoly& f);

}  // namespace todaq
