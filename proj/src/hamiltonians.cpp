#include "todaq/hamiltonians.hpp"

#include "todaq/error.hpp"

namespace todaq {

std::vector<VarId> chain_vars(Family family, int level, int count) {
  std::vector<VarId> v;
  for (int i = 1; i <= count; ++i) v.push_back(VarId{family, level, i});
  return v;
}

namespace {

struct Builder {
  Family family;
  int level;
  ExpPoly pot;

  LinForm v(int i, int c = 1) const { return LinForm::var(VarId{family, level, i}, c); }
  void add(const CoefPoly& c, const LinForm& l) { pot.add_term(l, c); }
  static CoefPoly g(int i) { return CoefPoly::g(i); }

  // sum_{i=from}^{to} g_{i+shift} e^{v_{i+1} - v_i}
  void chain(int from, int to, int shift) {
    for (int i = from; i <= to; ++i) add(g(i + shift), v(i + 1) - v(i));
  }
  // g_1/2 (e^{v_1} + g_1 e^{2 v_1})
  void bc_bracket() {
    add(CoefPoly::monomial(frac(1, 2), GMonomial::g(1)), v(1));
    add(CoefPoly::monomial(frac(1, 2), GMonomial::g(1, 2)), v(1, 2));
  }
};

[[noreturn]] void unsupported(SeriesTag t, int n, const char* why = "") {
  throw UnsupportedError("no Hamiltonian for " + to_string(t) + " at rank " + std::to_string(n) +
                         why);
}

}  // namespace

TodaOperator hamiltonian(SeriesTag t, int n, Family family, int level, HamForm form) {
  Builder b{family, level, {}};
  using G = Builder;
  int count = n;
  bool dual = form == HamForm::dual;
  if (dual && t != SeriesTag::C && t != SeriesTag::D && t != SeriesTag::A2odd) {
    unsupported(t, n, " in dual form");
  }
  switch (t) {
    case SeriesTag::A:
      if (n < 1) unsupported(t, n);
      b.chain(1, n - 1, 0);
      break;
    case SeriesTag::B:
      if (n < 0) unsupported(t, n);
      if (n >= 1) b.add(G::g(1), b.v(1));
      b.chain(1, n - 1, 1);
      break;
    case SeriesTag::BC:
      if (n < 1) unsupported(t, n);
      b.bc_bracket();
      b.chain(1, n - 1, 1);
      break;
    case SeriesTag::C:
      if (n < 1) unsupported(t, n);
      b.chain(1, n - 1, 0);
      b.add(dual ? CoefPoly(2) * G::g(n) * G::g(n + 1) : CoefPoly(2) * G::g(n), b.v(n, -2));
      break;
    case SeriesTag::D:
      if (n < 1) unsupported(t, n);
      if (n >= 2) {
        b.chain(1, n - 1, 0);
        b.add(dual ? G::g(n) : G::g(n - 1) * G::g(n), -b.v(n) - b.v(n - 1));
      }
      break;
    case SeriesTag::A1aff:
      if (n < 2) unsupported(t, n);
      b.chain(1, n - 1, 0);
      b.add(G::g(n), b.v(1) - b.v(n));
      break;
    case SeriesTag::A2even:
      if (n < 1) unsupported(t, n);
      b.add(G::g(1), b.v(1));
      b.chain(1, n - 1, 1);
      b.add(CoefPoly(2) * G::g(n + 1) * G::g(n + 2), b.v(n, -2));
      break;
    case SeriesTag::BC2aff:
      if (n < 2) unsupported(t, n);
      b.bc_bracket();
      b.chain(1, n - 1, 1);
      b.add(G::g(n + 1), -b.v(n) - b.v(n - 1));
      break;
    case SeriesTag::A2odd:
      if (n < 2) unsupported(t, n);
      if (dual) {
        b.add(G::g(1) * G::g(2), b.v(1) + b.v(2));
        b.chain(1, n - 1, 1);
        b.add(CoefPoly(2) * G::g(n + 1), b.v(n, -2));
      } else {
        b.add(CoefPoly(2) * G::g(1), b.v(1, 2));
        b.chain(1, n - 1, 1);
        b.add(G::g(n) * G::g(n + 1), -b.v(n) - b.v(n - 1));
      }
      break;
    case SeriesTag::B1aff:
      if (n < 2) unsupported(t, n);
      b.add(G::g(1), b.v(1));
      b.chain(1, n - 1, 1);
      b.add(G::g(n) * G::g(n + 1), -b.v(n) - b.v(n - 1));
      break;
    case SeriesTag::BC1aff:
      if (n < 1) unsupported(t, n);
      b.bc_bracket();
      b.chain(1, n - 1, 1);
      b.add(CoefPoly(2) * G::g(n + 1), b.v(n, -2));
      break;
    case SeriesTag::C1aff:
      if (n < 1) unsupported(t, n);
      b.add(CoefPoly(2) * G::g(1), b.v(1, 2));
      b.chain(1, n - 1, 1);
      b.add(CoefPoly(2) * G::g(n + 1) * G::g(n + 2), b.v(n, -2));
      break;
    case SeriesTag::D1aff:
      if (n < 3) unsupported(t, n);
      b.add(G::g(1) * G::g(2), b.v(1) + b.v(2));
      b.chain(1, n - 1, 1);
      b.add(G::g(n + 1), -b.v(n) - b.v(n - 1));
      break;
    case SeriesTag::Ainf:
      if (n < 2) unsupported(t, n);
      b.chain(1, n - 1, 0);
      break;
    case SeriesTag::Binf:
      if (n < 2) unsupported(t, n);
      b.add(G::g(1), b.v(1));
      b.chain(1, n - 1, 1);
      break;
    case SeriesTag::BCinf:
      if (n < 2) unsupported(t, n);
      b.bc_bracket();
      b.chain(1, n - 1, 1);
      break;
    case SeriesTag::Cinf:
      if (n < 2) unsupported(t, n);
      b.add(CoefPoly(2) * G::g(1), b.v(1, 2));
      b.chain(1, n - 1, 1);
      break;
    case SeriesTag::Dinf:
      if (n < 2) unsupported(t, n);
      b.add(G::g(1) * G::g(2), b.v(1) + b.v(2));
      b.chain(1, n - 1, 1);
      break;
  }
  return TodaOperator{chain_vars(family, level, count), b.pot};
}

ExpPoly kinetic_symbol(const std::vector<VarId>& vars, const ExpPoly& f) {
  ExpPoly acc;
  for (const auto& v : vars) {
    ExpPoly d = derivative(f, v);
    acc += derivative(d, v);
    acc += d * d;
  }
  ExpPoly out;
  for (const auto& [l, c] : acc.terms()) out.add_term(l, c * CoefPoly(frac(-1, 2)));
  return out;
}

ExpPoly conjugated_symbol(const TodaOperator& h, const ExpPoly& f) {
  return kinetic_symbol(h.vars, f) + h.potential;
}

TodaOperator rename_vars(const TodaOperator& h, const std::function<VarId(const VarId&)>& rename) {
  TodaOperator r;
  for (const auto& v : h.vars) r.vars.push_back(rename(v));
  r.potential = rename_vars(h.potential, rename);
  return r;
}

Json to_json(const TodaOperator& h) {
  Json vars = Json::array();
  for (const auto& v : h.vars) vars.push_back(to_string(v));
  return {{"vars", vars}, {"potential", to_json(h.potential)}};
}

}  // namespace todaq
