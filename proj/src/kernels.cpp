#include "todaq/kernels.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "todaq/error.hpp"

namespace todaq {

namespace {

Side rename_side(const Side& s, const std::function<VarId(const VarId&)>& rename) {
  Side r = s;
  VarId probe = rename(VarId{s.family, s.level, 1});
  r.family = probe.family;
  r.level = probe.level;
  r.h = rename_vars(s.h, rename);
  return r;
}

enum class Support { constant, left, right, mixed };

Support classify(const LinForm& l, const std::set<VarId>& left, const std::set<VarId>& right) {
  if (l.is_zero()) return Support::constant;
  bool in_l = false;
  bool in_r = false;
  bool other = false;
  for (const auto& [v, c] : l.coeffs()) {
    if (left.count(v)) {
      in_l = true;
    } else if (right.count(v)) {
      in_r = true;
    } else {
      other = true;
    }
  }
  if (other || (in_l && in_r)) return Support::mixed;
  return in_l ? Support::left : Support::right;
}

ExpPoly part(const ExpPoly& f, const std::set<VarId>& l, const std::set<VarId>& r,
             std::initializer_list<Support> keep) {
  return f.filter([&](const LinForm& lf, const CoefPoly&) {
    Support s = classify(lf, l, r);
    return std::find(keep.begin(), keep.end(), s) != keep.end();
  });
}

Side drop_var(const Side& s, const VarId& v, CouplingIndex i) {
  Side r = s;
  r.h.potential = substitute_coupling(s.h.potential, i, Rational(0));
  auto it = std::find(r.h.vars.begin(), r.h.vars.end(), v);
  if (it != r.h.vars.end()) {
    r.h.vars.erase(it);
    r.rank = static_cast<int>(r.h.vars.size());
  }
  return r;
}

ExpPoly drop_terms(const ExpPoly& f, const VarId& v, const char* where) {
  ExpPoly out;
  for (const auto& [l, c] : f.terms()) {
    Rational a = l.coeff(v);
    if (a == 0) {
      out.add_term(l, c);
    } else if (a < 0) {
      throw PreconditionError(std::string("limit ") + to_string(v) + " -> -inf: " + where +
                              " term " + to_string(ExpPoly::term(c, l)) + " does not vanish");
    }
  }
  return out;
}

}  // namespace

KernelSpec transpose(const KernelSpec& k) {
  KernelSpec t = k;
  std::swap(t.left, t.right);
  return t;
}

KernelSpec relabel(const KernelSpec& k, const std::function<VarId(const VarId&)>& rename) {
  KernelSpec r = k;
  r.left = rename_side(k.left, rename);
  r.right = rename_side(k.right, rename);
  r.phase = rename_vars(k.phase, rename);
  return r;
}

KernelSpec relabel_families(const KernelSpec& k,
                            const std::vector<std::pair<Family, Family>>& map) {
  return relabel(k, [&](const VarId& v) {
    for (const auto& [from, to] : map) {
      if (v.family == from) return VarId{to, v.level, v.index};
    }
    return v;
  });
}

Residual intertwining_residual(const KernelSpec& k) {
  Residual r;
  r.left_symbol = conjugated_symbol(k.left.h, k.phase);
  r.right_symbol = conjugated_symbol(k.right.h, k.phase);
  r.value = r.left_symbol - r.right_symbol;
  return r;
}

InducedPotentials induced_potentials(const KernelSpec& k) {
  std::set<VarId> l(k.left.h.vars.begin(), k.left.h.vars.end());
  std::set<VarId> r(k.right.h.vars.begin(), k.right.h.vars.end());
  ExpPoly kin_l = kinetic_symbol(k.left.h.vars, k.phase);
  ExpPoly kin_r = kinetic_symbol(k.right.h.vars, k.phase);
  InducedPotentials p;
  p.left = part(kin_r, l, r, {Support::left}) - part(kin_l, l, r, {Support::left});
  p.right = part(kin_l, l, r, {Support::right}) - part(kin_r, l, r, {Support::right});
  p.left_mixed = part(kin_l, l, r, {Support::mixed, Support::constant});
  p.right_mixed = part(kin_r, l, r, {Support::mixed, Support::constant});
  return p;
}

Json verify_report(const KernelSpec& k) {
  Residual res = intertwining_residual(k);
  InducedPotentials ind = induced_potentials(k);
  return {{"id", k.id},
          {"rank", k.rank},
          {"residual_zero", res.zero()},
          {"residual", to_json(res.value)},
          {"left_induced", to_json(ind.left)},
          {"right_induced", to_json(ind.right)},
          {"left_hamiltonian", to_json(k.left.h)},
          {"right_hamiltonian", to_json(k.right.h)},
          {"mixed_agree", ind.mixed_agree()}};
}

ExpPoly ComposedKernel::total_phase() const {
  ExpPoly f;
  for (const auto& k : factors) f += k.phase;
  return f;
}

std::vector<VarId> ComposedKernel::integration_variables() const {
  std::vector<VarId> vars;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i + 1 < factors.size() || closed) {
      const auto& v = factors[i].right.h.vars;
      vars.insert(vars.end(), v.begin(), v.end());
    }
  }
  return vars;
}

ComposedKernel compose(const std::vector<KernelSpec>& factors, bool closed) {
  if (factors.empty()) throw PreconditionError("compose needs at least one factor");
  for (std::size_t i = 0; i + 1 < factors.size(); ++i) {
    if (!factors[i].right.joins(factors[i + 1].left)) {
      throw PreconditionError("incompatible chain: right side of " + factors[i].id + "(" +
                              std::to_string(factors[i].rank) + ") does not match left side of " +
                              factors[i + 1].id + "(" + std::to_string(factors[i + 1].rank) + ")");
    }
  }
  ComposedKernel c;
  c.factors = factors;
  c.closed = closed;
  c.head = factors.front().left;
  return c;
}

ComposedKernel compose(const std::vector<std::pair<std::string, int>>& ids, bool closed) {
  std::vector<KernelSpec> ks;
  for (const auto& [id, n] : ids) ks.push_back(kernel(id, n));
  return compose(ks, closed);
}

bool composed_intertwining_check(const ComposedKernel& c) {
  for (std::size_t i = 0; i < c.factors.size(); ++i) {
    if (!intertwining_residual(c.factors[i]).zero()) return false;
    if (i + 1 < c.factors.size() && !c.factors[i].right.joins(c.factors[i + 1].left)) return false;
  }
  return true;
}

ComposedKernel wavefunction_chain(SeriesTag series, int n) {
  std::vector<std::pair<std::string, int>> ids;
  switch (series) {
    case SeriesTag::A:
      if (n < 1) break;
      if (n == 1) {
        ComposedKernel c;
        c.closed = true;
        c.head = Side{SeriesTag::A, 1, Family::x, 1, hamiltonian(SeriesTag::A, 1, Family::x, 1)};
        return c;
      }
      for (int k = n - 1; k >= 1; --k) ids.emplace_back("A:rec", k);
      return compose(ids, true);
    case SeriesTag::B:
      if (n < 1) break;
      for (int k = n; k >= 1; --k) {
        ids.emplace_back("B>BC", k);
        ids.emplace_back("BC>B", k);
      }
      return compose(ids, true);
    case SeriesTag::C:
      if (n < 1) break;
      for (int k = n; k >= 2; --k) {
        ids.emplace_back("C>D", k);
        ids.emplace_back("D>C", k);
      }
      ids.emplace_back("C>D", 1);
      return compose(ids, true);
    case SeriesTag::D:
      if (n < 2) break;
      for (int k = n; k >= 2; --k) {
        ids.emplace_back("D>C", k);
        ids.emplace_back("C>D", k - 1);
      }
      return compose(ids, true);
    default:
      break;
  }
  throw UnsupportedError("no wave-function chain for " + to_string(series) + " at rank " +
                         std::to_string(n));
}

std::vector<SeriesTag> q_operator_series() {
  return {SeriesTag::A1aff, SeriesTag::A2even, SeriesTag::A2odd, SeriesTag::B1aff,
          SeriesTag::C1aff, SeriesTag::D1aff,  SeriesTag::Ainf,  SeriesTag::Binf,
          SeriesTag::Cinf,  SeriesTag::Dinf};
}

ComposedKernel q_operator(SeriesTag series, int n) {
  const std::vector<std::pair<Family, Family>> to_y{{Family::x, Family::y}};
  const std::vector<std::pair<Family, Family>> shift{{Family::x, Family::z},
                                                     {Family::z, Family::y}};
  auto mirror = [&](const std::string& id) {
    KernelSpec k = kernel(id, n);
    return compose({k, relabel_families(transpose(k), to_y)});
  };
  switch (series) {
    case SeriesTag::A1aff:
      return compose({kernel("A1:baxter", n)});
    case SeriesTag::Ainf:
      return compose({kernel("Ainf", n)});
    case SeriesTag::A2even:
      return mirror("A2even:aff");
    case SeriesTag::A2odd:
      return mirror("A2odd:aff");
    case SeriesTag::Binf:
      return mirror("Binf");
    case SeriesTag::B1aff:
      return compose({kernel("B1:aff", n), relabel_families(kernel("BC1>B1:aff", n), to_y)});
    case SeriesTag::C1aff:
      return compose({kernel("C1>D1:aff", n), relabel_families(kernel("D1>C1:aff", n + 1), shift)});
    case SeriesTag::D1aff:
      return compose({kernel("D1>C1:aff", n), relabel_families(kernel("C1>D1:aff", n - 1), shift)});
    case SeriesTag::Cinf:
      return compose({kernel("Cinf", n), relabel_families(kernel("Dinf", n), shift)});
    case SeriesTag::Dinf:
      return compose({kernel("Dinf", n), relabel_families(kernel("Cinf", n), shift)});
    default:
      throw UnsupportedError("no Q-operator for " + to_string(series));
  }
}

KernelSpec limit_drop(const KernelSpec& k, CouplingIndex i, const VarId& v) {
  KernelSpec r = k;
  r.phase = drop_terms(substitute_coupling(k.phase, i, Rational(0)), v, "phase");
  r.left = drop_var(k.left, v, i);
  r.right = drop_var(k.right, v, i);
  r.left.h.potential = drop_terms(r.left.h.potential, v, "left potential");
  r.right.h.potential = drop_terms(r.right.h.potential, v, "right potential");
  return r;
}

KernelSpec baxter_limit(int n) {
  KernelSpec k = limit_drop(kernel("A1:baxter", n), n, VarId{Family::x, 0, n});
  k = relabel(k, [n](const VarId& v) {
    return VarId{Family::x, v.family == Family::y ? n : n - 1, v.index};
  });
  k = transpose(k);
  k.id = "A:rec";
  k.rank = n - 1;
  k.left.tag = SeriesTag::A;
  k.right.tag = SeriesTag::A;
  return k;
}

KernelSpec gauge_shift(const KernelSpec& k, const VarId& v, const Rational& lambda) {
  KernelSpec r = k;
  r.phase = scale_var(k.phase, v, lambda);
  r.left.h.potential = scale_var(k.left.h.potential, v, lambda);
  r.right.h.potential = scale_var(k.right.h.potential, v, lambda);
  return r;
}

WindowedResidual windowed_residual(std::string_view id, int window) {
  if (!is_window_kernel(id)) {
    throw UnsupportedError("windowed residual needs an infinite-series kernel, got " +
                           std::string(id));
  }
  if (window < 3) throw UnsupportedError("window must be at least 3");
  WindowedResidual w;
  w.residual = intertwining_residual(kernel(id, window));
  for (const auto& [l, c] : w.residual.value.terms()) {
    for (const auto& [v, q] : l.coeffs()) {
      if (v.index < window - 1) w.boundary_supported = false;
    }
  }
  return w;
}

}  // namespace todaq
