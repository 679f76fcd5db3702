#include "todaq/rootsys.hpp"

#include <algorithm>
#include <set>

#include "todaq/error.hpp"

namespace todaq {

namespace {

struct TagName {
  SeriesTag tag;
  const char* name;
};

constexpr TagName kNames[] = {
    {SeriesTag::A, "A"},           {SeriesTag::B, "B"},           {SeriesTag::C, "C"},
    {SeriesTag::D, "D"},           {SeriesTag::BC, "BC"},         {SeriesTag::A1aff, "A1aff"},
    {SeriesTag::A2even, "A2even"}, {SeriesTag::A2odd, "A2odd"},   {SeriesTag::B1aff, "B1aff"},
    {SeriesTag::BC1aff, "BC1aff"}, {SeriesTag::BC2aff, "BC2aff"}, {SeriesTag::C1aff, "C1aff"},
    {SeriesTag::D1aff, "D1aff"},   {SeriesTag::Ainf, "Ainf"},     {SeriesTag::Binf, "Binf"},
    {SeriesTag::Cinf, "Cinf"},     {SeriesTag::Dinf, "Dinf"},     {SeriesTag::BCinf, "BCinf"},
};

LinForm e(int i, int c = 1) { return LinForm::var(basis(i), c); }

// e_{i+1} - e_i for i = from..to
void push_chain(std::vector<LinForm>& roots, int from, int to) {
  for (int i = from; i <= to; ++i) roots.push_back(e(i + 1) - e(i));
}

bool proportional(const LinForm& a, const LinForm& b) {
  if (a.support() != b.support()) return false;
  auto v = a.support().front();
  Rational r = b.coeff(v) / a.coeff(v);
  return a * r == b;
}

DynkinEdge edge_from_lengths(const std::vector<LinForm>& roots, int i, int j) {
  Rational li = inner(roots[i], roots[i]);
  Rational lj = inner(roots[j], roots[j]);
  DynkinEdge edge{i, j, 1, 0};
  if (proportional(roots[i], roots[j])) {
    edge.multiplicity = 4;
  } else {
    Rational ratio = li > lj ? Rational(li / lj) : Rational(lj / li);
    edge.multiplicity = static_cast<int>(ratio.get_num().get_si());
  }
  if (li > lj) edge.direction = 1;
  if (li < lj) edge.direction = -1;
  return edge;
}

}  // namespace

std::string to_string(SeriesTag t) {
  for (const auto& n : kNames) {
    if (n.tag == t) return n.name;
  }
  return "?";
}

SeriesTag parse_series(std::string_view name) {
  for (const auto& n : kNames) {
    if (name == n.name) return n.tag;
  }
  throw UnsupportedError("unknown series '" + std::string(name) + "'");
}

const std::vector<SeriesTag>& all_series() {
  static const std::vector<SeriesTag> tags = [] {
    std::vector<SeriesTag> v;
    for (const auto& n : kNames) v.push_back(n.tag);
    return v;
  }();
  return tags;
}

bool is_finite(SeriesTag t) {
  return t == SeriesTag::A || t == SeriesTag::B || t == SeriesTag::C || t == SeriesTag::D ||
         t == SeriesTag::BC;
}

bool is_infinite(SeriesTag t) {
  return t == SeriesTag::Ainf || t == SeriesTag::Binf || t == SeriesTag::Cinf ||
         t == SeriesTag::Dinf || t == SeriesTag::BCinf;
}

bool is_affine(SeriesTag t) { return !is_finite(t) && !is_infinite(t); }

int min_rank(SeriesTag t) {
  switch (t) {
    case SeriesTag::D:
    case SeriesTag::A2odd:
    case SeriesTag::B1aff:
    case SeriesTag::BC2aff:
    case SeriesTag::Ainf:
    case SeriesTag::Binf:
    case SeriesTag::Cinf:
    case SeriesTag::Dinf:
    case SeriesTag::BCinf:
      return 2;
    case SeriesTag::D1aff:
      return 3;  // at n = 2 the last root is minus the first
    default:
      return 1;
  }
}

void check_rank(SeriesTag t, int n) {
  if (n < min_rank(t)) {
    throw UnsupportedError("series " + to_string(t) + " does not support rank " +
                           std::to_string(n));
  }
}

Rational inner(const LinForm& a, const LinForm& b) {
  Rational s = 0;
  for (const auto& [v, q] : a.coeffs()) s += q * b.coeff(v);
  return s;
}

std::vector<LinForm> simple_roots(SeriesTag t, int n) {
  check_rank(t, n);
  std::vector<LinForm> r;
  switch (t) {
    case SeriesTag::A:
      push_chain(r, 1, n);
      break;
    case SeriesTag::B:
    case SeriesTag::Binf:
      r.push_back(e(1));
      push_chain(r, 1, n - 1);
      break;
    case SeriesTag::C:
      push_chain(r, 1, n - 1);
      r.push_back(e(n, 2));
      break;
    case SeriesTag::D:
      push_chain(r, 1, n - 1);
      r.push_back(-e(n - 1) - e(n));
      break;
    case SeriesTag::BC:
    case SeriesTag::BCinf:
      r.push_back(e(1, 2));
      r.push_back(e(1));
      push_chain(r, 1, n - 1);
      break;
    case SeriesTag::A1aff:
      r.push_back(e(1) - e(n + 1));
      push_chain(r, 1, n);
      break;
    case SeriesTag::A2even:
      r.push_back(e(1));
      push_chain(r, 1, n - 1);
      r.push_back(e(n, -2));
      break;
    case SeriesTag::A2odd:
      r.push_back(e(1, 2));
      push_chain(r, 1, n - 1);
      r.push_back(-e(n) - e(n - 1));
      break;
    case SeriesTag::B1aff:
      r.push_back(e(1));
      push_chain(r, 1, n - 1);
      r.push_back(-e(n) - e(n - 1));
      break;
    case SeriesTag::BC1aff:
      r.push_back(e(1, 2));
      r.push_back(e(1));
      push_chain(r, 1, n - 1);
      r.push_back(e(n, -2));
      break;
    case SeriesTag::BC2aff:
      r.push_back(e(1, 2));
      r.push_back(e(1));
      push_chain(r, 1, n - 1);
      r.push_back(-e(n) - e(n - 1));
      break;
    case SeriesTag::C1aff:
      r.push_back(e(1, 2));
      push_chain(r, 1, n - 1);
      r.push_back(e(n, -2));
      break;
    case SeriesTag::D1aff:
      r.push_back(e(1) + e(2));
      push_chain(r, 1, n - 1);
      r.push_back(-e(n) - e(n - 1));
      break;
    case SeriesTag::Ainf:
      push_chain(r, 1, n - 1);
      break;
    case SeriesTag::Cinf:
      r.push_back(e(1, 2));
      push_chain(r, 1, n - 1);
      break;
    case SeriesTag::Dinf:
      r.push_back(e(1) + e(2));
      push_chain(r, 1, n - 1);
      break;
  }
  return r;
}

int positive_root_count(SeriesTag t, int n) {
  check_rank(t, n);
  switch (t) {
    case SeriesTag::A: return n * (n + 1) / 2;
    case SeriesTag::B:
    case SeriesTag::C: return n * n;
    case SeriesTag::D: return n * (n - 1);
    case SeriesTag::BC: return n * (n + 1);
    default:
      throw UnsupportedError("positive_root_count needs a finite series, got " + to_string(t));
  }
}

std::vector<DynkinEdge> dynkin(SeriesTag t, int n) {
  auto roots = simple_roots(t, n);
  const int m = static_cast<int>(roots.size());
  std::set<std::pair<int, int>> adj;
  auto link = [&](int i, int j) { adj.insert({std::min(i, j), std::max(i, j)}); };
  auto chain = [&](int from, int to) {
    for (int p = from; p < to; ++p) link(p, p + 1);
  };
  // For the doubled BC vertex, position 0 repeats every neighbour of position 1.
  auto mirror_doubled = [&] {
    std::vector<int> nb;
    for (auto [i, j] : adj) {
      if (i == 1 && j != 0) nb.push_back(j);
      if (j == 1 && i != 0) nb.push_back(i);
    }
    link(0, 1);
    for (int k : nb) link(0, k);
  };
  switch (t) {
    case SeriesTag::A:
    case SeriesTag::B:
    case SeriesTag::C:
    case SeriesTag::Ainf:
    case SeriesTag::Binf:
    case SeriesTag::Cinf:
    case SeriesTag::A2even:
    case SeriesTag::C1aff:
      chain(0, m - 1);
      break;
    case SeriesTag::D:
      chain(0, n - 2);
      if (n >= 3) link(n - 3, n - 1);
      break;
    case SeriesTag::BC:
    case SeriesTag::BCinf:
    case SeriesTag::BC1aff:
      chain(1, m - 1);
      mirror_doubled();
      break;
    case SeriesTag::BC2aff:
      chain(1, n);
      link(n + 1, n - 1);
      mirror_doubled();
      break;
    case SeriesTag::A1aff:
      chain(0, n);
      if (n >= 2) link(0, n);
      break;
    case SeriesTag::A2odd:
    case SeriesTag::B1aff:
      chain(0, n - 1);
      link(n - 2, n);
      break;
    case SeriesTag::D1aff:
      link(0, 2);
      link(1, 2);
      chain(2, n - 1);
      link(n, n - 2);
      if (n == 3) link(0, 3);
      break;
    case SeriesTag::Dinf:
      if (m >= 3) {
        link(0, 2);
        link(1, 2);
      }
      chain(2, m - 1);
      break;
  }
  std::vector<DynkinEdge> edges;
  for (auto [i, j] : adj) edges.push_back(edge_from_lengths(roots, i, j));
  return edges;
}

std::vector<DynkinEdge> dynkin_from_roots(const std::vector<LinForm>& roots) {
  std::vector<DynkinEdge> edges;
  for (int i = 0; i < static_cast<int>(roots.size()); ++i) {
    for (int j = i + 1; j < static_cast<int>(roots.size()); ++j) {
      Rational ab = inner(roots[i], roots[j]);
      if (ab == 0) continue;
      Rational aa = inner(roots[i], roots[i]);
      Rational bb = inner(roots[j], roots[j]);
      Rational m = 4 * ab * ab / (aa * bb);
      DynkinEdge edge{i, j, static_cast<int>(m.get_num().get_si()), 0};
      if (m.get_den() != 1) edge.multiplicity = -1;
      if (aa > bb) edge.direction = 1;
      if (aa < bb) edge.direction = -1;
      edges.push_back(edge);
    }
  }
  return edges;
}

RootSystem root_system(SeriesTag t, int n) {
  return RootSystem{t, n, simple_roots(t, n), dynkin(t, n)};
}

Json to_json(const RootSystem& r) {
  Json roots = Json::array();
  for (const auto& a : r.simple_roots) roots.push_back(to_json(a));
  Json edges = Json::array();
  for (const auto& e : r.dynkin_edges) edges.push_back({e.i, e.j, e.multiplicity, e.direction});
  return {{"tag", to_string(r.tag)}, {"rank", r.rank}, {"simple_roots", roots}, {"dynkin", edges}};
}

}  // namespace todaq
