#include "todaq/givental.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "todaq/error.hpp"

namespace todaq {

namespace {

VarId X(int k, int i) { return VarId{Family::x, k, i}; }
VarId Z(int k, int i) { return VarId{Family::z, k, i}; }

std::string label(char c, int k, int i) {
  return std::string(1, c) + "_{" + std::to_string(k) + "," + std::to_string(i) + "}";
}

struct Builder {
  Diagram d;
  bool couplings;
  std::set<VarId> verts;

  GMonomial g(int i) const { return couplings ? GMonomial::g(i) : GMonomial{}; }
  void vertex(const VarId& v) { verts.insert(v); }
  void standard(const std::string& l, const VarId& tail, const VarId& head, GMonomial c = {}) {
    d.arrows.push_back(Arrow{ArrowKind::standard, tail, head, l, c});
  }
  void source(const std::string& l, const VarId& head, GMonomial c = {}) {
    d.arrows.push_back(Arrow{ArrowKind::source, std::nullopt, head, l, c});
  }
  void twin(const std::string& l, const VarId& tail, const VarId& head, GMonomial c = {}) {
    d.arrows.push_back(Arrow{ArrowKind::double_, tail, head, l, c});
  }
  Diagram finish() {
    d.vertices.assign(verts.begin(), verts.end());
    return d;
  }
};

Diagram build_a(int n, bool cp) {
  Builder b{{SeriesTag::A, n, {}, {}}, cp, {}};
  for (int k = 1; k <= n; ++k) {
    for (int i = 1; i <= k; ++i) b.vertex(X(k, i));
  }
  for (int k = 1; k < n; ++k) {
    for (int i = 1; i <= k; ++i) {
      b.standard(label('a', k, i), X(k + 1, i), X(k, i));
      b.standard(label('b', k, i), X(k, i), X(k + 1, i + 1), b.g(i));
    }
  }
  return b.finish();
}

Diagram build_b(int n, bool cp) {
  Builder b{{SeriesTag::B, n, {}, {}}, cp, {}};
  for (int k = 1; k <= n; ++k) {
    for (int i = 1; i <= k; ++i) {
      b.vertex(X(k, i));
      b.vertex(Z(k, i));
    }
  }
  for (int k = 1; k <= n; ++k) {
    for (int i = 1; i <= k; ++i) {
      if (i == 1) {
        b.source(label('a', k, 1), Z(k, 1), b.g(1));
        b.source(label('b', k, 1), Z(k, 1), b.g(1));
      } else {
        b.standard(label('a', k, i), X(k - 1, i - 1), Z(k, i), b.g(i));
        b.standard(label('b', k, i), X(k, i - 1), Z(k, i), b.g(i));
      }
      b.standard(label('c', k, i), Z(k, i), X(k, i));
    }
  }
  for (int l = 1; l < n; ++l) {
    for (int j = 1; j <= l; ++j) b.standard(label('d', l, j), Z(l + 1, j), X(l, j));
  }
  return b.finish();
}

// Shared C/D arrow rules; x rows run to x_top, z rows to z_top.
Diagram build_cd(SeriesTag s, int n, int x_top, int z_top, bool cp) {
  Builder b{{s, n, {}, {}}, cp, {}};
  for (int k = 1; k <= x_top; ++k) {
    for (int i = 1; i <= k; ++i) b.vertex(X(k, i));
  }
  for (int k = 1; k <= z_top; ++k) {
    for (int i = 1; i <= k; ++i) b.vertex(Z(k, i));
  }
  // c, b from C>D(k): z_k to x_k
  for (int k = 1; k <= z_top; ++k) {
    for (int i = 1; i <= k; ++i) {
      b.standard(label('c', k, i), Z(k, i), X(k, i));
      if (i < k) {
        b.standard(label('b', k, i), X(k, i), Z(k, i + 1), b.g(i));
      } else {
        b.twin(label('b', k, k), X(k, k), Z(k, k), b.g(k));
      }
    }
  }
  // a, d from D>C(k): x_k to z_{k-1}
  for (int k = 2; k <= x_top; ++k) {
    for (int j = 1; j <= k; ++j) {
      if (j < k) {
        b.standard(label('a', k, j), X(k, j), Z(k - 1, j));
      } else {
        b.twin(label('a', k, k), X(k, k), Z(k - 1, k - 1), b.g(k));
      }
    }
    for (int j = 1; j < k; ++j) b.standard(label('d', k - 1, j), Z(k - 1, j), X(k, j + 1), b.g(j));
  }
  return b.finish();
}

using Labels = std::vector<std::string>;

void push(std::vector<MonomialRelation>& out, Labels lhs, Labels rhs) {
  out.push_back(MonomialRelation{std::move(lhs), std::move(rhs)});
}
void push(std::vector<MonomialRelation>& out, Labels lhs, LinForm rhs) {
  out.push_back(MonomialRelation{std::move(lhs), std::move(rhs)});
}

LinForm sum_labels(const Diagram& d, const Labels& labels) {
  LinForm s;
  for (const auto& l : labels) {
    const Arrow* a = d.find(l);
    if (a == nullptr) throw PreconditionError("unknown arrow label " + l);
    s += a->exponent();
  }
  return s;
}

void check_diagram_rank(SeriesTag s, int n) {
  bool ok = (s == SeriesTag::A || s == SeriesTag::B || s == SeriesTag::C) ? n >= 1
            : s == SeriesTag::D                                           ? n >= 2
                                                                          : false;
  if (!ok) {
    throw UnsupportedError("no diagram for " + to_string(s) + " at rank " + std::to_string(n));
  }
}

}  // namespace

std::string to_string(ArrowKind k) {
  switch (k) {
    case ArrowKind::standard: return "standard";
    case ArrowKind::source: return "source";
    case ArrowKind::double_: return "double";
  }
  return "?";
}

LinForm Arrow::exponent() const {
  LinForm h = LinForm::var(head);
  switch (kind) {
    case ArrowKind::standard: return h - LinForm::var(*tail);
    case ArrowKind::source: return h;
    case ArrowKind::double_: return -h - LinForm::var(*tail);
  }
  return h;
}

const Arrow* Diagram::find(const std::string& l) const {
  for (const auto& a : arrows) {
    if (a.label == l) return &a;
  }
  return nullptr;
}

std::string to_string(const MonomialRelation& r) {
  std::string s;
  for (std::size_t i = 0; i < r.lhs.size(); ++i) s += (i ? "*" : "") + r.lhs[i];
  s += " = ";
  if (const auto* labels = std::get_if<Labels>(&r.rhs)) {
    for (std::size_t i = 0; i < labels->size(); ++i) s += (i ? "*" : "") + (*labels)[i];
  } else {
    s += "e^(" + to_string(std::get<LinForm>(r.rhs)) + ")";
  }
  return s;
}

Diagram build_diagram(SeriesTag series, int n, bool with_couplings) {
  check_diagram_rank(series, n);
  switch (series) {
    case SeriesTag::A: return build_a(n, with_couplings);
    case SeriesTag::B: return build_b(n, with_couplings);
    case SeriesTag::C: return build_cd(SeriesTag::C, n, n, n, with_couplings);
    case SeriesTag::D: return build_cd(SeriesTag::D, n, n, n - 1, with_couplings);
    default: break;
  }
  throw UnsupportedError("no diagram for " + to_string(series));
}

Diagram build_c_from_d(int n, bool with_couplings) {
  Diagram d = build_diagram(SeriesTag::D, n + 1, with_couplings);
  auto top = [&](const VarId& v) { return v.family == Family::x && v.level == n + 1; };
  Diagram c{SeriesTag::C, n, {}, {}};
  for (const auto& v : d.vertices) {
    if (!top(v)) c.vertices.push_back(v);
  }
  for (const auto& a : d.arrows) {
    if (top(a.head) || (a.tail && top(*a.tail))) continue;
    c.arrows.push_back(a);
  }
  return c;
}

ExpPoly diagram_potential(const Diagram& d) {
  ExpPoly f;
  for (const auto& a : d.arrows) f.add_term(a.exponent(), CoefPoly::monomial(1, a.coupling));
  return f;
}

std::vector<MonomialRelation> relations(SeriesTag series, int n) {
  check_diagram_rank(series, n);
  std::vector<MonomialRelation> out;
  auto l = label;
  switch (series) {
    case SeriesTag::A:
      for (int k = 1; k < n - 1; ++k) {
        for (int i = 1; i <= k; ++i) {
          push(out, {l('a', k, i), l('b', k, i)}, Labels{l('b', k + 1, i), l('a', k + 1, i + 1)});
        }
      }
      for (int i = 1; i <= n - 1; ++i) {
        push(out, {l('a', n - 1, i), l('b', n - 1, i)},
             LinForm::var(X(n, i + 1)) - LinForm::var(X(n, i)));
      }
      break;
    case SeriesTag::B:
      for (int k = 1; k <= n; ++k) push(out, {l('a', k, 1)}, Labels{l('b', k, 1)});
      for (int k = 1; k < n; ++k) {
        for (int i = 1; i <= k; ++i) {
          push(out, {l('d', k, i), l('a', k + 1, i + 1)},
               Labels{l('c', k + 1, i), l('b', k + 1, i + 1)});
          push(out, {l('b', k, i), l('c', k, i)}, Labels{l('a', k + 1, i), l('d', k, i)});
        }
      }
      for (int i = 1; i <= n; ++i) {
        LinForm r = LinForm::var(X(n, i));
        if (i > 1) r = r - LinForm::var(X(n, i - 1));
        push(out, {l('b', n, i), l('c', n, i)}, r);
      }
      break;
    case SeriesTag::C:
    case SeriesTag::D: {
      const int cb_top = series == SeriesTag::C ? n : n - 1;
      for (int k = 1; k < n; ++k) {
        for (int i = 1; i <= k; ++i) {
          push(out, {l('c', k, i), l('b', k, i)}, Labels{l('d', k, i), l('a', k + 1, i + 1)});
        }
      }
      for (int k = 1; k + 1 <= cb_top; ++k) {
        for (int i = 1; i <= k; ++i) {
          push(out, {l('a', k + 1, i), l('d', k, i)},
               Labels{l('b', k + 1, i), l('c', k + 1, i + 1)});
        }
      }
      if (series == SeriesTag::C) {
        for (int i = 1; i < n; ++i) {
          push(out, {l('c', n, i), l('b', n, i)},
               LinForm::var(Z(n, i + 1)) - LinForm::var(Z(n, i)));
        }
        push(out, {l('c', n, n), l('b', n, n)}, LinForm::var(Z(n, n), -2));
      } else {
        for (int i = 1; i < n; ++i) {
          push(out, {l('a', n, i), l('d', n - 1, i)},
               LinForm::var(X(n, i + 1)) - LinForm::var(X(n, i)));
        }
      }
      break;
    }
    default:
      break;
  }
  return out;
}

bool verify_relation(const Diagram& d, const MonomialRelation& r) {
  LinForm lhs = sum_labels(d, r.lhs);
  if (const auto* labels = std::get_if<Labels>(&r.rhs)) return lhs == sum_labels(d, *labels);
  return lhs == std::get<LinForm>(r.rhs);
}

Diagram mutate(const Diagram& d, std::size_t index, const VarId& new_head) {
  if (index >= d.arrows.size()) throw PreconditionError("arrow index out of range");
  Diagram m = d;
  m.arrows[index].head = new_head;
  return m;
}

LinForm fold_image(SeriesTag target, int n, const VarId& v) {
  const int K = v.level;
  const int i = v.index;
  // Work on the kept half; the other half is its negative.
  auto kept = [&](int j, bool keep_low) {
    bool low = 2 * j < K + 1;
    bool mid = 2 * j == K + 1;
    return mid || (keep_low ? low : !low);
  };
  switch (target) {
    case SeriesTag::A:
      return LinForm::var(v);
    case SeriesTag::B: {
      // levels 2k -> z_k (upper half), 2k+1 -> x_k (upper half), middles 0
      const int k = K / 2;
      if (K % 2 == 1 && i == k + 1) return LinForm{};
      int j = i;
      int sign = 1;
      if (!kept(i, false)) {
        j = K + 1 - i;
        sign = -1;
      }
      int idx = K % 2 == 0 ? j - k : j - (k + 1);
      VarId t = K % 2 == 0 ? Z(k, idx) : X(k, idx);
      return LinForm::var(t, sign);
    }
    case SeriesTag::C:
    case SeriesTag::D: {
      // levels 2k-1 -> x_k, 2k -> z_k, lower half kept (middle included)
      int j = i;
      int sign = 1;
      if (!kept(i, true)) {
        j = K + 1 - i;
        sign = -1;
      }
      VarId t = K % 2 == 1 ? X((K + 1) / 2, j) : Z(K / 2, j);
      return LinForm::var(t, sign);
    }
    default:
      break;
  }
  (void)n;
  throw UnsupportedError("no folding onto " + to_string(target));
}

FoldReport fold(SeriesTag target, int n) {
  FoldReport r;
  r.target = target;
  r.rank = n;
  switch (target) {
    case SeriesTag::A: r.ambient_gl = n; break;
    case SeriesTag::B: r.ambient_gl = 2 * n + 1; break;
    case SeriesTag::C: r.ambient_gl = 2 * n; break;
    case SeriesTag::D: r.ambient_gl = 2 * n - 1; break;
    default: throw UnsupportedError("no folding onto " + to_string(target));
  }
  Diagram ambient = build_diagram(SeriesTag::A, r.ambient_gl);
  for (const auto& a : ambient.arrows) {
    LinForm img;
    const LinForm e = a.exponent();
    for (const auto& [v, c] : e.coeffs()) img += fold_image(target, n, v) * c;
    ++r.folded[img];
  }
  Diagram t = build_diagram(target, n);
  for (const auto& a : t.arrows) ++r.target_forms[a.exponent()];
  std::set<LinForm> fs;
  std::set<LinForm> ts;
  for (const auto& [l, m] : r.folded) fs.insert(l);
  for (const auto& [l, m] : r.target_forms) ts.insert(l);
  r.sets_equal = fs == ts;
  return r;
}

std::string export_dot(const Diagram& d) {
  auto node = [](const VarId& v) {
    return std::string(1, family_char(v.family)) + "_" + std::to_string(v.level) + "_" +
           std::to_string(v.index);
  };
  std::ostringstream out;
  out << "digraph \"" << to_string(d.series) << d.rank << "\" {\n";
  out << "  rankdir=LR;\n";
  for (const auto& v : d.vertices) {
    out << "  " << node(v) << " [label=\"" << family_char(v.family) << "_{" << v.level << ","
        << v.index << "}\"];\n";
  }
  for (const auto& a : d.arrows) {
    std::string lab = "[label=\"" + a.label + "\"";
    switch (a.kind) {
      case ArrowKind::standard:
        out << "  " << node(*a.tail) << " -> " << node(a.head) << " " << lab << "];\n";
        break;
      case ArrowKind::source: {
        std::string src = "src_" + node(a.head) + "_" + a.label.substr(0, 1);
        out << "  " << src << " [shape=point];\n";
        out << "  " << src << " -> " << node(a.head) << " " << lab << ", style=dashed];\n";
        break;
      }
      case ArrowKind::double_:
        out << "  " << node(*a.tail) << " -> " << node(a.head) << " " << lab
            << ", color=\"black:black\"];\n";
        break;
    }
  }
  out << "}\n";
  return out.str();
}

Json to_json(const Diagram& d) {
  Json verts = Json::array();
  for (const auto& v : d.vertices) verts.push_back(to_string(v));
  Json arrows = Json::array();
  for (const auto& a : d.arrows) {
    Json j = {{"kind", to_string(a.kind)},
              {"tail", a.tail ? Json(to_string(*a.tail)) : Json(nullptr)},
              {"head", to_string(a.head)},
              {"label", a.label}};
    if (!a.coupling.is_unit()) j["coupling"] = to_string(a.coupling);
    arrows.push_back(j);
  }
  Json rels = Json::array();
  for (const auto& r : relations(d.series, d.rank)) {
    rels.push_back({{"relation", to_string(r)}, {"holds", verify_relation(d, r)}});
  }
  return {{"series", to_string(d.series)},
          {"rank", d.rank},
          {"vertices", verts},
          {"arrows", arrows},
          {"relations", rels}};
}

Json to_json(const FoldReport& f) {
  auto forms = [](const std::map<LinForm, int>& m) {
    Json a = Json::array();
    for (const auto& [l, c] : m) a.push_back({{"exp", to_json(l)}, {"multiplicity", c}});
    return a;
  };
  return {{"target", to_string(f.target)},
          {"rank", f.rank},
          {"ambient", "gl" + std::to_string(f.ambient_gl)},
          {"sets_equal", f.sets_equal},
          {"folded", forms(f.folded)},
          {"target_forms", forms(f.target_forms)}};
}

}  // namespace todaq
