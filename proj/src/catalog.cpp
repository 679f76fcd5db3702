#include <algorithm>

#include "todaq/error.hpp"
#include "todaq/kernels.hpp"

namespace todaq {

namespace {

constexpr Family X = Family::x;
constexpr Family Y = Family::y;
constexpr Family Z = Family::z;

struct Entry {
  const char* id;
  int min_rank;
  bool window;
};

constexpr Entry kEntries[] = {
    {"A:rec", 1, false},      {"A1:baxter", 2, false},   {"BC>B", 1, false},
    {"B>BC", 1, false},       {"C>D", 1, false},         {"D>C", 2, false},
    {"A2even:aff", 1, false}, {"A2odd:aff", 2, false},   {"B1:aff", 2, false},
    {"BC1>B1:aff", 2, false}, {"C1>D1:aff", 2, false},   {"D1>C1:aff", 3, false},
    {"Ainf", 2, true},        {"Binf", 2, true},         {"Cinf", 2, true},
    {"Dinf", 2, true},
};

const Entry* find(std::string_view id) {
  for (const auto& e : kEntries) {
    if (id == e.id) return &e;
  }
  return nullptr;
}

Side side(SeriesTag t, int n, Family f, int level, HamForm form = HamForm::standard) {
  return Side{t, n, f, level, hamiltonian(t, n, f, level, form)};
}

// Phase builder over two variable rows p (level lp) and q (level lq).
struct Phase {
  Family pf;
  int lp;
  Family qf;
  int lq;
  ExpPoly f;

  LinForm p(int i) const { return LinForm::var(VarId{pf, lp, i}); }
  LinForm q(int i) const { return LinForm::var(VarId{qf, lq, i}); }
  void add(const CoefPoly& c, const LinForm& l) { f.add_term(l, c); }
};

CoefPoly g(int i) { return CoefPoly::g(i); }

}  // namespace

const std::vector<std::string>& kernel_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> v;
    for (const auto& e : kEntries) v.emplace_back(e.id);
    return v;
  }();
  return ids;
}

bool is_known_kernel(std::string_view id) { return find(id) != nullptr; }

bool is_window_kernel(std::string_view id) {
  const Entry* e = find(id);
  return e != nullptr && e->window;
}

int kernel_min_rank(std::string_view id) {
  const Entry* e = find(id);
  if (e == nullptr) throw UnsupportedError("unknown kernel id '" + std::string(id) + "'");
  return e->min_rank;
}

KernelSpec kernel(std::string_view id, int n) {
  const Entry* e = find(id);
  if (e == nullptr) throw UnsupportedError("unknown kernel id '" + std::string(id) + "'");
  if (n < e->min_rank) {
    throw UnsupportedError("kernel " + std::string(id) + " does not support rank " +
                           std::to_string(n));
  }
  KernelSpec k;
  k.id = e->id;
  k.rank = n;

  if (id == "A:rec") {
    // gl_{n+1} on level n+1 to gl_n on level n
    Phase ph{X, n, X, n + 1, {}};
    for (int i = 1; i <= n; ++i) {
      ph.add(1, ph.p(i) - ph.q(i));
      ph.add(g(i), ph.q(i + 1) - ph.p(i));
    }
    k.left = side(SeriesTag::A, n + 1, X, n + 1);
    k.right = side(SeriesTag::A, n, X, n);
    k.phase = ph.f;
  } else if (id == "A1:baxter") {
    Phase ph{X, 0, Y, 0, {}};
    for (int i = 1; i <= n; ++i) {
      ph.add(1, ph.p(i) - ph.q(i));
      ph.add(g(i), ph.q(i == n ? 1 : i + 1) - ph.p(i));
    }
    k.left = side(SeriesTag::A1aff, n, X, 0);
    k.right = side(SeriesTag::A1aff, n, Y, 0);
    k.phase = ph.f;
  } else if (id == "BC>B" || id == "B>BC" || id == "Binf") {
    // p = x (B side), q = z (BC side)
    const int lvl = id == "Binf" ? 0 : n;
    const int xl = id == "BC>B" ? n - 1 : lvl;
    Phase ph{X, xl, Z, lvl, {}};
    ph.add(g(1), ph.q(1));
    for (int i = 1; i <= n - 1; ++i) {
      ph.add(1, ph.p(i) - ph.q(i));
      ph.add(g(i + 1), ph.q(i + 1) - ph.p(i));
    }
    if (id != "BC>B") ph.add(1, ph.p(n) - ph.q(n));
    if (id == "BC>B") {
      k.left = side(SeriesTag::BC, n, Z, n);
      k.right = side(SeriesTag::B, n - 1, X, n - 1);
    } else if (id == "B>BC") {
      k.left = side(SeriesTag::B, n, X, n);
      k.right = side(SeriesTag::BC, n, Z, n);
    } else {
      k.left = side(SeriesTag::Binf, n, X, 0);
      k.right = side(SeriesTag::BCinf, n, Z, 0);
    }
    k.phase = ph.f;
  } else if (id == "C>D") {
    Phase ph{X, n, Z, n, {}};
    for (int i = 1; i <= n - 1; ++i) {
      ph.add(1, ph.p(i) - ph.q(i));
      ph.add(g(i), ph.q(i + 1) - ph.p(i));
    }
    ph.add(1, ph.p(n) - ph.q(n));
    ph.add(g(n), -ph.p(n) - ph.q(n));
    k.left = side(SeriesTag::C, n, Z, n);
    k.right = side(SeriesTag::D, n, X, n);
    k.phase = ph.f;
  } else if (id == "D>C") {
    Phase ph{X, n, Z, n - 1, {}};
    for (int i = 1; i <= n - 1; ++i) {
      ph.add(1, ph.q(i) - ph.p(i));
      ph.add(g(i), ph.p(i + 1) - ph.q(i));
    }
    ph.add(g(n), -ph.p(n) - ph.q(n - 1));
    k.left = side(SeriesTag::D, n, X, n, HamForm::dual);
    k.right = side(SeriesTag::C, n - 1, Z, n - 1, HamForm::dual);
    k.phase = ph.f;
  } else if (id == "A2even:aff") {
    Phase ph{X, 0, Z, 0, {}};
    ph.add(g(1), ph.q(1));
    for (int i = 1; i <= n; ++i) {
      ph.add(1, ph.p(i) - ph.q(i));
      ph.add(g(i + 1), ph.q(i + 1) - ph.p(i));
    }
    ph.add(g(n + 2), -ph.q(n + 1) - ph.p(n));
    k.left = side(SeriesTag::A2even, n, X, 0);
    k.right = side(SeriesTag::BC2aff, n + 1, Z, 0);
    k.phase = ph.f;
  } else if (id == "A2odd:aff" || id == "B1:aff" || id == "BC1>B1:aff") {
    Phase ph{X, 0, Z, 0, {}};
    if (id == "A2odd:aff") {
      ph.add(g(1), ph.p(1) + ph.q(1));
    } else {
      ph.add(g(1), ph.q(1));
    }
    for (int i = 1; i <= n - 1; ++i) {
      ph.add(1, ph.p(i) - ph.q(i));
      ph.add(g(i + 1), ph.q(i + 1) - ph.p(i));
    }
    ph.add(1, ph.p(n) - ph.q(n));
    ph.add(g(n + 1), -ph.p(n) - ph.q(n));
    k.phase = ph.f;
    if (id == "A2odd:aff") {
      k.left = side(SeriesTag::A2odd, n, X, 0);
      k.right = side(SeriesTag::A2odd, n, Z, 0, HamForm::dual);
    } else {
      k.left = side(SeriesTag::B1aff, n, X, 0);
      k.right = side(SeriesTag::BC1aff, n, Z, 0);
      if (id == "BC1>B1:aff") {
        KernelSpec t = transpose(k);
        t.id = k.id;
        return t;
      }
    }
  } else if (id == "C1>D1:aff") {
    Phase ph{X, 0, Z, 0, {}};
    ph.add(g(1), ph.p(1) + ph.q(1));
    for (int i = 1; i <= n; ++i) {
      ph.add(1, ph.p(i) - ph.q(i));
      ph.add(g(i + 1), ph.q(i + 1) - ph.p(i));
    }
    ph.add(g(n + 2), -ph.q(n + 1) - ph.p(n));
    k.left = side(SeriesTag::C1aff, n, X, 0);
    k.right = side(SeriesTag::D1aff, n + 1, Z, 0);
    k.phase = ph.f;
  } else if (id == "D1>C1:aff") {
    Phase ph{X, 0, Z, 0, {}};
    ph.add(g(1), ph.p(1) + ph.q(1));
    for (int i = 1; i <= n - 1; ++i) {
      ph.add(1, ph.q(i) - ph.p(i));
      ph.add(g(i + 1), ph.p(i + 1) - ph.q(i));
    }
    ph.add(g(n + 1), -ph.p(n) - ph.q(n - 1));
    k.left = side(SeriesTag::D1aff, n, X, 0);
    k.right = side(SeriesTag::C1aff, n - 1, Z, 0);
    k.phase = ph.f;
  } else if (id == "Ainf") {
    Phase ph{X, 0, Y, 0, {}};
    for (int i = 1; i <= n; ++i) ph.add(1, ph.p(i) - ph.q(i));
    for (int i = 1; i <= n - 1; ++i) ph.add(g(i), ph.q(i + 1) - ph.p(i));
    k.left = side(SeriesTag::Ainf, n, X, 0);
    k.right = side(SeriesTag::Ainf, n, Y, 0);
    k.phase = ph.f;
  } else if (id == "Cinf") {
    Phase ph{X, 0, Z, 0, {}};
    ph.add(g(1), ph.p(1) + ph.q(1));
    for (int i = 1; i <= n; ++i) ph.add(1, ph.p(i) - ph.q(i));
    for (int i = 1; i <= n - 1; ++i) ph.add(g(i + 1), ph.q(i + 1) - ph.p(i));
    k.left = side(SeriesTag::Cinf, n, X, 0);
    k.right = side(SeriesTag::Dinf, n, Z, 0);
    k.phase = ph.f;
  } else if (id == "Dinf") {
    Phase ph{X, 0, Z, 0, {}};
    ph.add(g(1), ph.p(1) + ph.q(1));
    for (int i = 1; i <= n; ++i) ph.add(1, ph.q(i) - ph.p(i));
    for (int i = 1; i <= n - 1; ++i) ph.add(g(i + 1), ph.p(i + 1) - ph.q(i));
    k.left = side(SeriesTag::Dinf, n, X, 0);
    k.right = side(SeriesTag::Cinf, n, Z, 0);
    k.phase = ph.f;
  }
  return k;
}

}  // namespace todaq
