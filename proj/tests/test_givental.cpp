#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "todaq/error.hpp"
#include "todaq/givental.hpp"
#include "todaq/kernels.hpp"

using namespace todaq;

namespace {

LinForm v(Family f, int level, int i) { return LinForm::var(VarId{f, level, i}); }

ExpPoly unit_couplings(ExpPoly f) {
  for (int i : f.couplings()) f = substitute_coupling(f, i, Rational(1));
  return f;
}

int lowest(SeriesTag s) { return s == SeriesTag::D ? 2 : 1; }
int highest(SeriesTag s) { return s == SeriesTag::A ? 5 : 4; }

const SeriesTag kSeries[] = {SeriesTag::A, SeriesTag::B, SeriesTag::C, SeriesTag::D};

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = text.find(needle); p != std::string::npos; p = text.find(needle, p + 1)) ++n;
  return n;
}

}  // namespace

TEST(Diagram, Gl2Shape) {
  Diagram d = build_diagram(SeriesTag::A, 2);
  EXPECT_EQ(d.vertices.size(), 3u);
  EXPECT_EQ(d.arrows.size(), 2u);
  EXPECT_EQ(diagram_potential(d),
            ExpPoly::exp(v(Family::x, 1, 1) - v(Family::x, 2, 1)) +
                ExpPoly::exp(v(Family::x, 2, 2) - v(Family::x, 1, 1)));
}

TEST(Diagram, B3Shape) {
  Diagram d = build_diagram(SeriesTag::B, 3);
  EXPECT_EQ(d.vertices.size(), 12u);
  EXPECT_EQ(d.arrows.size(), 21u);  // 2n^2 + n
  // a_{k,1} and b_{k,1} both leave the source of row k
  auto sources = std::count_if(d.arrows.begin(), d.arrows.end(),
                               [](const Arrow& a) { return a.kind == ArrowKind::source; });
  EXPECT_EQ(sources, 6);
  for (int k = 1; k <= 3; ++k) {
    ASSERT_NE(d.find("a_{" + std::to_string(k) + ",1}"), nullptr);
    EXPECT_EQ(d.find("a_{" + std::to_string(k) + ",1}")->kind, ArrowKind::source);
  }
}

TEST(Diagram, C1Shape) {
  Diagram d = build_diagram(SeriesTag::C, 1);
  ASSERT_EQ(d.arrows.size(), 2u);
  auto doubles = std::count_if(d.arrows.begin(), d.arrows.end(),
                               [](const Arrow& a) { return a.kind == ArrowKind::double_; });
  EXPECT_EQ(doubles, 1);
  EXPECT_EQ(diagram_potential(d), unit_couplings(wavefunction_chain(SeriesTag::C, 1).total_phase()));
}

TEST(Diagram, ArrowCountsPerSeries) {
  for (int n = 1; n <= 6; ++n) {
    EXPECT_EQ(build_diagram(SeriesTag::A, n).arrows.size(), static_cast<std::size_t>(n * (n - 1)));
    EXPECT_EQ(build_diagram(SeriesTag::B, n).arrows.size(), static_cast<std::size_t>(2 * n * n + n));
    EXPECT_EQ(build_diagram(SeriesTag::C, n).arrows.size(), static_cast<std::size_t>(2 * n * n + n - 1));
  }
  Diagram d3 = build_diagram(SeriesTag::D, 3);
  EXPECT_EQ(d3.vertices.size(), 9u);
  EXPECT_EQ(d3.arrows.size(), 14u);
}

TEST(Diagram, EmptyPotential) {
  Diagram d;
  EXPECT_TRUE(diagram_potential(d).is_zero());
  EXPECT_TRUE(diagram_potential(build_diagram(SeriesTag::A, 1)).is_zero());
}

TEST(DiagramProperty, PotentialMatchesComposedPhase) {
  for (SeriesTag s : kSeries) {
    for (int n = lowest(s); n <= highest(s); ++n) {
      ComposedKernel c = wavefunction_chain(s, n);
      EXPECT_EQ(diagram_potential(build_diagram(s, n)), unit_couplings(c.total_phase()))
          << to_string(s) << n;
      EXPECT_EQ(diagram_potential(build_diagram(s, n, true)), c.total_phase()) << to_string(s) << n;
    }
  }
}

TEST(Diagram, C2AgainstExplicitComposition) {
  ComposedKernel c = compose(std::vector<std::pair<std::string, int>>{{"C>D", 2}, {"D>C", 2}, {"C>D", 1}}, true);
  EXPECT_EQ(diagram_potential(build_diagram(SeriesTag::C, 2, true)), c.total_phase());
}

TEST(Diagram, CFromDErasesTopRow) {
  for (int n = 1; n <= 4; ++n) {
    EXPECT_EQ(diagram_potential(build_c_from_d(n, true)),
              diagram_potential(build_diagram(SeriesTag::C, n, true)));
  }
}

TEST(Relations, AllHold) {
  for (SeriesTag s : kSeries) {
    for (int n = lowest(s); n <= highest(s); ++n) {
      Diagram d = build_diagram(s, n);
      for (const auto& r : relations(s, n)) EXPECT_TRUE(verify_relation(d, r)) << to_string(r);
    }
  }
}

TEST(Relations, BSourcePairs) {
  auto rs = relations(SeriesTag::B, 3);
  Diagram d = build_diagram(SeriesTag::B, 3);
  int found = 0;
  for (const auto& r : rs) {
    const auto* rhs = std::get_if<std::vector<std::string>>(&r.rhs);
    if (r.lhs.size() == 1 && rhs && rhs->size() == 1 && r.lhs[0].rfind("a_{", 0) == 0) {
      ++found;
      EXPECT_TRUE(verify_relation(d, r));
    }
  }
  EXPECT_EQ(found, 3);
}

TEST(Relations, UnknownLabelThrows) {
  MonomialRelation r{{"q_{9,9}"}, std::vector<std::string>{"a_{1,1}"}};
  EXPECT_THROW(verify_relation(build_diagram(SeriesTag::A, 3), r), Error);
}

TEST(RelationsProperty, EveryMutationIsCaught) {
  std::mt19937 rng(99);
  for (SeriesTag s : kSeries) {
    for (int n = std::max(2, lowest(s)); n <= highest(s); ++n) {
      Diagram d = build_diagram(s, n);
      auto rs = relations(s, n);
      for (std::size_t a = 0; a < d.arrows.size(); ++a) {
        for (int sample = 0; sample < 3; ++sample) {
          VarId target = d.vertices[rng() % d.vertices.size()];
          if (target == d.arrows[a].head) continue;
          if (d.arrows[a].tail && target == *d.arrows[a].tail) continue;
          Diagram m = mutate(d, a, target);
          bool broken = std::any_of(rs.begin(), rs.end(), [&](const auto& r) { return !verify_relation(m, r); });
          EXPECT_TRUE(broken) << to_string(s) << n << " " << d.arrows[a].label << " -> " << to_string(target);
        }
      }
    }
  }
}

TEST(Fold, TargetsUpToRank3) {
  for (SeriesTag s : {SeriesTag::B, SeriesTag::C, SeriesTag::D}) {
    for (int n = lowest(s); n <= 3; ++n) {
      FoldReport f = fold(s, n);
      EXPECT_TRUE(f.sets_equal) << to_string(s) << n;
    }
  }
  EXPECT_EQ(fold(SeriesTag::C, 2).ambient_gl, 4);
  EXPECT_EQ(fold(SeriesTag::B, 2).ambient_gl, 5);
}

TEST(Fold, IdentityOnA) {
  FoldReport f = fold(SeriesTag::A, 3);
  EXPECT_TRUE(f.sets_equal);
  for (const auto& [l, m] : f.folded) EXPECT_EQ(m, 1);
}

TEST(Dot, Gl2) {
  std::string dot = export_dot(build_diagram(SeriesTag::A, 2));
  EXPECT_EQ(count(dot, " -> "), 2u);
  EXPECT_EQ(count(dot, "[label=\"x_"), 3u);
}

TEST(Dot, D3CountsAndDeterminism) {
  std::string dot = export_dot(build_diagram(SeriesTag::D, 3));
  EXPECT_EQ(count(dot, " -> "), 14u);
  EXPECT_EQ(dot, export_dot(build_diagram(SeriesTag::D, 3)));
}

TEST(Diagram, JsonLists) {
  Json j = to_json(build_diagram(SeriesTag::C, 2));
  EXPECT_EQ(j["arrows"].size(), 9u);
}
