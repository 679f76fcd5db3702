#include <gtest/gtest.h>

#include <algorithm>

#include "todaq/error.hpp"
#include "todaq/rootsys.hpp"

using namespace todaq;

namespace {

LinForm e(int i, long c = 1) { return LinForm::var(basis(i), Rational(c)); }

int max_test_rank(SeriesTag t) { return is_infinite(t) ? 8 : 7; }

}  // namespace

TEST(RootSys, SimpleRootsExamples) {
  EXPECT_EQ(simple_roots(SeriesTag::B, 3), (std::vector<LinForm>{e(1), e(2) - e(1), e(3) - e(2)}));
  EXPECT_EQ(simple_roots(SeriesTag::D, 4),
            (std::vector<LinForm>{e(2) - e(1), e(3) - e(2), e(4) - e(3), -e(3) - e(4)}));
  EXPECT_EQ(simple_roots(SeriesTag::BC, 2), (std::vector<LinForm>{e(1, 2), e(1), e(2) - e(1)}));
  EXPECT_EQ(simple_roots(SeriesTag::C1aff, 2), (std::vector<LinForm>{e(1, 2), e(2) - e(1), e(2, -2)}));
}

TEST(RootSys, PositiveRootCounts) {
  EXPECT_EQ(positive_root_count(SeriesTag::B, 3), 9);
  EXPECT_EQ(positive_root_count(SeriesTag::D, 4), 12);
  EXPECT_EQ(positive_root_count(SeriesTag::A, 1), 1);
  for (int n = 1; n <= 8; ++n) {
    EXPECT_EQ(positive_root_count(SeriesTag::A, n), n * (n + 1) / 2);
    EXPECT_EQ(positive_root_count(SeriesTag::B, n), n * n);
    EXPECT_EQ(positive_root_count(SeriesTag::C, n), n * n);
  }
  EXPECT_THROW(positive_root_count(SeriesTag::A1aff, 3), UnsupportedError);
}

TEST(RootSys, DynkinExamples) {
  auto b2 = dynkin(SeriesTag::B, 2);
  ASSERT_EQ(b2.size(), 1u);
  EXPECT_EQ(b2[0].multiplicity, 2);
  // alpha_1 = e_1 is the short root, so the arrow points at it
  EXPECT_EQ(b2[0].direction, -1);

  auto a2 = dynkin(SeriesTag::A, 2);
  ASSERT_EQ(a2.size(), 1u);
  EXPECT_EQ(a2[0].multiplicity, 1);

  // D1aff(4): roots [e1+e2, e2-e1, e3-e2, e4-e3, -e3-e4]; forks at both ends
  auto d = dynkin(SeriesTag::D1aff, 4);
  auto has = [&](int i, int j) {
    return std::any_of(d.begin(), d.end(), [&](const DynkinEdge& x) {
      return (x.i == i && x.j == j) || (x.i == j && x.j == i);
    });
  };
  EXPECT_EQ(d.size(), 4u);
  EXPECT_TRUE(has(0, 2));
  EXPECT_TRUE(has(1, 2));
  EXPECT_TRUE(has(2, 3));
  EXPECT_TRUE(has(4, 2));
}

TEST(RootSysProperty, StoredEdgesMatchRecomputed) {
  for (SeriesTag t : all_series()) {
    for (int n = min_rank(t); n <= max_test_rank(t); ++n) {
      SCOPED_TRACE(to_string(t) + std::to_string(n));
      EXPECT_EQ(dynkin(t, n), dynkin_from_roots(simple_roots(t, n)));
    }
  }
}

TEST(RootSysProperty, BCDoubling) {
  for (SeriesTag t : {SeriesTag::BC, SeriesTag::BC1aff, SeriesTag::BC2aff, SeriesTag::BCinf}) {
    for (int n = min_rank(t); n <= 6; ++n) {
      auto r = simple_roots(t, n);
      EXPECT_EQ(r[0], r[1] * Rational(2)) << to_string(t) << n;
    }
  }
}

TEST(RootSys, RejectsBadRanks) {
  EXPECT_THROW(simple_roots(SeriesTag::A, 0), UnsupportedError);
  EXPECT_THROW(simple_roots(SeriesTag::D1aff, 2), UnsupportedError);
  EXPECT_THROW(parse_series("E8"), UnsupportedError);
}

TEST(RootSys, SeriesNamesRoundTrip) {
  for (SeriesTag t : all_series()) EXPECT_EQ(parse_series(to_string(t)), t);
}

TEST(RootSys, JsonCarriesRootsAndEdges) {
  Json j = to_json(root_system(SeriesTag::C, 3));
  EXPECT_EQ(j["rank"], 3);
  EXPECT_EQ(j["simple_roots"].size(), 3u);
  EXPECT_EQ(j["dynkin"].size(), 2u);
}
