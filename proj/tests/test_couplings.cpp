#include <gtest/gtest.h>

#include <algorithm>

#include "todaq/couplings.hpp"

using namespace todaq;

namespace {

LinForm v(Family f, int level, int i, long c = 1) { return LinForm::var(VarId{f, level, i}, Rational(c)); }

KernelSpec without_term(const KernelSpec& k, const LinForm& drop) {
  KernelSpec r = k;
  r.phase = k.phase.filter([&](const LinForm& l, const CoefPoly&) { return l != drop; });
  return r;
}

std::size_t index_of(const CouplingSolution& s, const LinForm& l) {
  auto it = std::find(s.exponents.begin(), s.exponents.end(), l);
  return static_cast<std::size_t>(it - s.exponents.begin());
}

}  // namespace

TEST(SolveCouplings, RecoversARecursion) {
  KernelSpec k = kernel("A:rec", 2);
  CouplingSolution s = solve_couplings(k);
  ASSERT_TRUE(s.consistent);
  EXPECT_TRUE(s.deviating.empty());
  EXPECT_EQ(s.solved, s.printed);
  EXPECT_TRUE(s.residual_after.is_zero());
}

TEST(SolveCouplings, RecoversCToDIncludingLastCoupling) {
  CouplingSolution s = solve_couplings(kernel("C>D", 2));
  ASSERT_TRUE(s.consistent);
  std::size_t t = index_of(s, -v(Family::x, 2, 2) - v(Family::z, 2, 2));
  ASSERT_LT(t, s.solved.size());
  EXPECT_EQ(s.solved[t], CoefPoly::g(2));
  EXPECT_TRUE(s.deviating.empty());
}

TEST(SolveCouplings, MissingTermIsReported) {
  KernelSpec k = without_term(kernel("C>D", 2), -v(Family::x, 2, 2) - v(Family::z, 2, 2));
  ASSERT_FALSE(intertwining_residual(k).zero());
  CouplingSolution s = solve_couplings(k);
  EXPECT_FALSE(s.consistent);
  ASSERT_FALSE(s.unmatched.empty());
  bool names_potential = std::any_of(s.unmatched.begin(), s.unmatched.end(), [](const std::string& u) {
    return u.find("e^(-2*z.2.2)") != std::string::npos;
  });
  EXPECT_TRUE(names_potential);
}

TEST(SolveCouplings, PerturbedCoefficientIsCorrected) {
  KernelSpec k = kernel("B>BC", 3);
  KernelSpec p = k;
  p.phase = ExpPoly{};
  bool first = true;
  for (const auto& [l, c] : k.phase.terms()) {
    p.phase.add_term(l, first ? c * CoefPoly(Rational(3)) : c);
    first = false;
  }
  ASSERT_FALSE(intertwining_residual(p).zero());
  CouplingSolution s = solve_couplings(p);
  ASSERT_TRUE(s.consistent);
  EXPECT_FALSE(s.deviating.empty());
  EXPECT_TRUE(intertwining_residual(s.corrected(p)).zero());
}

TEST(SolveCouplings, CatalogIsConsistentAsPrinted) {
  for (const auto& id : kernel_ids()) {
    if (is_window_kernel(id)) continue;
    for (int n = kernel_min_rank(id); n <= 4; ++n) {
      CouplingSolution s = solve_couplings(kernel(id, n));
      EXPECT_TRUE(s.consistent) << id << " n=" << n;
      EXPECT_TRUE(s.deviating.empty()) << id << " n=" << n;
    }
  }
}

TEST(SolveCouplings, JsonShape) {
  Json j = to_json(solve_couplings(kernel("D>C", 2)));
  EXPECT_EQ(j["consistent"], true);
  EXPECT_EQ(j["terms"].size(), kernel("D>C", 2).phase.size());
  EXPECT_TRUE(j["deviating"].empty());
}
