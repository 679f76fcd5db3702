#include <gtest/gtest.h>

#include <random>

#include "todaq/error.hpp"
#include "todaq/kernels.hpp"

using namespace todaq;

namespace {

LinForm v(Family f, int level, int i, long c = 1) { return LinForm::var(VarId{f, level, i}, Rational(c)); }
ExpPoly t(const CoefPoly& c, const LinForm& l) { return ExpPoly::term(c, l); }
CoefPoly g(int i) { return CoefPoly::g(i); }

using Ids = std::vector<std::pair<std::string, int>>;

const std::vector<std::string> kFinite{"A:rec", "BC>B", "B>BC", "C>D", "D>C"};
const std::vector<std::string> kAffine{"A1:baxter", "A2even:aff", "A2odd:aff", "B1:aff",
                                       "BC1>B1:aff", "C1>D1:aff", "D1>C1:aff"};

// Kernel with the coefficient of one phase term multiplied by `factor`.
KernelSpec perturbed(const KernelSpec& k, std::size_t which, const Rational& factor) {
  KernelSpec p = k;
  p.phase = ExpPoly{};
  std::size_t idx = 0;
  for (const auto& [l, c] : k.phase.terms()) {
    p.phase.add_term(l, idx++ == which ? c * CoefPoly(factor) : c);
  }
  return p;
}

}  // namespace

TEST(KernelCatalog, ARecursionRank1) {
  KernelSpec k = kernel("A:rec", 1);
  EXPECT_EQ(k.phase, t(1, v(Family::x, 1, 1) - v(Family::x, 2, 1)) +
                         t(g(1), v(Family::x, 2, 2) - v(Family::x, 1, 1)));
  EXPECT_EQ(k.left.h.vars.size(), 2u);
  EXPECT_EQ(k.right.h.vars.size(), 1u);
}

TEST(KernelCatalog, BCToBRank2) {
  KernelSpec k = kernel("BC>B", 2);
  ExpPoly want = t(g(1), v(Family::z, 2, 1)) + t(1, v(Family::x, 1, 1) - v(Family::z, 2, 1)) +
                 t(g(2), v(Family::z, 2, 2) - v(Family::x, 1, 1));
  EXPECT_EQ(k.phase, want);
  EXPECT_EQ(k.left.tag, SeriesTag::BC);
  EXPECT_EQ(k.right.tag, SeriesTag::B);
}

TEST(KernelCatalog, CToDRank2) {
  KernelSpec k = kernel("C>D", 2);
  ExpPoly want = t(1, v(Family::x, 2, 1) - v(Family::z, 2, 1)) +
                 t(g(1), v(Family::z, 2, 2) - v(Family::x, 2, 1)) +
                 t(1, v(Family::x, 2, 2) - v(Family::z, 2, 2)) +
                 t(g(2), -v(Family::x, 2, 2) - v(Family::z, 2, 2));
  EXPECT_EQ(k.phase, want);
}

TEST(KernelCatalog, UnknownIdsAndRanks) {
  EXPECT_THROW(kernel("BOGUS", 3), UnsupportedError);
  EXPECT_THROW(kernel("D>C", 1), UnsupportedError);
  EXPECT_THROW(kernel("D1>C1:aff", 2), UnsupportedError);
  EXPECT_FALSE(is_known_kernel("BOGUS"));
  EXPECT_EQ(kernel_ids().size(), 16u);
}

TEST(KernelResidual, FiniteKernelsVanishExactly) {
  for (const auto& id : kFinite) {
    for (int n = kernel_min_rank(id); n <= 8; ++n) {
      KernelSpec k = kernel(id, n);
      EXPECT_TRUE(intertwining_residual(k).zero()) << id << " n=" << n;
      EXPECT_TRUE(induced_potentials(k).mixed_agree()) << id << " n=" << n;
    }
  }
}

TEST(KernelResidual, AffineKernelsVanishExactly) {
  for (const auto& id : kAffine) {
    for (int n = std::max(2, kernel_min_rank(id)); n <= 6; ++n) {
      EXPECT_TRUE(intertwining_residual(kernel(id, n)).zero()) << id << " n=" << n;
    }
  }
}

TEST(KernelResidual, InducedPotentialsAreTheHamiltonians) {
  for (const auto& id : kernel_ids()) {
    if (is_window_kernel(id)) continue;
    for (int n = kernel_min_rank(id); n <= 5; ++n) {
      KernelSpec k = kernel(id, n);
      InducedPotentials p = induced_potentials(k);
      EXPECT_EQ(p.left, k.left.h.potential) << id << " n=" << n;
      EXPECT_EQ(p.right, k.right.h.potential) << id << " n=" << n;
    }
  }
}

TEST(KernelResidual, DoubledArrowBreaksOnePairing) {
  KernelSpec k = kernel("A:rec", 1);
  KernelSpec p = perturbed(k, 0, Rational(2));
  Residual r = intertwining_residual(p);
  ASSERT_FALSE(r.zero());
  // the cross term e^{x22 - x21} no longer matches the gl_2 potential
  EXPECT_FALSE(r.value.coefficient(v(Family::x, 2, 2) - v(Family::x, 2, 1)).is_zero());
}

TEST(KernelInduced, ARecursionRightSide) {
  InducedPotentials p = induced_potentials(kernel("A:rec", 1));
  EXPECT_EQ(p.left, t(g(1), v(Family::x, 2, 2) - v(Family::x, 2, 1)));
  EXPECT_TRUE(p.right.is_zero());
}

TEST(KernelInduced, BCBracketHalves) {
  InducedPotentials p = induced_potentials(kernel("BC>B", 2));
  EXPECT_EQ(p.left.coefficient(v(Family::z, 2, 1)), CoefPoly::monomial(frac(1, 2), GMonomial::g(1)));
  EXPECT_EQ(p.left.coefficient(v(Family::z, 2, 1, 2)), CoefPoly::monomial(frac(1, 2), GMonomial::g(1, 2)));
}

TEST(KernelInduced, EmptyPhase) {
  KernelSpec k = kernel("C>D", 3);
  k.phase = ExpPoly{};
  InducedPotentials p = induced_potentials(k);
  EXPECT_TRUE(p.left.is_zero());
  EXPECT_TRUE(p.right.is_zero());
}

TEST(KernelCompose, BAndCSteps) {
  for (int k = 1; k <= 4; ++k) {
    ComposedKernel b = compose(Ids{{"B>BC", k + 1}, {"BC>B", k + 1}});
    EXPECT_EQ(b.head.tag, SeriesTag::B);
    EXPECT_EQ(b.factors.back().right.rank, k);
    EXPECT_TRUE(composed_intertwining_check(b));
    ComposedKernel c = compose(Ids{{"C>D", k + 1}, {"D>C", k + 1}});
    EXPECT_EQ(c.factors.back().right.tag, SeriesTag::C);
    EXPECT_EQ(c.factors.back().right.rank, k);
    EXPECT_TRUE(composed_intertwining_check(c));
  }
  ComposedKernel single = compose(Ids{{"C>D", 2}});
  EXPECT_TRUE(single.integration_variables().empty());
  EXPECT_EQ(composed_intertwining_check(single), intertwining_residual(kernel("C>D", 2)).zero());
}

TEST(KernelCompose, MismatchedSidesRejected) {
  EXPECT_THROW(compose(Ids{{"B>BC", 3}, {"BC>B", 2}}), PreconditionError);
}

TEST(KernelCompose, PerturbedFactorFails) {
  ComposedKernel q = q_operator(SeriesTag::B1aff, 3);
  EXPECT_TRUE(composed_intertwining_check(q));
  q.factors[1] = perturbed(q.factors[1], 1, Rational(3));
  EXPECT_FALSE(composed_intertwining_check(q));
}

TEST(KernelCompose, CheckIsConjunctionOfFactors) {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    ComposedKernel c = compose(Ids{{"D>C", 3}, {"C>D", 2}, {"D>C", 2}});
    bool expect = true;
    for (auto& f : c.factors) {
      if (rng() % 3 == 0) {
        f = perturbed(f, rng() % f.phase.size(), Rational(2));
        expect = false;
      }
    }
    EXPECT_EQ(composed_intertwining_check(c), expect);
  }
}

TEST(KernelQ, EveryQOperatorIntertwines) {
  for (SeriesTag s : q_operator_series()) {
    int lo = std::max(3, min_rank(s));
    for (int n = lo; n <= 5; ++n) {
      EXPECT_TRUE(composed_intertwining_check(q_operator(s, n))) << to_string(s) << n;
    }
  }
}

TEST(KernelChain, IntegrationCounts) {
  for (int n = 1; n <= 6; ++n) {
    EXPECT_EQ(wavefunction_chain(SeriesTag::A, n + 1).integration_variables().size(),
              static_cast<std::size_t>(n * (n + 1) / 2));
    EXPECT_EQ(wavefunction_chain(SeriesTag::B, n).integration_variables().size(),
              static_cast<std::size_t>(n * n));
    EXPECT_EQ(wavefunction_chain(SeriesTag::C, n).integration_variables().size(),
              static_cast<std::size_t>(n * n));
    if (n >= 2) {
      EXPECT_EQ(wavefunction_chain(SeriesTag::D, n).integration_variables().size(),
                static_cast<std::size_t>(n * (n - 1)));
    }
  }
}

TEST(KernelLimit, BaxterToRecursion) {
  for (int n = 2; n <= 6; ++n) {
    KernelSpec a = baxter_limit(n);
    KernelSpec b = kernel("A:rec", n - 1);
    EXPECT_EQ(a.phase, b.phase) << n;
    EXPECT_EQ(a.left.h, b.left.h) << n;
    EXPECT_EQ(a.right.h, b.right.h) << n;
    EXPECT_TRUE(intertwining_residual(a).zero());
  }
}

TEST(KernelLimit, AbsentVariableIsIdentity) {
  KernelSpec k = kernel("C>D", 3);
  KernelSpec d = limit_drop(k, 99, VarId{Family::y, 7, 1});
  EXPECT_EQ(d.phase, k.phase);
  EXPECT_EQ(d.left.h, k.left.h);
  EXPECT_EQ(d.right.h, k.right.h);
}

TEST(KernelLimit, KeepingTheCouplingIsAnError) {
  const int n = 3;
  try {
    limit_drop(kernel("A1:baxter", n), 1, VarId{Family::x, 0, n});
    FAIL() << "expected PreconditionError";
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("g3*e^(-x.0.3 + y.0.1)"), std::string::npos) << e.what();
  }
}

TEST(KernelWindow, BoundarySupported) {
  for (const char* id : {"Ainf", "Binf", "Cinf", "Dinf"}) {
    for (int N : {3, 6}) {
      WindowedResidual w = windowed_residual(id, N);
      EXPECT_TRUE(w.boundary_supported) << id << " N=" << N;
      for (const auto& [l, c] : w.residual.value.terms()) {
        for (const auto& [var, q] : l.coeffs()) EXPECT_GE(var.index, N - 1);
      }
    }
  }
  EXPECT_THROW(windowed_residual("C>D", 4), UnsupportedError);
}

TEST(KernelProperty, GaugeCovariance) {
  std::mt19937 rng(2024);
  std::vector<std::string> ids{"A:rec", "B>BC", "C>D", "D>C", "B1:aff", "C1>D1:aff"};
  for (int trial = 0; trial < 40; ++trial) {
    const std::string& id = ids[rng() % ids.size()];
    int n = kernel_min_rank(id) + static_cast<int>(rng() % 3);
    KernelSpec k = kernel(id, n);
    if (rng() % 2) k = perturbed(k, rng() % k.phase.size(), Rational(5));
    auto var_set = k.phase.variables();
    std::vector<VarId> vars(var_set.begin(), var_set.end());
    VarId var = vars[rng() % vars.size()];
    Rational lambda = frac(static_cast<long>(rng() % 7) + 1, static_cast<long>(rng() % 5) + 1);
    KernelSpec s = gauge_shift(k, var, lambda);
    EXPECT_EQ(intertwining_residual(s).zero(), intertwining_residual(k).zero()) << id << n;
    EXPECT_EQ(intertwining_residual(s).value, scale_var(intertwining_residual(k).value, var, lambda));
  }
}

TEST(KernelReport, JsonFields) {
  Json j = verify_report(kernel("C>D", 3));
  EXPECT_EQ(j["id"], "C>D");
  EXPECT_EQ(j["residual_zero"], true);
  EXPECT_EQ(j["mixed_agree"], true);
}
