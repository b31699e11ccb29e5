#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bic/toymodels.hpp"

using namespace bic;

namespace {

// Independent derivation: the bound vector is orthogonal to the coupling
// column (w1, w2), w_n = sqrt(gamma_n / 2); H_B v = E v then gives
// eps* = u (g1 - g2) / (2 sqrt(g1 g2)), E* = eps* - u sqrt(g1 / g2).
double eps_star(double g1, double g2, double u) { return u * (g1 - g2) / (2.0 * std::sqrt(g1 * g2)); }
double energy_star(double g1, double g2, double u) { return eps_star(g1, g2, u) - u * std::sqrt(g1 / g2); }

}  // namespace

TEST(TwoLevel, BICPointMatchesDerivation) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> g(0.01, 2.0), uu(-30.0, 30.0);
  for (int i = 0; i < 200; ++i) {
    const double g1 = g(rng), g2 = g(rng), u = uu(rng);
    const auto b = twolevel_bic_point(g1, g2, u);
    ASSERT_TRUE(b.has_value());
    EXPECT_NEAR(b->eps, eps_star(g1, g2, u), 1e-12 * std::max(1.0, std::abs(b->eps)));
    EXPECT_NEAR(b->energy, energy_star(g1, g2, u), 1e-12 * std::max(1.0, std::abs(b->energy)));
    const auto z = twolevel_eigenvalues({b->eps, g1, g2, u});
    const double m = std::min(std::abs(z[0].imag()), std::abs(z[1].imag()));
    EXPECT_LE(m, 1e-10);
  }
}

TEST(TwoLevel, DegenerateCouplingHasNoCondition) {
  EXPECT_FALSE(twolevel_bic_point(0.0, 0.3, 1.0).has_value());
}

TEST(TwoLevel, KnownRegimes) {
  EXPECT_NEAR(twolevel_bic_point(0.1, 0.1, 0.0)->eps, 0.0, 1e-15);
  EXPECT_NEAR(twolevel_bic_point(0.1, 0.2, 0.0)->eps, 0.0, 1e-15);
  EXPECT_NEAR(twolevel_bic_point(0.1, 0.2, 25.0)->eps, -8.838834764831844, 1e-9);
}

TEST(TwoLevel, EigenvaluesAreRootsOfDeterminant) {
  const TwoLevelParams p{0.3, 0.1, 0.25, 0.4};
  const MatC H = twolevel_heff(p);
  for (const auto z : twolevel_eigenvalues(p)) {
    const cplx d = (H(0, 0) - z) * (H(1, 1) - z) - H(0, 1) * H(1, 0);
    EXPECT_LT(std::abs(d), 1e-13);
    EXPECT_LE(z.imag(), 1e-15);
  }
}

TEST(TwoLevel, ResidueExpansionMatchesGreenFunction) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> d(-1.0, 1.0), g(0.02, 0.5);
  for (int i = 0; i < 50; ++i) {
    const TwoLevelParams p{d(rng), g(rng), g(rng), d(rng)};
    const double E = 2.0 * d(rng);
    const auto t = twolevel_transmission(E, p);
    const auto S = smatrix(twolevel_effective(p), E);
    EXPECT_LT(std::abs(t.T - S.element(1, 0)), 1e-10);
    EXPECT_LT(std::abs(t.R - S.element(0, 0)), 1e-10);
    EXPECT_NEAR(std::norm(t.T) + std::norm(t.R), 1.0, 1e-10);
  }
}

TEST(TwoLevel, SymmetricCaseAtBICHasFiniteTransmission) {
  const TwoLevelParams p{0.0, 0.1, 0.1, 0.0};
  const auto t = twolevel_transmission(0.0, p);
  EXPECT_FALSE(t.singular);
  EXPECT_TRUE(std::isfinite(std::norm(t.T)));
}

TEST(TwoLevel, FanoCollapseAroundSymmetricBIC) {
  // Near eps = 0 the transmission zero and unit approach the BIC energy.
  auto zero_one_gap = [](double eps) {
    const TwoLevelParams p{eps, 0.1, 0.1, 0.0};
    double e0 = 0, e1 = 0, tmin = 2, tmax = -1;
    for (int i = 0; i <= 20000; ++i) {
      const double E = -0.2 + 0.4 * i / 20000.0;
      const double T = std::norm(twolevel_transmission(E, p).T);
      if (T < tmin) tmin = T, e0 = E;
      if (T > tmax) tmax = T, e1 = E;
    }
    return std::abs(e1 - e0);
  };
  EXPECT_LT(zero_one_gap(0.005), zero_one_gap(0.02));
  EXPECT_LT(zero_one_gap(0.005), 0.05);
}

TEST(FPChain, HamiltonianIsMirrorSymmetric) {
  const FPChainParams p;
  const auto h = fp_chain_hb(p);
  EXPECT_LT((h - h.transpose()).norm(), 1e-15);
  Eigen::Matrix<double, 5, 5> P = Eigen::Matrix<double, 5, 5>::Zero();
  for (int i = 0; i < 5; ++i) P(i, 4 - i) = 1.0;
  EXPECT_LT((P * h * P - h).norm(), 1e-15);
}

TEST(FPChain, SpectrumDiagonalizes) {
  const FPChainParams p;
  const auto s = fp_chain_spectrum(p);
  const auto h = fp_chain_hb(p);
  EXPECT_LT((h * s.vectors - s.vectors * s.values.asDiagonal()).norm(), 1e-12);
}

TEST(FPChain, BICAtMidpoint) {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> e(-1.0, 1.0), c(0.1, 0.6);
  for (int i = 0; i < 25; ++i) {
    FPChainParams p;
    p.eps1 = e(rng);
    p.eps2 = e(rng);
    p.u = c(rng);
    p.v0 = c(rng);
    const double mid = 0.5 * (p.eps1 + p.eps2);
    const auto r = fp_chain_bic(p, mid - 0.7, mid + 0.6, 27);
    EXPECT_NEAR(r.p, mid, 1e-8);
    EXPECT_LE(std::abs(r.width), 1e-10);
    EXPECT_LE(r.residual, 1e-7);
  }
}

TEST(FPChain, UnitaryScattering) {
  const FPChainParams p;
  const auto H = fp_chain_effective(p, p.E);
  for (double E : {-1.0, -0.3, 0.2, 0.9}) {
    const auto S = smatrix(H, E);
    EXPECT_LT((S.S.adjoint() * S.S - MatC::Identity(2, 2)).norm(), 1e-10);
  }
}
