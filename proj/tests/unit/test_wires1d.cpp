#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bic/wires1d.hpp"

using namespace bic;

namespace {
constexpr double kPi = std::numbers::pi;
const cplx I(0.0, 1.0);
}  // namespace

TEST(Well, FluxConservedAndDeterminantClosedForm) {
  for (double k : {0.3, 1.0, 2.7})
    for (double q : {0.5, 1.9, 4.0})
      for (double L : {0.4, 1.7}) {
        const WellParams p{k, q, L};
        const auto s = well_solve(p);
        EXPECT_NEAR(std::norm(s.r) + std::norm(s.t), 1.0, 1e-12);
        EXPECT_LT(std::abs(s.det - well_det_closed(p)), 1e-10 * std::max(1.0, std::abs(s.det)));
      }
}

TEST(Well, TransmissionTextbookFormula) {
  // |t|^2 = 1 / (1 + (k^2 - q^2)^2 sin^2(qL) / (4 k^2 q^2))
  const WellParams p{1.1, 2.3, 1.4};
  const double s = std::sin(p.q * p.L);
  const double ref = 1.0 / (1.0 + std::pow(p.k * p.k - p.q * p.q, 2) * s * s / (4 * p.k * p.k * p.q * p.q));
  EXPECT_NEAR(std::norm(well_solve(p).t), ref, 1e-12);
}

TEST(Well, NoBarrierIsTransparent) {
  const auto s = well_solve({1.3, 1.3, 2.0});
  EXPECT_NEAR(std::abs(s.r), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(s.t), 1.0, 1e-13);
}

TEST(Ring, ClosedFormMatchesSolveOnGrid) {
  double worst = 0.0;
  for (int i = 1; i <= 60; ++i)
    for (int j = 0; j < 60; ++j) {
      const RingParams p{4.0 * kPi * i / 60.0 + 0.013, 4.0 * kPi * j / 60.0 + 0.007};
      const auto a = ring_solve(p), b = ring_closed_form(p);
      if (a.singular || b.singular) continue;
      worst = std::max({worst, std::abs(a.t - b.t), std::abs(a.r - b.r)});
      EXPECT_NEAR(std::norm(a.t) + std::norm(a.r), 1.0, 1e-10);
    }
  EXPECT_LT(worst, 1e-12);
}

TEST(Ring, SingularAtBICPoints) {
  for (int m : {1, 2})
    for (int n : {1, 2}) {
      const Mat6c f = ring_matrix({2 * kPi * m, 2 * kPi * n});
      EXPECT_LT(std::abs(f.determinant()), 1e-10);
      const auto a = ring_bic_analysis(m, n);
      EXPECT_LT(a.right_residual, 1e-10);
      EXPECT_LT(a.left_residual, 1e-10);
    }
}

TEST(Ring, NullVectorsUpToNormalization) {
  const auto a = ring_bic_analysis(1, 1);
  Vec6c right, left;
  right << 0, 0, 1, -1, -1, 1;
  left << -1, 1, 1, -1, 0, 0;
  auto aligned = [](const Vec6c& x, const Vec6c& y) {
    const cplx c = y.normalized().dot(x.normalized());
    return std::abs(std::abs(c) - 1.0);
  };
  EXPECT_LT(aligned(a.f0, right), 1e-10);
  EXPECT_LT(aligned(a.f0_left, left), 1e-10);
}

TEST(Zeeman, FluxConservedWhenDownChannelClosed) {
  ZeemanParams p{2.0, kPi / 4, 1.3, 10.0, kPi / 3, -20.0};
  ASSERT_FALSE(zeeman_wavenumbers(p).down_open);
  const auto s = zeeman_scatter(p);
  EXPECT_NEAR(std::norm(s.r_up) + std::norm(s.t_up), 1.0, 1e-10);
}

TEST(Zeeman, BICPointsAreSingularAndProfilesMatch) {
  ZeemanParams p{0.0, kPi / 4, 1.0, 10.0, kPi / 3, -20.0};
  int count = 0;
  for (auto par : {Parity::Symmetric, Parity::Antisymmetric})
    for (const auto& b : zeeman_bic_points(p, par, -10, 30, 0.01, 6)) {
      ++count;
      ZeemanParams q = p;
      q.E = b.E;
      q.L = b.L;
      EXPECT_LE(zeeman_sigma_min(q), 1e-7);
      const auto pr = zeeman_bic_profile(q, 201);
      EXPECT_LT(pr.matching_error, 1e-6);
    }
  EXPECT_GT(count, 0);
}

TEST(Zeeman, ReflectionLoopAroundBICShowsCollapse) {
  ZeemanParams p{0.0, kPi / 4, 1.0, 10.0, kPi / 3, -20.0};
  const auto v = zeeman_bic_points(p, Parity::Symmetric, -10, 30, 0.01, 6);
  ASSERT_FALSE(v.empty());
  ZeemanParams q = p;
  q.E = v.front().E;
  q.L = v.front().L;
  const auto l = zeeman_reflection_loop(q, 0.05, 0.01);
  EXPECT_LT(l.min, 1e-3);
  EXPECT_GT(l.max, 1.0 - 1e-3);
}

TEST(Zeeman, RejectsBadInput) {
  ZeemanParams p{0.0, kPi / 4, -1.0, 10.0, kPi / 3, -20.0};
  EXPECT_ANY_THROW(zeeman_check(p));
}
