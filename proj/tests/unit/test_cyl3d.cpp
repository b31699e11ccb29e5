#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bic/cyl3d.hpp"

using namespace bic;

namespace {

constexpr double kPi = std::numbers::pi;
const cplx I(0.0, 1.0);

const CylSetup& setup() {
  static const CylSetup s = cyl_setup(CylCavity{}, 1.5, 8);
  return s;
}

// Disk profile from the standard library Bessel function.
cplx profile(double R, int m, double mu, double r, double phi) {
  const int am = std::abs(m);
  const double radial = mu == 0.0 ? std::sqrt(2.0) / R
                                  : std::sqrt(2.0 / (mu * mu - m * m)) * mu / R *
                                        std::cyl_bessel_j(am, mu * r / R) / std::cyl_bessel_j(am, mu);
  return radial * std::exp(I * (m * phi)) / std::sqrt(2.0 * kPi);
}

// Port overlap by composite Simpson in rho and the trapezoid rule in alpha.
cplx port_overlap(double R, const CylMode& md, const CylChannel& ch, double r0, double angle) {
  const int nr = 400, na = 512;
  const double cx = r0 * std::cos(angle), cy = r0 * std::sin(angle);
  cplx s = 0.0;
  for (int i = 0; i <= nr; ++i) {
    const double rho = static_cast<double>(i) / nr;
    const double wr = (i == 0 || i == nr) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    cplx inner = 0.0;
    for (int j = 0; j < na; ++j) {
      const double a = 2.0 * kPi * j / na;
      const double x = cx + rho * std::cos(a), y = cy + rho * std::sin(a);
      inner += std::conj(profile(R, md.m, md.mu, std::hypot(x, y), std::atan2(y, x))) *
               profile(1.0, ch.p, ch.mu, rho, a);
    }
    s += wr * rho * inner;
  }
  return s * (1.0 / (3.0 * nr)) * (2.0 * kPi / na);
}

}  // namespace

TEST(CylModes, OrderedAndCounted) {
  CylCavity c;
  const auto m = cyl_modes(c);
  EXPECT_EQ(m.size(), static_cast<std::size_t>((2 * c.m_max + 1) * c.n_max * c.l_max));
  EXPECT_EQ(cyl_label({-1, 1, 1, 1.84}), "-111");
  const auto basis = cyl_basis(c, m);
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double ref = m[i].mu * m[i].mu / (c.R * c.R) + std::pow(kPi * (m[i].l - 1) / c.L, 2);
    EXPECT_NEAR(basis.energies(i), ref, 1e-12);
  }
}

TEST(CylChannels, SortedByCutoff) {
  const auto ch = cyl_channels(8);
  ASSERT_EQ(ch.size(), 8u);
  EXPECT_EQ(ch[0].p, 0);
  EXPECT_EQ(ch[0].mu, 0.0);
  EXPECT_EQ(ch[1].p, 1);
  EXPECT_EQ(ch[2].p, -1);
  for (std::size_t i = 1; i < ch.size(); ++i) EXPECT_LE(ch[i - 1].mu, ch[i].mu);
}

TEST(CylProfiles, MatchStandardLibraryAndAreOrthonormal) {
  const double R = 3.0;
  const auto modes = cyl_modes({R, 1.0, 2, 2, 1});
  for (const auto& a : modes)
    for (double r : {0.0, 0.7, 2.9}) EXPECT_LT(std::abs(cyl_cavity_profile(R, a.m, a.mu, r, 0.4) - profile(R, a.m, a.mu, r, 0.4)), 1e-12);
  const int nr = 600, na = 64;
  for (const auto& a : modes)
    for (const auto& b : modes) {
      cplx s = 0.0;
      for (int i = 0; i <= nr; ++i) {
        const double r = R * i / nr, wr = (i == 0 || i == nr) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        for (int j = 0; j < na; ++j) {
          const double ph = 2.0 * kPi * j / na;
          s += wr * r * std::conj(cyl_cavity_profile(R, a.m, a.mu, r, ph)) * cyl_cavity_profile(R, b.m, b.mu, r, ph);
        }
      }
      s *= (R / (3.0 * nr)) * (2.0 * kPi / na);
      const bool same = a.m == b.m && a.n == b.n;
      EXPECT_LT(std::abs(s - (same ? 1.0 : 0.0)), 1e-9);
    }
}

TEST(CylCoupling, MatchesIndependentQuadratureAtRotatedPort) {
  CylCavity c;
  c.L = 1.0;
  c.m_max = 2;
  c.n_max = 2;
  c.l_max = 1;
  const auto modes = cyl_modes(c);
  const auto ch = cyl_channels(4);
  const double theta = 0.37 * kPi;
  const auto cp = cyl_coupling(c, modes, ch, {1.5, theta, false});
  EXPECT_TRUE(cp.converged);
  for (std::size_t i = 0; i < modes.size(); ++i)
    for (std::size_t k = 0; k < ch.size(); ++k) {
      const cplx ref = port_overlap(c.R, modes[i], ch[k], 1.5, theta);
      EXPECT_LT(std::abs(cp.W(i, k) - ref), 1e-8) << cyl_label(modes[i]) << " " << ch[k].p;
    }
}

TEST(CylCoupling, RotationPhaseLaw) {
  CylCavity c;
  c.L = 1.0;
  c.l_max = 1;
  const auto modes = cyl_modes(c);
  const auto ch = cyl_channels(6);
  const double theta = 1.1;
  const auto a = cyl_coupling(c, modes, ch, {1.5, 0.0, false});
  const auto b = cyl_coupling(c, modes, ch, {1.5, theta, false});
  for (std::size_t i = 0; i < modes.size(); ++i)
    for (std::size_t k = 0; k < ch.size(); ++k) {
      const cplx ph = std::exp(I * ((ch[k].p - modes[i].m) * theta));
      EXPECT_LT(std::abs(b.W(i, k) - ph * a.W(i, k)), 1e-8);
    }
}

TEST(CylCoupling, RejectsPortOutsideFace) {
  CylCavity c;
  EXPECT_THROW(cyl_coupling(c, cyl_modes(c), cyl_channels(2), {2.5, 0.0, false}), std::domain_error);
}

TEST(CylScattering, UnitaryInSingleChannelBand) {
  const auto& s = setup();
  EXPECT_TRUE(s.converged);
  for (double L : {3.0, 5.0})
    for (double w2 : {0.2, 1.0, 3.0}) {
      const auto t = cyl_transmittance(s, L, kPi / 4, w2);
      ASSERT_EQ(t.S.S.rows(), 2);
      EXPECT_LT((t.S.S.adjoint() * t.S.S - MatC::Identity(2, 2)).norm(), 1e-9);
    }
}

TEST(CylScattering, MirrorSymmetricInAngle) {
  const auto& s = setup();
  for (double dphi : {0.3, 1.2, 2.5}) {
    const auto a = cyl_transmittance(s, 4.2, dphi, 0.7), b = cyl_transmittance(s, 4.2, -dphi, 0.7);
    EXPECT_NEAR(a.T, b.T, 1e-10);
  }
}

TEST(CylScattering, WidthsNonnegative) {
  const auto& s = setup();
  const auto H = cyl_effective(s, 4.0, 0.5, 1.0);
  const auto sp = eigen(H.H);
  for (int i = 0; i < sp.values.size(); ++i) EXPECT_LE(sp.values(i).imag(), 1e-12);
}

TEST(CylField, ZeroExpansionGivesZeroField) {
  const auto& s = setup();
  const auto f = cyl_surface_field(s, 4.0, VecC::Zero(s.modes.size()), 9, 5);
  EXPECT_EQ(f.values.rows(), 5);
  EXPECT_EQ(f.values.cols(), 9);
  EXPECT_EQ(f.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(TruncatedModel, CoefficientsFromQuadrature) {
  const auto tc = truncated_from_setup(setup());
  EXPECT_NEAR(tc.w0, std::sqrt(2.0) / 3.0, 1e-6);
  EXPECT_NEAR(tc.w1, 0.269, 0.002);
  EXPECT_NEAR(tc.v1, 0.1141, 0.0005);
  EXPECT_NEAR(tc.v2, -0.0141, 0.0005);
}

TEST(TruncatedModel, DegeneracyRestoredAtQuarterTurn) {
  const TruncatedCMT tc;
  for (double L : {4.0, 5.05, 6.0}) {
    const auto r = cmt_truncated(tc, L, kPi / 2, 0.39);
    EXPECT_EQ(r.E2, r.E3);
  }
}

TEST(TruncatedModel, BICLengthAtEighthTurn) {
  const auto b = cmt_bic_point(TruncatedCMT{}, kPi / 4);
  ASSERT_TRUE(b.found);
  EXPECT_NEAR(b.L, 5.0512, 0.02 * 5.0512);
  EXPECT_LT(b.leak, 1e-10);
  EXPECT_GT(b.other_leak, 1e-3);
}
