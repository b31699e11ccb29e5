#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bic/sph3d.hpp"

using namespace bic;

namespace {

constexpr double kPi = std::numbers::pi;
const cplx I(0.0, 1.0);

const SphereSetup& setup() {
  static const SphereSetup s = sphere_setup({4.1, 3, 2}, 5);
  return s;
}

cplx ylm(int l, int m, double theta, double phi) {
  const double y = std::sph_legendre(l, std::abs(m), theta);
  const cplx v = y * std::exp(I * (std::abs(m) * phi));
  return m >= 0 ? v : ((m % 2) ? -1.0 : 1.0) * std::conj(v);
}

// Direct overlap of the axisymmetric channel with a port centred at (theta0, phi0).
cplx direct_p0(const SphereCavity& c, const SphereMode& md, double theta0, double phi0) {
  const int nr = 200, na = 256;
  const double wall = sphere_wall_value(c, md.l, md.kappa);
  cplx s = 0.0;
  for (int i = 0; i <= nr; ++i) {
    const double rho = static_cast<double>(i) / nr;
    const double wr = (i == 0 || i == nr) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double th = std::asin(rho / c.R);
    const double prof = std::cyl_bessel_j(0, 0.0) / std::sqrt(kPi);  // unit disk constant mode
    cplx inner = 0.0;
    for (int j = 0; j < na; ++j) {
      const double a = 2.0 * kPi * j / na;
      const double x = std::sin(th) * std::cos(a), y = std::sin(th) * std::sin(a), z = std::cos(th);
      const double x1 = x * std::cos(theta0) + z * std::sin(theta0), z1 = -x * std::sin(theta0) + z * std::cos(theta0);
      const double x2 = x1 * std::cos(phi0) - y * std::sin(phi0), y2 = x1 * std::sin(phi0) + y * std::cos(phi0);
      inner += std::conj(wall * ylm(md.l, md.m, std::acos(std::clamp(z1, -1.0, 1.0)), std::atan2(y2, x2))) * prof;
    }
    s += wr * rho * inner;
  }
  return s * (1.0 / (3.0 * nr)) * (2.0 * kPi / na);
}

}  // namespace

TEST(SphereModes, OrderAndEnergies) {
  const SphereCavity c{5.0, 2, 2};
  const auto m = sphere_modes(c);
  ASSERT_EQ(m.size(), 18u);
  EXPECT_EQ(m[0].kappa, 0.0);
  EXPECT_EQ(sphere_label(m[2]), "(1,-1,1)");
  const auto b = sphere_basis(c, m);
  for (std::size_t i = 0; i < m.size(); ++i) EXPECT_NEAR(b.energies(i), m[i].kappa * m[i].kappa / 25.0, 1e-14);
}

TEST(SphereModes, WallValueNormalization) {
  const SphereCavity c{3.0, 3, 3};
  for (const auto& md : sphere_modes(c)) {
    if (md.m != 0) continue;
    const double wall = sphere_wall_value(c, md.l, md.kappa);
    const double jl = md.kappa == 0.0 ? 1.0 : std::sph_bessel(md.l, md.kappa);
    const int n = 2000;
    double s = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double r = c.R * i / n, w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      const double f = md.kappa == 0.0 ? wall : wall * std::sph_bessel(md.l, md.kappa * r / c.R) / jl;
      s += w * f * f * r * r;
    }
    EXPECT_NEAR(s * c.R / (3.0 * n), 1.0, 1e-9) << sphere_label(md);
  }
}

TEST(SphereCoupling, RotatedPortMatchesDirectQuadrature) {
  const auto& s = setup();
  ASSERT_TRUE(s.converged);
  for (double th : {0.0, 0.9, 2.3})
    for (double ph : {0.0, 0.7}) {
      const MatC W = rotate_coupling(s.modes, s.pole, sphere_port_at(th, ph));
      for (std::size_t i = 0; i < s.modes.size(); ++i)
        EXPECT_LT(std::abs(W(i, 0) - direct_p0(s.cavity, s.modes[i], th, ph)), 1e-6)
            << sphere_label(s.modes[i]) << " at " << th << "," << ph;
    }
}

TEST(SphereCoupling, RotationRoundTrip) {
  const auto& s = setup();
  const MatC a = rotate_coupling(s.modes, s.pole, {0.0, 1.3, 0.0});
  const MatC b = rotate_coupling(s.modes, a, {0.0, -1.3, 0.0});
  EXPECT_LT((b - s.pole).norm(), 1e-12);
  // Rotations preserve the channel Gram matrix.
  EXPECT_LT((a.adjoint() * a - s.pole.adjoint() * s.pole).norm(), 1e-12);
}

TEST(SphereMirror, BlocksDecoupleForPortsInPlane) {
  const auto& s = setup();
  const std::vector<SpherePort> ports{sphere_port_at(0.0), sphere_port_at(2.2), sphere_port_at(1.1, kPi)};
  const auto H = sphere_effective(s, ports, 1.2);
  const MatC E = sphere_mirror_basis(s.modes, 1), O = sphere_mirror_basis(s.modes, -1);
  EXPECT_EQ(E.cols() + O.cols(), static_cast<Eigen::Index>(s.modes.size()));
  EXPECT_LT((E.adjoint() * E - MatC::Identity(E.cols(), E.cols())).norm(), 1e-12);
  EXPECT_LT((E.adjoint() * O).norm(), 1e-12);
  EXPECT_LT((E.adjoint() * H.H * O).norm(), 1e-9);
  const auto W = sphere_coupling_matrix(s, ports).W;
  const int nc = static_cast<int>(s.channels.size());
  for (int p = 0; p < 3; ++p) EXPECT_LT((O.adjoint() * W.col(p * nc)).norm(), 1e-9);
}

TEST(SphereScattering, Unitary) {
  const auto& s = setup();
  for (double th : {0.5, 2.0})
    for (double w2 : {0.3, 1.7, 3.2}) {
      const auto t = sphere_transmittance(s, {sphere_port_at(0.0), sphere_port_at(th)}, w2);
      ASSERT_EQ(t.S.S.rows(), 2);
      EXPECT_LT((t.S.S.adjoint() * t.S.S - MatC::Identity(2, 2)).norm(), 1e-9);
      EXPECT_GE(t.T, 0.0);
      EXPECT_LE(t.T, 1.0 + 1e-12);
    }
  EXPECT_THROW(sphere_transmittance(s, {sphere_port_at(0.0)}, 1.0), std::invalid_argument);
}

TEST(SphereField, ConstantModeIsUniform) {
  const auto& s = setup();
  VecC a = VecC::Zero(s.modes.size());
  a(0) = 1.0;
  const auto f = sphere_surface_field(s, a, 7, 9);
  EXPECT_EQ(f.values.rows(), 7);
  EXPECT_EQ(f.values.cols(), 9);
  const double ref = std::sqrt(3.0 / (4.0 * kPi)) / std::pow(s.cavity.R, 1.5);
  EXPECT_LT((f.values.array() - ref).abs().maxCoeff(), 1e-12);
}
