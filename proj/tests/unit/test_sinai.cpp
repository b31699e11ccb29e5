#include <gtest/gtest.h>

#include <cmath>
#include <thread>

#include "bic/sinai.hpp"

using namespace bic;

namespace {

RectCavity small_cavity(int n) {
  RectCavity c;
  c.Lx = 4.0;
  c.Ly = 8.0 / std::sqrt(3.0);
  c.flavor = Flavor::Neumann;
  c.m_max = c.n_max = n;
  return c;
}

}  // namespace

TEST(SinaiPotential, MatchesBruteForceQuadrature) {
  const auto c = small_cavity(3);
  const auto modes = rect_modes(c);
  const SinaiBump b;
  const auto V = sinai_potential(c, modes, b);
  EXPECT_TRUE(V.converged);
  EXPECT_LT((V.V - V.V.transpose()).norm(), 1e-13);
  // Composite Simpson rule on a fine grid as the oracle.
  const int nx = 400, ny = 400;
  const double hx = c.Lx / nx, hy = c.Ly / ny;
  auto wt = [](int i, int n) { return (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0); };
  for (std::size_t i = 0; i < modes.size(); i += 3)
    for (std::size_t j = i; j < modes.size(); j += 2) {
      double s = 0.0;
      for (int ix = 0; ix <= nx; ++ix)
        for (int iy = 0; iy <= ny; ++iy) {
          const double x = -0.5 * c.Lx + ix * hx, y = -0.5 * c.Ly + iy * hy;
          const double r2 = (x - b.x0) * (x - b.x0) + (y - b.y0) * (y - b.y0);
          s += wt(ix, nx) * wt(iy, ny) * rect_mode_value(c, modes[i], x, y) * std::exp(-r2 / (b.R * b.R)) *
               rect_mode_value(c, modes[j], x, y);
        }
      s /= 9.0;
      EXPECT_NEAR(V.V(i, j), s * hx * hy, 1e-9) << i << " " << j;
    }
}

TEST(SinaiSpectrum, ReducesToRectangleAtZeroBump) {
  const auto c = small_cavity(4);
  const auto s = sinai_hamiltonian(c, SinaiBump{}, 1);
  std::vector<double> ref;
  for (const auto& m : s.modes) ref.push_back(m.E);
  std::sort(ref.begin(), ref.end());
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(s.values(i), ref[i], 1e-12);
}

TEST(SinaiSpectrum, EigenvectorsOrthonormal) {
  const auto c = small_cavity(4);
  const auto modes = rect_modes(c, {1, 0});
  const auto V = sinai_potential(c, modes, SinaiBump{});
  const auto s = sinai_spectrum(c, modes, V, 12.0);
  const int n = s.vectors.cols();
  EXPECT_LT((s.vectors.transpose() * s.vectors - Eigen::MatrixXd::Identity(n, n)).norm(), 1e-12);
}

TEST(SinaiEffective, UnitaryInSingleChannelBand) {
  const auto c = small_cavity(5);
  const auto modes = rect_modes(c);
  const auto V = sinai_potential(c, modes, SinaiBump{});
  for (double Vg : {-20.0, 0.0, 15.0})
    for (double E : {12.0, 25.0, 38.0}) {
      const auto H = sinai_effective(c, modes, V, Vg, E, {4, 1.0});
      const auto S = smatrix(H, E);
      EXPECT_LT((S.S.adjoint() * S.S - MatC::Identity(2, 2)).norm(), 1e-9);
    }
}

TEST(SinaiEffective, ReentrantAcrossThreads) {
  const auto c = small_cavity(5);
  const auto modes = rect_modes(c);
  const auto V = sinai_potential(c, modes, SinaiBump{});
  std::vector<MatC> serial(8), parallel(8);
  for (int i = 0; i < 8; ++i) serial[i] = sinai_effective(c, modes, V, -10.0 + 3.0 * i, 20.0, {4, 1.0}).H;
  std::vector<std::thread> pool;
  for (int i = 0; i < 8; ++i)
    pool.emplace_back([&, i] { parallel[i] = sinai_effective(c, modes, V, -10.0 + 3.0 * i, 20.0, {4, 1.0}).H; });
  for (auto& t : pool) t.join();
  for (int i = 0; i < 8; ++i) EXPECT_EQ((serial[i] - parallel[i]).norm(), 0.0);
}

TEST(SinaiBICs, SmallTruncationRecordsAreBound) {
  const auto c = small_cavity(5);
  SinaiScan sc;
  sc.vmin = -10.0;
  sc.vmax = 10.0;
  sc.points = 41;
  const auto v = sinai_accidental_bics(c, SinaiBump{}, 1, sc, {4, 1.0});
  ASSERT_FALSE(v.empty());
  int bound = 0;
  for (const auto& r : v) {
    EXPECT_GE(r.record.p, sc.vmin);
    EXPECT_LE(r.record.p, sc.vmax);
    if (r.kind == SinaiKind::NearBIC) continue;
    ++bound;
    EXPECT_LE(std::abs(r.record.width), 1e-8);
    EXPECT_LE(r.record.residual, 1e-7);
    double n = 0.0;
    for (const auto& m : r.expansion) n += std::norm(m.a);
    EXPECT_NEAR(n, 1.0, 1e-10);
  }
  EXPECT_GT(bound, 0);
  for (std::size_t i = 1; i < v.size(); ++i) EXPECT_LE(v[i - 1].record.omega2, v[i].record.omega2);
}

TEST(SinaiBICs, KindNames) {
  EXPECT_EQ(to_string(SinaiKind::Accidental), "accidental");
  EXPECT_EQ(to_string(SinaiKind::Protected), "protected");
}
