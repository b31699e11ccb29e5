#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <thread>

#include "bic/planar2d.hpp"
#include "bic/sinai.hpp"
#include "bic/sweep.hpp"
#include "bic/toymodels.hpp"
#include "bic/wires1d.hpp"

using namespace bic;

namespace {

// Random frozen-coupling system: n modes, c open channels.
EffectiveHamiltonian random_system(std::mt19937_64& rng, int n, int c) {
  std::normal_distribution<double> g;
  ClosedBasis b;
  b.energies.resize(n);
  for (int i = 0; i < n; ++i) {
    b.energies(i) = 2.0 * g(rng);
    b.labels.push_back("m" + std::to_string(i));
  }
  ChannelSet ch;
  for (int k = 0; k < c; ++k) ch.add({k, "c" + std::to_string(k), 0.0, CouplingLaw::Value});
  CouplingMatrix W;
  W.W = MatC::Zero(n, c);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < c; ++k) W.W(i, k) = cplx(g(rng), g(rng)) * 0.4;
  MatC V = MatC::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) V(i, j) = cplx(g(rng), g(rng)) * 0.3, V(j, i) = std::conj(V(i, j));
  // omega2 = 1 makes every weight k = 1.
  return assemble(b, ch, W, 1.0, &V);
}

}  // namespace

TEST(Properties, WidthsNonnegative) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 200; ++t) {
    const auto H = random_system(rng, 2 + t % 7, 1 + t % 3);
    const auto s = eigen(H.H);
    for (int i = 0; i < s.values.size(); ++i) EXPECT_LE(s.values(i).imag(), 1e-12);
  }
}

TEST(Properties, SMatrixUnitaryAcrossRandomSystems) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> e(-5.0, 5.0);
  for (int t = 0; t < 200; ++t) {
    const auto H = random_system(rng, 2 + t % 7, 1 + t % 4);
    const auto S = smatrix(H, e(rng)).S;
    EXPECT_LT((S.adjoint() * S - MatC::Identity(S.rows(), S.cols())).norm(), 1e-9);
  }
}

// Poles of S are the H_eff eigenvalues: det(1 + i K(z)) vanishes there, with
// K(z) = sqrt(w) W^dag (z - H0)^-1 W sqrt(w) and H0 the Hermitian part.
TEST(Properties, PolesAreEigenvalues) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + t % 6;
    const auto H = random_system(rng, n, 1 + t % 3);
    const MatC H0 = 0.5 * (H.H + H.H.adjoint());
    const MatC& W = H.W;  // weights are 1
    const auto s = eigen(H.H);
    for (int j = 0; j < n; ++j) {
      const cplx z = s.values(j);
      MatC A = -H0;
      A.diagonal().array() += z;
      const MatC K = W.adjoint() * A.lu().solve(W);
      const MatC M = MatC::Identity(K.rows(), K.cols()) + cplx(0.0, 1.0) * K;
      Eigen::JacobiSVD<MatC> svd(M);
      const auto sv = svd.singularValues();
      EXPECT_LT(sv(sv.size() - 1) / (1.0 + K.norm()), 1e-8) << "trial " << t << " pole " << j;
    }
  }
}

TEST(Properties, TwoLevelBICResidualSmall) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> g(0.05, 1.0), uu(-1.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const double g1 = g(rng), g2 = g(rng), u = uu(rng);
    const auto bp = twolevel_bic_point(g1, g2, u);
    ASSERT_TRUE(bp);
    FamilyModel m = [&](double eps, double) { return twolevel_effective({eps, g1, g2, u}); };
    // Both branches from the left end; exactly one carries the BIC.
    std::vector<double> grid;
    for (int i = 0; i <= 40; ++i) grid.push_back(bp->eps - 0.5 + 0.025 * i + 0.0013);
    std::vector<BICRecord> found;
    for (int b = 0; b < 2; ++b) {
      const auto ev = twolevel_eigenvalues({grid[0], g1, g2, u});
      for (const auto& r : find_bics(m, track(m, grid, ev[b].real())))
        if (r.width <= 1e-8) found.push_back(r);
    }
    ASSERT_EQ(found.size(), 1u) << t;
    EXPECT_NEAR(found[0].p, bp->eps, 1e-7);
    EXPECT_LE(found[0].residual, 1e-7);
    EXPECT_LE(found[0].width, 1e-8);
  }
}

TEST(Properties, PlanarAndSinaiUnitary) {
  RectCavity c;
  c.Ly = 4.7;
  c.m_max = c.n_max = 8;
  PlanarOptions o;
  o.p_max = 3;
  for (double w2 : {10.5, 14.0, 30.0}) {
    const auto S = planar_transmittance(c, w2, o).S.S;
    EXPECT_LT((S.adjoint() * S - MatC::Identity(S.rows(), S.cols())).norm(), 1e-9);
  }
  RectCavity n = c;
  n.flavor = Flavor::Neumann;
  n.m_max = n.n_max = 5;
  const auto modes = rect_modes(n, {1, 0});
  const auto pot = sinai_potential(n, modes, {12.0}, 48);
  for (double w2 : {12.0, 25.0}) {
    const auto H = sinai_effective(n, modes, pot, 12.0, w2, o);
    const auto S = smatrix(H, w2).S;
    EXPECT_LT((S.adjoint() * S - MatC::Identity(S.rows(), S.cols())).norm(), 1e-9);
  }
}

TEST(Properties, RingFluxConserved) {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> k(0.1, 12.0), g(0.0, 12.0);
  for (int t = 0; t < 500; ++t) {
    const auto s = ring_closed_form({k(rng), g(rng)});
    EXPECT_NEAR(std::norm(s.r) + std::norm(s.t), 1.0, 1e-10);
  }
}

TEST(Properties, PointFunctionsAreReentrant) {
  for (const char* model : {"planar", "sinai", "twolevel"}) {
    SweepSpec s = with_default_axes({model, {}, {}, {}, {}, 1});
    s.solver.truncation = 6;
    const auto f = point_function(s);
    const auto p0 = resolve_params(s);
    std::vector<Params> pts;
    for (int i = 0; i < 12; ++i) {
      Params p = p0;
      p[s.axis1.name] = s.axis1.at(i % s.axis1.count);
      pts.push_back(p);
    }
    std::vector<std::vector<double>> serial, par(pts.size());
    for (const auto& p : pts) serial.push_back(f(p));
    std::vector<std::thread> th;
    for (int w = 0; w < 3; ++w)
      th.emplace_back([&, w] {
        for (std::size_t i = w; i < pts.size(); i += 3) par[i] = f(pts[i]);
      });
    for (auto& t : th) t.join();
    for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_EQ(serial[i], par[i]) << model;
  }
}
