#include "bic/toymodels.hpp"

#include <cmath>
#include <stdexcept>

namespace bic {

namespace {

constexpr cplx I(0.0, 1.0);

void check(const TwoLevelParams& p) {
  if (!(p.gamma1 >= 0.0) || !(p.gamma2 >= 0.0)) throw std::domain_error("two-level: negative coupling strength");
}

}  // namespace

MatC twolevel_heff(const TwoLevelParams& p) {
  check(p);
  const double s = std::sqrt(p.gamma1 * p.gamma2);
  MatC h(2, 2);
  h << p.eps - I * p.gamma1, p.u - I * s, p.u - I * s, -p.eps - I * p.gamma2;
  return h;
}

std::array<cplx, 2> twolevel_eigenvalues(const TwoLevelParams& p) {
  const MatC h = twolevel_heff(p);
  const cplx tr = h(0, 0) + h(1, 1);
  const cplx det = h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0);
  const cplx disc = std::sqrt(tr * tr - 4.0 * det);
  // Larger-modulus root first; the other from the product to avoid cancellation.
  const cplx q = 0.5 * ((std::conj(tr) * disc).real() >= 0.0 ? tr + disc : tr - disc);
  if (std::abs(q) == 0.0) return {cplx(0.0), cplx(0.0)};
  return {q, det / q};
}

std::optional<TwoLevelBIC> twolevel_bic_point(double gamma1, double gamma2, double u) {
  if (!(gamma1 >= 0.0) || !(gamma2 >= 0.0)) throw std::domain_error("two-level: negative coupling strength");
  if (gamma1 * gamma2 == 0.0) return std::nullopt;
  const double s = std::sqrt(gamma1 * gamma2);
  const double eps = u * (gamma1 - gamma2) / (2.0 * s);
  const double A = -(eps * (gamma1 - gamma2) + 2.0 * u * s) / (gamma1 + gamma2);
  return TwoLevelBIC{eps, A};
}

TwoLevelScattering twolevel_transmission(double E, const TwoLevelParams& p) {
  check(p);
  const double w1 = std::sqrt(0.5 * p.gamma1), w2 = std::sqrt(0.5 * p.gamma2);
  std::array<cplx, 2> z;
  std::array<cplx, 2> V;
  bool have = false;

  if (p.gamma1 == p.gamma2 && p.u == 0.0) {
    const double g = p.gamma1;
    const cplx eta = std::sqrt(cplx(g * g - p.eps * p.eps, 0.0));
    const cplx n1 = 2.0 * eta * (eta + I * p.eps);
    const cplx n2 = 2.0 * eta * (eta - I * p.eps);
    if (std::abs(n1) > 1e-12 && std::abs(n2) > 1e-12) {
      z = {-I * g + I * eta, -I * g - I * eta};
      V = {w1 * (eta + I * p.eps - g) / std::sqrt(n1), w1 * (eta - I * p.eps + g) / std::sqrt(n2)};
      have = true;
    }
  }
  if (!have) {
    // Complex-symmetric H: left eigenvectors are transposes of right ones.
    Eigen::ComplexEigenSolver<MatC> es(twolevel_heff(p));
    const Eigen::Vector2cd w(w1, w2);
    for (int j = 0; j < 2; ++j) {
      const VecC v = es.eigenvectors().col(j);
      const cplx nn = v.transpose() * v;
      z[j] = es.eigenvalues()(j);
      if (std::abs(nn) < 1e-12) {
        // Exceptional point: fall back to the Green function directly.
        MatC A = -twolevel_heff(p);
        A.diagonal().array() += E;
        const cplx g = w.transpose() * A.fullPivLu().solve(w);
        return {-2.0 * I * g, 1.0 - 2.0 * I * g, false};
      }
      V[j] = (w.transpose() * v)(0) / std::sqrt(nn);
    }
  }
  TwoLevelScattering out;
  cplx sum = 0.0;
  for (int j = 0; j < 2; ++j) {
    // A decoupled state (BIC) carries no residue.
    if (std::abs(V[j] * V[j]) <= 1e-15 * (w1 * w1 + w2 * w2)) continue;
    const cplx d = E - z[j];
    if (std::abs(d) <= 1e-14 * std::max(1.0, std::abs(E))) out.singular = true;
    sum += V[j] * V[j] / d;
  }
  out.T = -2.0 * I * sum;
  out.R = 1.0 + out.T;
  return out;
}

EffectiveHamiltonian twolevel_effective(const TwoLevelParams& p) {
  check(p);
  ClosedBasis b;
  b.labels = {"level1", "level2"};
  b.energies = Eigen::Vector2d(p.eps, -p.eps);
  ChannelSet ch;
  ch.add({0, "L", 0.0, CouplingLaw::Value});
  ch.add({1, "R", 0.0, CouplingLaw::Value});
  CouplingMatrix W;
  W.W.resize(2, 2);
  const double w1 = std::sqrt(0.5 * p.gamma1), w2 = std::sqrt(0.5 * p.gamma2);
  W.W << w1, w1, w2, w2;
  MatC V = MatC::Zero(2, 2);
  V(0, 1) = V(1, 0) = p.u;
  return assemble(b, ch, W, 1.0, &V);
}

Eigen::Matrix<double, 5, 5> fp_chain_hb(const FPChainParams& p) {
  Eigen::Matrix<double, 5, 5> h;
  const double u = p.u;
  h << p.eps1, 0, u, 0, 0,
       0, p.eps2, u, 0, 0,
       u, u, p.epsw, u, u,
       0, 0, u, p.eps2, 0,
       0, 0, u, 0, p.eps1;
  return h;
}

FPChainSpectrum fp_chain_spectrum(const FPChainParams& p) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 5, 5>> es(fp_chain_hb(p));
  return {es.eigenvalues(), es.eigenvectors()};
}

ClosedBasis fp_chain_basis(const FPChainParams& p) {
  ClosedBasis b;
  b.labels = {"site1", "site2", "site3", "site4", "site5"};
  b.energies.resize(5);
  b.energies << p.eps1, p.eps2, p.epsw, p.eps2, p.eps1;
  return b;
}

EffectiveHamiltonian fp_chain_effective(const FPChainParams& p, double omega2) {
  if (!(p.v0 >= 0.0)) throw std::domain_error("fp chain: negative lead coupling");
  const auto b = fp_chain_basis(p);
  const MatC hb = fp_chain_hb(p).cast<cplx>();
  MatC V = hb;
  V.diagonal().setZero();
  ChannelSet ch;
  ch.add({0, "L", 0.0, CouplingLaw::Value});
  ch.add({1, "R", 0.0, CouplingLaw::Value});
  // 2 pi v(k)^2 = v0^2 k, so the per-channel coupling is v0 on the lead sites.
  CouplingMatrix W;
  W.W = MatC::Zero(5, 2);
  W.W(0, 0) = W.W(1, 0) = p.v0;
  W.W(3, 1) = W.W(4, 1) = p.v0;
  return assemble(b, ch, W, omega2, &V);
}

BICRecord fp_chain_bic(const FPChainParams& p, double lo, double hi, int points) {
  if (!(p.v0 > 0.0)) throw std::domain_error("fp chain: BIC search needs v0 > 0");
  if (points < 3) throw std::invalid_argument("fp chain: need at least 3 grid points");
  FamilyModel model = [p](double ew, double) {
    FPChainParams q = p;
    q.epsw = ew;
    return fp_chain_effective(q, p.E);
  };
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = lo + (hi - lo) * i / (points - 1);

  // Branch 3 is the middle level of the closed chain, which stays between eps1
  // and eps2 for every epsw. At each grid point the H_eff eigenvalue whose
  // vector overlaps it most carries the label; strong lead coupling mixes the
  // levels too much for continuation tracking to keep it.
  auto level = [&](double ew) {
    FPChainParams q = p;
    q.epsw = ew;
    const auto sp = fp_chain_spectrum(q);
    return std::pair<double, VecC>(sp.values(2), sp.vectors.col(2).cast<cplx>());
  };
  auto branch_width = [&](double ew) {
    const VecC v = level(ew).second;
    const auto s = eigen(model(ew, p.E).H);
    int best = 0;
    for (int j = 1; j < 5; ++j)
      if (std::abs(v.dot(s.vectors.col(j))) > std::abs(v.dot(s.vectors.col(best)))) best = j;
    return -2.0 * s.values(best).imag();
  };
  int imin = 0;
  double wmin = branch_width(grid[0]);
  for (int i = 1; i < points; ++i) {
    const double w = branch_width(grid[i]);
    if (w < wmin) wmin = w, imin = i;
  }
  if (imin == 0 || imin == points - 1) throw std::runtime_error("fp chain: no width minimum on the scanned interval");
  const auto [e0, guide] = level(grid[imin]);
  return refine_bic(model, grid[imin - 1], grid[imin + 1], e0, guide);
}

}  // namespace bic
