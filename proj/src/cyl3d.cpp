#include "bic/cyl3d.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "bic/specfun.hpp"

namespace bic {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr cplx kI(0.0, 1.0);

// Radial factor with the orthonormalization on a disk of radius R.
double radial(double R, int m, double mu, double r) {
  if (mu == 0.0) return std::sqrt(2.0) / R;
  const double norm = std::sqrt(2.0 / (mu * mu - m * m)) * mu / (R * bessel_j(m, mu).value);
  return norm * bessel_j(m, mu * r / R).value;
}

// Transverse overlaps for a port at azimuth `angle`, one quadrature level.
MatC disk_overlaps(const CylCavity& c, const std::vector<CylMode>& modes, const std::vector<CylChannel>& ch,
                   double r0, double angle, int nr, int na) {
  std::vector<double> rho, wr;
  gauss_legendre(nr, 0.0, 1.0, rho, wr);
  // Distinct transverse cavity modes (m, n) share their quadrature values.
  std::map<std::pair<int, int>, int> tindex;
  std::vector<std::pair<int, double>> tmodes;
  for (const auto& md : modes)
    if (tindex.emplace(std::make_pair(md.m, md.n), static_cast<int>(tmodes.size())).second)
      tmodes.emplace_back(md.m, md.mu);
  const int nt = static_cast<int>(tmodes.size()), nc = static_cast<int>(ch.size());
  MatC T = MatC::Zero(nt, nc);
  const double da = 2.0 * kPi / na;
  const double cx = r0 * std::cos(angle), cy = r0 * std::sin(angle);
  VecC cav(nt), wg(nc);
  for (int i = 0; i < nr; ++i) {
    for (int j = 0; j < na; ++j) {
      const double a = j * da;
      const double x = cx + rho[i] * std::cos(a), y = cy + rho[i] * std::sin(a);
      const double r = std::hypot(x, y), phi = std::atan2(y, x);
      for (int t = 0; t < nt; ++t) cav(t) = cyl_cavity_profile(c.R, tmodes[t].first, tmodes[t].second, r, phi);
      for (int k = 0; k < nc; ++k) wg(k) = cyl_waveguide_profile(ch[k].p, ch[k].mu, rho[i], a);
      const double w = wr[i] * rho[i] * da;
      T.noalias() += w * cav.conjugate() * wg.transpose();
    }
  }
  MatC W(modes.size(), nc);
  for (size_t k = 0; k < modes.size(); ++k) W.row(k) = T.row(tindex.at({modes[k].m, modes[k].n}));
  return W;
}

double relative_change(const MatC& a, const MatC& b) {
  const double scale = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

void check_cylinder(const CylCavity& c) {
  if (!(c.R > 1.0) || !(c.L > 0.0)) throw std::domain_error("cyl: need R > 1 and L > 0");
  if (c.m_max < 0 || c.n_max < 1 || c.l_max < 1) throw std::invalid_argument("cyl: bad truncation");
}

std::vector<CylMode> cyl_modes(const CylCavity& c) {
  check_cylinder(c);
  std::vector<CylMode> out;
  for (int m = -c.m_max; m <= c.m_max; ++m) {
    const auto roots = neumann_roots(std::abs(m), c.n_max);
    for (int n = 1; n <= c.n_max; ++n)
      for (int l = 1; l <= c.l_max; ++l) out.push_back({m, n, l, roots[n - 1]});
  }
  return out;
}

double cyl_energy(const CylCavity& c, const CylMode& m) {
  return m.mu * m.mu / (c.R * c.R) + kPi * kPi * (m.l - 1) * (m.l - 1) / (c.L * c.L);
}

std::string cyl_label(const CylMode& m) {
  return std::to_string(m.m) + std::to_string(m.n) + std::to_string(m.l);
}

ClosedBasis cyl_basis(const CylCavity& c, const std::vector<CylMode>& modes) {
  ClosedBasis b;
  b.energies.resize(modes.size());
  for (size_t i = 0; i < modes.size(); ++i) {
    b.energies(i) = cyl_energy(c, modes[i]);
    b.labels.push_back(cyl_label(modes[i]));
  }
  return b;
}

std::vector<CylChannel> cyl_channels(int count) {
  if (count < 1) throw std::invalid_argument("cyl: need at least one channel");
  std::vector<CylChannel> all;
  const int pm = count + 2, qm = count + 1;
  for (int p = 0; p <= pm; ++p) {
    const auto roots = neumann_roots(p, qm);
    for (int q = 1; q <= qm; ++q) {
      all.push_back({p, q, roots[q - 1]});
      if (p > 0) all.push_back({-p, q, roots[q - 1]});
    }
  }
  std::stable_sort(all.begin(), all.end(), [](const CylChannel& a, const CylChannel& b) { return a.mu < b.mu; });
  all.resize(count);
  return all;
}

cplx cyl_cavity_profile(double R, int m, double mu, double r, double phi) {
  if (r > R) return 0.0;
  return radial(R, m, mu, r) * std::exp(kI * (m * phi)) / std::sqrt(2.0 * kPi);
}

cplx cyl_waveguide_profile(int p, double mu, double rho, double alpha) {
  return cyl_cavity_profile(1.0, p, mu, rho, alpha);
}

double cyl_psi_l(int l, double L, double z) {
  const double norm = std::sqrt((l == 1 ? 1.0 : 2.0) / L);
  return norm * std::cos(kPi * (l - 1) * z / L);
}

CylCoupling cyl_coupling(const CylCavity& c, const std::vector<CylMode>& modes,
                         const std::vector<CylChannel>& channels, const CylPort& port, const DiskQuadrature& q) {
  check_cylinder(c);
  if (!(port.r0 >= 0.0) || port.r0 + 1.0 > c.R + 1e-12)
    throw std::domain_error("cyl: waveguide disk must lie inside the cavity face");
  int nr = q.radial, na = q.angular;
  MatC T = disk_overlaps(c, modes, channels, port.r0, port.angle, nr, na);
  CylCoupling out;
  for (int d = 0; d < q.max_doublings; ++d) {
    nr *= 2;
    na *= 2;
    MatC T2 = disk_overlaps(c, modes, channels, port.r0, port.angle, nr, na);
    out.change = relative_change(T, T2);
    T = std::move(T2);
    if (out.change <= q.tol) break;
  }
  out.converged = out.change <= q.tol;
  const double z = port.right ? c.L : 0.0;
  for (size_t i = 0; i < modes.size(); ++i) T.row(i) *= cyl_psi_l(modes[i].l, c.L, z);
  out.W = std::move(T);
  return out;
}

CylSetup cyl_setup(const CylCavity& c, double r0, int channel_count, const DiskQuadrature& q) {
  CylSetup s;
  s.cavity = c;
  s.r0 = r0;
  s.modes = cyl_modes(c);
  s.channels = cyl_channels(channel_count);
  // Transverse overlaps do not depend on l: evaluate on the l = 1 modes only.
  std::vector<CylMode> flat;
  for (const auto& m : s.modes)
    if (m.l == 1) flat.push_back(m);
  CylCavity unit = c;
  unit.L = 1.0;
  const auto cp = cyl_coupling(unit, flat, s.channels, {r0, 0.0, false}, q);
  s.quad_change = cp.change;
  s.converged = cp.converged;
  s.transverse.resize(s.modes.size(), s.channels.size());
  for (size_t i = 0; i < s.modes.size(); ++i) {
    size_t j = 0;
    while (flat[j].m != s.modes[i].m || flat[j].n != s.modes[i].n) ++j;
    s.transverse.row(i) = cp.W.row(j);  // psi_1 = 1 at L = 1
  }
  return s;
}

ChannelSet cyl_channel_set(const CylSetup& s) {
  ChannelSet cs;
  for (int port = 0; port < 2; ++port)
    for (const auto& ch : s.channels)
      cs.add({port, (port ? "R" : "L") + std::to_string(ch.p) + std::to_string(ch.q), ch.mu * ch.mu,
              CouplingLaw::Value});
  return cs;
}

CouplingMatrix cyl_coupling_matrix(const CylSetup& s, double L, double dphi) {
  if (!(L > 0.0)) throw std::domain_error("cyl: L must be positive");
  const int nm = static_cast<int>(s.modes.size()), nc = static_cast<int>(s.channels.size());
  CouplingMatrix W;
  W.W.resize(nm, 2 * nc);
  for (int i = 0; i < nm; ++i) {
    const auto& md = s.modes[i];
    const double zl = cyl_psi_l(md.l, L, 0.0), zr = cyl_psi_l(md.l, L, L);
    for (int k = 0; k < nc; ++k) {
      const cplx t = s.transverse(i, k);
      W.W(i, k) = zl * std::exp(kI * ((s.channels[k].p - md.m) * dphi)) * t;
      W.W(i, nc + k) = zr * t;
    }
  }
  return W;
}

EffectiveHamiltonian cyl_effective(const CylSetup& s, double L, double dphi, double omega2) {
  CylCavity c = s.cavity;
  c.L = L;
  return assemble(cyl_basis(c, s.modes), cyl_channel_set(s), cyl_coupling_matrix(s, L, dphi), omega2);
}

CylTransmission cyl_transmittance(const CylSetup& s, double L, double dphi, double omega2) {
  if (!(omega2 > 0.0)) throw std::domain_error("cyl: omega^2 must be above the first cutoff");
  CylTransmission out;
  const auto H = cyl_effective(s, L, dphi, omega2);
  out.S = smatrix(H, omega2);
  const int nc = static_cast<int>(s.channels.size());
  out.T = std::norm(out.S.element(nc, 0));
  out.R = std::norm(out.S.element(0, 0));
  return out;
}

namespace {

FamilyModel cyl_family(const CylSetup& s, CylScan scan, double fixed) {
  return [&s, scan, fixed](double p, double w2) {
    return scan == CylScan::Length ? cyl_effective(s, p, fixed, w2) : cyl_effective(s, fixed, p, w2);
  };
}

double band_top(const CylSetup& s, const CylBICOptions& o) {
  if (o.band_hi > 0.0) return o.band_hi;
  for (const auto& ch : s.channels)
    if (ch.mu > 0.0) return ch.mu * ch.mu;
  return 1e300;
}

double port_leak(const CylSetup& s, double L, double dphi, const VecC& a) {
  // Largest |psi| on the end faces, sampled on a polar grid.
  const auto& c = s.cavity;
  const int nr = 24, na = 96;
  double peak = 0.0;
  for (int face = 0; face < 2; ++face)
    for (int i = 0; i <= nr; ++i)
      for (int j = 0; j < na; ++j) {
        const double r = c.R * i / nr, phi = 2.0 * kPi * j / na;
        cplx v = 0.0;
        for (size_t k = 0; k < s.modes.size(); ++k)
          v += a(k) * cyl_cavity_profile(c.R, s.modes[k].m, s.modes[k].mu, r, phi) *
               cyl_psi_l(s.modes[k].l, L, face ? L : 0.0);
        peak = std::max(peak, std::abs(v));
      }
  const auto W = cyl_coupling_matrix(s, L, dphi).W;
  const int nc = static_cast<int>(s.channels.size());
  double leak = 0.0;
  for (int port = 0; port < 2; ++port) {
    const cplx ov = W.col(port * nc).dot(a);  // W^dag a: overlap of psi with the open channel
    leak = std::max(leak, std::abs(ov) / (peak * std::sqrt(kPi)));
  }
  return leak;
}

CylBIC make_record(const CylSetup& s, CylScan scan, double fixed, const BICRecord& r) {
  CylBIC b;
  b.record = r;
  b.L = scan == CylScan::Length ? r.p : fixed;
  b.dphi = scan == CylScan::Length ? fixed : r.p;
  CylCavity c = s.cavity;
  c.L = b.L;
  b.expansion = bic_mode(r, cyl_basis(c, s.modes));
  b.port_leak = port_leak(s, b.L, b.dphi, r.coefficients);
  return b;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

}  // namespace

std::vector<CylBIC> cyl_find_bics(const CylSetup& s, CylScan scan, double fixed, double lo, double hi,
                                  const CylBICOptions& o) {
  if (!(hi > lo) || o.points < 3) throw std::invalid_argument("cyl: bad scan range");
  const auto model = cyl_family(s, scan, fixed);
  const double top = band_top(s, o);
  const auto grid = linspace(lo, hi, o.points);

  // Seed every in-band branch at the start of the scan from the eigenvectors
  // of H_eff evaluated at each closed-mode energy.
  const double L0 = scan == CylScan::Length ? lo : fixed;
  CylCavity c0 = s.cavity;
  c0.L = L0;
  const auto basis = cyl_basis(c0, s.modes);
  std::vector<ResonanceRecord> seeds;
  HamiltonianModel m0 = [&model, lo](double w2) { return model(lo, w2); };
  for (int i = 0; i < basis.size(); ++i) {
    const double E = basis.energies(i);
    if (E <= o.band_lo || E >= top) continue;
    const auto sp = eigen(m0(E).H);
    for (int k = 0; k < sp.values.size(); ++k) {
      if (std::abs(sp.values(k).real() - E) > 0.05 * std::max(E, 0.1)) continue;
      const VecC g = sp.vectors.col(k);
      auto r = resonance(m0, sp.values(k).real(), &g, o.bic.resonance);
      if (!r.converged || r.energy <= o.band_lo || r.energy >= top) continue;
      bool dup = false;
      for (const auto& q : seeds) dup = dup || std::abs(q.z - r.z) <= 1e-8 * std::max(1.0, std::abs(r.z));
      if (!dup) seeds.push_back(r);
    }
  }

  std::vector<CylBIC> out;
  for (const auto& sd : seeds) {
    const auto tr = track(model, grid, sd.energy, &sd.vector);
    for (const auto& r : find_bics(model, tr, o.bic)) {
      if (r.quasi || r.omega2 <= o.band_lo || r.omega2 >= top) continue;
      bool dup = false;
      for (const auto& b : out)
        dup = dup || (std::abs(b.record.p - r.p) <= 1e-6 * std::max(1.0, std::abs(r.p)) &&
                      std::abs(b.record.omega2 - r.omega2) <= 1e-6 * std::max(1.0, r.omega2));
      if (!dup) out.push_back(make_record(s, scan, fixed, r));
    }
  }
  std::sort(out.begin(), out.end(), [](const CylBIC& a, const CylBIC& b) {
    return a.record.p < b.record.p || (a.record.p == b.record.p && a.record.omega2 < b.record.omega2);
  });
  return out;
}

std::optional<CylBIC> cyl_refine_bic(const CylSetup& s, CylScan scan, double fixed, double lo, double hi,
                                     double seed_p, double seed_energy, const CylBICOptions& o) {
  if (!(hi > lo) || seed_p < lo || seed_p > hi) throw std::invalid_argument("cyl: seed outside the scan range");
  const auto model = cyl_family(s, scan, fixed);
  HamiltonianModel m0 = [&model, seed_p](double w2) { return model(seed_p, w2); };
  const auto r0 = resonance(m0, seed_energy, nullptr, o.bic.resonance);
  if (!r0.converged) return std::nullopt;
  std::optional<CylBIC> best;
  const int half = std::max(2, o.points / 2);
  const auto tr = track_through(model, lo, hi, seed_p, half, r0.energy, &r0.vector);
  for (const auto& r : find_bics(model, tr, o.bic)) {
    if (r.quasi) continue;
    if (!best || std::abs(r.p - seed_p) < std::abs(best->record.p - seed_p)) best = make_record(s, scan, fixed, r);
  }
  return best;
}

CylSurfaceField cyl_surface_field(const CylSetup& s, double L, const VecC& a, int nphi, int nz) {
  if (a.size() != static_cast<Eigen::Index>(s.modes.size())) throw std::invalid_argument("cyl: expansion size");
  if (nphi < 2 || nz < 2) throw std::invalid_argument("cyl: field grid too small");
  CylSurfaceField f;
  f.phi = linspace(0.0, 2.0 * kPi, nphi);
  f.z = linspace(0.0, L, nz);
  f.values = MatC::Zero(nz, nphi);
  for (int i = 0; i < nz; ++i)
    for (int j = 0; j < nphi; ++j)
      for (size_t k = 0; k < s.modes.size(); ++k)
        f.values(i, j) += a(k) * cyl_cavity_profile(s.cavity.R, s.modes[k].m, s.modes[k].mu, s.cavity.R, f.phi[j]) *
                          cyl_psi_l(s.modes[k].l, L, f.z[i]);
  return f;
}

TruncatedCMT truncated_from_setup(const CylSetup& s) {
  auto find_mode = [&s](int m, int n) {
    for (size_t i = 0; i < s.modes.size(); ++i)
      if (s.modes[i].m == m && s.modes[i].n == n && s.modes[i].l == 1) return static_cast<int>(i);
    throw std::invalid_argument("cyl: truncated model needs modes 01 and +-11");
  };
  auto find_channel = [&s](int p, int q) {
    for (size_t k = 0; k < s.channels.size(); ++k)
      if (s.channels[k].p == p && s.channels[k].q == q) return static_cast<int>(k);
    throw std::invalid_argument("cyl: truncated model needs channels 01 and 11");
  };
  const int i0 = find_mode(0, 1), ip = find_mode(1, 1), im = find_mode(-1, 1);
  const int c0 = find_channel(0, 1), c1 = find_channel(1, 1);
  TruncatedCMT tc;
  tc.R = s.cavity.R;
  // psi_2(0) = sqrt(2 / L), psi_1 = sqrt(1 / L): strip the 1/sqrt(L).
  tc.w0 = std::sqrt(2.0) * s.transverse(i0, c0).real();
  tc.w1 = s.transverse(ip, c0).real();
  tc.v1 = s.transverse(ip, c1).real();
  tc.v2 = s.transverse(im, c1).real();
  return tc;
}

namespace {

constexpr int kModeM[3] = {0, 1, -1};
constexpr int kModeL[3] = {2, 1, 1};

// Columns: L01, L11, L-11, R01, R11, R-11.
Eigen::Matrix<cplx, 3, 6> cmt_couplings(const TruncatedCMT& tc, double L, double dphi) {
  const double s = 1.0 / std::sqrt(L);
  Eigen::Matrix<cplx, 3, 6> W;
  const double left[3][3] = {{tc.w0, 0.0, 0.0}, {tc.w1, tc.v1, tc.v2}, {tc.w1, tc.v2, tc.v1}};
  const int p[3] = {0, 1, -1};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      W(i, k) = s * left[i][k];
      // Right port from the left one: (-1)^{l-1} e^{i (m - p) dphi}.
      const double sign = (kModeL[i] - 1) % 2 ? -1.0 : 1.0;
      W(i, 3 + k) = sign * std::exp(kI * ((kModeM[i] - p[k]) * dphi)) * s * left[i][k];
    }
  return W;
}

}  // namespace

CMTResult cmt_truncated(const TruncatedCMT& tc, double L, double dphi, double omega2) {
  if (!(L > 0.0)) throw std::domain_error("cmt: L must be positive");
  const double mu11 = neumann_roots(1, 1)[0];
  if (!(omega2 > 0.0) || omega2 >= mu11 * mu11) throw std::domain_error("cmt: omega must lie in (0, mu_11)");
  CMTResult r;
  r.omega2 = omega2;
  r.q11 = std::sqrt(mu11 * mu11 - omega2);
  const double omega = std::sqrt(omega2);
  const auto W = cmt_couplings(tc, L, dphi);
  Eigen::Matrix3cd Ht = Eigen::Matrix3cd::Zero(), G = Eigen::Matrix3cd::Zero();
  Ht(0, 0) = kPi * kPi / (L * L);
  Ht(1, 1) = Ht(2, 2) = mu11 * mu11 / (tc.R * tc.R);
  for (int k : {1, 2, 4, 5}) Ht += r.q11 * W.col(k) * W.col(k).adjoint();
  for (int k : {0, 3}) G += W.col(k) * W.col(k).adjoint();
  r.H = Ht - kI * omega * G;
  r.z = Eigen::ComplexEigenSolver<Eigen::Matrix3cd>(r.H).eigenvalues();

  const double d = Ht(1, 1).real();
  const cplx c = Ht(1, 2);
  const double split = 4.0 * r.q11 * tc.v1 * tc.v2 * std::cos(dphi) / L;
  r.E1 = Ht(0, 0).real();
  r.E2 = d + split;
  r.E3 = d - split;
  // Eigenvectors of the 111 block [[d, c], [c*, d]] for d +- |c|.
  cplx ph = std::abs(c) > 1e-300 ? c / std::abs(c) : std::exp(-kI * dphi);
  if (split < 0.0) ph = -ph;  // X2 belongs to E2 = d + split
  r.X = Eigen::Matrix3cd::Zero();
  r.X(0, 0) = 1.0;
  r.X(1, 1) = ph / std::sqrt(2.0);
  r.X(2, 1) = 1.0 / std::sqrt(2.0);
  r.X(1, 2) = -ph / std::sqrt(2.0);
  r.X(2, 2) = 1.0 / std::sqrt(2.0);
  return r;
}

namespace {

// Open-channel coupling of the best superposition of X1 and X_k, both ports.
std::pair<double, Eigen::Vector3cd> decoupled(const TruncatedCMT& tc, const CMTResult& r, double L, double dphi,
                                              int k) {
  const auto W = cmt_couplings(tc, L, dphi);
  Eigen::Matrix<cplx, 3, 2> X;
  X.col(0) = r.X.col(0);
  X.col(1) = r.X.col(k - 1);
  Eigen::Matrix2cd M;
  M.row(0) = W.col(0).adjoint() * X;
  M.row(1) = W.col(3).adjoint() * X;
  Eigen::JacobiSVD<Eigen::Matrix2cd> svd(M, Eigen::ComputeFullV);
  const Eigen::Vector2cd b = svd.matrixV().col(1);
  const Eigen::Vector3cd mode = X * b;
  return {svd.singularValues()(1), mode};
}

}  // namespace

CMTBICPoint cmt_bic_point(const TruncatedCMT& tc, double dphi, double Llo, double Lhi) {
  const double mu11 = neumann_roots(1, 1)[0];
  CMTBICPoint best;
  double other = 1e300;
  for (int k : {2, 3}) {
    // g(L) = E1 - E_k evaluated self-consistently at omega^2 = E1 = pi^2 / L^2.
    auto g = [&](double L) {
      const auto r = cmt_truncated(tc, L, dphi, kPi * kPi / (L * L));
      return r.E1 - (k == 2 ? r.E2 : r.E3);
    };
    const double lo = std::max(Llo, kPi / mu11 * (1.0 + 1e-9));
    const int n = 400;
    double a = lo, ga = g(a);
    for (int i = 1; i <= n; ++i) {
      const double b = lo + (Lhi - lo) * i / n, gb = g(b);
      if ((ga < 0.0) != (gb < 0.0)) {
        double x = a, y = b, gx = ga;
        for (int it = 0; it < 200 && y - x > 1e-14 * y; ++it) {
          const double m = 0.5 * (x + y), gm = g(m);
          if ((gm < 0.0) == (gx < 0.0)) {
            x = m;
            gx = gm;
          } else {
            y = m;
          }
        }
        const double L = 0.5 * (x + y);
        const auto r = cmt_truncated(tc, L, dphi, kPi * kPi / (L * L));
        const auto [leak, mode] = decoupled(tc, r, L, dphi, k);
        if (!best.found || leak < best.leak) {
          if (best.found) other = std::min(other, best.leak);
          best.found = true;
          best.L = L;
          best.omega2 = r.omega2;
          best.branch = k;
          best.mode = mode;
          best.leak = leak;
        } else {
          other = std::min(other, leak);
        }
      }
      a = b;
      ga = gb;
    }
  }
  best.other_leak = other;
  return best;
}

}  // namespace bic
