#include "bic/sph3d.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "bic/specfun.hpp"

namespace bic {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr cplx kI(0.0, 1.0);

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  return g;
}

MatC pole_overlaps(const SphereCavity& c, const std::vector<SphereMode>& modes, const std::vector<CylChannel>& ch,
                   int nr, int na) {
  std::vector<double> rho, wr;
  gauss_legendre(nr, 0.0, 1.0, rho, wr);
  const int nm = static_cast<int>(modes.size()), nc = static_cast<int>(ch.size());
  std::vector<double> wall(nm);
  for (int i = 0; i < nm; ++i) wall[i] = sphere_wall_value(c, modes[i].l, modes[i].kappa);
  MatC W = MatC::Zero(nm, nc);
  const double da = 2.0 * kPi / na;
  VecC y(nm), g(nc);
  for (int i = 0; i < nr; ++i) {
    const double theta = std::asin(rho[i] / c.R);
    for (int j = 0; j < na; ++j) {
      const double a = j * da;
      for (int k = 0; k < nm; ++k) y(k) = wall[k] * spherical_harmonic(modes[k].l, modes[k].m, theta, a);
      for (int k = 0; k < nc; ++k) g(k) = cyl_waveguide_profile(ch[k].p, ch[k].mu, rho[i], a);
      W.noalias() += (wr[i] * rho[i] * da) * y.conjugate() * g.transpose();
    }
  }
  return W;
}

}  // namespace

void check_sphere(const SphereCavity& c) {
  if (!(c.R > 1.0)) throw std::domain_error("sphere: need R > 1 (waveguide radius units)");
  if (c.l_max < 0 || c.n_max < 1) throw std::invalid_argument("sphere: bad truncation");
}

std::vector<SphereMode> sphere_modes(const SphereCavity& c) {
  check_sphere(c);
  std::vector<SphereMode> out;
  for (int l = 0; l <= c.l_max; ++l) {
    const auto roots = spherical_neumann_roots(l, c.n_max);
    for (int n = 1; n <= c.n_max; ++n)
      for (int m = -l; m <= l; ++m) out.push_back({l, m, n, roots[n - 1]});
  }
  return out;
}

ClosedBasis sphere_basis(const SphereCavity& c, const std::vector<SphereMode>& modes) {
  ClosedBasis b;
  b.energies.resize(modes.size());
  for (size_t i = 0; i < modes.size(); ++i) {
    b.energies(i) = modes[i].kappa * modes[i].kappa / (c.R * c.R);
    b.labels.push_back(sphere_label(modes[i]));
  }
  return b;
}

std::string sphere_label(const SphereMode& m) {
  return "(" + std::to_string(m.l) + "," + std::to_string(m.m) + "," + std::to_string(m.n) + ")";
}

double sphere_wall_value(const SphereCavity& c, int l, double kappa) {
  const double r3 = std::pow(c.R, 1.5);
  if (kappa == 0.0) return std::sqrt(3.0) / r3;  // constant mode
  // N j_l(kappa) with N = sqrt(2 / (kappa^2 - l(l+1))) kappa / (R^{3/2} j_l(kappa)).
  const double jl = spherical_j(l, kappa).value;
  const double s = jl < 0.0 ? -1.0 : 1.0;
  return s * std::sqrt(2.0 / (kappa * kappa - l * (l + 1.0))) * kappa / r3;
}

SpherePort sphere_port_at(double theta, double phi) { return {0.0, theta, phi}; }

SphereCoupling sphere_pole_coupling(const SphereCavity& c, const std::vector<SphereMode>& modes,
                                    const std::vector<CylChannel>& channels, const DiskQuadrature& q) {
  check_sphere(c);
  int nr = q.radial, na = q.angular;
  MatC W = pole_overlaps(c, modes, channels, nr, na);
  SphereCoupling out;
  for (int d = 0; d < q.max_doublings; ++d) {
    nr *= 2;
    na *= 2;
    MatC W2 = pole_overlaps(c, modes, channels, nr, na);
    const double scale = std::max(W2.cwiseAbs().maxCoeff(), 1e-300);
    out.change = (W - W2).cwiseAbs().maxCoeff() / scale;
    W = std::move(W2);
    if (out.change <= q.tol) break;
  }
  out.converged = out.change <= q.tol;
  out.W = std::move(W);
  return out;
}

MatC rotate_coupling(const std::vector<SphereMode>& modes, const MatC& W_pole, const SpherePort& port) {
  if (W_pole.rows() != static_cast<Eigen::Index>(modes.size()))
    throw std::invalid_argument("sphere: coupling rows do not match the modes");
  // Index of (l, n, m) in the mode list.
  std::map<std::tuple<int, int, int>, int> index;
  for (size_t i = 0; i < modes.size(); ++i) index[{modes[i].l, modes[i].n, modes[i].m}] = static_cast<int>(i);
  std::map<int, Eigen::MatrixXd> dcache;
  MatC out = MatC::Zero(W_pole.rows(), W_pole.cols());
  for (size_t i = 0; i < modes.size(); ++i) {
    const auto& md = modes[i];
    auto it = dcache.find(md.l);
    if (it == dcache.end()) it = dcache.emplace(md.l, wigner_small_d_matrix(md.l, port.beta)).first;
    const auto& d = it->second;
    for (int k = -md.l; k <= md.l; ++k) {
      const double dmk = d(md.m + md.l, k + md.l);
      if (dmk == 0.0) continue;
      out.row(i) += std::exp(-kI * (k * port.alpha)) * dmk * W_pole.row(index.at({md.l, md.n, k}));
    }
    out.row(i) *= std::exp(-kI * (md.m * port.gamma));
  }
  return out;
}

SphereSetup sphere_setup(const SphereCavity& c, int channel_count, const DiskQuadrature& q) {
  SphereSetup s;
  s.cavity = c;
  s.modes = sphere_modes(c);
  s.channels = cyl_channels(channel_count);
  const auto cp = sphere_pole_coupling(c, s.modes, s.channels, q);
  s.pole = cp.W;
  s.quad_change = cp.change;
  s.converged = cp.converged;
  return s;
}

ChannelSet sphere_channel_set(const SphereSetup& s, int ports) {
  ChannelSet cs;
  for (int port = 0; port < ports; ++port)
    for (const auto& ch : s.channels)
      cs.add({port, "P" + std::to_string(port) + ":" + std::to_string(ch.p) + std::to_string(ch.q), ch.mu * ch.mu,
              CouplingLaw::Value});
  return cs;
}

CouplingMatrix sphere_coupling_matrix(const SphereSetup& s, const std::vector<SpherePort>& ports) {
  const int nc = static_cast<int>(s.channels.size());
  CouplingMatrix W;
  W.W.resize(s.modes.size(), nc * ports.size());
  for (size_t p = 0; p < ports.size(); ++p) W.W.middleCols(p * nc, nc) = rotate_coupling(s.modes, s.pole, ports[p]);
  return W;
}

EffectiveHamiltonian sphere_effective(const SphereSetup& s, const std::vector<SpherePort>& ports, double omega2) {
  if (ports.empty()) throw std::invalid_argument("sphere: need at least one port");
  return assemble(sphere_basis(s.cavity, s.modes), sphere_channel_set(s, static_cast<int>(ports.size())),
                  sphere_coupling_matrix(s, ports), omega2);
}

MatC sphere_mirror_basis(const std::vector<SphereMode>& modes, int parity) {
  if (parity != 1 && parity != -1) throw std::invalid_argument("sphere: mirror parity must be +1 or -1");
  std::map<std::tuple<int, int, int>, int> index;
  for (size_t i = 0; i < modes.size(); ++i) index[{modes[i].l, modes[i].n, modes[i].m}] = static_cast<int>(i);
  std::vector<VecC> cols;
  const double h = 1.0 / std::sqrt(2.0);
  for (size_t i = 0; i < modes.size(); ++i) {
    const auto& md = modes[i];
    if (md.m < 0) continue;
    VecC v = VecC::Zero(modes.size());
    if (md.m == 0) {
      if (parity < 0) continue;
      v(i) = 1.0;
    } else {
      const double sgn = (md.m % 2 ? -1.0 : 1.0) * parity;
      v(i) = h;
      v(index.at({md.l, md.n, -md.m})) = sgn * h;
    }
    cols.push_back(v);
  }
  MatC U(modes.size(), cols.size());
  for (size_t j = 0; j < cols.size(); ++j) U.col(j) = cols[j];
  return U;
}

SphereTransmission sphere_transmittance(const SphereSetup& s, const std::vector<SpherePort>& ports, double omega2) {
  if (ports.size() < 2) throw std::invalid_argument("sphere: transmission needs two ports");
  if (!(omega2 > 0.0)) throw std::domain_error("sphere: omega^2 must be above the first cutoff");
  SphereTransmission out;
  const auto H = sphere_effective(s, ports, omega2);
  out.S = smatrix(H, omega2);
  out.T = std::norm(out.S.element(static_cast<int>(s.channels.size()), 0));
  return out;
}

std::vector<SpherePort> sphere_ports(SphereScan scan, const SphereGeometry& g, double p) {
  switch (scan) {
    case SphereScan::TwoPortTheta:
      return {sphere_port_at(0.0), sphere_port_at(p)};
    case SphereScan::ThreePortTheta2:
      return {sphere_port_at(0.0), sphere_port_at(g.theta1), sphere_port_at(p, g.phi)};
    case SphereScan::ThreePortPhi:
      return {sphere_port_at(0.0), sphere_port_at(g.theta1), sphere_port_at(g.theta2, p)};
  }
  return {};
}

std::vector<SphereBIC> sphere_find_bics(const SphereSetup& s, SphereScan scan, const SphereGeometry& g, double lo,
                                        double hi, const SphereBICOptions& o) {
  if (!(hi > lo) || o.points < 3) throw std::invalid_argument("sphere: bad scan range");
  const bool planar = scan == SphereScan::TwoPortTheta || (scan == SphereScan::ThreePortTheta2 && g.phi == 0.0);
  if (o.parity != 0 && !planar) throw std::invalid_argument("sphere: mirror blocks need ports in the xz plane");
  MatC U;
  if (o.parity != 0) U = sphere_mirror_basis(s.modes, o.parity);
  FamilyModel model = [&s, &U, scan, g, &o](double p, double w2) {
    auto H = sphere_effective(s, sphere_ports(scan, g, p), w2);
    if (o.parity != 0) {
      H.H = U.adjoint() * H.H * U;
      H.W = U.adjoint() * H.W;
    }
    return H;
  };
  double top = o.band_hi;
  if (!(top > 0.0))
    for (const auto& ch : s.channels)
      if (ch.mu > 0.0) {
        top = ch.mu * ch.mu;
        break;
      }

  const auto basis = sphere_basis(s.cavity, s.modes);
  HamiltonianModel m0 = [&model, lo](double w2) { return model(lo, w2); };
  std::vector<double> levels;
  for (int i = 0; i < basis.size(); ++i) {
    const double E = basis.energies(i);
    if (E <= o.band_lo || E >= top) continue;
    bool seen = false;
    for (double x : levels) seen = seen || std::abs(x - E) <= 1e-12 * E;
    if (!seen) levels.push_back(E);
  }
  std::vector<ResonanceRecord> seeds;
  for (double E : levels) {
    const auto sp = eigen(m0(E).H);
    for (int k = 0; k < sp.values.size(); ++k) {
      if (std::abs(sp.values(k).real() - E) > 0.05 * E) continue;
      const VecC guide = sp.vectors.col(k);
      auto r = resonance(m0, sp.values(k).real(), &guide, o.bic.resonance);
      if (!r.converged || r.energy <= o.band_lo || r.energy >= top) continue;
      bool dup = false;
      for (const auto& q : seeds) dup = dup || std::abs(q.z - r.z) <= 1e-9 * std::max(1.0, std::abs(r.z));
      if (!dup) seeds.push_back(r);
    }
  }

  const auto grid = linspace(lo, hi, o.points);
  std::vector<SphereBIC> out;
  for (const auto& sd : seeds) {
    const auto tr = track(model, grid, sd.energy, &sd.vector);
    // Branches that stay bound over the whole scan are protected families,
    // not isolated BICs.
    bool flat = true;
    for (const auto& pt : tr.points) flat = flat && std::abs(pt.r.width) <= o.bic.width_tol;
    if (flat) continue;
    for (const auto& r : find_bics(model, tr, o.bic)) {
      if (r.quasi || r.omega2 <= o.band_lo || r.omega2 >= top) continue;
      SphereBIC b;
      b.record = r;
      if (o.parity != 0) b.record.coefficients = U * r.coefficients;
      b.angle = r.p;
      bool dup = false;
      for (const auto& x : out)
        dup = dup || (std::abs(x.angle - b.angle) <= 1e-7 && std::abs(x.record.omega2 - r.omega2) <= 1e-7);
      if (dup) continue;
      b.expansion = bic_mode(b.record, basis);
      b.l_weight.assign(s.cavity.l_max + 1, 0.0);
      for (size_t i = 0; i < s.modes.size(); ++i) b.l_weight[s.modes[i].l] += std::norm(b.record.coefficients(i));
      const double top_l = *std::max_element(b.l_weight.begin(), b.l_weight.end());
      b.friedrich_wintgen = 1.0 - top_l > o.mix_tol;
      out.push_back(std::move(b));
    }
  }
  std::sort(out.begin(), out.end(), [](const SphereBIC& a, const SphereBIC& b) { return a.angle < b.angle; });
  return out;
}

SphereSurfaceField sphere_surface_field(const SphereSetup& s, const VecC& a, int ntheta, int nphi) {
  if (a.size() != static_cast<Eigen::Index>(s.modes.size())) throw std::invalid_argument("sphere: expansion size");
  if (ntheta < 2 || nphi < 2) throw std::invalid_argument("sphere: field grid too small");
  SphereSurfaceField f;
  f.theta = linspace(0.0, kPi, ntheta);
  f.phi = linspace(0.0, 2.0 * kPi, nphi);
  f.values = MatC::Zero(ntheta, nphi);
  for (int i = 0; i < ntheta; ++i)
    for (int j = 0; j < nphi; ++j)
      for (size_t k = 0; k < s.modes.size(); ++k)
        f.values(i, j) += a(k) * sphere_wall_value(s.cavity, s.modes[k].l, s.modes[k].kappa) *
                          spherical_harmonic(s.modes[k].l, s.modes[k].m, f.theta[i], f.phi[j]);
  return f;
}

}  // namespace bic
