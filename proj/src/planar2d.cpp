#include "bic/planar2d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bic {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr cplx I(0.0, 1.0);

// Integral of cos(kappa y + c) over |y| < 1/2.
double cos_integral(double kappa, double c) {
  if (std::abs(kappa) < 1e-6) return std::cos(c) * (1.0 - kappa * kappa / 24.0);
  return 2.0 * std::cos(c) * std::sin(0.5 * kappa) / kappa;
}

double sign_pow(int m) { return (m % 2 == 0) ? 1.0 : -1.0; }

// Normal derivative (Dirichlet) or value (Neumann) of X_m at the interface.
double interface_factor(const RectCavity& c, int m, int port) {
  const double s = port == 0 ? 1.0 : sign_pow(m);
  if (c.flavor == Flavor::Dirichlet) return std::sqrt(2.0 / c.Lx) * kPi * m / c.Lx * s;
  const double eps = m == 0 ? 1.0 : 2.0;
  return std::sqrt(eps / c.Lx) * s;
}

}  // namespace

void check_cavity(const RectCavity& c) {
  if (!(c.Lx > 0.0) || !(c.Ly > 0.0)) throw std::domain_error("planar: Lx, Ly must be positive");
  if (c.Ly < 1.0) throw std::domain_error("planar: waveguide wider than cavity");
  if (c.m_max < 1 || c.n_max < 1) throw std::domain_error("planar: empty truncation");
}

int mode_x_parity(Flavor f, int m) {
  if (f == Flavor::Dirichlet) return m % 2 != 0 ? 1 : -1;
  return m % 2 == 0 ? 1 : -1;
}

int mode_y_parity(int n) { return n % 2 != 0 ? 1 : -1; }

int channel_parity(int p) { return p % 2 != 0 ? 1 : -1; }

std::vector<RectMode> rect_modes(const RectCavity& c, ParitySector sector) {
  check_cavity(c);
  std::vector<RectMode> out;
  const int m0 = c.flavor == Flavor::Dirichlet ? 1 : 0;
  for (int m = m0; m <= c.m_max; ++m) {
    if (sector.x != 0 && mode_x_parity(c.flavor, m) != sector.x) continue;
    for (int n = 1; n <= c.n_max; ++n) {
      if (sector.y != 0 && mode_y_parity(n) != sector.y) continue;
      out.push_back({m, n, kPi * kPi * (double(m * m) / (c.Lx * c.Lx) + double(n * n) / (c.Ly * c.Ly))});
    }
  }
  std::sort(out.begin(), out.end(), [](const RectMode& a, const RectMode& b) {
    if (a.E != b.E) return a.E < b.E;
    return a.m != b.m ? a.m < b.m : a.n < b.n;
  });
  return out;
}

ClosedBasis rect_basis(const RectCavity& c, const std::vector<RectMode>& modes) {
  ClosedBasis b;
  b.energies.resize(static_cast<int>(modes.size()));
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const auto& md = modes[i];
    b.energies(static_cast<int>(i)) =
        kPi * kPi * (double(md.m * md.m) / (c.Lx * c.Lx) + double(md.n * md.n) / (c.Ly * c.Ly));
    b.labels.push_back("(" + std::to_string(md.m) + "," + std::to_string(md.n) + ")");
  }
  return b;
}

double rect_x(const RectCavity& c, int m, double x) {
  const double a = kPi * m * (x + 0.5 * c.Lx) / c.Lx;
  if (c.flavor == Flavor::Dirichlet) return std::sqrt(2.0 / c.Lx) * std::sin(a);
  return std::sqrt((m == 0 ? 1.0 : 2.0) / c.Lx) * std::cos(a);
}

double rect_dx(const RectCavity& c, int m, double x) {
  const double k = kPi * m / c.Lx;
  const double a = k * (x + 0.5 * c.Lx);
  if (c.flavor == Flavor::Dirichlet) return std::sqrt(2.0 / c.Lx) * k * std::cos(a);
  return -std::sqrt((m == 0 ? 1.0 : 2.0) / c.Lx) * k * std::sin(a);
}

double rect_y(const RectCavity& c, int n, double y) {
  return std::sqrt(2.0 / c.Ly) * std::sin(kPi * n * (y + 0.5 * c.Ly) / c.Ly);
}

double rect_mode_value(const RectCavity& c, const RectMode& mode, double x, double y) {
  return rect_x(c, mode.m, x) * rect_y(c, mode.n, y);
}

double channel_profile(int p, double y) {
  if (std::abs(y) > 0.5) return 0.0;
  return std::sqrt(2.0) * std::sin(kPi * p * (y + 0.5));
}

double y_overlap(double Ly, int n, int p) {
  if ((n + p) % 2 != 0) return 0.0;
  const double a = kPi * p, al = 0.5 * kPi * p;
  const double b = kPi * n / Ly, be = 0.5 * kPi * n;
  // sin A sin B = (cos(A - B) - cos(A + B)) / 2 with A = a y + al, B = b y + be.
  return (cos_integral(a - b, al - be) - cos_integral(a + b, al + be)) / std::sqrt(Ly);
}

ChannelSet planar_channels(const RectCavity& c, const PlanarOptions& o) {
  if (o.p_max < 1) throw std::invalid_argument("planar: p_max must be at least 1");
  ChannelSet ch;
  const CouplingLaw law = c.flavor == Flavor::Dirichlet ? CouplingLaw::Derivative : CouplingLaw::Value;
  for (int port = 0; port < 2; ++port)
    for (int p = 1; p <= o.p_max; ++p)
      ch.add({port, std::string(port == 0 ? "L" : "R") + std::to_string(p), kPi * kPi * p * p, law});
  return ch;
}

CouplingMatrix coupling_planar(const RectCavity& c, const std::vector<RectMode>& modes, const PlanarOptions& o) {
  check_cavity(c);
  CouplingMatrix W;
  const int nm = static_cast<int>(modes.size());
  W.W = MatC::Zero(nm, 2 * o.p_max);
  for (int i = 0; i < nm; ++i)
    for (int port = 0; port < 2; ++port)
      for (int p = 1; p <= o.p_max; ++p)
        W.W(i, port * o.p_max + p - 1) =
            o.attenuation * interface_factor(c, modes[i].m, port) * y_overlap(c.Ly, modes[i].n, p);
  return W;
}

cplx planar_coupling_value(const RectCavity& c, const RectMode& mode, int p, int port, double omega2) {
  const double u = interface_factor(c, mode.m, port) * y_overlap(c.Ly, mode.n, p);
  const cplx k = ChannelSet::wavenumber(kPi * kPi * p * p, omega2);
  return c.flavor == Flavor::Dirichlet ? u / std::sqrt(k) : u * std::sqrt(k);
}

EffectiveHamiltonian planar_effective(const RectCavity& c, const std::vector<RectMode>& modes, double omega2,
                                      const PlanarOptions& o, const MatC* static_part) {
  const auto basis = rect_basis(c, modes);
  return assemble(basis, planar_channels(c, o), coupling_planar(c, modes, o), omega2, static_part);
}

PlanarTransmission planar_transmittance(const RectCavity& c, double omega2, const PlanarOptions& o,
                                        ParitySector sector) {
  if (!(omega2 > kPi * kPi)) throw std::domain_error("planar: frequency below the first cutoff");
  const auto modes = rect_modes(c, sector);
  const auto H = planar_effective(c, modes, omega2, o);
  PlanarTransmission out;
  out.S = smatrix(H, omega2);
  out.T = std::norm(out.S.element(o.p_max, 0));
  out.R = std::norm(out.S.element(0, 0));
  return out;
}

std::optional<PlanarBIC> planar_fw_bic(RectCavity c, double lo, double hi, int points, double seed_energy,
                                       const PlanarOptions& o, ParitySector sector, const BICOptions& bo) {
  if (points < 3) throw std::invalid_argument("planar: need at least 3 grid points");
  c.Ly = lo;
  const auto modes = rect_modes(c, sector);
  // Mode order stays fixed along the family so eigenvectors remain comparable.
  FamilyModel model = [c, modes, o](double Ly, double w2) {
    RectCavity cc = c;
    cc.Ly = Ly;
    return planar_effective(cc, modes, w2, o);
  };
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = lo + (hi - lo) * i / (points - 1);

  const auto H0 = model(lo, seed_energy);
  const auto s = eigen(H0.H);
  std::vector<int> idx(s.values.size());
  for (int i = 0; i < static_cast<int>(idx.size()); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::abs(s.values(a).real() - seed_energy) < std::abs(s.values(b).real() - seed_energy);
  });
  std::optional<PlanarBIC> best;
  for (int j = 0; j < std::min<int>(2, static_cast<int>(idx.size())); ++j) {
    const VecC guide = s.vectors.col(idx[j]);
    const auto tr = track(model, grid, s.values(idx[j]).real(), &guide);
    for (const auto& rec : find_bics(model, tr, bo)) {
      if (!best || rec.width < best->record.width) {
        RectCavity cc = c;
        cc.Ly = rec.p;
        best = PlanarBIC{rec, cc, modes};
      }
    }
  }
  return best;
}

PlanarField planar_bic_field(const RectCavity& c, const std::vector<RectMode>& modes, const VecC& a,
                             double omega2, const PlanarOptions& o, const FieldGrid& grid) {
  if (a.size() != static_cast<int>(modes.size())) throw std::invalid_argument("planar: coefficient size mismatch");
  if (grid.nx < 2 || grid.ny < 2) throw std::invalid_argument("planar: field grid too small");
  PlanarField f;
  const auto W = coupling_planar(c, modes, o).W;
  // Tail amplitudes from matching the normal derivative (Dirichlet) or value (Neumann).
  VecC cl(o.p_max), cr(o.p_max);
  for (int p = 1; p <= o.p_max; ++p) {
    const cplx ul = (W.col(p - 1).transpose() * a)(0);
    const cplx ur = (W.col(o.p_max + p - 1).transpose() * a)(0);
    const cplx k = ChannelSet::wavenumber(kPi * kPi * p * p, omega2);
    const double att = o.attenuation != 0.0 ? o.attenuation : 1.0;
    if (c.flavor == Flavor::Dirichlet) {
      cl(p - 1) = ul / (I * k) / att;
      cr(p - 1) = ur / (I * k) / att;
    } else {
      cl(p - 1) = ul / att;
      cr(p - 1) = ur / att;
    }
  }
  f.tails = cr;
  const double x0 = -0.5 * c.Lx - grid.stub, x1 = 0.5 * c.Lx + grid.stub;
  const double y0 = -0.5 * c.Ly, y1 = 0.5 * c.Ly;
  for (int i = 0; i < grid.nx; ++i) f.x.push_back(x0 + (x1 - x0) * i / (grid.nx - 1));
  for (int j = 0; j < grid.ny; ++j) f.y.push_back(y0 + (y1 - y0) * j / (grid.ny - 1));
  f.values = MatC::Zero(grid.ny, grid.nx);
  for (int i = 0; i < grid.nx; ++i) {
    const double x = f.x[i];
    const bool in = std::abs(x) <= 0.5 * c.Lx;
    f.inside.push_back(in);
    for (int j = 0; j < grid.ny; ++j) {
      const double y = f.y[j];
      cplx v = 0.0;
      if (in) {
        for (std::size_t q = 0; q < modes.size(); ++q) v += a(static_cast<int>(q)) * rect_mode_value(c, modes[q], x, y);
      } else if (std::abs(y) <= 0.5) {
        const double s = std::abs(x) - 0.5 * c.Lx;
        const VecC& cc = x > 0.0 ? cr : cl;
        for (int p = 1; p <= o.p_max; ++p) {
          const cplx k = ChannelSet::wavenumber(kPi * kPi * p * p, omega2);
          v += cc(p - 1) * channel_profile(p, y) * std::exp(I * k * s);
        }
      }
      f.values(j, i) = v;
    }
  }
  return f;
}

cplx planar_tail_value(const PlanarField& f, double omega2, double s, double y) {
  cplx v = 0.0;
  for (int p = 1; p <= f.tails.size(); ++p) {
    const cplx k = ChannelSet::wavenumber(kPi * kPi * p * p, omega2);
    v += f.tails(p - 1) * channel_profile(p, y) * std::exp(I * k * s);
  }
  return v;
}

}  // namespace bic
