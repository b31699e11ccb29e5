#pragma once

#include <optional>
#include <vector>

#include "bic/hcore.hpp"

namespace bic {

// Closed-cavity basis for a rectangle x in [-Lx/2, Lx/2], y in [-Ly/2, Ly/2]
// with hard walls at y = +-Ly/2 and unit-width hard-wall waveguides centred on
// y = 0 at x = +-Lx/2.
//   Dirichlet: sin x sin basis, vanishing on the interfaces; channels couple
//              through the normal derivative (W ~ 1/sqrt(k)).
//   Neumann:   cos x sin basis, Neumann on the interfaces; channels couple
//              through the mode values (W ~ sqrt(k)).
enum class Flavor { Dirichlet, Neumann };

struct RectCavity {
  double Lx = 4.0;
  double Ly = 4.0;
  Flavor flavor = Flavor::Dirichlet;
  int m_max = 20;
  int n_max = 20;
};

void check_cavity(const RectCavity& c);

struct RectMode {
  int m = 0;
  int n = 0;
  double E = 0.0;
};

// Mirror parity filter; 0 keeps both.
struct ParitySector {
  int x = 0;
  int y = 0;
};

int mode_x_parity(Flavor f, int m);
int mode_y_parity(int n);
// Parity of the channel profile sqrt(2) sin(pi p (y + 1/2)) under y -> -y.
int channel_parity(int p);

// Modes in the truncation sorted by E (ties by m, then n).
std::vector<RectMode> rect_modes(const RectCavity& c, ParitySector sector = {});
ClosedBasis rect_basis(const RectCavity& c, const std::vector<RectMode>& modes);

double rect_x(const RectCavity& c, int m, double x);
double rect_dx(const RectCavity& c, int m, double x);
double rect_y(const RectCavity& c, int n, double y);
double rect_mode_value(const RectCavity& c, const RectMode& mode, double x, double y);
double channel_profile(int p, double y);

// Closed-form overlap of the channel profile with the transverse cavity factor
// over the waveguide aperture |y| < 1/2; exactly 0 for opposite parity.
double y_overlap(double Ly, int n, int p);

struct PlanarOptions {
  int p_max = 8;             // channels 1..p_max per port; p >= 2 are evanescent below 4 pi^2
  double attenuation = 1.0;  // scalar weakening of every coupling (diaphragm)
};

// Ports: 0 = left (x = -Lx/2), 1 = right. Channel order: left p = 1..p_max, then right.
ChannelSet planar_channels(const RectCavity& c, const PlanarOptions& o);

// Raw aperture overlaps: normal derivative (Dirichlet) or value (Neumann).
// The per-channel weight from ChannelSet turns these into H_eff couplings.
CouplingMatrix coupling_planar(const RectCavity& c, const std::vector<RectMode>& modes, const PlanarOptions& o);

// Coupling including the k-dependent factor: u / sqrt(k) or u sqrt(k).
cplx planar_coupling_value(const RectCavity& c, const RectMode& mode, int p, int port, double omega2);

EffectiveHamiltonian planar_effective(const RectCavity& c, const std::vector<RectMode>& modes, double omega2,
                                      const PlanarOptions& o, const MatC* static_part = nullptr);

struct PlanarTransmission {
  SMatrix S;
  double T = 0.0;  // |S_{R1,L1}|^2
  double R = 0.0;  // |S_{L1,L1}|^2
};

PlanarTransmission planar_transmittance(const RectCavity& c, double omega2, const PlanarOptions& o,
                                        ParitySector sector = {});

// Friedrich-Wintgen BIC in the (Ly, omega^2) plane near seed_energy, tracking
// the two branches closest to it over Ly in [lo, hi].
struct PlanarBIC {
  BICRecord record;
  RectCavity cavity;  // with Ly set to record.p
  std::vector<RectMode> modes;
};

std::optional<PlanarBIC> planar_fw_bic(RectCavity c, double lo, double hi, int points, double seed_energy,
                                       const PlanarOptions& o, ParitySector sector, const BICOptions& bo = {});

struct FieldGrid {
  int nx = 81;
  int ny = 41;
  double stub = 1.0;  // waveguide length drawn beyond each interface
};

struct PlanarField {
  std::vector<double> x, y;     // sample coordinates
  MatC values;                  // rows: y, columns: x
  std::vector<bool> inside;     // per column: x within the cavity
  VecC tails;                   // evanescent amplitudes c_p at the right port, p = 1..p_max
};

// Interior field sum a_mn psi_mn; waveguide tails sum_p c_p phi_p(y) exp(-kappa_p s).
PlanarField planar_bic_field(const RectCavity& c, const std::vector<RectMode>& modes, const VecC& a,
                             double omega2, const PlanarOptions& o, const FieldGrid& grid = {});

// Right-port tail at distance s beyond the interface and height y.
cplx planar_tail_value(const PlanarField& f, double omega2, double s, double y);

}  // namespace bic
