#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bic/cyl3d.hpp"
#include "bic/hcore.hpp"

namespace bic {

// Hard-wall sphere of radius R (waveguide radius units), Neumann modes
// Psi_lmn = N_ln j_l(kappa_ln r / R) Y_lm, omega^2 = kappa_ln^2 / R^2.
struct SphereCavity {
  double R = 10.0;
  int l_max = 6;
  int n_max = 3;
};

void check_sphere(const SphereCavity& c);

struct SphereMode {
  int l = 0, m = 0, n = 1;
  double kappa = 0.0;  // n-th zero of j_l' (0 for the constant mode)
};

// Ordered by l, then n, then m = -l..l.
std::vector<SphereMode> sphere_modes(const SphereCavity& c);
ClosedBasis sphere_basis(const SphereCavity& c, const std::vector<SphereMode>& modes);
std::string sphere_label(const SphereMode& m);  // "(l,m,n)"

// Radial factor at the wall, Psi_ln(r = R).
double sphere_wall_value(const SphereCavity& c, int l, double kappa);

// Port direction by Euler angles; the rotated coupling is
// W~_lm = e^{-i m gamma} sum_k e^{-i k alpha} d^l_mk(beta) W_lk.
// A port at polar angle theta and azimuth phi is (0, theta, phi).
struct SpherePort {
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
};
SpherePort sphere_port_at(double theta, double phi = 0.0);

struct SphereCoupling {
  MatC W;  // rows: modes, columns: channels
  double change = 0.0;
  bool converged = true;
};

// Overlap of each channel with conj(Psi) over the port disk at the pole,
// theta(rho) = asin(rho / R). Node counts double until entries settle.
SphereCoupling sphere_pole_coupling(const SphereCavity& c, const std::vector<SphereMode>& modes,
                                    const std::vector<CylChannel>& channels, const DiskQuadrature& q = {});

MatC rotate_coupling(const std::vector<SphereMode>& modes, const MatC& W_pole, const SpherePort& port);

struct SphereSetup {
  SphereCavity cavity;
  std::vector<SphereMode> modes;
  std::vector<CylChannel> channels;
  MatC pole;  // pole couplings
  double quad_change = 0.0;
  bool converged = true;
};

SphereSetup sphere_setup(const SphereCavity& c, int channel_count = 8, const DiskQuadrature& q = {});

// Channels: port 0 channels, then port 1, ...
ChannelSet sphere_channel_set(const SphereSetup& s, int ports);
CouplingMatrix sphere_coupling_matrix(const SphereSetup& s, const std::vector<SpherePort>& ports);
EffectiveHamiltonian sphere_effective(const SphereSetup& s, const std::vector<SpherePort>& ports, double omega2);

// Ports confined to the xz plane keep the mirror y -> -y; the even (odd)
// combinations (|l,m> +- (-1)^m |l,-m>) / sqrt(2) form invariant blocks and
// only the even block couples to the open p = 0 channel. Columns of U: the
// block basis in the full mode basis.
MatC sphere_mirror_basis(const std::vector<SphereMode>& modes, int parity);

struct SphereTransmission {
  SMatrix S;
  double T = 0.0;  // port 0 channel 01 -> port 1 channel 01
};
SphereTransmission sphere_transmittance(const SphereSetup& s, const std::vector<SpherePort>& ports, double omega2);

// Family over one angle: two ports (pole and polar angle p), or three ports
// (pole, theta1, and the third at (p, fixed phi) or (fixed theta2, p)).
enum class SphereScan { TwoPortTheta, ThreePortTheta2, ThreePortPhi };

struct SphereGeometry {
  double theta1 = 0.0;  // second port polar angle (three-port scans)
  double theta2 = 0.0;  // third port polar angle (ThreePortPhi)
  double phi = 0.0;     // third port azimuth (ThreePortTheta2)
};

std::vector<SpherePort> sphere_ports(SphereScan scan, const SphereGeometry& g, double p);

struct SphereBICOptions {
  double band_lo = 0.05;
  double band_hi = 0.0;  // 0: second channel cutoff
  int points = 41;
  int parity = 1;        // mirror block for TwoPortTheta / ThreePortTheta2 with phi = 0; 0 = full basis
  double mix_tol = 1e-3; // weight outside the dominant l for an FW classification
  BICOptions bic;
};

struct SphereBIC {
  BICRecord record;   // coefficients in the full mode basis
  double angle = 0.0;
  bool friedrich_wintgen = false;  // null vector mixes different l
  std::vector<ModalCoefficient> expansion;
  std::vector<double> l_weight;    // |a|^2 summed per l
};

std::vector<SphereBIC> sphere_find_bics(const SphereSetup& s, SphereScan scan, const SphereGeometry& g, double lo,
                                        double hi, const SphereBICOptions& o = {});

// Surface field sum a Psi on r = R over a (theta, phi) grid.
struct SphereSurfaceField {
  std::vector<double> theta, phi;
  MatC values;  // rows: theta, columns: phi
};
SphereSurfaceField sphere_surface_field(const SphereSetup& s, const VecC& a, int ntheta = 61, int nphi = 121);

}  // namespace bic
