#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bic/hcore.hpp"

namespace bic {

// Hard-wall cylinder of radius R (waveguide radius units) and length L.
// Closed modes Psi_mnl = J_m(mu_mn r / R) e^{i m phi} psi_l(z),
// psi_l(z) = sqrt((2 - delta_l1) / L) cos(pi (l - 1) z / L).
struct CylCavity {
  double R = 3.0;
  double L = 4.0;
  int m_max = 4;
  int n_max = 3;
  int l_max = 6;
};

void check_cylinder(const CylCavity& c);

struct CylMode {
  int m = 0, n = 1, l = 1;
  double mu = 0.0;  // n-th zero of J_|m|'
};

struct CylChannel {
  int p = 0, q = 1;
  double mu = 0.0;  // cutoff of the unit-radius waveguide
};

// Ordered by m, then n, then l.
std::vector<CylMode> cyl_modes(const CylCavity& c);
double cyl_energy(const CylCavity& c, const CylMode& m);
ClosedBasis cyl_basis(const CylCavity& c, const std::vector<CylMode>& modes);
std::string cyl_label(const CylMode& m);  // "mnl", e.g. "-111"

// The lowest `count` waveguide channels by cutoff, +p before -p on ties.
std::vector<CylChannel> cyl_channels(int count);

// Transverse mode profiles, orthonormal on their disks.
cplx cyl_cavity_profile(double R, int m, double mu, double r, double phi);
cplx cyl_waveguide_profile(int p, double mu, double rho, double alpha);
double cyl_psi_l(int l, double L, double z);

// Waveguide axis at distance r0 from the cavity axis and azimuth `angle`.
// The channel angle alpha is measured from the global x axis, so rotating a
// port by theta multiplies its couplings by e^{i(p - m) theta}.
struct CylPort {
  double r0 = 1.5;
  double angle = 0.0;
  bool right = false;  // face z = L
};

struct DiskQuadrature {
  int radial = 64;    // Gauss-Legendre nodes in rho
  int angular = 256;  // trapezoid nodes in alpha
  int max_doublings = 3;
  double tol = 1e-7;
};

struct CylCoupling {
  MatC W;  // rows: modes, columns: channels
  double change = 0.0;  // relative change on the last node doubling
  bool converged = true;
};

// Overlap int phi_pq Psi*_mnl dA over the port disk, by quadrature, doubling
// the node counts until entries settle.
CylCoupling cyl_coupling(const CylCavity& c, const std::vector<CylMode>& modes,
                         const std::vector<CylChannel>& channels, const CylPort& port,
                         const DiskQuadrature& q = {});

// Reusable pieces of the open cylinder: the transverse overlaps at azimuth 0
// are computed once; rotated ports and the z factors are applied analytically.
struct CylSetup {
  CylCavity cavity;
  double r0 = 1.5;
  std::vector<CylMode> modes;
  std::vector<CylChannel> channels;
  MatC transverse;  // rows: modes, columns: channels; port at azimuth 0, psi_l omitted
  double quad_change = 0.0;
  bool converged = true;
};

CylSetup cyl_setup(const CylCavity& c, double r0 = 1.5, int channel_count = 8, const DiskQuadrature& q = {});

// Left port at z = 0 rotated by dphi, right port at z = L at azimuth 0.
// Channel order: left channels, then right channels.
ChannelSet cyl_channel_set(const CylSetup& s);
CouplingMatrix cyl_coupling_matrix(const CylSetup& s, double L, double dphi);
EffectiveHamiltonian cyl_effective(const CylSetup& s, double L, double dphi, double omega2);

struct CylTransmission {
  SMatrix S;
  double T = 0.0;  // |S_{R01,L01}|^2
  double R = 0.0;
};

CylTransmission cyl_transmittance(const CylSetup& s, double L, double dphi, double omega2);

enum class CylScan { Length, Angle };

struct CylBICOptions {
  double band_lo = 0.05;   // branches seeded with Re z in (band_lo, band_hi)
  double band_hi = 0.0;    // 0: up to the second channel cutoff mu_11^2
  int points = 41;
  BICOptions bic;
};

struct CylBIC {
  BICRecord record;  // p = L or dphi
  double L = 0.0, dphi = 0.0;
  std::vector<ModalCoefficient> expansion;
  double port_leak = 0.0;  // max over ports of |open-channel overlap| / max |psi| on the port face
};

// Width zeros of every in-band branch over L (fixed dphi) or dphi (fixed L).
std::vector<CylBIC> cyl_find_bics(const CylSetup& s, CylScan scan, double fixed, double lo, double hi,
                                  const CylBICOptions& o = {});

// Refine one BIC from a seed point (p, omega2) on the branch nearest to it.
std::optional<CylBIC> cyl_refine_bic(const CylSetup& s, CylScan scan, double fixed, double lo, double hi,
                                     double seed_p, double seed_energy, const CylBICOptions& o = {});

// Field of a mode expansion on the cylinder wall r = R over a (phi, z) grid.
struct CylSurfaceField {
  std::vector<double> phi, z;
  MatC values;  // rows: z, columns: phi
};
CylSurfaceField cyl_surface_field(const CylSetup& s, double L, const VecC& a, int nphi = 121, int nz = 61);

// Three-mode model {012, 111, -111} near their crossing, with the open
// channel 01 and the evanescent channels +-11; couplings scale as 1/sqrt(L).
struct TruncatedCMT {
  double R = 3.0;
  double w0 = 0.4714045207910317;  // sqrt(2) / 3
  double w1 = 0.269;
  double v1 = 0.1141;   // mode 111 to channel 11
  double v2 = -0.0141;  // mode -111 to channel 11
};

// Coefficients taken from quadrature overlaps of a cylinder setup.
TruncatedCMT truncated_from_setup(const CylSetup& s);

struct CMTResult {
  double omega2 = 0.0;
  double q11 = 0.0;
  // Hermitian-part eigenvalues: E1 = omega_012^2, E2,3 = d +- 4 q11 v1 v2 cos(dphi) / L
  double E1 = 0.0, E2 = 0.0, E3 = 0.0;
  Eigen::Matrix3cd X;                    // eigenvectors X1, X2, X3 in columns
  Eigen::Matrix3cd H;                    // full truncated H_eff
  Eigen::Vector3cd z;                    // its complex eigenvalues
};

// Evaluated at frequency omega2 (the couplings' k and q11 depend on it).
CMTResult cmt_truncated(const TruncatedCMT& tc, double L, double dphi, double omega2);

struct CMTBICPoint {
  bool found = false;
  double L = 0.0, omega2 = 0.0;
  int branch = 0;            // 2 or 3: which degeneracy E1 = E_branch
  Eigen::Vector3cd mode;     // decoupled superposition of X1 and X_branch
  double leak = 0.0;         // |coupling of mode| to the open channel, both ports
  double other_leak = 0.0;   // smallest open-channel leak at the other degeneracy
};

// Self-consistent degeneracy E1(L) = E_k(L, dphi) with omega^2 = E1, returning
// the one whose superposition decouples from both ports.
CMTBICPoint cmt_bic_point(const TruncatedCMT& tc, double dphi, double Llo = 3.5, double Lhi = 7.0);

}  // namespace bic
