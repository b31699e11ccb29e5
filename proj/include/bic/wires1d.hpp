#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bic/hcore.hpp"

namespace bic {

// Square well of width L: outside wavenumber k, inside q.
struct WellParams {
  double k = 1.0;
  double q = 1.0;
  double L = 1.0;
};

struct WellSolution {
  cplx r, a, b, t;
  cplx det;  // determinant of the 4x4 matching matrix
};

Eigen::Matrix4cd well_matrix(const WellParams& p);
WellSolution well_solve(const WellParams& p);
// det = e^{ikL} (4kq cos qL - 2i (k^2 + q^2) sin qL)
cplx well_det_closed(const WellParams& p);

// Ring with two leads; gamma is the flux phase.
struct RingParams {
  double k = 1.0;
  double gamma = 0.0;
};

struct RingSolution {
  cplx r, t, a1, a2, b1, b2;
  cplx det;
  bool singular = false;
};

using Mat6c = Eigen::Matrix<cplx, 6, 6>;
using Vec6c = Eigen::Matrix<cplx, 6, 1>;

Mat6c ring_matrix(const RingParams& p);
Vec6c ring_rhs();
RingSolution ring_solve(const RingParams& p);
RingSolution ring_closed_form(const RingParams& p);

struct RingBICAnalysis {
  double k = 0.0, gamma = 0.0;
  Vec6c f0;       // right null vector
  Vec6c f0_left;  // left null vector
  double right_residual = 0.0;
  double left_residual = 0.0;
  double solvability = 0.0;  // |f0_left . g|
  Vec6c particular;          // minimum-norm solution of F psi = g
  double particular_residual = 0.0;
};

// Null vectors at (k, gamma) = 2 pi (m, n).
RingBICAnalysis ring_bic_analysis(int m, int n);

// Spin-layer model: layer 0 < z < L with tilted Zeeman field.
struct ZeemanParams {
  double E = 0.0;
  double theta = 0.0;
  double L = 1.0;
  double B = 10.0;
  double phi = 0.0;
  double U0 = 0.0;
};

struct ZeemanWavenumbers {
  double kx = 0.0;
  cplx ku, kd;  // outer spin up / down; kd = i|kd| when evanescent
  cplx q1, q2;  // inner eigen-spin channels
  bool down_open = false;
};

ZeemanWavenumbers zeeman_wavenumbers(const ZeemanParams& p);
void zeeman_check(const ZeemanParams& p);

using Mat8c = Eigen::Matrix<cplx, 8, 8>;
using Vec8c = Eigen::Matrix<cplx, 8, 1>;

// Unknowns (r_up, r_dn, a1, b1, a2, b2, t_up, t_dn).
Mat8c zeeman_matrix(const ZeemanParams& p);
Vec8c zeeman_rhs(const ZeemanParams& p);

struct ZeemanSolution {
  cplx r_up, t_up, r_dn, t_dn, a1, a2, b1, b2;
  double sigma_min = 1.0;  // smallest singular value over largest
  bool singular = false;
};

ZeemanSolution zeeman_scatter(const ZeemanParams& p);
double zeeman_sigma_min(const ZeemanParams& p);

enum class Parity { Symmetric, Antisymmetric };

// Layer width at which channel i (1 or 2) matches the outer spin-down decay
// with n half-oscillations; NaN when channel i is closed.
double zeeman_channel_width(const ZeemanParams& p, int channel, int n, Parity parity);

struct ZeemanBIC {
  Parity parity = Parity::Symmetric;
  double E = 0.0;
  double L = 0.0;
  int n1 = 0, n2 = 0;
  double sigma_min = 0.0;
};

// BICs in the (E, L) plane: both inner channels satisfy the matching condition
// at the same width. p.E and p.L are ignored.
std::vector<ZeemanBIC> zeeman_bic_points(const ZeemanParams& p, Parity parity, double Emin, double Emax,
                                         double Lmin, double Lmax);

// Roots in L at fixed p.E of the single combined equation
// -tan^2(phi/2) = (q2 t(q2 L/2) - kappa) / (q1 t(q1 L/2) - kappa),
// t = tan (symmetric) or -cot (antisymmetric).
struct ZeemanEquationRoot {
  double L = 0.0;
  double sigma_min = 0.0;
};
std::vector<ZeemanEquationRoot> zeeman_equation_roots(const ZeemanParams& p, Parity parity, double Lmin,
                                                      double Lmax, double step = 0.01,
                                                      double pole_gap = 1e-4);

// Extremes of |r_up|^2 on the ellipse (E + dE cos t, L + dL sin t). A collapse
// point of a Fano line shows both 0 and 1 on every small loop around it.
struct ReflectionLoop {
  double min = 1.0;
  double max = 0.0;
};
ReflectionLoop zeeman_reflection_loop(const ZeemanParams& p, double dE, double dL, int samples = 2000);

// Bound-state profile from the null vector of the 8x8 system.
struct ZeemanProfile {
  std::vector<double> z;
  std::vector<cplx> up, down;
  double matching_error = 0.0;  // max jump of value or derivative at the interfaces
  int interior_nodes = 0;       // sign changes of the dominant component inside
};
ZeemanProfile zeeman_bic_profile(const ZeemanParams& p, int samples = 401);

}  // namespace bic
