#pragma once

#include <string>
#include <vector>

#include "bic/planar2d.hpp"

namespace bic {

// V(x, y) = Vg exp(-((x - x0)^2 + (y - y0)^2) / R^2), cavity-centred frame.
struct SinaiBump {
  double Vg = 0.0;
  double R = 1.5;
  double x0 = 0.0;
  double y0 = 1.0;
};

// Matrix elements <mn|V|m'n'> per unit Vg. The bump is separable, so the 2D
// Gauss-Legendre rule with quad x quad nodes factorises into two 1D rules.
struct SinaiPotential {
  Eigen::MatrixXd V;
  double quad_change = 0.0;  // max relative change on doubling the node count
  bool converged = true;
};

SinaiPotential sinai_potential(const RectCavity& c, const std::vector<RectMode>& modes, const SinaiBump& b,
                               int quad = 96);

// Eigenpairs of H_B + Vg V in one x-parity block (x_parity = +1 even, -1 odd).
struct SinaiSpectrum {
  std::vector<RectMode> modes;
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // columns in the rectangle basis
  SinaiPotential potential;
};

SinaiSpectrum sinai_hamiltonian(const RectCavity& c, const SinaiBump& b, int x_parity, int quad = 96);

// Same, reusing an already computed potential matrix.
SinaiSpectrum sinai_spectrum(const RectCavity& c, const std::vector<RectMode>& modes, const SinaiPotential& V,
                             double Vg);

// Raw left-port overlap of each eigenmode with channel p.
Eigen::VectorXd sinai_couplings(const RectCavity& c, const SinaiSpectrum& s, int p = 1);

EffectiveHamiltonian sinai_effective(const RectCavity& c, const std::vector<RectMode>& modes,
                                     const SinaiPotential& V, double Vg, double omega2, const PlanarOptions& o);

enum class SinaiKind { Accidental, Protected, NearBIC };

struct SinaiBIC {
  SinaiKind kind = SinaiKind::Accidental;
  int x_parity = 1;
  int branch = 0;             // eigenmode index within the block at the coupling zero
  double coupling_zero = 0.0; // Vg where W_{b,1} changes sign
  BICRecord record;           // p = Vg, omega2 = E
  std::vector<ModalCoefficient> expansion;  // over eigenmodes of the closed Sinai cavity
};

struct SinaiScan {
  double vmin = -50.0;
  double vmax = 50.0;
  int points = 1001;
  int quad = 96;
  double window = 6.0;    // half-width in Vg of the local width search
  int window_points = 12; // grid points per side of the local search
};

// Sign changes of W_{b,1}(Vg) for modes in the single-channel band, confirmed
// on the full H_eff. Zeros at Vg = 0 of y-odd modes are reported as Protected.
std::vector<SinaiBIC> sinai_accidental_bics(const RectCavity& c, const SinaiBump& b, int x_parity,
                                            const SinaiScan& scan, const PlanarOptions& o,
                                            const BICOptions& bo = {});

std::string to_string(SinaiKind k);

}  // namespace bic
