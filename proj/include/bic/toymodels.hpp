#pragma once

#include <array>
#include <optional>

#include "bic/hcore.hpp"

namespace bic {

// Two resonances +-eps coupled to one continuum through two equal ports.
struct TwoLevelParams {
  double eps = 0.0;
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double u = 0.0;
};

MatC twolevel_heff(const TwoLevelParams& p);

// Roots of det(H_eff - z) = 0.
std::array<cplx, 2> twolevel_eigenvalues(const TwoLevelParams& p);

struct TwoLevelBIC {
  double eps = 0.0;
  double energy = 0.0;  // real eigenvalue at eps
};

// Empty when gamma1 * gamma2 == 0 (the condition degenerates).
std::optional<TwoLevelBIC> twolevel_bic_point(double gamma1, double gamma2, double u);

struct TwoLevelScattering {
  cplx T;
  cplx R;
  bool singular = false;
};

// Residue expansion T = -2i sum V_L V_R / (E - z) over the biorthogonal eigenbasis.
TwoLevelScattering twolevel_transmission(double E, const TwoLevelParams& p);

// hcore input: two ports with couplings sqrt(gamma_n / 2), frozen (k = 1).
EffectiveHamiltonian twolevel_effective(const TwoLevelParams& p);

// Five-site chain: two side cavities on each lead, one central site.
struct FPChainParams {
  double eps1 = -0.5;
  double eps2 = 0.5;
  double epsw = 0.0;
  double u = 0.25;
  double v0 = 0.5;
  double E = 0.5;  // energy at which frozen couplings are evaluated
};

Eigen::Matrix<double, 5, 5> fp_chain_hb(const FPChainParams& p);

struct FPChainSpectrum {
  Eigen::Matrix<double, 5, 1> values;
  Eigen::Matrix<double, 5, 5> vectors;
};

FPChainSpectrum fp_chain_spectrum(const FPChainParams& p);

// Effective Hamiltonian with k = sqrt(omega2) lead couplings.
EffectiveHamiltonian fp_chain_effective(const FPChainParams& p, double omega2);

// BIC of the trapped state; tracks eps_w over [lo, hi] with couplings frozen at p.E.
BICRecord fp_chain_bic(const FPChainParams& p, double lo = -1.0, double hi = 1.0, int points = 41);

ClosedBasis fp_chain_basis(const FPChainParams& p);

}  // namespace bic
