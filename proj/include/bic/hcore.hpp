#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bic {

using cplx = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;

// How a channel's coupling scales with its longitudinal wavenumber k.
// Value couplings (overlap of mode values) enter as k W W^dag, derivative
// couplings (overlap of normal derivatives) as W W^dag / k.
enum class CouplingLaw { Value, Derivative };

struct Channel {
  int port = 0;
  std::string label;
  double cutoff2 = 0.0;
  CouplingLaw law = CouplingLaw::Value;
};

// Channels in insertion order; the column order of every CouplingMatrix.
class ChannelSet {
 public:
  void add(Channel c);
  int size() const { return static_cast<int>(channels_.size()); }
  const Channel& operator[](int i) const { return channels_.at(i); }
  const std::vector<Channel>& all() const { return channels_; }
  int ports() const;

  // k = sqrt(w2 - cutoff2) above cutoff, i|k| below.
  static cplx wavenumber(double cutoff2, double omega2);
  cplx k(int i, double omega2) const { return wavenumber(channels_.at(i).cutoff2, omega2); }
  // k or 1/k depending on the coupling law.
  cplx weight(int i, double omega2) const;
  bool is_open(int i, double omega2) const { return omega2 > channels_.at(i).cutoff2; }
  std::vector<int> open(double omega2) const;

 private:
  std::vector<Channel> channels_;
};

struct ClosedBasis {
  std::vector<std::string> labels;
  Eigen::VectorXd energies;
  int size() const { return static_cast<int>(energies.size()); }
};

// Rows: closed modes; columns: channels of the matching ChannelSet.
struct CouplingMatrix {
  MatC W;
};

struct EffectiveHamiltonian {
  MatC H;
  double omega2 = 0.0;
  MatC W;
  ChannelSet channels;
  int size() const { return static_cast<int>(H.rows()); }
};

// H = diag(E_n) + V - i sum_c w_c(omega2) W_c W_c^dag.
EffectiveHamiltonian assemble(const ClosedBasis& basis, const ChannelSet& channels,
                              const CouplingMatrix& coupling, double omega2,
                              const MatC* static_part = nullptr);

struct SMatrix {
  MatC S;
  std::vector<int> open;  // channel index of each row/column of S
  bool singular = false;  // E - H_eff numerically singular: candidate BIC
  double rcond = 1.0;
  cplx element(int out_channel, int in_channel) const;
};

// S = I - 2i sqrt(w) W^dag (E - H)^-1 W sqrt(w) over the channels open at H.omega2.
SMatrix smatrix(const EffectiveHamiltonian& H, double E);

struct Spectrum {
  VecC values;
  MatC vectors;  // unit-norm right eigenvectors in columns
};

Spectrum eigen(const MatC& H);

// Decay amplitudes sqrt(w_c) W_c^dag v over open channels; Gamma = 2 |D|^2 for unit v.
VecC decay_amplitudes(const EffectiveHamiltonian& H, const VecC& v);

using HamiltonianModel = std::function<EffectiveHamiltonian(double omega2)>;
using FamilyModel = std::function<EffectiveHamiltonian(double p, double omega2)>;

struct ResonanceOptions {
  double alpha = 0.7;
  int max_iter = 200;
  double tol = 1e-10;
};

struct ResonanceRecord {
  cplx z;
  double energy = 0.0;  // Re z at the fixed point
  double width = 0.0;   // -2 Im z
  VecC vector;
  VecC decay;
  int iterations = 0;
  bool converged = false;
};

// Fixed point E = Re z(E) following one eigenvalue branch. The branch is the
// eigenvalue nearest the seed or, when a guide vector is given, the one with
// the largest overlap with it.
ResonanceRecord resonance(const HamiltonianModel& model, double seed, const VecC* guide = nullptr,
                          const ResonanceOptions& opts = {});

std::vector<ResonanceRecord> resonances(const HamiltonianModel& model, const std::vector<double>& seeds,
                                        const ResonanceOptions& opts = {});

struct TrackPoint {
  double p = 0.0;
  ResonanceRecord r;
};

struct Trajectory {
  std::vector<TrackPoint> points;
  std::vector<std::string> diagnostics;
};

struct TrackOptions {
  double min_overlap = 0.5;
  int max_refine = 8;
  double tie_tol = 1e-3;
  ResonanceOptions resonance;
};

Trajectory track(const FamilyModel& model, const std::vector<double>& grid, double seed_energy,
                 const VecC* guide = nullptr, const TrackOptions& opts = {});

// Track outwards from seed_p to both ends and join into one ordered trajectory,
// so a width minimum at the seed is an interior point.
Trajectory track_through(const FamilyModel& model, double lo, double hi, double seed_p, int points_per_side,
                         double seed_energy, const VecC* guide = nullptr, const TrackOptions& opts = {});

struct BICOptions {
  double width_tol = 1e-8;
  double null_tol = 1e-7;
  double param_tol = 1e-10;
  // Golden section stops at this bracket width and hands over to Gauss-Newton;
  // 0 runs it down to param_tol.
  double golden_tol = 0.0;
  ResonanceOptions resonance;
};

struct BICRecord {
  double p = 0.0;
  double omega2 = 0.0;
  cplx z;
  double width = 0.0;
  VecC coefficients;  // unit-norm null vector in the closed basis
  double residual = 0.0;
  bool quasi = false;
};

// Local minima of the width along a trajectory, refined in the parameter.
std::vector<BICRecord> find_bics(const FamilyModel& model, const Trajectory& trajectory,
                                 const BICOptions& opts = {});

// Refine a single bracket [a, b] around a width minimum of the branch guided by v.
BICRecord refine_bic(const FamilyModel& model, double a, double b, double seed_energy, const VecC& guide,
                     const BICOptions& opts = {});

struct ModalCoefficient {
  std::string label;
  cplx a;
};

// Unit-norm expansion sorted by |a| descending, global phase fixing the
// dominant coefficient real and positive.
std::vector<ModalCoefficient> bic_mode(const BICRecord& record, const ClosedBasis& basis);

}  // namespace bic
