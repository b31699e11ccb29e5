#include "bic/hcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bic {

void ChannelSet::add(Channel c) {
  if (!std::isfinite(c.cutoff2) || c.cutoff2 < 0.0) throw std::invalid_argument("ChannelSet: bad cutoff");
  channels_.push_back(std::move(c));
}

int ChannelSet::ports() const {
  int n = 0;
  for (const auto& c : channels_) n = std::max(n, c.port + 1);
  return n;
}

cplx ChannelSet::wavenumber(double cutoff2, double omega2) {
  const double d = omega2 - cutoff2;
  return d >= 0.0 ? cplx(std::sqrt(d), 0.0) : cplx(0.0, std::sqrt(-d));
}

cplx ChannelSet::weight(int i, double omega2) const {
  const cplx k = this->k(i, omega2);
  if (channels_.at(i).law == CouplingLaw::Value) return k;
  if (k == cplx(0.0)) throw std::domain_error("ChannelSet: derivative coupling at channel threshold");
  return 1.0 / k;
}

std::vector<int> ChannelSet::open(double omega2) const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (is_open(i, omega2)) out.push_back(i);
  return out;
}

EffectiveHamiltonian assemble(const ClosedBasis& basis, const ChannelSet& channels, const CouplingMatrix& coupling,
                              double omega2, const MatC* static_part) {
  if (!std::isfinite(omega2)) throw std::domain_error("assemble: non-finite frequency");
  const int n = basis.size();
  if (coupling.W.rows() != n || coupling.W.cols() != channels.size())
    throw std::invalid_argument("assemble: coupling matrix shape does not match basis/channels");
  EffectiveHamiltonian out;
  out.omega2 = omega2;
  out.W = coupling.W;
  out.channels = channels;
  out.H = basis.energies.cast<cplx>().asDiagonal();
  if (static_part) {
    if (static_part->rows() != n || static_part->cols() != n)
      throw std::invalid_argument("assemble: static part shape mismatch");
    out.H += *static_part;
  }
  const cplx mi(0.0, -1.0);
  for (int c = 0; c < channels.size(); ++c) {
    const auto w = coupling.W.col(c);
    out.H.noalias() += (mi * channels.weight(c, omega2)) * (w * w.adjoint());
  }
  return out;
}

cplx SMatrix::element(int out_channel, int in_channel) const {
  const auto io = std::find(open.begin(), open.end(), out_channel);
  const auto ii = std::find(open.begin(), open.end(), in_channel);
  if (io == open.end() || ii == open.end()) throw std::out_of_range("SMatrix: channel not open");
  return S(io - open.begin(), ii - open.begin());
}

SMatrix smatrix(const EffectiveHamiltonian& H, double E) {
  if (!std::isfinite(E)) throw std::domain_error("smatrix: non-finite energy");
  SMatrix out;
  out.open = H.channels.open(H.omega2);
  const int n = H.size();
  const int m = static_cast<int>(out.open.size());
  MatC Wh(n, m);
  for (int j = 0; j < m; ++j) {
    const int c = out.open[j];
    Wh.col(j) = H.W.col(c) * std::sqrt(H.channels.weight(c, H.omega2).real());
  }
  MatC A = -H.H;
  A.diagonal().array() += E;
  Eigen::PartialPivLU<MatC> lu(A);
  out.rcond = lu.rcond();
  out.singular = !(out.rcond > 1e-13);
  const MatC X = lu.solve(Wh);
  out.S = MatC::Identity(m, m) - cplx(0.0, 2.0) * (Wh.adjoint() * X);
  return out;
}

Spectrum eigen(const MatC& H) {
  Eigen::ComplexEigenSolver<MatC> es(H, true);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigen: complex eigensolver failed");
  Spectrum s{es.eigenvalues(), es.eigenvectors()};
  for (int j = 0; j < s.vectors.cols(); ++j) s.vectors.col(j).normalize();
  return s;
}

VecC decay_amplitudes(const EffectiveHamiltonian& H, const VecC& v) {
  const auto open = H.channels.open(H.omega2);
  VecC d(open.size());
  for (size_t j = 0; j < open.size(); ++j) {
    const int c = open[j];
    d(j) = std::sqrt(H.channels.weight(c, H.omega2).real()) * H.W.col(c).dot(v);
  }
  return d;
}

namespace {

int pick_branch(const Spectrum& s, double E, const VecC* guide, const cplx* zguide, double tie_tol) {
  const int n = static_cast<int>(s.values.size());
  if (n == 0) throw std::invalid_argument("resonance: empty Hamiltonian");
  if (!guide) {
    int best = 0;
    for (int j = 1; j < n; ++j)
      if (std::abs(s.values(j).real() - E) < std::abs(s.values(best).real() - E)) best = j;
    return best;
  }
  std::vector<double> ov(n);
  for (int j = 0; j < n; ++j) ov[j] = std::abs(guide->dot(s.vectors.col(j)));
  const double top = *std::max_element(ov.begin(), ov.end());
  int best = -1;
  for (int j = 0; j < n; ++j) {
    if (ov[j] < top - tie_tol) continue;
    if (best < 0) {
      best = j;
      continue;
    }
    const cplx ref = zguide ? *zguide : cplx(E, 0.0);
    if (std::abs(s.values(j) - ref) < std::abs(s.values(best) - ref)) best = j;
  }
  return best;
}

ResonanceRecord resonance_impl(const HamiltonianModel& model, double seed, const VecC* guide, const cplx* zguide,
                               const ResonanceOptions& opts, double tie_tol) {
  ResonanceRecord rec;
  double E = seed;
  VecC follow;
  const VecC* g = guide;
  cplx zprev;
  bool have_prev = false;
  for (int it = 0; it <= opts.max_iter; ++it) {
    const auto H = model(E);
    const auto s = eigen(H.H);
    const int j = pick_branch(s, E, g, have_prev ? &zprev : zguide, tie_tol);
    const cplx z = s.values(j);
    follow = s.vectors.col(j);
    g = &follow;
    rec.z = z;
    rec.vector = follow;
    rec.iterations = it;
    rec.decay = decay_amplitudes(H, follow);
    const double scale = std::max(1.0, std::abs(E));
    bool done = std::abs(E - z.real()) <= opts.tol * scale;
    if (!done && have_prev && std::abs(z - zprev) <= opts.tol * std::max(1.0, std::abs(z))) done = true;
    if (done) {
      rec.converged = true;
      break;
    }
    zprev = z;
    have_prev = true;
    E = (1.0 - opts.alpha) * E + opts.alpha * z.real();
  }
  rec.energy = rec.z.real();
  rec.width = -2.0 * rec.z.imag();
  return rec;
}

double overlap(const VecC& a, const VecC& b) { return std::abs(a.dot(b)) / (a.norm() * b.norm()); }

}  // namespace

ResonanceRecord resonance(const HamiltonianModel& model, double seed, const VecC* guide,
                          const ResonanceOptions& opts) {
  return resonance_impl(model, seed, guide, nullptr, opts, 1e-3);
}

std::vector<ResonanceRecord> resonances(const HamiltonianModel& model, const std::vector<double>& seeds,
                                        const ResonanceOptions& opts) {
  std::vector<ResonanceRecord> out;
  out.reserve(seeds.size());
  for (double s : seeds) out.push_back(resonance(model, s, nullptr, opts));
  return out;
}

Trajectory track(const FamilyModel& model, const std::vector<double>& grid, double seed_energy, const VecC* guide,
                 const TrackOptions& opts) {
  Trajectory tr;
  if (grid.empty()) return tr;
  VecC prev;
  bool have = guide != nullptr;
  if (have) prev = *guide;
  double E = seed_energy;
  cplx zprev(seed_energy, 0.0);

  auto solve = [&](double p) {
    HamiltonianModel m = [&model, p](double w2) { return model(p, w2); };
    return resonance_impl(m, E, have ? &prev : nullptr, have ? &zprev : nullptr, opts.resonance, opts.tie_tol);
  };
  auto accept = [&](double p, const ResonanceRecord& r) {
    tr.points.push_back({p, r});
    if (!r.converged) tr.diagnostics.push_back("resonance did not converge at p=" + std::to_string(p));
    prev = r.vector;
    have = true;
    E = r.energy;
    zprev = r.z;
  };

  std::function<void(double, double, int)> advance = [&](double from, double to, int depth) {
    auto r = solve(to);
    if (have && overlap(prev, r.vector) < opts.min_overlap) {
      if (depth < opts.max_refine) {
        const double mid = 0.5 * (from + to);
        advance(from, mid, depth + 1);
        advance(mid, to, depth + 1);
        return;
      }
      tr.diagnostics.push_back("branch overlap below threshold after refinement at p=" + std::to_string(to));
    }
    accept(to, r);
  };

  accept(grid[0], solve(grid[0]));
  for (size_t i = 1; i < grid.size(); ++i) advance(grid[i - 1], grid[i], 0);
  return tr;
}

Trajectory track_through(const FamilyModel& model, double lo, double hi, double seed_p, int points_per_side,
                         double seed_energy, const VecC* guide, const TrackOptions& opts) {
  if (!(lo <= seed_p && seed_p <= hi) || points_per_side < 1)
    throw std::invalid_argument("track_through: seed outside [lo, hi]");
  auto side = [&](double end) {
    std::vector<double> g(points_per_side + 1);
    for (int i = 0; i <= points_per_side; ++i) g[i] = seed_p + (end - seed_p) * i / points_per_side;
    return track(model, g, seed_energy, guide, opts);
  };
  Trajectory down = side(lo), up = side(hi), out;
  for (auto it = down.points.rbegin(); it != down.points.rend(); ++it) out.points.push_back(*it);
  out.points.insert(out.points.end(), up.points.begin() + 1, up.points.end());
  out.diagnostics = down.diagnostics;
  out.diagnostics.insert(out.diagnostics.end(), up.diagnostics.begin(), up.diagnostics.end());
  return out;
}

namespace {

VecC aligned_decay(const ResonanceRecord& r, const VecC& ref) {
  const cplx o = ref.dot(r.vector);
  const cplx phase = std::abs(o) > 0.0 ? std::conj(o) / std::abs(o) : cplx(1.0);
  return r.decay * phase;
}

}  // namespace

BICRecord refine_bic(const FamilyModel& model, double a, double b, double seed_energy, const VecC& guide,
                     const BICOptions& opts) {
  if (a > b) std::swap(a, b);
  double E = seed_energy;
  VecC g = guide;
  auto eval = [&](double p) {
    HamiltonianModel m = [&model, p](double w2) { return model(p, w2); };
    auto r = resonance(m, E, &g, opts.resonance);
    return r;
  };

  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = a, hi = b;
  double x1 = hi - invphi * (hi - lo), x2 = lo + invphi * (hi - lo);
  auto r1 = eval(x1), r2 = eval(x2);
  const double gtol = std::max(opts.param_tol, opts.golden_tol);
  for (int it = 0; it < 200 && hi - lo > gtol; ++it) {
    if (r1.width <= r2.width) {
      hi = x2;
      x2 = x1;
      r2 = r1;
      x1 = hi - invphi * (hi - lo);
      r1 = eval(x1);
    } else {
      lo = x1;
      x1 = x2;
      r1 = r2;
      x2 = lo + invphi * (hi - lo);
      r2 = eval(x2);
    }
  }
  double p = r1.width <= r2.width ? x1 : x2;
  auto best = r1.width <= r2.width ? r1 : r2;
  E = best.energy;
  const VecC ref = best.vector;

  // Gauss-Newton on the decay amplitudes, which vanish linearly at a BIC.
  const double h = std::max(1e-7 * (b - a), 1e-12 * std::max(1.0, std::abs(p)));
  for (int it = 0; it < 30 && best.decay.size() > 0; ++it) {
    const VecC d0 = aligned_decay(best, ref);
    const auto rh = eval(p + h);
    if (rh.decay.size() != d0.size()) break;  // a channel opened or closed
    const VecC dd = (aligned_decay(rh, ref) - d0) / h;
    const double nrm = dd.squaredNorm();
    if (!(nrm > 0.0)) break;
    const double step = -(dd.adjoint() * d0)(0).real() / nrm;
    const double pn = std::clamp(p + step, a, b);
    const auto rn = eval(pn);
    if (rn.width > best.width + 1e-15 * std::max(1.0, std::abs(best.energy))) break;
    const double moved = std::abs(pn - p);
    p = pn;
    best = rn;
    E = best.energy;
    if (moved <= opts.param_tol) break;
  }

  const auto H = model(p, best.energy);
  BICRecord rec;
  rec.p = p;
  rec.omega2 = best.energy;
  rec.z = best.z;
  rec.width = best.width;
  rec.coefficients = best.vector.normalized();
  MatC A = -H.H;
  A.diagonal().array() += best.energy;
  rec.residual = (A * rec.coefficients).norm();
  rec.quasi = !(std::abs(rec.width) <= opts.width_tol && rec.residual <= opts.null_tol);
  return rec;
}

std::vector<BICRecord> find_bics(const FamilyModel& model, const Trajectory& trajectory, const BICOptions& opts) {
  std::vector<BICRecord> out;
  const auto& pts = trajectory.points;
  const int n = static_cast<int>(pts.size());
  for (int i = 0; i < n; ++i) {
    const double w = pts[i].r.width;
    const bool left = i == 0 || w <= pts[i - 1].r.width;
    const bool right = i == n - 1 || w <= pts[i + 1].r.width;
    if (!left || !right) continue;
    if ((i == 0 || i == n - 1) && std::abs(w) > opts.width_tol) continue;
    const double a = pts[std::max(i - 1, 0)].p;
    const double b = pts[std::min(i + 1, n - 1)].p;
    auto rec = refine_bic(model, a, b, pts[i].r.energy, pts[i].r.vector, opts);
    bool dup = false;
    for (const auto& o : out)
      if (std::abs(o.p - rec.p) <= 1e-8 * std::max(1.0, std::abs(rec.p))) dup = true;
    if (!dup) out.push_back(rec);
  }
  return out;
}

std::vector<ModalCoefficient> bic_mode(const BICRecord& record, const ClosedBasis& basis) {
  if (record.coefficients.size() != basis.size()) throw std::invalid_argument("bic_mode: basis size mismatch");
  VecC a = record.coefficients;
  const double nrm = a.norm();
  if (nrm > 0.0) a /= nrm;
  Eigen::Index imax = 0;
  a.cwiseAbs().maxCoeff(&imax);
  if (std::abs(a(imax)) > 0.0) a *= std::conj(a(imax)) / std::abs(a(imax));
  std::vector<ModalCoefficient> out;
  out.reserve(a.size());
  for (int i = 0; i < a.size(); ++i) out.push_back({basis.labels.empty() ? std::to_string(i) : basis.labels[i], a(i)});
  std::stable_sort(out.begin(), out.end(),
                   [](const ModalCoefficient& x, const ModalCoefficient& y) { return std::abs(x.a) > std::abs(y.a); });
  return out;
}

}  // namespace bic
