#include "bic/sinai.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bic/specfun.hpp"

namespace bic {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 1D factor int X_i X_j exp(-(s - s0)^2 / R^2) ds over the cavity side.
template <class F>
Eigen::MatrixXd factor(const std::vector<int>& idx, F basis, double L, double s0, double R, int quad) {
  std::vector<double> x, w;
  gauss_legendre(quad, -0.5 * L, 0.5 * L, x, w);
  const int n = static_cast<int>(idx.size());
  Eigen::MatrixXd B(n, quad);
  for (int i = 0; i < n; ++i)
    for (int q = 0; q < quad; ++q) B(i, q) = basis(idx[i], x[q]);
  Eigen::VectorXd g(quad);
  for (int q = 0; q < quad; ++q) g(q) = w[q] * std::exp(-(x[q] - s0) * (x[q] - s0) / (R * R));
  return B * g.asDiagonal() * B.transpose();
}

Eigen::MatrixXd potential_matrix(const RectCavity& c, const std::vector<RectMode>& modes, const SinaiBump& b,
                                 int quad) {
  std::vector<int> ms, ns;
  for (const auto& md : modes) {
    if (std::find(ms.begin(), ms.end(), md.m) == ms.end()) ms.push_back(md.m);
    if (std::find(ns.begin(), ns.end(), md.n) == ns.end()) ns.push_back(md.n);
  }
  const auto A = factor(ms, [&c](int m, double x) { return rect_x(c, m, x); }, c.Lx, b.x0, b.R, quad);
  const auto B = factor(ns, [&c](int n, double y) { return rect_y(c, n, y); }, c.Ly, b.y0, b.R, quad);
  auto pos = [](const std::vector<int>& v, int k) {
    return static_cast<int>(std::find(v.begin(), v.end(), k) - v.begin());
  };
  const int nm = static_cast<int>(modes.size());
  Eigen::MatrixXd V(nm, nm);
  for (int i = 0; i < nm; ++i)
    for (int j = 0; j < nm; ++j)
      V(i, j) = A(pos(ms, modes[i].m), pos(ms, modes[j].m)) * B(pos(ns, modes[i].n), pos(ns, modes[j].n));
  return V;
}

Eigen::VectorXd left_overlaps(const RectCavity& c, const std::vector<RectMode>& modes, int p) {
  PlanarOptions o;
  o.p_max = p;
  const auto W = coupling_planar(c, modes, o).W;
  return W.col(p - 1).real();
}

}  // namespace

SinaiPotential sinai_potential(const RectCavity& c, const std::vector<RectMode>& modes, const SinaiBump& b,
                               int quad) {
  check_cavity(c);
  if (!(b.R > 0.0)) throw std::domain_error("sinai: bump radius must be positive");
  if (std::abs(b.x0) >= 0.5 * c.Lx || std::abs(b.y0) >= 0.5 * c.Ly)
    throw std::domain_error("sinai: bump centre outside the cavity");
  if (quad < 2) throw std::invalid_argument("sinai: quadrature needs at least 2 nodes");
  SinaiPotential out;
  out.V = potential_matrix(c, modes, b, quad);
  const Eigen::MatrixXd V2 = potential_matrix(c, modes, b, 2 * quad);
  const double scale = std::max(V2.cwiseAbs().maxCoeff(), 1e-300);
  out.quad_change = (out.V - V2).cwiseAbs().maxCoeff() / scale;
  out.converged = out.quad_change <= 1e-8;
  return out;
}

SinaiSpectrum sinai_spectrum(const RectCavity& c, const std::vector<RectMode>& modes, const SinaiPotential& V,
                             double Vg) {
  const auto basis = rect_basis(c, modes);
  Eigen::MatrixXd H = Vg * V.V;
  H.diagonal() += basis.energies;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  SinaiSpectrum s;
  s.modes = modes;
  s.values = es.eigenvalues();
  s.vectors = es.eigenvectors();
  s.potential = V;
  return s;
}

SinaiSpectrum sinai_hamiltonian(const RectCavity& c, const SinaiBump& b, int x_parity, int quad) {
  if (x_parity != 1 && x_parity != -1) throw std::invalid_argument("sinai: x parity must be +1 or -1");
  const auto modes = rect_modes(c, {x_parity, 0});
  return sinai_spectrum(c, modes, sinai_potential(c, modes, b, quad), b.Vg);
}

Eigen::VectorXd sinai_couplings(const RectCavity& c, const SinaiSpectrum& s, int p) {
  return s.vectors.transpose() * left_overlaps(c, s.modes, p);
}

EffectiveHamiltonian sinai_effective(const RectCavity& c, const std::vector<RectMode>& modes,
                                     const SinaiPotential& V, double Vg, double omega2, const PlanarOptions& o) {
  const MatC stat = (Vg * V.V).cast<cplx>();
  return planar_effective(c, modes, omega2, o, &stat);
}

std::string to_string(SinaiKind k) {
  switch (k) {
    case SinaiKind::Accidental:
      return "accidental";
    case SinaiKind::Protected:
      return "protected";
    case SinaiKind::NearBIC:
      return "near";
  }
  return "?";
}

std::vector<SinaiBIC> sinai_accidental_bics(const RectCavity& c, const SinaiBump& b, int x_parity,
                                            const SinaiScan& scan, const PlanarOptions& o, const BICOptions& bo) {
  if (x_parity != 1 && x_parity != -1) throw std::invalid_argument("sinai: x parity must be +1 or -1");
  if (scan.points < 2 || !(scan.vmax > scan.vmin)) throw std::invalid_argument("sinai: bad Vg scan");
  const auto modes = rect_modes(c, {x_parity, 0});
  const auto V = sinai_potential(c, modes, b, scan.quad);
  const Eigen::VectorXd u = left_overlaps(c, modes, 1);
  const double lo_band = kPi * kPi, hi_band = 4.0 * kPi * kPi;
  const int nm = static_cast<int>(modes.size());
  const double step = (scan.vmax - scan.vmin) / (scan.points - 1);

  std::vector<SinaiBIC> out;
  SinaiSpectrum prev = sinai_spectrum(c, modes, V, scan.vmin);
  for (int i = 1; i < scan.points; ++i) {
    const double va = scan.vmin + (i - 1) * step, vb = scan.vmin + i * step;
    SinaiSpectrum cur = sinai_spectrum(c, modes, V, vb);
    // Fix eigenvector signs by continuity with the previous grid point.
    for (int k = 0; k < nm; ++k)
      if (cur.vectors.col(k).dot(prev.vectors.col(k)) < 0.0) cur.vectors.col(k) *= -1.0;
    const Eigen::VectorXd wa = prev.vectors.transpose() * u, wb = cur.vectors.transpose() * u;
    for (int k = 0; k < nm; ++k) {
      if (prev.values(k) <= lo_band || cur.values(k) >= hi_band || cur.values(k) <= lo_band) continue;
      if ((wa(k) < 0.0) == (wb(k) < 0.0) || wa(k) == 0.0) continue;
      // Bisect the coupling zero, keeping the sign reference of the left end.
      double a = va, bb = vb;
      const Eigen::VectorXd ref = prev.vectors.col(k);
      const double fa = wa(k);
      Eigen::VectorXd vec = ref;
      double lam = prev.values(k);
      for (int it = 0; it < 60 && bb - a > 1e-11; ++it) {
        const double m = 0.5 * (a + bb);
        const auto s = sinai_spectrum(c, modes, V, m);
        Eigen::VectorXd v = s.vectors.col(k);
        if (v.dot(ref) < 0.0) v = -v;
        const double fm = v.dot(u);
        vec = v;
        lam = s.values(k);
        if ((fm < 0.0) == (fa < 0.0))
          a = m;
        else
          bb = m;
      }
      SinaiBIC rec;
      rec.x_parity = x_parity;
      rec.branch = k;
      rec.coupling_zero = 0.5 * (a + bb);

      FamilyModel model = [&c, &modes, &V, &o](double vg, double w2) {
        return sinai_effective(c, modes, V, vg, w2, o);
      };
      const bool at_zero = std::abs(rec.coupling_zero) <= 1e-6 * std::max(1.0, step);
      if (at_zero) {
        // Symmetry-protected: the y-odd rectangle mode nearest in energy at Vg = 0.
        const auto basis = rect_basis(c, modes);
        int best = -1;
        for (int j = 0; j < nm; ++j)
          if (mode_y_parity(modes[j].n) < 0 &&
              (best < 0 || std::abs(basis.energies(j) - lam) < std::abs(basis.energies(best) - lam)))
            best = j;
        VecC guide = VecC::Zero(nm);
        guide(best) = 1.0;
        HamiltonianModel m0 = [&model](double w2) { return model(0.0, w2); };
        const auto r = resonance(m0, basis.energies(best), &guide, bo.resonance);
        rec.record.p = 0.0;
        rec.record.omega2 = r.energy;
        rec.record.z = r.z;
        rec.record.width = r.width;
        rec.record.coefficients = r.vector.normalized();
        const auto H = model(0.0, r.energy);
        MatC A = -H.H;
        A.diagonal().array() += r.energy;
        rec.record.residual = (A * rec.record.coefficients).norm();
        rec.record.quasi = !(std::abs(r.width) <= bo.width_tol && rec.record.residual <= bo.null_tol);
        rec.kind = rec.record.quasi ? SinaiKind::NearBIC : SinaiKind::Protected;
      } else {
        // Evanescent channels move the width zero away from the coupling zero:
        // follow the branch on both sides and refine the deepest width minimum.
        BICOptions opts = bo;
        if (opts.golden_tol == 0.0) opts.golden_tol = 1e-4 * scan.window / scan.window_points;
        const VecC guide = vec.cast<cplx>();
        bool have = false;
        const auto tr = track_through(model, std::max(scan.vmin, rec.coupling_zero - scan.window),
                                      std::min(scan.vmax, rec.coupling_zero + scan.window),
                                      rec.coupling_zero, scan.window_points, lam, &guide);
        for (const auto& r : find_bics(model, tr, opts)) {
          const bool better = !have || (rec.record.quasi && !r.quasi) ||
                              (rec.record.quasi == r.quasi &&
                               std::abs(r.p - rec.coupling_zero) < std::abs(rec.record.p - rec.coupling_zero));
          if (better) {
            rec.record = r;
            have = true;
          }
        }
        if (!have) continue;
        const bool on_axis = std::abs(rec.record.p) <= 1e-8 * std::max(1.0, step);
        rec.kind = rec.record.quasi ? SinaiKind::NearBIC : on_axis ? SinaiKind::Protected : SinaiKind::Accidental;
      }

      bool dup = false;
      for (const auto& o2 : out)
        if (std::abs(o2.record.p - rec.record.p) <= 1e-6 * std::max(1.0, std::abs(rec.record.p)) &&
            std::abs(o2.record.omega2 - rec.record.omega2) <= 1e-6 * rec.record.omega2)
          dup = true;
      if (dup) continue;

      // Expansion over the eigenmodes of the closed Sinai cavity at the BIC.
      const auto s = sinai_spectrum(c, modes, V, rec.record.p);
      BICRecord proj = rec.record;
      proj.coefficients = s.vectors.cast<cplx>().transpose() * rec.record.coefficients;
      ClosedBasis eb;
      eb.energies = s.values;
      for (int j = 0; j < nm; ++j) eb.labels.push_back("b" + std::to_string(j + 1));
      rec.expansion = bic_mode(proj, eb);
      out.push_back(std::move(rec));
    }
    prev = std::move(cur);
  }
  std::sort(out.begin(), out.end(),
            [](const SinaiBIC& x, const SinaiBIC& y) { return x.record.omega2 < y.record.omega2; });
  return out;
}

}  // namespace bic
