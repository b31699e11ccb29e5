#include "bic/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>
#include <thread>

#include "bic/toymodels.hpp"
#include "bic/wires1d.hpp"

namespace bic {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<ModelInfo> build_models() {
  std::vector<ModelInfo> m;
  m.push_back({"twolevel",
               "two resonances +-eps coupled to one continuum",
               {{"eps", 0.0}, {"E", 0.0}, {"gamma1", 0.1}, {"gamma2", 0.1}, {"u", 0.0}},
               {"eps", "E", "gamma1", "gamma2", "u"},
               {"T", "R", "width_min"},
               {"eps", -2.0, 2.0, 101},
               {"E", -2.0, 2.0, 101},
               "E",
               true});
  m.push_back({"fpchain",
               "five-site Fabry-Perot chain, couplings frozen at E",
               {{"eps1", -0.5}, {"eps2", 0.5}, {"epsw", 0.0}, {"u", 0.25}, {"v0", 0.5}, {"E", 0.5}, {"energy", 0.0}},
               {"eps1", "eps2", "epsw", "u", "v0", "energy"},
               {"T", "R", "width_min"},
               {"epsw", -1.0, 1.0, 101},
               {"energy", -1.5, 1.5, 151},
               "energy",
               true});
  m.push_back({"well",
               "square well, outside wavenumber k, inside q",
               {{"k", 1.0}, {"q", 2.0}, {"L", 1.0}},
               {"k", "q", "L"},
               {"T", "R", "absdet"},
               {"k", 0.05, 5.0, 100},
               {"L", 0.05, 5.0, 100},
               "",
               false});
  m.push_back({"abring",
               "Aharonov-Bohm ring with two leads",
               {{"k", 1.0}, {"gamma", 0.0}, {"mmax", 2.0}},
               {"k", "gamma"},
               {"T", "R", "absdet"},
               {"gamma", 0.0, 4.0 * kPi, 101},
               {"k", 4.0 * kPi / 100.0, 4.0 * kPi, 100},
               "",
               false});
  m.push_back({"zeeman",
               "spin layer in a tilted Zeeman field",
               {{"E", 0.0}, {"theta", kPi / 4.0}, {"L", 1.0}, {"B", 10.0}, {"phi", kPi / 3.0}, {"U0", -20.0}},
               {"E", "L", "theta", "B", "phi", "U0"},
               {"R_up", "T_up", "sigma_min"},
               {"E", -10.0, 30.0, 201},
               {"L", 0.01, 6.0, 300},
               "",
               false});
  m.push_back({"planar",
               "rectangular cavity between two planar waveguides",
               {{"Lx", 4.0},
                {"Ly", 8.0 / std::sqrt(3.0)},
                {"omega2", 14.03},
                {"neumann", 0.0},
                {"attenuation", 1.0},
                {"xparity", -1.0},
                {"yparity", 1.0},
                {"seed", 14.03}},
               {"Lx", "Ly", "omega2", "attenuation"},
               {"T", "R"},
               {"Ly", 4.4, 4.9, 26},
               {"omega2", 13.0, 15.0, 41},
               "omega2",
               true});
  m.push_back({"sinai",
               "Neumann rectangle with a Gaussian bump between two waveguides",
               {{"Lx", 4.0},
                {"Ly", 8.0 / std::sqrt(3.0)},
                {"Vg", 0.0},
                {"bump_R", 1.5},
                {"x0", 0.0},
                {"y0", 1.0},
                {"omega2", 20.0},
                {"attenuation", 1.0},
                {"parity", 1.0}},
               {"Vg", "omega2", "attenuation"},
               {"T", "R"},
               {"Vg", -50.0, 50.0, 201},
               {"omega2", 10.0, 39.0, 59},
               "omega2",
               true});
  m.push_back({"cyl",
               "cylindrical resonator between two circular waveguides",
               {{"R", 3.0}, {"r0", 1.5}, {"L", 4.0}, {"dphi", kPi / 4.0}, {"omega2", 0.4}, {"emin", 0.3}, {"emax", 0.45}},
               {"L", "dphi", "omega2"},
               {"T", "R"},
               {"L", 2.5, 5.5, 41},
               {"omega2", 0.05, 3.3, 66},
               "omega2",
               true});
  m.push_back({"sphere",
               "spherical resonator with two circular waveguides",
               {{"R", 10.0}, {"theta", 0.7 * kPi}, {"omega2", 0.1}, {"emin", 0.05}, {"emax", 0.0}},
               {"theta", "omega2"},
               {"T", "R"},
               {"theta", 0.05 * kPi, kPi, 39},
               {"omega2", 0.05, 3.3, 66},
               "omega2",
               true});
  return m;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
  return s;
}

int pick(int flag, int fallback) { return flag > 0 ? flag : fallback; }

double cutoff_check(double omega2, double cutoff, const char* what) {
  if (!(omega2 > cutoff)) throw std::domain_error(std::string(what) + ": omega2 below the first channel cutoff");
  return omega2;
}

double min_width(const MatC& H) {
  const auto s = eigen(H);
  double w = std::numeric_limits<double>::infinity();
  for (int j = 0; j < s.values.size(); ++j) w = std::min(w, -2.0 * s.values(j).imag());
  return w;
}

TwoLevelParams twolevel_params(const Params& p) {
  return {p.at("eps"), p.at("gamma1"), p.at("gamma2"), p.at("u")};
}

FPChainParams fpchain_params(const Params& p) {
  FPChainParams f;
  f.eps1 = p.at("eps1");
  f.eps2 = p.at("eps2");
  f.epsw = p.at("epsw");
  f.u = p.at("u");
  f.v0 = p.at("v0");
  f.E = p.at("E");
  return f;
}

ZeemanParams zeeman_params(const Params& p) {
  return {p.at("E"), p.at("theta"), p.at("L"), p.at("B"), p.at("phi"), p.at("U0")};
}

}  // namespace

const std::vector<ModelInfo>& models() {
  static const std::vector<ModelInfo> m = build_models();
  return m;
}

std::vector<std::string> model_names() {
  std::vector<std::string> out;
  for (const auto& m : models()) out.push_back(m.name);
  return out;
}

const ModelInfo& model_info(const std::string& name) {
  for (const auto& m : models())
    if (m.name == name) return m;
  throw UsageError("unknown model '" + name + "'; valid models: " + join(model_names()));
}

Params resolve_params(const SweepSpec& spec) {
  const auto& info = model_info(spec.model);
  Params out;
  std::vector<std::string> names;
  for (const auto& [k, v] : info.defaults) {
    out[k] = v;
    names.push_back(k);
  }
  for (const auto& [k, v] : spec.params) {
    if (!out.count(k)) throw UsageError("unknown parameter '" + k + "' for " + spec.model + "; valid: " + join(names));
    out[k] = v;
  }
  return out;
}

void validate(const SweepSpec& spec) {
  const auto& info = model_info(spec.model);
  resolve_params(spec);
  for (const MapAxis* a : {&spec.axis1, &spec.axis2}) {
    if (std::find(info.axes.begin(), info.axes.end(), a->name) == info.axes.end())
      throw UsageError("axis '" + a->name + "' is not sweepable for " + spec.model + "; valid: " + join(info.axes));
    if (a->count < 2) throw UsageError("axis " + a->name + ": count must be >= 2");
    if (!std::isfinite(a->min) || !std::isfinite(a->max)) throw UsageError("axis " + a->name + ": bounds must be finite");
  }
  if (spec.axis1.name == spec.axis2.name) throw UsageError("axis1 and axis2 must differ");
  if (spec.threads < 1) throw UsageError("threads must be >= 1");
  if (!(spec.solver.tol_width > 0.0) || !(spec.solver.tol_null > 0.0)) throw UsageError("tolerances must be positive");
}

SweepSpec with_default_axes(SweepSpec spec) {
  const auto& info = model_info(spec.model);
  if (spec.axis1.name.empty()) spec.axis1 = info.axis1;
  if (spec.axis2.name.empty()) spec.axis2 = info.axis2;
  return spec;
}

RectCavity planar_cavity(const Params& p, const SolverSettings& s) {
  RectCavity c;
  c.Lx = p.at("Lx");
  c.Ly = p.at("Ly");
  c.flavor = p.at("neumann") != 0.0 ? Flavor::Neumann : Flavor::Dirichlet;
  c.m_max = c.n_max = pick(s.truncation, 20);
  return c;
}

PlanarOptions planar_options(const Params& p, const SolverSettings& s, int default_pmax) {
  return {pick(s.pmax, default_pmax), p.at("attenuation")};
}

RectCavity sinai_cavity(const Params& p, const SolverSettings& s) {
  RectCavity c;
  c.Lx = p.at("Lx");
  c.Ly = p.at("Ly");
  c.flavor = Flavor::Neumann;
  c.m_max = c.n_max = pick(s.truncation, 10);
  return c;
}

SinaiBump sinai_bump(const Params& p) { return {p.at("Vg"), p.at("bump_R"), p.at("x0"), p.at("y0")}; }

CylSetup cyl_setup_from(const Params& p, const SolverSettings& s) {
  CylCavity c;
  c.R = p.at("R");
  c.l_max = pick(s.truncation, c.l_max);
  return cyl_setup(c, p.at("r0"), pick(s.pmax, 8));
}

SphereSetup sphere_setup_from(const Params& p, const SolverSettings& s) {
  SphereCavity c;
  c.R = p.at("R");
  c.l_max = pick(s.truncation, c.l_max);
  return sphere_setup(c, pick(s.pmax, 8));
}

PointFunction point_function(const SweepSpec& spec) {
  const std::string& m = spec.model;
  const Params base = resolve_params(spec);
  const SolverSettings sv = spec.solver;
  if (m == "twolevel") {
    return [](const Params& p) {
      const auto tp = twolevel_params(p);
      const auto s = twolevel_transmission(p.at("E"), tp);
      if (s.singular) throw std::runtime_error("transmission singular at a real eigenvalue");
      return std::vector<double>{std::norm(s.T), std::norm(s.R), min_width(twolevel_heff(tp))};
    };
  }
  if (m == "fpchain") {
    return [](const Params& p) {
      const auto H = fp_chain_effective(fpchain_params(p), p.at("E"));
      const auto S = smatrix(H, p.at("energy"));
      if (S.singular) throw std::runtime_error("E - H_eff singular");
      return std::vector<double>{std::norm(S.element(1, 0)), std::norm(S.element(0, 0)), min_width(H.H)};
    };
  }
  if (m == "well") {
    return [](const Params& p) {
      const WellParams w{p.at("k"), p.at("q"), p.at("L")};
      const auto s = well_solve(w);
      return std::vector<double>{std::norm(s.t), std::norm(s.r), std::abs(s.det)};
    };
  }
  if (m == "abring") {
    return [](const Params& p) {
      const RingParams rp{p.at("k"), p.at("gamma")};
      const auto s = ring_solve(rp);
      if (!s.singular) return std::vector<double>{std::norm(s.t), std::norm(s.r), std::abs(s.det)};
      // On a BIC the system stays solvable and r, t are unique: minimum-norm solution.
      const Mat6c f = ring_matrix(rp);
      const Vec6c x = Eigen::CompleteOrthogonalDecomposition<Mat6c>(f).solve(ring_rhs());
      if ((f * x - ring_rhs()).norm() > 1e-8) throw std::runtime_error("ring matching matrix singular, no solution");
      return std::vector<double>{std::norm(x(1)), std::norm(x(0)), std::abs(s.det)};
    };
  }
  if (m == "zeeman") {
    return [](const Params& p) {
      const auto s = zeeman_scatter(zeeman_params(p));
      if (s.singular) throw std::runtime_error("8x8 matching system singular");
      return std::vector<double>{std::norm(s.r_up), std::norm(s.t_up), s.sigma_min};
    };
  }
  if (m == "planar") {
    return [sv](const Params& p) {
      const auto c = planar_cavity(p, sv);
      const ParitySector sec{static_cast<int>(p.at("xparity")), static_cast<int>(p.at("yparity"))};
      const auto t = planar_transmittance(c, p.at("omega2"), planar_options(p, sv, 8), sec);
      return std::vector<double>{t.T, t.R};
    };
  }
  if (m == "sinai") {
    const RectCavity c = sinai_cavity(base, sv);
    auto modes = std::make_shared<const std::vector<RectMode>>(rect_modes(c));
    auto V = std::make_shared<const SinaiPotential>(sinai_potential(c, *modes, sinai_bump(base)));
    return [c, modes, V, sv](const Params& p) {
      const auto o = planar_options(p, sv, 4);
      const double w2 = cutoff_check(p.at("omega2"), kPi * kPi, "sinai");
      const auto H = sinai_effective(c, *modes, *V, p.at("Vg"), w2, o);
      const auto S = smatrix(H, w2);
      return std::vector<double>{std::norm(S.element(o.p_max, 0)), std::norm(S.element(0, 0))};
    };
  }
  if (m == "cyl") {
    auto s = std::make_shared<const CylSetup>(cyl_setup_from(base, sv));
    return [s](const Params& p) {
      const auto t = cyl_transmittance(*s, p.at("L"), p.at("dphi"), p.at("omega2"));
      return std::vector<double>{t.T, t.R};
    };
  }
  if (m == "sphere") {
    auto s = std::make_shared<const SphereSetup>(sphere_setup_from(base, sv));
    return [s](const Params& p) {
      const auto t = sphere_transmittance(*s, sphere_ports(SphereScan::TwoPortTheta, {}, p.at("theta")), p.at("omega2"));
      return std::vector<double>{t.T, std::norm(t.S.element(0, 0))};
    };
  }
  throw UsageError("unknown model '" + m + "'");
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f) {
  const std::size_t workers = std::min<std::size_t>(std::max(1, threads), std::max<std::size_t>(n, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i; !failed && (i = next++) < n;) {
        try {
          f(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

namespace {

MapFile map_header(const SweepSpec& spec, const Params& p, const std::string& kind) {
  MapFile m;
  m.kind = kind;
  m.model = spec.model;
  for (const auto& [k, v] : p) m.params.emplace_back(k, v);
  m.notes.emplace_back("tol_width", format_number(spec.solver.tol_width));
  m.notes.emplace_back("tol_null", format_number(spec.solver.tol_null));
  if (spec.solver.pmax > 0) m.notes.emplace_back("pmax", std::to_string(spec.solver.pmax));
  if (spec.solver.truncation > 0) m.notes.emplace_back("truncation", std::to_string(spec.solver.truncation));
  return m;
}

std::string point_text(const MapAxis& a, double x) { return a.name + "=" + format_number(x); }

}  // namespace

SweepResult run_sweep(const SweepSpec& spec) {
  validate(spec);
  const auto& info = model_info(spec.model);
  const Params base = resolve_params(spec);
  const PointFunction f = point_function(spec);

  const std::size_t n1 = spec.axis1.count, n2 = spec.axis2.count, n = n1 * n2;
  const std::size_t nv = info.columns.size();
  std::vector<std::vector<double>> values(n);
  std::vector<std::string> errors(n);
  parallel_for(n, spec.threads, [&](std::size_t idx) {
    Params p = base;
    p[spec.axis1.name] = spec.axis1.at(static_cast<int>(idx / n2));
    p[spec.axis2.name] = spec.axis2.at(static_cast<int>(idx % n2));
    try {
      auto v = f(p);
      if (v.size() != nv) throw std::logic_error("model returned the wrong number of columns");
      for (double x : v)
        if (!std::isfinite(x)) throw std::runtime_error("non-finite value");
      values[idx] = std::move(v);
    } catch (const std::exception& e) {
      values[idx].assign(nv, std::nan(""));
      errors[idx] = e.what();
    }
  });

  SweepResult r;
  r.map = map_header(spec, base, "map");
  r.map.axes = {spec.axis1, spec.axis2};
  r.map.columns = {spec.axis1.name, spec.axis2.name};
  r.map.columns.insert(r.map.columns.end(), info.columns.begin(), info.columns.end());
  r.map.rows.reserve(n);
  for (std::size_t idx = 0; idx < n; ++idx) {
    const double a = spec.axis1.at(static_cast<int>(idx / n2)), b = spec.axis2.at(static_cast<int>(idx % n2));
    std::vector<double> row{a, b};
    row.insert(row.end(), values[idx].begin(), values[idx].end());
    r.map.rows.push_back(std::move(row));
    if (!errors[idx].empty()) {
      ++r.failures;
      r.diagnostics.push_back("row " + std::to_string(idx) + " " + point_text(spec.axis1, a) + " " +
                              point_text(spec.axis2, b) + ": " + errors[idx]);
    }
  }
  return r;
}

FamilyModel heff_family(const SweepSpec& spec, const std::string& axis) {
  const auto& info = model_info(spec.model);
  if (!info.heff) throw UsageError(spec.model + " has no effective Hamiltonian");
  if (axis == info.energy) throw UsageError("the parameter axis must not be the energy " + axis);
  const Params base = resolve_params(spec);
  const SolverSettings sv = spec.solver;
  const std::string& m = spec.model;
  auto with = [base, axis](double x) {
    Params p = base;
    p[axis] = x;
    return p;
  };
  if (m == "twolevel") return [with](double x, double) { return twolevel_effective(twolevel_params(with(x))); };
  if (m == "fpchain")
    return [with](double x, double) {
      const Params p = with(x);
      return fp_chain_effective(fpchain_params(p), p.at("E"));
    };
  if (m == "planar")
    return [with, sv](double x, double w2) {
      const Params p = with(x);
      const auto c = planar_cavity(p, sv);
      const ParitySector sec{static_cast<int>(p.at("xparity")), static_cast<int>(p.at("yparity"))};
      return planar_effective(c, rect_modes(c, sec), w2, planar_options(p, sv, 8));
    };
  if (m == "sinai") {
    const RectCavity c = sinai_cavity(base, sv);
    auto modes = std::make_shared<const std::vector<RectMode>>(rect_modes(c));
    auto V = std::make_shared<const SinaiPotential>(sinai_potential(c, *modes, sinai_bump(base)));
    return [with, c, modes, V, sv](double x, double w2) {
      const Params p = with(x);
      return sinai_effective(c, *modes, *V, p.at("Vg"), w2, planar_options(p, sv, 4));
    };
  }
  if (m == "cyl") {
    auto s = std::make_shared<const CylSetup>(cyl_setup_from(base, sv));
    return [with, s](double x, double w2) {
      const Params p = with(x);
      return cyl_effective(*s, p.at("L"), p.at("dphi"), w2);
    };
  }
  if (m == "sphere") {
    auto s = std::make_shared<const SphereSetup>(sphere_setup_from(base, sv));
    return [with, s](double x, double w2) {
      const Params p = with(x);
      return sphere_effective(*s, sphere_ports(SphereScan::TwoPortTheta, {}, p.at("theta")), w2);
    };
  }
  throw UsageError(m + " has no effective Hamiltonian");
}

namespace {

// Singularity indicator of the matching-matrix models.
std::function<double(const Params&)> indicator(const std::string& m) {
  if (m == "well")
    return [](const Params& p) { return std::abs(well_det_closed({p.at("k"), p.at("q"), p.at("L")})); };
  if (m == "abring") return [](const Params& p) { return std::abs(ring_matrix({p.at("k"), p.at("gamma")}).determinant()); };
  return [](const Params& p) { return zeeman_sigma_min(zeeman_params(p)); };
}

double golden_min(const std::function<double(double)>& f, double a, double b) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a), fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && std::abs(b - a) > 1e-13 * std::max(1.0, std::abs(a)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

SweepResult resonance_scan(const SweepSpec& spec) {
  validate(spec);
  const auto& info = model_info(spec.model);
  const Params base = resolve_params(spec);
  const MapAxis& ax = spec.axis1;
  SweepResult r;
  r.map = map_header(spec, base, "resonances");

  if (!info.heff) {
    // Local minima of |det| or sigma_min along axis1, refined by golden section.
    const auto ind = indicator(spec.model);
    r.map.columns = {ax.name, "indicator"};
    r.map.notes.emplace_back("scan", ax.name + " " + format_number(ax.min) + " " + format_number(ax.max) + " " +
                                         std::to_string(ax.count));
    auto at = [&](double x) {
      Params p = base;
      p[ax.name] = x;
      try {
        return ind(p);
      } catch (const std::exception&) {
        return std::numeric_limits<double>::infinity();
      }
    };
    std::vector<double> v(ax.count);
    for (int i = 0; i < ax.count; ++i) v[i] = at(ax.at(i));
    for (int i = 1; i + 1 < ax.count; ++i) {
      if (!(v[i] <= v[i - 1] && v[i] < v[i + 1])) continue;
      const double x = golden_min(at, ax.at(i - 1), ax.at(i + 1));
      r.map.rows.push_back({x, at(x)});
    }
    return r;
  }

  if (spec.axis2.name != info.energy)
    throw UsageError("resonances need axis2 = " + info.energy + " as the energy window");
  const FamilyModel fam = heff_family(spec, ax.name);
  const double elo = std::min(spec.axis2.min, spec.axis2.max), ehi = std::max(spec.axis2.min, spec.axis2.max);
  r.map.columns = {ax.name, "seed", "energy", "width", "re_z", "im_z", "iterations", "converged"};
  r.map.notes.emplace_back("scan", ax.name + " " + format_number(ax.min) + " " + format_number(ax.max) + " " +
                                       std::to_string(ax.count));
  r.map.notes.emplace_back("window", format_number(elo) + " " + format_number(ehi));

  std::vector<std::vector<std::vector<double>>> rows(ax.count);
  std::vector<std::string> errors(ax.count);
  ResonanceOptions ro;
  parallel_for(ax.count, spec.threads, [&](std::size_t i) {
    const double x = ax.at(static_cast<int>(i));
    try {
      HamiltonianModel model = [&fam, x](double w2) { return fam(x, w2); };
      const auto H0 = model(0.5 * (elo + ehi));
      const MatC herm = 0.5 * (H0.H + H0.H.adjoint());
      Eigen::SelfAdjointEigenSolver<MatC> es(herm);
      for (int j = 0; j < es.eigenvalues().size(); ++j) {
        const double seed = es.eigenvalues()(j);
        if (seed < elo || seed > ehi) continue;
        const VecC guide = es.eigenvectors().col(j);
        const auto res = resonance(model, seed, &guide, ro);
        rows[i].push_back({x, seed, res.energy, res.width, res.z.real(), res.z.imag(),
                           static_cast<double>(res.iterations), res.converged ? 1.0 : 0.0});
        if (!res.converged) errors[i] += "seed " + format_number(seed) + " did not converge; ";
      }
    } catch (const std::exception& e) {
      errors[i] += e.what();
    }
  });
  for (int i = 0; i < ax.count; ++i) {
    for (auto& row : rows[i]) r.map.rows.push_back(std::move(row));
    if (!errors[i].empty()) {
      ++r.failures;
      r.diagnostics.push_back(point_text(ax, ax.at(i)) + ": " + errors[i]);
    }
  }
  return r;
}

}  // namespace bic
