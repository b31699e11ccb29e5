#include "bic/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "bic/toymodels.hpp"
#include "bic/wires1d.hpp"

namespace bic {

namespace {

constexpr double kPi = std::numbers::pi;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

BICOptions bic_options(const SolverSettings& s) {
  BICOptions o;
  o.width_tol = s.tol_width;
  o.null_tol = s.tol_null;
  return o;
}

CatalogRecord from_record(const BICRecord& r, std::vector<double> point, BICClass kind,
                          const std::vector<ModalCoefficient>& expansion) {
  CatalogRecord c;
  c.point = std::move(point);
  c.omega2 = r.omega2;
  c.width = r.width;
  c.residual = r.residual;
  c.kind = kind;
  c.quasi = r.quasi;
  c.top = top_coefficients(expansion);
  c.coefficients = r.coefficients;
  return c;
}

// Unit vector with the dominant entry real positive, as labelled coefficients.
std::vector<ModalCoefficient> labelled(const VecC& v, const std::vector<std::string>& labels) {
  BICRecord r;
  r.coefficients = v.normalized();
  ClosedBasis b;
  b.labels = labels;
  b.energies = Eigen::VectorXd::Zero(v.size());
  return bic_mode(r, b);
}

// Axis of the spec when it has the wanted name, else the model default.
MapAxis scan_axis(const SweepSpec& spec, const std::string& name) {
  if (spec.axis1.name == name) return spec.axis1;
  if (spec.axis2.name == name) return spec.axis2;
  const auto& info = model_info(spec.model);
  if (info.axis1.name == name) return info.axis1;
  if (info.axis2.name == name) return info.axis2;
  throw UsageError(spec.model + ": no scan range for " + name);
}

VecC zeeman_null_vector(const ZeemanParams& p) {
  Mat8c a = zeeman_matrix(p);
  Eigen::Matrix<double, 8, 1> scale;
  for (int j = 0; j < 8; ++j) {
    scale(j) = 1.0 / a.col(j).norm();
    a.col(j) *= scale(j);
  }
  Eigen::JacobiSVD<Mat8c> svd(a, Eigen::ComputeFullV);
  const Vec8c x = scale.cast<cplx>().asDiagonal() * svd.matrixV().col(7);
  return x.normalized();
}

}  // namespace

std::string to_string(BICClass c) {
  switch (c) {
    case BICClass::Protected:
      return "protected";
    case BICClass::FW:
      return "fw";
    case BICClass::Accidental:
      return "accidental";
    case BICClass::FabryPerot:
      return "fabry-perot";
  }
  return "accidental";
}

BICClass parse_class(const std::string& s) {
  for (BICClass c : {BICClass::Protected, BICClass::FW, BICClass::Accidental, BICClass::FabryPerot})
    if (to_string(c) == s) return c;
  throw std::runtime_error("catalog: unknown class '" + s + "'");
}

std::vector<ModalCoefficient> top_coefficients(std::vector<ModalCoefficient> c, int n) {
  std::stable_sort(c.begin(), c.end(),
                   [](const ModalCoefficient& a, const ModalCoefficient& b) { return std::abs(a.a) > std::abs(b.a); });
  if (static_cast<int>(c.size()) > n) c.resize(n);
  return c;
}

void sort_catalog(Catalog& c) {
  std::stable_sort(c.records.begin(), c.records.end(),
                   [](const CatalogRecord& a, const CatalogRecord& b) { return a.omega2 < b.omega2; });
}

void write_catalog(std::ostream& os, const Catalog& c) {
  os << "# " << c.version << '\n';
  os << "# kind: catalog\n";
  os << "# model: " << c.model << '\n';
  for (const auto& [k, v] : c.params) os << "# param: " << k << " = " << format_number(v) << '\n';
  for (const auto& [k, v] : c.notes) os << "# note: " << k << " = " << v << '\n';
  os << "# point:";
  for (const auto& n : c.point_names) os << ' ' << n;
  os << '\n';
  os << "# columns:";
  for (const auto& n : c.point_names) os << ' ' << n;
  os << " omega2 width residual class quasi ncoef [label re im]...\n";
  for (const auto& r : c.records) {
    if (r.point.size() != c.point_names.size()) throw std::invalid_argument("catalog: point size mismatch");
    if (r.top.size() > static_cast<std::size_t>(kTopCoefficients))
      throw std::invalid_argument("catalog: more than 8 coefficients");
    for (double x : r.point) os << format_number(x) << ' ';
    os << format_number(r.omega2) << ' ' << format_number(r.width) << ' ' << format_number(r.residual) << ' '
       << to_string(r.kind) << ' ' << (r.quasi ? 1 : 0) << ' ' << r.top.size();
    for (const auto& m : r.top) {
      if (m.label.empty() || m.label.find_first_of(" \t\n") != std::string::npos)
        throw std::invalid_argument("catalog: bad coefficient label '" + m.label + "'");
      os << ' ' << m.label << ' ' << format_number(m.a.real()) << ' ' << format_number(m.a.imag());
    }
    os << '\n';
  }
}

Catalog read_catalog(std::istream& is) {
  Catalog c;
  std::string line;
  bool first = true, have_point = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = trim(line.substr(1));
      if (first) {
        c.version = body;
        first = false;
        continue;
      }
      const auto colon = body.find(':');
      if (colon == std::string::npos) continue;
      const std::string key = body.substr(0, colon), rest = trim(body.substr(colon + 1));
      if (key == "kind") {
        if (rest != "catalog") throw std::runtime_error("catalog: file kind is " + rest);
      } else if (key == "model") {
        c.model = rest;
      } else if (key == "param" || key == "note") {
        const auto eq = rest.find('=');
        if (eq == std::string::npos) throw std::runtime_error("catalog: bad header line '" + line + "'");
        const std::string k = trim(rest.substr(0, eq)), v = trim(rest.substr(eq + 1));
        if (key == "param")
          c.params.emplace_back(k, parse_number(v));
        else
          c.notes.emplace_back(k, v);
      } else if (key == "point") {
        std::istringstream ss(rest);
        std::string n;
        while (ss >> n) c.point_names.push_back(n);
        have_point = true;
      }
      continue;
    }
    if (!have_point) throw std::runtime_error("catalog: record before the point legend");
    std::istringstream ss(line);
    std::string tok;
    auto next = [&]() {
      if (!(ss >> tok)) throw std::runtime_error("catalog: truncated record '" + line + "'");
      return tok;
    };
    CatalogRecord r;
    for (std::size_t i = 0; i < c.point_names.size(); ++i) r.point.push_back(parse_number(next()));
    r.omega2 = parse_number(next());
    r.width = parse_number(next());
    r.residual = parse_number(next());
    r.kind = parse_class(next());
    r.quasi = next() == "1";
    const int n = std::stoi(next());
    if (n < 0 || n > kTopCoefficients) throw std::runtime_error("catalog: bad coefficient count");
    for (int i = 0; i < n; ++i) {
      ModalCoefficient m;
      m.label = next();
      const double re = parse_number(next());
      m.a = cplx(re, parse_number(next()));
      r.top.push_back(m);
    }
    if (ss >> tok) throw std::runtime_error("catalog: trailing fields in '" + line + "'");
    c.records.push_back(std::move(r));
  }
  if (first) throw std::runtime_error("catalog: empty file");
  return c;
}

void save_catalog(const std::string& path, const Catalog& c) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_catalog(os, c);
  if (!os) throw std::runtime_error("write failed: " + path);
}

Catalog load_catalog(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  return read_catalog(is);
}

Catalog build_catalog(const SweepSpec& spec, std::vector<std::string>* diagnostics) {
  const Params p = resolve_params(spec);
  const SolverSettings& sv = spec.solver;
  const BICOptions bo = bic_options(sv);
  const std::string& m = spec.model;
  auto note = [&](const std::string& s) {
    if (diagnostics) diagnostics->push_back(s);
  };

  Catalog cat;
  cat.model = m;
  for (const auto& [k, v] : p) cat.params.emplace_back(k, v);
  cat.notes.emplace_back("tol_width", format_number(sv.tol_width));
  cat.notes.emplace_back("tol_null", format_number(sv.tol_null));

  if (m == "twolevel") {
    cat.point_names = {"eps"};
    cat.notes.emplace_back("omega2", "energy E of the level model");
    const auto b = twolevel_bic_point(p.at("gamma1"), p.at("gamma2"), p.at("u"));
    if (!b) {
      note("twolevel: gamma1 * gamma2 = 0, no BIC condition");
      return cat;
    }
    const TwoLevelParams tp{b->eps, p.at("gamma1"), p.at("gamma2"), p.at("u")};
    const auto H = twolevel_effective(tp);
    const auto s = eigen(H.H);
    int j = 0;
    for (int i = 1; i < s.values.size(); ++i)
      if (std::abs(s.values(i) - b->energy) < std::abs(s.values(j) - b->energy)) j = i;
    BICRecord r;
    r.p = b->eps;
    r.omega2 = b->energy;
    r.z = s.values(j);
    r.width = -2.0 * r.z.imag();
    r.coefficients = s.vectors.col(j).normalized();
    r.residual = decay_amplitudes(H, r.coefficients).norm();
    r.quasi = !(std::abs(r.width) <= bo.width_tol && r.residual <= bo.null_tol);
    cat.records.push_back(from_record(r, {b->eps}, BICClass::FW, labelled(r.coefficients, {"level1", "level2"})));
  } else if (m == "fpchain") {
    cat.point_names = {"epsw"};
    cat.notes.emplace_back("omega2", "energy of the trapped state");
    FPChainParams f;
    f.eps1 = p.at("eps1");
    f.eps2 = p.at("eps2");
    f.u = p.at("u");
    f.v0 = p.at("v0");
    f.E = p.at("E");
    const MapAxis ax = scan_axis(spec, "epsw");
    const auto r = fp_chain_bic(f, ax.min, ax.max, ax.count);
    f.epsw = r.p;
    cat.records.push_back(from_record(r, {r.p}, BICClass::FabryPerot, bic_mode(r, fp_chain_basis(f))));
  } else if (m == "well") {
    cat.point_names = {"k", "q", "L"};
    cat.notes.emplace_back("search", "none: one open channel and no degeneracy to interfere");
  } else if (m == "abring") {
    cat.point_names = {"k", "gamma"};
    cat.notes.emplace_back("omega2", "k^2");
    const int mmax = static_cast<int>(p.at("mmax"));
    if (mmax < 1) throw UsageError("abring: mmax must be >= 1");
    for (int a = 1; a <= mmax; ++a)
      for (int n = 1; n <= mmax; ++n) {
        const auto an = ring_bic_analysis(a, n);
        if (an.right_residual > bo.null_tol) {
          note("abring: (" + std::to_string(a) + "," + std::to_string(n) + ") not singular");
          continue;
        }
        BICRecord r;
        r.p = an.gamma;
        r.omega2 = an.k * an.k;
        r.z = r.omega2;
        r.coefficients = VecC(an.f0).normalized();
        r.residual = an.right_residual;
        cat.records.push_back(from_record(r, {an.k, an.gamma}, BICClass::Accidental,
                                          labelled(r.coefficients, {"r", "t", "a1", "a2", "b1", "b2"})));
      }
  } else if (m == "zeeman") {
    cat.point_names = {"L", "parity"};
    cat.notes.emplace_back("omega2", "energy E");
    const MapAxis ea = scan_axis(spec, "E"), la = scan_axis(spec, "L");
    ZeemanParams zp{p.at("E"), p.at("theta"), p.at("L"), p.at("B"), p.at("phi"), p.at("U0")};
    for (Parity par : {Parity::Symmetric, Parity::Antisymmetric})
      for (const auto& b : zeeman_bic_points(zp, par, std::min(ea.min, ea.max), std::max(ea.min, ea.max),
                                             std::min(la.min, la.max), std::max(la.min, la.max))) {
        ZeemanParams q = zp;
        q.E = b.E;
        q.L = b.L;
        BICRecord r;
        r.p = b.L;
        r.omega2 = b.E;
        r.z = b.E;
        r.coefficients = zeeman_null_vector(q);
        r.residual = b.sigma_min;
        r.quasi = r.residual > bo.null_tol;
        const double s = par == Parity::Symmetric ? 1.0 : -1.0;
        cat.records.push_back(from_record(
            r, {b.L, s}, BICClass::FW,
            labelled(r.coefficients, {"r_up", "r_dn", "a1", "b1", "a2", "b2", "t_up", "t_dn"})));
      }
  } else if (m == "planar") {
    cat.point_names = {"Ly"};
    const MapAxis ax = scan_axis(spec, "Ly");
    const RectCavity c = planar_cavity(p, sv);
    const ParitySector sec{static_cast<int>(p.at("xparity")), static_cast<int>(p.at("yparity"))};
    const auto b = planar_fw_bic(c, ax.min, ax.max, ax.count, p.at("seed"), planar_options(p, sv, 8), sec, bo);
    if (!b) {
      note("planar: no width minimum near the seed");
    } else {
      cat.records.push_back(
          from_record(b->record, {b->record.p}, BICClass::FW, bic_mode(b->record, rect_basis(b->cavity, b->modes))));
    }
  } else if (m == "sinai") {
    cat.point_names = {"Vg"};
    const MapAxis ax = scan_axis(spec, "Vg");
    const int parity = static_cast<int>(p.at("parity"));
    if (parity != 1 && parity != -1) throw UsageError("sinai: parity must be 1 or -1");
    SinaiScan sc;
    sc.vmin = ax.min;
    sc.vmax = ax.max;
    sc.points = ax.count;
    const auto v = sinai_accidental_bics(sinai_cavity(p, sv), sinai_bump(p), parity, sc, planar_options(p, sv, 4), bo);
    for (const auto& s : v) {
      const BICClass k = s.kind == SinaiKind::Protected ? BICClass::Protected : BICClass::Accidental;
      cat.records.push_back(from_record(s.record, {s.record.p}, k, s.expansion));
    }
  } else if (m == "cyl") {
    cat.point_names = {"L", "dphi"};
    const auto s = cyl_setup_from(p, sv);
    if (!s.converged) note("cyl: coupling quadrature not converged");
    const bool angle = spec.axis1.name == "dphi";
    const MapAxis ax = scan_axis(spec, angle ? "dphi" : "L");
    CylBICOptions o;
    o.band_lo = p.at("emin");
    o.band_hi = p.at("emax");
    o.points = ax.count;
    o.bic = bo;
    o.bic.golden_tol = 1e-3 * std::abs(ax.max - ax.min) / (ax.count - 1);
    const auto v = cyl_find_bics(s, angle ? CylScan::Angle : CylScan::Length, angle ? p.at("L") : p.at("dphi"),
                                 ax.min, ax.max, o);
    for (const auto& b : v) {
      const double w = b.expansion.empty() ? 1.0 : std::norm(b.expansion.front().a);
      const BICClass k = w > 1.0 - 1e-3 ? BICClass::Protected : BICClass::FW;
      cat.records.push_back(from_record(b.record, {b.L, b.dphi}, k, b.expansion));
    }
  } else if (m == "sphere") {
    cat.point_names = {"theta"};
    const auto s = sphere_setup_from(p, sv);
    if (!s.converged) note("sphere: coupling quadrature not converged");
    const MapAxis ax = scan_axis(spec, "theta");
    SphereBICOptions o;
    o.band_lo = p.at("emin");
    o.band_hi = p.at("emax");
    o.points = ax.count;
    o.bic = bo;
    o.bic.golden_tol = 1e-3 * std::abs(ax.max - ax.min) / (ax.count - 1);
    const auto v = sphere_find_bics(s, SphereScan::TwoPortTheta, {}, ax.min, ax.max, o);
    for (const auto& b : v)
      cat.records.push_back(
          from_record(b.record, {b.angle}, b.friedrich_wintgen ? BICClass::FW : BICClass::Protected, b.expansion));
  } else {
    throw UsageError("unknown model '" + m + "'");
  }
  for (const auto& r : cat.records)
    if (r.quasi) note(m + ": record at omega2=" + format_number(r.omega2) + " above tolerance (near-BIC)");
  sort_catalog(cat);
  return cat;
}

MapFile field_map(const std::string& model, const std::string& xname, const std::string& yname,
                  const std::vector<double>& x, const std::vector<double>& y, const MatC& values) {
  if (x.size() < 2 || y.size() < 2) throw UsageError("field grid needs at least 2 points per direction");
  if (values.rows() != static_cast<Eigen::Index>(y.size()) || values.cols() != static_cast<Eigen::Index>(x.size()))
    throw std::invalid_argument("field: value grid does not match the coordinates");
  MapFile m;
  m.kind = "field";
  m.model = model;
  m.axes = {{xname, x.front(), x.back(), static_cast<int>(x.size())},
            {yname, y.front(), y.back(), static_cast<int>(y.size())}};
  m.columns = {xname, yname, "re", "abs2"};
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) {
      const cplx v = values(j, i);
      m.rows.push_back({x[i], y[j], v.real(), std::norm(v)});
    }
  return m;
}

namespace {

MapFile line_map(const std::string& model, const std::string& xname, const std::vector<double>& x,
                 const std::vector<std::vector<cplx>>& comps, const std::vector<std::string>& names) {
  if (x.size() < 2) throw UsageError("field line needs at least 2 points");
  MapFile m;
  m.kind = "field";
  m.model = model;
  m.axes = {{xname, x.front(), x.back(), static_cast<int>(x.size())}};
  m.columns = {xname};
  for (const auto& n : names) {
    m.columns.push_back("re_" + n);
    m.columns.push_back("abs2_" + n);
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<double> row{x[i]};
    for (const auto& c : comps) {
      row.push_back(c[i].real());
      row.push_back(std::norm(c[i]));
    }
    m.rows.push_back(std::move(row));
  }
  return m;
}

MapFile amplitude_map(const std::string& model, const VecC& a) {
  std::vector<double> x;
  std::vector<cplx> v;
  for (int i = 0; i < a.size(); ++i) {
    x.push_back(i);
    v.push_back(a(i));
  }
  return line_map(model, "index", x, {v}, {"amp"});
}

// Dominant coefficient real and positive, so the real part is the field.
VecC phased(const VecC& a) {
  if (a.size() == 0) return a;
  Eigen::Index k = 0;
  a.cwiseAbs().maxCoeff(&k);
  if (std::abs(a(k)) == 0.0) return a;
  return a * (std::abs(a(k)) / a(k));
}

}  // namespace

MapFile render_field(const SweepSpec& spec, const Catalog& c, std::size_t index, const FieldSpec& grid) {
  if (grid.nx < 2 || grid.ny < 2) throw UsageError("field grid needs nx, ny >= 2");
  const Params p = resolve_params(spec);
  const SolverSettings& sv = spec.solver;
  const std::string& m = spec.model;

  if (m == "well") {
    // Scattering state of a unit incoming wave from the left.
    const WellParams w{p.at("k"), p.at("q"), p.at("L")};
    const auto s = well_solve(w);
    const cplx I(0.0, 1.0);
    std::vector<double> x;
    std::vector<cplx> v;
    for (int i = 0; i < grid.nx; ++i) {
      const double xi = -w.L + 3.0 * w.L * i / (grid.nx - 1);
      cplx f;
      if (xi < 0.0)
        f = std::exp(I * w.k * xi) + s.r * std::exp(-I * w.k * xi);
      else if (xi <= w.L)
        f = s.a * std::exp(I * w.q * xi) + s.b * std::exp(-I * w.q * xi);
      else
        f = s.t * std::exp(I * w.k * xi);
      x.push_back(xi);
      v.push_back(f);
    }
    return line_map(m, "x", x, {v}, {"psi"});
  }

  if (index >= c.records.size())
    throw UsageError("record index " + std::to_string(index) + " out of range (" + std::to_string(c.records.size()) +
                     " records)");
  const CatalogRecord& r = c.records[index];
  if (r.coefficients.size() == 0) throw UsageError("record has no stored null vector");
  const VecC a = phased(r.coefficients);

  if (m == "twolevel" || m == "fpchain" || m == "abring") return amplitude_map(m, a);
  if (m == "zeeman") {
    ZeemanParams q{r.omega2, p.at("theta"), r.point[0], p.at("B"), p.at("phi"), p.at("U0")};
    const auto prof = zeeman_bic_profile(q, grid.nx);
    return line_map(m, "z", prof.z, {prof.up, prof.down}, {"up", "down"});
  }
  if (m == "planar" || m == "sinai") {
    RectCavity cav;
    ParitySector sec;
    PlanarOptions o;
    if (m == "planar") {
      cav = planar_cavity(p, sv);
      cav.Ly = r.point[0];
      sec = {static_cast<int>(p.at("xparity")), static_cast<int>(p.at("yparity"))};
      o = planar_options(p, sv, 8);
    } else {
      cav = sinai_cavity(p, sv);
      sec = {static_cast<int>(p.at("parity")), 0};
      o = planar_options(p, sv, 4);
    }
    const auto modes = rect_modes(cav, sec);
    if (static_cast<Eigen::Index>(modes.size()) != a.size())
      throw UsageError("record does not match the current truncation");
    FieldGrid fg;
    fg.nx = grid.nx;
    fg.ny = grid.ny;
    const auto f = planar_bic_field(cav, modes, a, r.omega2, o, fg);
    return field_map(m, "x", "y", f.x, f.y, f.values);
  }
  if (m == "cyl") {
    const auto s = cyl_setup_from(p, sv);
    if (static_cast<Eigen::Index>(s.modes.size()) != a.size())
      throw UsageError("record does not match the current truncation");
    const auto f = cyl_surface_field(s, r.point[0], a, grid.nx, grid.ny);
    return field_map(m, "phi", "z", f.phi, f.z, f.values);
  }
  if (m == "sphere") {
    const auto s = sphere_setup_from(p, sv);
    if (static_cast<Eigen::Index>(s.modes.size()) != a.size())
      throw UsageError("record does not match the current truncation");
    const auto f = sphere_surface_field(s, a, grid.ny, grid.nx);
    return field_map(m, "phi", "theta", f.phi, f.theta, f.values);
  }
  throw UsageError("unknown model '" + m + "'");
}

}  // namespace bic
