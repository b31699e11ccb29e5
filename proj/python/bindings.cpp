#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bic/catalog.hpp"
#include "bic/hcore.hpp"
#include "bic/sweep.hpp"
#include "bic/toymodels.hpp"
#include "bic/wires1d.hpp"

namespace py = pybind11;
using namespace bic;

namespace {

SweepSpec make_spec(const std::string& model, const Params& params, py::object axis1, py::object axis2, int threads) {
  SweepSpec s;
  s.model = model;
  s.params = params;
  s.threads = threads;
  auto axis = [](py::object o) {
    if (o.is_none()) return MapAxis{};
    auto t = o.cast<std::tuple<std::string, double, double, int>>();
    return MapAxis{std::get<0>(t), std::get<1>(t), std::get<2>(t), std::get<3>(t)};
  };
  s.axis1 = axis(axis1);
  s.axis2 = axis(axis2);
  return with_default_axes(s);
}

py::dict map_dict(const SweepResult& r) {
  py::dict d;
  d["columns"] = r.map.columns;
  d["rows"] = r.map.rows;
  d["diagnostics"] = r.diagnostics;
  d["failures"] = r.failures;
  return d;
}

}  // namespace

PYBIND11_MODULE(_bic, m) {
  m.doc() = "Effective non-Hermitian Hamiltonians, S-matrices and bound states in the continuum";

  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);

  m.def("models", &model_names);

  m.def(
      "heff",
      [](const Eigen::VectorXd& energies, const MatC& W, double omega2) {
        ClosedBasis b;
        b.energies = energies;
        b.labels.assign(energies.size(), "");
        ChannelSet ch;
        for (int c = 0; c < W.cols(); ++c) ch.add({c, "c" + std::to_string(c), 0.0, CouplingLaw::Value});
        return assemble(b, ch, {W}, omega2).H;
      },
      py::arg("energies"), py::arg("W"), py::arg("omega2") = 1.0,
      "H = diag(energies) - i k W W^dag with k = sqrt(omega2) on every channel.");

  m.def(
      "smatrix",
      [](const Eigen::VectorXd& energies, const MatC& W, double E) {
        ClosedBasis b;
        b.energies = energies;
        b.labels.assign(energies.size(), "");
        ChannelSet ch;
        for (int c = 0; c < W.cols(); ++c) ch.add({c, "c" + std::to_string(c), 0.0, CouplingLaw::Value});
        return smatrix(assemble(b, ch, {W}, 1.0), E).S;
      },
      py::arg("energies"), py::arg("W"), py::arg("E"), "S matrix with frozen unit-weight couplings.");

  m.def(
      "twolevel_bic_point",
      [](double g1, double g2, double u) -> py::object {
        const auto b = twolevel_bic_point(g1, g2, u);
        if (!b) return py::none();
        return py::make_tuple(b->eps, b->energy);
      },
      py::arg("gamma1"), py::arg("gamma2"), py::arg("u"));

  m.def(
      "twolevel_eigenvalues",
      [](double eps, double g1, double g2, double u) {
        const auto z = twolevel_eigenvalues({eps, g1, g2, u});
        return std::vector<cplx>{z[0], z[1]};
      },
      py::arg("eps"), py::arg("gamma1"), py::arg("gamma2"), py::arg("u"));

  m.def(
      "twolevel_transmission",
      [](double E, double eps, double g1, double g2, double u) { return std::norm(twolevel_transmission(E, {eps, g1, g2, u}).T); },
      py::arg("E"), py::arg("eps"), py::arg("gamma1"), py::arg("gamma2"), py::arg("u"));

  m.def(
      "fp_chain_bic",
      [](double eps1, double eps2, double u, double v0, double lo, double hi, int points) {
        FPChainParams p;
        p.eps1 = eps1;
        p.eps2 = eps2;
        p.u = u;
        p.v0 = v0;
        const auto r = fp_chain_bic(p, lo, hi, points);
        return py::make_tuple(r.p, r.omega2, r.width);
      },
      py::arg("eps1"), py::arg("eps2"), py::arg("u"), py::arg("v0"), py::arg("lo") = -1.5, py::arg("hi") = 1.5,
      py::arg("points") = 61, "Returns (epsw, energy, width) of the chain BIC.");

  m.def(
      "ring_transmission",
      [](double k, double gamma) {
        const auto s = ring_closed_form({k, gamma});
        return py::make_tuple(s.r, s.t);
      },
      py::arg("k"), py::arg("gamma"));

  m.def(
      "sweep",
      [](const std::string& model, const Params& params, py::object axis1, py::object axis2, int threads) {
        return map_dict(run_sweep(make_spec(model, params, axis1, axis2, threads)));
      },
      py::arg("model"), py::arg("params") = Params{}, py::arg("axis1") = py::none(), py::arg("axis2") = py::none(),
      py::arg("threads") = 1, "Parameter map; axes are (name, min, max, count) tuples.");

  m.def(
      "bics",
      [](const std::string& model, const Params& params, py::object axis1) {
        const auto cat = build_catalog(make_spec(model, params, axis1, py::none(), 1));
        py::list out;
        for (const auto& r : cat.records) {
          py::dict d;
          d["point"] = r.point;
          d["omega2"] = r.omega2;
          d["width"] = r.width;
          d["residual"] = r.residual;
          d["kind"] = to_string(r.kind);
          d["quasi"] = r.quasi;
          out.append(d);
        }
        return out;
      },
      py::arg("model"), py::arg("params") = Params{}, py::arg("axis1") = py::none());
}
