#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "bic/cyl3d.hpp"
#include "bic/hcore.hpp"
#include "bic/mapfile.hpp"
#include "bic/planar2d.hpp"
#include "bic/sinai.hpp"
#include "bic/sph3d.hpp"

namespace bic {

// Bad model, parameter, axis or grid request; the CLI maps it to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Params = std::map<std::string, double>;

struct SolverSettings {
  double tol_width = 1e-8;
  double tol_null = 1e-7;
  int pmax = -1;        // channels per port; -1 keeps the model default
  int truncation = -1;  // basis size knob; -1 keeps the model default
};

struct SweepSpec {
  std::string model;
  Params params;  // overrides of the model defaults
  MapAxis axis1, axis2;
  SolverSettings solver;
  int threads = 1;
};

struct ModelInfo {
  std::string name;
  std::string summary;
  std::vector<std::pair<std::string, double>> defaults;
  std::vector<std::string> axes;     // parameters that may be swept
  std::vector<std::string> columns;  // map value columns
  MapAxis axis1, axis2;              // default map axes
  std::string energy;                // parameter holding the energy, empty if none
  bool heff = false;                 // built on an effective Hamiltonian
};

const std::vector<ModelInfo>& models();
std::vector<std::string> model_names();
const ModelInfo& model_info(const std::string& name);

// Defaults overlaid by spec.params; unknown names throw UsageError.
Params resolve_params(const SweepSpec& spec);
void validate(const SweepSpec& spec);

// Spec with the model's default axes filled in where an axis has no name.
SweepSpec with_default_axes(SweepSpec spec);

// Value columns at one parameter point. The returned function shares only
// immutable precomputed data and may be called concurrently.
using PointFunction = std::function<std::vector<double>(const Params&)>;
PointFunction point_function(const SweepSpec& spec);

// Runs f(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f);

struct SweepResult {
  MapFile map;
  std::vector<std::string> diagnostics;
  int failures = 0;
};

// Grid over axis1 x axis2, rows in row-major order (axis1 outer). A point that
// throws or yields a non-finite value is written as NaN and logged.
SweepResult run_sweep(const SweepSpec& spec);

// Effective-Hamiltonian family with `axis` as the parameter.
FamilyModel heff_family(const SweepSpec& spec, const std::string& axis);

// Along axis1: fixed-point resonances of every branch whose Hermitian-part
// energy lies in the axis2 energy window. Models without an effective
// Hamiltonian report local minima of their singularity indicator instead.
SweepResult resonance_scan(const SweepSpec& spec);

// Model construction from resolved parameters.
RectCavity planar_cavity(const Params& p, const SolverSettings& s);
PlanarOptions planar_options(const Params& p, const SolverSettings& s, int default_pmax);
RectCavity sinai_cavity(const Params& p, const SolverSettings& s);
SinaiBump sinai_bump(const Params& p);
CylSetup cyl_setup_from(const Params& p, const SolverSettings& s);
SphereSetup sphere_setup_from(const Params& p, const SolverSettings& s);

}  // namespace bic
