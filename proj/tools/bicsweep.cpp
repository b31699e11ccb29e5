#include <algorithm>
#include <cstdio>
#include <map>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bic/catalog.hpp"
#include "bic/config.hpp"
#include "bic/mapfile.hpp"
#include "bic/sweep.hpp"

namespace fs = std::filesystem;
using namespace bic;

namespace {

constexpr int kUsage = 2;
constexpr int kNumerical = 3;

const std::vector<std::string> kVerbs = {"map", "resonances", "bics", "field"};

MapAxis parse_axis(const std::string& text) {
  // "name min max count", separators ':' or whitespace
  std::string s = text;
  for (char& ch : s)
    if (ch == ':') ch = ' ';
  std::istringstream ss(s);
  MapAxis a;
  std::string lo, hi;
  if (!(ss >> a.name >> lo >> hi >> a.count)) throw UsageError("bad axis '" + text + "', expected name:min:max:count");
  try {
    a.min = parse_number(lo);
    a.max = parse_number(hi);
  } catch (const std::exception&) {
    throw UsageError("bad axis bounds in '" + text + "'");
  }
  std::string extra;
  if (ss >> extra) throw UsageError("bad axis '" + text + "'");
  return a;
}

double parse_value(const std::string& key, const std::string& v) {
  try {
    return parse_number(v);
  } catch (const std::exception&) {
    throw UsageError(key + " = '" + v + "' is not a number");
  }
}

void write_diagnostics(const std::string& path, const std::vector<std::string>& d) {
  if (d.empty()) {
    std::error_code ec;
    fs::remove(path, ec);
    return;
  }
  std::ofstream os(path);
  os << "# " << kToolVersion << " diagnostics\n";
  for (const auto& line : d) os << line << '\n';
}

struct Flags {
  std::string config;
  std::string out = ".";
  std::optional<int> threads, pmax, truncation, index, nx, ny;
  std::optional<double> tol_width, tol_null;
  std::vector<std::string> sets;
  std::string axis1, axis2;
};

int run(const std::string& model, const std::string& verb, const Flags& f) {
  Config cfg;
  if (!f.config.empty()) cfg = Config::load(f.config);
  const auto& info = model_info(model);

  SweepSpec spec;
  spec.model = model;
  FieldSpec grid;
  int index = 0;
  auto known = [&](const std::string& k) {
    for (const auto& [name, d] : info.defaults)
      if (name == k) return true;
    return false;
  };
  // Global keys a model does not know are skipped, so one file can serve all models.
  auto apply = [&](const std::map<std::string, std::string>& kv, bool strict) {
    for (const auto& [k, v] : kv) {
      if (k == "axis1")
        spec.axis1 = parse_axis(v);
      else if (k == "axis2")
        spec.axis2 = parse_axis(v);
      else if (k == "threads")
        spec.threads = static_cast<int>(parse_value(k, v));
      else if (k == "tol_width")
        spec.solver.tol_width = parse_value(k, v);
      else if (k == "tol_null")
        spec.solver.tol_null = parse_value(k, v);
      else if (k == "pmax")
        spec.solver.pmax = static_cast<int>(parse_value(k, v));
      else if (k == "truncation")
        spec.solver.truncation = static_cast<int>(parse_value(k, v));
      else if (k == "index")
        index = static_cast<int>(parse_value(k, v));
      else if (k == "nx")
        grid.nx = static_cast<int>(parse_value(k, v));
      else if (k == "ny")
        grid.ny = static_cast<int>(parse_value(k, v));
      else if (strict || known(k))
        spec.params[k] = parse_value(k, v);
    }
  };
  if (const auto g = cfg.sections().find(""); g != cfg.sections().end()) apply(g->second, false);
  if (const auto s = cfg.sections().find(model); s != cfg.sections().end()) apply(s->second, true);

  for (const auto& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
    const std::string k = kv.substr(0, eq);
    spec.params[k] = parse_value(k, kv.substr(eq + 1));
  }
  if (!f.axis1.empty()) spec.axis1 = parse_axis(f.axis1);
  if (!f.axis2.empty()) spec.axis2 = parse_axis(f.axis2);
  if (f.threads) spec.threads = *f.threads;
  if (f.tol_width) spec.solver.tol_width = *f.tol_width;
  if (f.tol_null) spec.solver.tol_null = *f.tol_null;
  if (f.pmax) spec.solver.pmax = *f.pmax;
  if (f.truncation) spec.solver.truncation = *f.truncation;
  if (f.index) index = *f.index;
  if (f.nx) grid.nx = *f.nx;
  if (f.ny) grid.ny = *f.ny;
  spec = with_default_axes(spec);
  validate(spec);
  if (spec.solver.pmax == 0 || spec.solver.pmax < -1) throw UsageError("pmax must be >= 1");
  if (spec.solver.truncation == 0 || spec.solver.truncation < -1) throw UsageError("truncation must be >= 1");
  if (index < 0) throw UsageError("index must be >= 0");

  fs::create_directories(f.out);
  const std::string stem = (fs::path(f.out) / (model + "_" + verb)).string();
  const std::string path = stem + ".dat", diag = stem + ".diag";

  if (verb == "map" || verb == "resonances") {
    const auto r = verb == "map" ? run_sweep(spec) : resonance_scan(spec);
    save_map(path, r.map);
    write_diagnostics(diag, r.diagnostics);
    std::cout << path << ": " << r.map.rows.size() << " rows, " << r.failures << " failed points\n";
    return r.failures ? kNumerical : 0;
  }

  std::vector<std::string> d;
  const Catalog cat = build_catalog(spec, &d);
  if (verb == "bics") {
    save_catalog(path, cat);
    write_diagnostics(diag, d);
    std::cout << path << ": " << cat.records.size() << " records\n";
    return 0;
  }
  if (model != "well" && cat.records.empty()) {
    d.push_back("field: the BIC search returned no record");
    write_diagnostics(diag, d);
    std::cerr << "bicsweep: no BIC record to render\n";
    return kNumerical;
  }
  save_map(path, render_field(spec, cat, static_cast<std::size_t>(index), grid));
  write_diagnostics(diag, d);
  std::cout << path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sweeps, resonances, BIC catalogs and field patterns of open resonators"};
  app.require_subcommand(1);
  Flags f;
  app.add_option("--config", f.config, "key = value file with [model] sections")->check(CLI::ExistingFile);
  app.add_option("--out", f.out, "output directory");
  app.add_option("--threads", f.threads, "worker threads for grid points");
  app.add_option("--tol-width", f.tol_width, "width tolerance of a BIC");
  app.add_option("--tol-null", f.tol_null, "null-residual tolerance of a BIC");
  app.add_option("--pmax", f.pmax, "channels per port, evanescent ones included");
  app.add_option("--truncation", f.truncation, "closed-basis truncation");
  app.add_option("--set", f.sets, "parameter override key=value")->take_all();
  app.add_option("--axis1", f.axis1, "name:min:max:count");
  app.add_option("--axis2", f.axis2, "name:min:max:count");
  app.add_option("--index", f.index, "catalog record rendered by field");
  app.add_option("--nx", f.nx, "field grid points, first direction");
  app.add_option("--ny", f.ny, "field grid points, second direction");

  std::string chosen_model, chosen_verb;
  for (const auto& info : models()) {
    auto* sub = app.add_subcommand(info.name, info.summary);
    sub->fallthrough();
    sub->require_subcommand(1);
    for (const auto& verb : kVerbs) {
      auto* v = sub->add_subcommand(verb);
      v->fallthrough();
      v->callback([&chosen_model, &chosen_verb, name = info.name, verb] {
        chosen_model = name;
        chosen_verb = verb;
      });
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    if (code == 0) return 0;
    std::string names;
    for (const auto& n : model_names()) names += " " + n;
    std::cerr << "models:" << names << "\nverbs: map resonances bics field\n";
    return kUsage;
  }

  try {
    return run(chosen_model, chosen_verb, f);
  } catch (const UsageError& e) {
    std::cerr << "bicsweep: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "bicsweep: numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
}
