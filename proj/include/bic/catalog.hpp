#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "bic/hcore.hpp"
#include "bic/mapfile.hpp"
#include "bic/sweep.hpp"

namespace bic {

// Classification rules: coupling zero at a fixed eigenvector -> accidental;
// parity-forbidden coupling -> protected; null vector mixing modes at an
// avoided crossing -> fw; chain midpoint condition -> fabry-perot.
enum class BICClass { Protected, FW, Accidental, FabryPerot };

std::string to_string(BICClass c);
BICClass parse_class(const std::string& s);

struct CatalogRecord {
  std::vector<double> point;  // values of Catalog::point_names
  double omega2 = 0.0;
  double width = 0.0;
  double residual = 0.0;
  BICClass kind = BICClass::Accidental;
  bool quasi = false;                    // width above tolerance: near-BIC
  std::vector<ModalCoefficient> top;     // at most 8, largest first
  VecC coefficients;                     // full null vector; not written to file
};

struct Catalog {
  std::string model;
  std::string version = kToolVersion;
  std::vector<std::pair<std::string, double>> params;
  std::vector<std::string> point_names;
  std::vector<std::pair<std::string, std::string>> notes;
  std::vector<CatalogRecord> records;
};

inline constexpr int kTopCoefficients = 8;

// Largest coefficients first; labels with whitespace are rejected on write.
std::vector<ModalCoefficient> top_coefficients(std::vector<ModalCoefficient> c, int n = kTopCoefficients);

void sort_catalog(Catalog& c);
void write_catalog(std::ostream& os, const Catalog& c);
Catalog read_catalog(std::istream& is);
void save_catalog(const std::string& path, const Catalog& c);
Catalog load_catalog(const std::string& path);

// BIC search over axis1 of the spec (models without a parametric search
// ignore it); sorted by omega2. Diagnostics collect non-fatal solver notes.
Catalog build_catalog(const SweepSpec& spec, std::vector<std::string>* diagnostics = nullptr);

struct FieldSpec {
  int nx = 81;  // first grid direction
  int ny = 41;  // second grid direction
};

// Grid of a complex field (rows: y, columns: x) as a map with columns
// x y re abs2; rows ordered x outer.
MapFile field_map(const std::string& model, const std::string& xname, const std::string& yname,
                  const std::vector<double>& x, const std::vector<double>& y, const MatC& values);

// Field of a catalog record from build_catalog (the full null vector is needed).
MapFile render_field(const SweepSpec& spec, const Catalog& c, std::size_t index, const FieldSpec& grid = {});

}  // namespace bic
