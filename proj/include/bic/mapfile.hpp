#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace bic {

inline constexpr const char* kToolVersion = "bicsweep 1.0";

struct MapAxis {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  int count = 2;

  double at(int i) const;
};

// Plain-text table with a '#' header. With axes present the rows form the
// row-major grid (axis1 outer); without axes the rows are a free list.
struct MapFile {
  std::string kind = "map";  // map | resonances | field
  std::string model;
  std::string version = kToolVersion;
  std::vector<std::pair<std::string, double>> params;
  std::vector<MapAxis> axes;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> notes;
};

// 17 significant digits, scientific; NaN is written as "nan".
std::string format_number(double x);
double parse_number(const std::string& s);

void write_map(std::ostream& os, const MapFile& m);
MapFile read_map(std::istream& is);
void save_map(const std::string& path, const MapFile& m);
MapFile load_map(const std::string& path);

bool same_bits(const MapFile& a, const MapFile& b);

}  // namespace bic
