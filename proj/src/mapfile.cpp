#include "bic/mapfile.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace bic {

double MapAxis::at(int i) const {
  if (count < 2) throw std::invalid_argument("axis " + name + ": count must be >= 2");
  if (i == count - 1) return max;
  return min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

double parse_number(const std::string& s) {
  if (s == "nan") return std::nan("");
  const char* b = s.c_str();
  char* e = nullptr;
  const double v = std::strtod(b, &e);
  if (e == b || *e != '\0') throw std::runtime_error("map: bad number '" + s + "'");
  return v;
}

namespace {

void check_name(const std::string& s) {
  if (s.empty() || s.find_first_of(" \t\n#=") != std::string::npos)
    throw std::invalid_argument("map: bad name '" + s + "'");
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void write_map(std::ostream& os, const MapFile& m) {
  os << "# " << m.version << '\n';
  os << "# kind: " << m.kind << '\n';
  os << "# model: " << m.model << '\n';
  for (const auto& [k, v] : m.params) {
    check_name(k);
    os << "# param: " << k << " = " << format_number(v) << '\n';
  }
  for (const auto& a : m.axes) {
    check_name(a.name);
    os << "# axis: " << a.name << ' ' << format_number(a.min) << ' ' << format_number(a.max) << ' ' << a.count
       << '\n';
  }
  for (const auto& [k, v] : m.notes) {
    check_name(k);
    if (v.find('\n') != std::string::npos) throw std::invalid_argument("map: note with newline");
    os << "# note: " << k << " = " << v << '\n';
  }
  os << "# columns:";
  for (const auto& c : m.columns) {
    check_name(c);
    os << ' ' << c;
  }
  os << '\n';
  for (const auto& r : m.rows) {
    if (r.size() != m.columns.size()) throw std::invalid_argument("map: row width differs from legend");
    for (std::size_t j = 0; j < r.size(); ++j) os << (j ? " " : "") << format_number(r[j]);
    os << '\n';
  }
}

MapFile read_map(std::istream& is) {
  MapFile m;
  m.params.clear();
  std::string line;
  bool first = true, legend = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::string body = trim(line.substr(1));
      if (first) {
        m.version = body;
        first = false;
        continue;
      }
      const auto colon = body.find(':');
      if (colon == std::string::npos) continue;
      const std::string key = body.substr(0, colon);
      const std::string rest = trim(body.substr(colon + 1));
      if (key == "kind") {
        m.kind = rest;
      } else if (key == "model") {
        m.model = rest;
      } else if (key == "param" || key == "note") {
        const auto eq = rest.find('=');
        if (eq == std::string::npos) throw std::runtime_error("map: bad header line '" + line + "'");
        const std::string name = trim(rest.substr(0, eq)), value = trim(rest.substr(eq + 1));
        if (key == "param")
          m.params.emplace_back(name, parse_number(value));
        else
          m.notes.emplace_back(name, value);
      } else if (key == "axis") {
        std::istringstream ss(rest);
        MapAxis a;
        std::string lo, hi;
        if (!(ss >> a.name >> lo >> hi >> a.count)) throw std::runtime_error("map: bad axis line '" + line + "'");
        a.min = parse_number(lo);
        a.max = parse_number(hi);
        m.axes.push_back(a);
      } else if (key == "columns") {
        std::istringstream ss(rest);
        std::string c;
        while (ss >> c) m.columns.push_back(c);
        legend = true;
      }
      continue;
    }
    if (!legend) throw std::runtime_error("map: data before the column legend");
    std::istringstream ss(line);
    std::vector<double> row;
    std::string tok;
    while (ss >> tok) row.push_back(parse_number(tok));
    if (row.size() != m.columns.size()) throw std::runtime_error("map: row width differs from legend");
    m.rows.push_back(std::move(row));
  }
  if (first) throw std::runtime_error("map: empty file");
  if (!m.axes.empty()) {
    std::size_t n = 1;
    for (const auto& a : m.axes) n *= static_cast<std::size_t>(a.count);
    if (n != m.rows.size()) throw std::runtime_error("map: row count differs from the axis grid");
  }
  return m;
}

void save_map(const std::string& path, const MapFile& m) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_map(os, m);
  if (!os) throw std::runtime_error("write failed: " + path);
}

MapFile load_map(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  return read_map(is);
}

bool same_bits(const MapFile& a, const MapFile& b) {
  if (a.kind != b.kind || a.model != b.model || a.version != b.version || a.columns != b.columns ||
      a.notes != b.notes || a.params.size() != b.params.size() || a.axes.size() != b.axes.size() ||
      a.rows.size() != b.rows.size())
    return false;
  auto eq = [](double x, double y) { return std::memcmp(&x, &y, sizeof x) == 0 || (std::isnan(x) && std::isnan(y)); };
  for (std::size_t i = 0; i < a.params.size(); ++i)
    if (a.params[i].first != b.params[i].first || !eq(a.params[i].second, b.params[i].second)) return false;
  for (std::size_t i = 0; i < a.axes.size(); ++i)
    if (a.axes[i].name != b.axes[i].name || !eq(a.axes[i].min, b.axes[i].min) ||
        !eq(a.axes[i].max, b.axes[i].max) || a.axes[i].count != b.axes[i].count)
      return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    if (a.rows[i].size() != b.rows[i].size()) return false;
    for (std::size_t j = 0; j < a.rows[i].size(); ++j)
      if (!eq(a.rows[i][j], b.rows[i][j])) return false;
  }
  return true;
}

}  // namespace bic
