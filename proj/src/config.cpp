#include "bic/config.hpp"

#include <fstream>
#include <istream>
#include <stdexcept>

#include "bic/mapfile.hpp"

namespace bic {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse(std::istream& is, const std::string& source) {
  Config c;
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw std::runtime_error(where + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw std::runtime_error(where + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw std::runtime_error(where + ": empty key");
    c.set(section, key, trim(line.substr(eq + 1)));
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read config " + path);
  return parse(is, path);
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  sections_[section][key] = value;
}

std::optional<std::string> Config::get(const std::string& section, const std::string& key) const {
  for (const std::string& s : {section, std::string()}) {
    const auto it = sections_.find(s);
    if (it == sections_.end()) continue;
    const auto kv = it->second.find(key);
    if (kv != it->second.end()) return kv->second;
  }
  return std::nullopt;
}

std::optional<double> Config::number(const std::string& section, const std::string& key) const {
  const auto v = get(section, key);
  if (!v) return std::nullopt;
  try {
    return parse_number(*v);
  } catch (const std::exception&) {
    throw std::runtime_error("config: " + key + " = '" + *v + "' is not a number");
  }
}

std::map<std::string, std::string> Config::merged(const std::string& section) const {
  std::map<std::string, std::string> out;
  if (const auto g = sections_.find(""); g != sections_.end()) out = g->second;
  if (const auto s = sections_.find(section); s != sections_.end() && !section.empty())
    for (const auto& [k, v] : s->second) out[k] = v;
  return out;
}

}  // namespace bic
