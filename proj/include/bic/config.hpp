#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

namespace bic {

// Flat "key = value" text with optional [section] headers; '#' and ';' start
// comments. Keys before the first header belong to the global section "".
class Config {
 public:
  static Config parse(std::istream& is, const std::string& source = "<config>");
  static Config load(const std::string& path);

  void set(const std::string& section, const std::string& key, const std::string& value);

  // Section value, falling back to the global section.
  std::optional<std::string> get(const std::string& section, const std::string& key) const;
  std::optional<double> number(const std::string& section, const std::string& key) const;

  // Global keys overlaid by the section's own keys.
  std::map<std::string, std::string> merged(const std::string& section) const;

  const std::map<std::string, std::map<std::string, std::string>>& sections() const { return sections_; }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace bic
