#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "quantclt/harness.hpp"

namespace quantclt {

// Parse or schema error; carries a 1-based position when one exists.
struct ConfigError : std::runtime_error {
  int line;
  int column;
  ConfigError(const std::string& msg, int line_, int column_)
      : std::runtime_error(line_ > 0 ? msg + " (line " + std::to_string(line_) + ", column " +
                                           std::to_string(column_) + ")"
                                     : msg),
        line(line_),
        column(column_) {}
};

// Minimal TOML subset: comments, [section] headers, and key = value pairs
// where value is a string, bool, number, or (possibly nested) array.
// Covers the flat experiment schema documented in the README; no TOML
// library ships with the toolchain here.
struct TomlValue {
  std::variant<std::string, bool, double, std::vector<TomlValue>> data;

  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_number() const { return std::holds_alternative<double>(data); }
  bool is_array() const { return std::holds_alternative<std::vector<TomlValue>>(data); }

  const std::string& as_string() const { return std::get<std::string>(data); }
  bool as_bool() const { return std::get<bool>(data); }
  double as_number() const { return std::get<double>(data); }
  const std::vector<TomlValue>& as_array() const { return std::get<std::vector<TomlValue>>(data); }
};

using TomlTable = std::map<std::string, TomlValue>;
using TomlDocument = std::map<std::string, TomlTable>;

TomlDocument parse_toml(const std::string& text);

// Builds the experiment config from the [experiment] table. Missing or
// ill-typed keys raise ConfigError naming the key. Overrides are
// "key=value" strings applied on top and must reference known keys.
ExperimentConfig config_from_toml(const std::string& text,
                                  const std::vector<std::string>& overrides = {});

// The config echo embedded in manifests, in canonical key order.
std::string config_to_toml(const ExperimentConfig& cfg);

}  // namespace quantclt
