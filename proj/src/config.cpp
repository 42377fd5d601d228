#include "quantclt/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "quantclt/report.hpp"

namespace quantclt {

namespace {

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1;
  int col = 1;

  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  char advance() {
    const char ch = text[pos++];
    if (ch == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    return ch;
  }
  void skip_inline_ws() {
    while (!done() && (peek() == ' ' || peek() == '\t')) advance();
  }
  void skip_comment() {
    if (!done() && peek() == '#')
      while (!done() && peek() != '\n') advance();
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ConfigError(msg, line, col); }
};

bool is_key_char(char ch) {
  return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.';
}

TomlValue parse_value(Cursor& cur);

TomlValue parse_array(Cursor& cur) {
  cur.advance();  // '['
  std::vector<TomlValue> items;
  for (;;) {
    // arrays may span lines
    while (!cur.done()) {
      cur.skip_inline_ws();
      cur.skip_comment();
      if (!cur.done() && (cur.peek() == '\n' || cur.peek() == '\r'))
        cur.advance();
      else
        break;
    }
    if (cur.done()) cur.fail("unterminated array");
    if (cur.peek() == ']') {
      cur.advance();
      return TomlValue{std::move(items)};
    }
    items.push_back(parse_value(cur));
    while (!cur.done()) {
      cur.skip_inline_ws();
      cur.skip_comment();
      if (!cur.done() && (cur.peek() == '\n' || cur.peek() == '\r'))
        cur.advance();
      else
        break;
    }
    if (cur.done()) cur.fail("unterminated array");
    if (cur.peek() == ',') {
      cur.advance();
      continue;
    }
    if (cur.peek() == ']') {
      cur.advance();
      return TomlValue{std::move(items)};
    }
    cur.fail("expected ',' or ']' in array");
  }
}

TomlValue parse_value(Cursor& cur) {
  cur.skip_inline_ws();
  if (cur.done()) cur.fail("expected a value");
  const char ch = cur.peek();
  if (ch == '[') return parse_array(cur);
  if (ch == '"') {
    cur.advance();
    std::string out;
    while (!cur.done() && cur.peek() != '"') {
      char c = cur.advance();
      if (c == '\\' && !cur.done()) {
        const char esc = cur.advance();
        switch (esc) {
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          default: cur.fail(std::string("unsupported escape '\\") + esc + "'");
        }
      }
      out.push_back(c);
    }
    if (cur.done()) cur.fail("unterminated string");
    cur.advance();  // closing quote
    return TomlValue{std::move(out)};
  }
  // bare token: bool or number
  std::string token;
  while (!cur.done() && (is_key_char(cur.peek()) || cur.peek() == '+' || cur.peek() == '-')) {
    token.push_back(cur.advance());
  }
  if (token.empty()) cur.fail("expected a value");
  if (token == "true") return TomlValue{true};
  if (token == "false") return TomlValue{false};
  try {
    std::size_t used = 0;
    const double value = std::stod(token, &used);
    if (used != token.size()) cur.fail("malformed number '" + token + "'");
    return TomlValue{value};
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    cur.fail("malformed value '" + token + "'");
  }
  throw std::logic_error("unreachable");
}

}  // namespace

TomlDocument parse_toml(const std::string& text) {
  TomlDocument doc;
  Cursor cur{text};
  std::string section;  // keys before any [section] land in ""
  while (!cur.done()) {
    cur.skip_inline_ws();
    cur.skip_comment();
    if (cur.done()) break;
    const char ch = cur.peek();
    if (ch == '\n' || ch == '\r') {
      cur.advance();
      continue;
    }
    if (ch == '[') {
      cur.advance();
      std::string name;
      while (!cur.done() && cur.peek() != ']') name.push_back(cur.advance());
      if (cur.done()) cur.fail("unterminated section header");
      cur.advance();
      section = name;
      continue;
    }
    if (!is_key_char(ch)) cur.fail(std::string("unexpected character '") + ch + "'");
    std::string key;
    while (!cur.done() && is_key_char(cur.peek())) key.push_back(cur.advance());
    cur.skip_inline_ws();
    if (cur.done() || cur.peek() != '=') cur.fail("expected '=' after key '" + key + "'");
    cur.advance();
    TomlValue value = parse_value(cur);
    cur.skip_inline_ws();
    cur.skip_comment();
    if (!cur.done() && cur.peek() != '\n' && cur.peek() != '\r')
      cur.fail("trailing characters after value for key '" + key + "'");
    if (doc[section].count(key)) cur.fail("duplicate key '" + key + "'");
    doc[section].emplace(std::move(key), std::move(value));
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Experiment config binding
// ---------------------------------------------------------------------------

namespace {

struct TableReader {
  const TomlTable& table;
  mutable std::vector<std::string> consumed;

  bool has(const std::string& key) const { return table.count(key) > 0; }

  const TomlValue& get(const std::string& key) const {
    auto it = table.find(key);
    if (it == table.end()) throw ConfigError("missing required key '" + key + "'", 0, 0);
    consumed.push_back(key);
    return it->second;
  }

  double number(const std::string& key) const {
    const TomlValue& v = get(key);
    if (!v.is_number()) throw ConfigError("key '" + key + "' must be a number", 0, 0);
    return v.as_number();
  }
  double number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }
  long long integer(const std::string& key) const {
    const double v = number(key);
    if (v != std::floor(v)) throw ConfigError("key '" + key + "' must be an integer", 0, 0);
    return static_cast<long long>(v);
  }
  long long integer_or(const std::string& key, long long fallback) const {
    return has(key) ? integer(key) : fallback;
  }
  std::string str(const std::string& key) const {
    const TomlValue& v = get(key);
    if (!v.is_string()) throw ConfigError("key '" + key + "' must be a string", 0, 0);
    return v.as_string();
  }
  std::string str_or(const std::string& key, const std::string& fallback) const {
    return has(key) ? str(key) : fallback;
  }
  std::vector<double> number_list(const std::string& key) const {
    const TomlValue& v = get(key);
    if (!v.is_array()) throw ConfigError("key '" + key + "' must be an array", 0, 0);
    std::vector<double> out;
    for (const auto& item : v.as_array()) {
      if (!item.is_number()) throw ConfigError("key '" + key + "' must hold numbers", 0, 0);
      out.push_back(item.as_number());
    }
    return out;
  }
};

ScalarSampler sampler_from(const TableReader& reader, const std::string& prefix) {
  const std::string kind = reader.str(prefix);
  if (kind == "constant") return ScalarSampler::constant(reader.number(prefix + "_value"));
  if (kind == "normal")
    return ScalarSampler::normal(reader.number_or(prefix + "_mu", 0.0),
                                 reader.number(prefix + "_sigma"));
  if (kind == "uniform")
    return ScalarSampler::uniform(reader.number(prefix + "_lo"), reader.number(prefix + "_hi"));
  if (kind == "exponential") return ScalarSampler::exponential(reader.number(prefix + "_rate"));
  if (kind == "laplace")
    return ScalarSampler::laplace(reader.number_or(prefix + "_mu", 0.0),
                                  reader.number(prefix + "_scale"));
  if (kind == "cauchy")
    return ScalarSampler::cauchy(reader.number_or(prefix + "_loc", 0.0),
                                 reader.number(prefix + "_scale"));
  throw ConfigError("key '" + prefix + "': unknown sampler '" + kind + "'", 0, 0);
}

ProcessSpec process_from(const TableReader& reader) {
  const std::string name = reader.str("process");
  ProcessSpec base;
  if (name == "brownian_motion") {
    base = ProcessSpec::brownian_motion();
  } else if (name == "sym_stable") {
    base = ProcessSpec::sym_stable(reader.number("r"), reader.number("c"));
  } else if (name == "fbm") {
    base = ProcessSpec::fbm(reader.number("gamma"));
  } else if (name == "compound_poisson") {
    base = ProcessSpec::compound_poisson(reader.number("lambda"), sampler_from(reader, "jump"));
  } else {
    throw ConfigError("key 'process': unknown process '" + name + "'", 0, 0);
  }
  if (reader.has("shift")) return ProcessSpec::shifted(std::move(base), sampler_from(reader, "shift"));
  return base;
}

std::vector<PairSpec> pairs_from(const TableReader& reader) {
  const TomlValue& v = reader.get("pairs");
  if (!v.is_array()) throw ConfigError("key 'pairs' must be an array", 0, 0);
  std::vector<PairSpec> out;
  for (const auto& item : v.as_array()) {
    if (!item.is_array())
      throw ConfigError("key 'pairs': each entry must be [s, beta, t, alpha] or [t, alpha]", 0, 0);
    const auto& arr = item.as_array();
    PairSpec p;
    if (arr.size() == 4) {
      p.s = arr[0].as_number();
      p.beta = arr[1].as_number();
      p.t = arr[2].as_number();
      p.alpha = arr[3].as_number();
    } else if (arr.size() == 2) {
      p.t = arr[0].as_number();
      p.alpha = arr[1].as_number();
      p.s = p.t;
      p.beta = p.alpha;
    } else {
      throw ConfigError("key 'pairs': each entry must have 2 or 4 numbers", 0, 0);
    }
    out.push_back(p);
  }
  return out;
}

}  // namespace

ExperimentConfig config_from_toml(const std::string& text,
                                  const std::vector<std::string>& overrides) {
  TomlDocument doc = parse_toml(text);
  auto it = doc.find("experiment");
  if (it == doc.end()) throw ConfigError("missing [experiment] section", 0, 0);
  TomlTable table = it->second;

  // Overrides are "key=value" fragments re-parsed with the TOML value rules.
  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos)
      throw ConfigError("override '" + item + "' is not of the form key=value", 0, 0);
    const std::string key = item.substr(0, eq);
    if (!table.count(key))
      throw ConfigError("override key '" + key + "' does not name an existing config key", 0, 0);
    TomlDocument patch = parse_toml(key + " = " + item.substr(eq + 1));
    table[key] = patch[""].at(key);
  }

  TableReader reader{table, {}};
  ExperimentConfig cfg;
  cfg.kind = experiment_kind_from_name(reader.str("kind"));
  // the identity suite ignores the input law, so its configs may omit it
  if (reader.has("process") || cfg.kind != ExperimentKind::IdentitySuite)
    cfg.process = process_from(reader);

  if (reader.has("times")) {
    cfg.grid = TimeGrid(reader.number_list("times"));
  } else {
    cfg.grid = TimeGrid::regular(reader.number_or("t_max", 1.0),
                                 static_cast<std::size_t>(reader.integer_or("t_count", 2)));
  }
  if (reader.has("levels")) {
    std::vector<double> lv = reader.number_list("levels");
    const double lo = reader.number_or("level_lo", lv.front());
    const double hi = reader.number_or("level_hi", lv.back());
    cfg.levels = LevelGrid(std::move(lv), lo, hi);
  }

  cfg.n = static_cast<int>(reader.integer("n"));
  cfg.R = reader.integer("R");
  cfg.seed = static_cast<std::uint64_t>(reader.integer_or("seed", 1));
  cfg.z_max = reader.number_or("z_max", 3.0);
  cfg.ks_level = reader.number_or("ks_level", 0.999);
  cfg.threads = static_cast<int>(reader.integer_or("threads", 1));

  if (reader.has("pairs")) cfg.pairs = pairs_from(reader);
  if (reader.has("deltas")) cfg.deltas = reader.number_list("deltas");
  cfg.epsilon = reader.number_or("epsilon", 1.0);
  cfg.sup_prob_threshold = reader.number_or("sup_prob_threshold", 0.05);
  if (reader.has("n_ladder")) {
    for (double v : reader.number_list("n_ladder")) cfg.n_ladder.push_back(static_cast<int>(v));
  }
  cfg.scale_c = reader.number_or("scale_c", 2.0);
  if (reader.has("negative_control")) {
    const TomlValue& v = reader.get("negative_control");
    if (!v.is_bool()) throw ConfigError("key 'negative_control' must be a bool", 0, 0);
    cfg.scaling_negative_control = v.as_bool();
  }
  cfg.decay_ratio = reader.number_or("decay_ratio", 0.8);
  cfg.identity_instances = static_cast<int>(reader.integer_or("identity_instances", 10000));
  cfg.reference_n = reader.integer_or("reference_n", 1000000);

  // Reject typos: every key present must have been consumed by the schema.
  for (const auto& [key, value] : table) {
    if (std::find(reader.consumed.begin(), reader.consumed.end(), key) == reader.consumed.end())
      throw ConfigError("unknown config key '" + key + "' for experiment '" +
                            experiment_kind_name(cfg.kind) + "'",
                        0, 0);
  }

  cfg.validate();
  return cfg;
}

std::string config_to_toml(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "[experiment]\n";
  out << "kind = \"" << experiment_kind_name(cfg.kind) << "\"\n";
  out << "process_description = \"" << cfg.process.describe() << "\"\n";
  out << "times = [";
  for (std::size_t j = 0; j < cfg.grid.size(); ++j)
    out << (j ? ", " : "") << format_double(cfg.grid[j]);
  out << "]\n";
  out << "levels = [";
  for (std::size_t k = 0; k < cfg.levels.size(); ++k)
    out << (k ? ", " : "") << format_double(cfg.levels[k]);
  out << "]\n";
  out << "level_lo = " << format_double(cfg.levels.a) << "\n";
  out << "level_hi = " << format_double(cfg.levels.b) << "\n";
  out << "n = " << cfg.n << "\n";
  out << "R = " << cfg.R << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "z_max = " << format_double(cfg.z_max) << "\n";
  out << "ks_level = " << format_double(cfg.ks_level) << "\n";
  out << "threads = " << cfg.threads << "\n";
  if (!cfg.pairs.empty()) {
    out << "pairs = [";
    for (std::size_t p = 0; p < cfg.pairs.size(); ++p) {
      out << (p ? ", " : "") << "[" << format_double(cfg.pairs[p].s) << ", "
          << format_double(cfg.pairs[p].beta) << ", " << format_double(cfg.pairs[p].t) << ", "
          << format_double(cfg.pairs[p].alpha) << "]";
    }
    out << "]\n";
  }
  if (cfg.kind == ExperimentKind::SupNearZero) {
    out << "deltas = [";
    for (std::size_t d = 0; d < cfg.deltas.size(); ++d)
      out << (d ? ", " : "") << format_double(cfg.deltas[d]);
    out << "]\n";
    out << "epsilon = " << format_double(cfg.epsilon) << "\n";
    out << "sup_prob_threshold = " << format_double(cfg.sup_prob_threshold) << "\n";
  }
  if (!cfg.n_ladder.empty()) {
    out << "n_ladder = [";
    for (std::size_t i = 0; i < cfg.n_ladder.size(); ++i)
      out << (i ? ", " : "") << cfg.n_ladder[i];
    out << "]\n";
  }
  if (cfg.kind == ExperimentKind::ScalingLaw) {
    out << "scale_c = " << format_double(cfg.scale_c) << "\n";
    out << "negative_control = " << (cfg.scaling_negative_control ? "true" : "false") << "\n";
  }
  if (cfg.kind == ExperimentKind::BahadurResidual)
    out << "decay_ratio = " << format_double(cfg.decay_ratio) << "\n";
  if (cfg.kind == ExperimentKind::IdentitySuite)
    out << "identity_instances = " << cfg.identity_instances << "\n";
  return out.str();
}

}  // namespace quantclt
