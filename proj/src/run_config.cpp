#include "dlau/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dlau/pwl.hpp"

namespace dlau {

namespace {

using Kind = ConfigError::Kind;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const char* expected) {
  throw ConfigError(Kind::BadValue, std::string(key),
                    "config key '" + std::string(key) + "': '" + std::string(value) +
                        "' is not " + expected);
}

template <typename T>
T parse_number(std::string_view key, std::string_view value, const char* expected) {
  T out{};
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || value.empty()) bad_value(key, value, expected);
  return out;
}

std::size_t parse_count(std::string_view key, std::string_view value) {
  const auto v = parse_number<std::uint64_t>(key, value, "a positive integer");
  if (v == 0) {
    throw ConfigError(Kind::InvalidValue, std::string(key),
                      "config key '" + std::string(key) + "' must be >= 1");
  }
  return static_cast<std::size_t>(v);
}

double parse_real(std::string_view key, std::string_view value) {
  return parse_number<double>(key, value, "a number");
}

void apply(RunConfig& cfg, std::string_view key, std::string_view value) {
  if (key == "ni") {
    cfg.ni = parse_count(key, value);
  } else if (key == "no") {
    cfg.no = parse_count(key, value);
  } else if (key == "layers") {
    cfg.layers.clear();
    std::size_t pos = 0;
    while (pos <= value.size()) {
      const auto comma = value.find(',', pos);
      const auto item = trim(value.substr(pos, comma == std::string_view::npos ? value.npos
                                                                               : comma - pos));
      cfg.layers.push_back(parse_count(key, item));
      if (comma == std::string_view::npos) break;
      pos = comma + 1;
    }
  } else if (key == "batch") {
    cfg.batch = parse_count(key, value);
  } else if (key == "tile_size") {
    cfg.tile_size = parse_count(key, value);
  } else if (key == "fifo_depth") {
    cfg.fifo_depth = parse_count(key, value);
  } else if (key == "dma_words_per_cycle") {
    cfg.dma_words_per_cycle = parse_real(key, value);
  } else if (key == "pwl_k") {
    cfg.pwl_k = parse_real(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value, "an unsigned integer");
  } else if (key == "clock_mhz") {
    cfg.clock_mhz = parse_real(key, value);
  } else if (key == "adder_tree_latency") {
    cfg.adder_tree_latency = parse_count(key, value);
  } else if (key == "afau_latency") {
    cfg.afau_latency = parse_count(key, value);
  } else if (key == "cache_weights") {
    if (value == "true" || value == "1") {
      cfg.cache_weights = true;
    } else if (value == "false" || value == "0") {
      cfg.cache_weights = false;
    } else {
      bad_value(key, value, "true or false");
    }
  } else {
    throw ConfigError(Kind::UnknownKey, std::string(key),
                      "unknown config key '" + std::string(key) + "'");
  }
}

void validate(RunConfig& cfg) {
  if (!cfg.layers.empty()) {
    if (cfg.layers.size() < 2) {
      throw ConfigError(Kind::InvalidValue, "layers", "config key 'layers' needs >= 2 sizes");
    }
    if (!cfg.ni) cfg.ni = cfg.layers[0];
    if (!cfg.no) cfg.no = cfg.layers[1];
  }
  if (!cfg.ni || !cfg.no) {
    throw ConfigError(Kind::MissingDims, cfg.ni ? "no" : "ni",
                      "missing network dimensions: set ni and no (or layers)");
  }
  if (!is_valid_pwl_k(cfg.pwl_k)) {
    throw ConfigError(Kind::InvalidValue, "pwl_k",
                      "config key 'pwl_k' must be one of 8, 4, 2, 1, 0.5, 0.25, 0.125");
  }
  auto check = [](bool ok, const char* key, const char* what) {
    if (!ok) throw ConfigError(Kind::InvalidValue, key, std::string("config key '") + key +
                                                            "' " + what);
  };
  check(cfg.dma_words_per_cycle >= 0.125 && std::isfinite(cfg.dma_words_per_cycle),
        "dma_words_per_cycle", "must be >= 0.125");
  check(cfg.clock_mhz > 0.0 && std::isfinite(cfg.clock_mhz), "clock_mhz", "must be positive");
  try {
    cfg.sim_config().validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(Kind::InvalidValue, "adder_tree_latency", e.what());
  }
}

}  // namespace

SimConfig RunConfig::sim_config() const {
  SimConfig sim;
  sim.tile_size = tile_size;
  sim.fifo_depth = fifo_depth;
  sim.dma_words_per_cycle = dma_words_per_cycle;
  sim.adder_tree_latency = adder_tree_latency;
  sim.afau_latency = afau_latency;
  sim.clock_mhz = clock_mhz;
  sim.cache_weights = cache_weights;
  return sim;
}

RunConfig parse_run_config(std::string_view text, const ConfigOverrides& overrides) {
  RunConfig cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(Kind::Syntax, "",
                        "config line " + std::to_string(line_no) + ": expected key = value");
    }
    apply(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  for (const auto& [key, value] : overrides) apply(cfg, trim(key), trim(value));
  validate(cfg);
  return cfg;
}

RunConfig load_run_config(const std::optional<std::filesystem::path>& path,
                          const ConfigOverrides& overrides) {
  std::string text;
  if (path) {
    std::ifstream is(*path);
    if (!is) throw ConfigError(Kind::Io, "", "cannot open config file " + path->string());
    std::ostringstream buf;
    buf << is.rdbuf();
    text = buf.str();
  }
  return parse_run_config(text, overrides);
}

}  // namespace dlau
