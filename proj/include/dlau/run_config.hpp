#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dlau/error.hpp"
#include "dlau/simulator.hpp"

namespace dlau {

/// Everything a `sim` or `run` invocation needs. Defaults: T=32,
/// fifo_depth=64, dma=32 words/cycle, pwl_k=0.5, 200 MHz, batch 1, seed 1.
struct RunConfig {
  std::optional<std::size_t> ni;
  std::optional<std::size_t> no;
  std::vector<std::size_t> layers;
  std::size_t batch = 1;
  std::size_t tile_size = 32;
  std::size_t fifo_depth = 64;
  double dma_words_per_cycle = 32.0;
  double pwl_k = 0.5;
  std::uint64_t seed = 1;
  double clock_mhz = 200.0;
  std::optional<std::size_t> adder_tree_latency;
  std::size_t afau_latency = 3;
  bool cache_weights = false;

  SimConfig sim_config() const;
};

class ConfigError : public Error {
 public:
  enum class Kind { Io, Syntax, UnknownKey, BadValue, MissingDims, InvalidValue };

  ConfigError(Kind kind, std::string key, const std::string& what)
      : Error(what), kind_(kind), key_(std::move(key)) {}
  Kind kind() const { return kind_; }
  const std::string& key() const { return key_; }

 private:
  Kind kind_;
  std::string key_;
};

/// (key, value) pairs applied after the file, e.g. from command-line flags.
using ConfigOverrides = std::vector<std::pair<std::string, std::string>>;

/// Parses `key = value` lines ('#' starts a comment), applies overrides and
/// validates. Either returns a complete config or throws ConfigError.
RunConfig parse_run_config(std::string_view text, const ConfigOverrides& overrides = {});

RunConfig load_run_config(const std::optional<std::filesystem::path>& path,
                          const ConfigOverrides& overrides = {});

}  // namespace dlau
