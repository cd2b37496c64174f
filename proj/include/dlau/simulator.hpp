#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dlau/error.hpp"
#include "dlau/pwl.hpp"
#include "dlau/tensor.hpp"

namespace dlau {

std::size_t ceil_log2(std::size_t n);

/// Parameters of the modeled accelerator.
///
/// Three DMA channels (weights, node values, result write-back) each move
/// `dma_words_per_cycle` 32-bit words per cycle; fractional rates accumulate
/// credit while a channel has work pending.
struct SimConfig {
  std::size_t tile_size = 32;
  std::size_t fifo_depth = 64;
  double dma_words_per_cycle = 32.0;
  /// Unset means ceil(log2(max(T, 2))) adder stages plus one multiplier stage.
  std::optional<std::size_t> adder_tree_latency;
  std::size_t afau_latency = 3;
  double clock_mhz = 200.0;
  /// Keep every weight tile resident after the first batch row instead of
  /// re-streaming it per row.
  bool cache_weights = false;

  std::size_t adder_latency() const;
  void validate() const;
};

struct RunShape {
  std::size_t ni = 0;
  std::size_t no = 0;
  std::size_t batch = 1;
};

struct FifoStats {
  std::uint64_t pushes = 0;
  std::uint64_t pops = 0;
  std::uint64_t full_stalls = 0;
  std::size_t max_occupancy = 0;

  friend bool operator==(const FifoStats&, const FifoStats&) = default;
};

struct SimStats {
  std::uint64_t total_cycles = 0;
  /// Cycles elapsed before the TMMU issued its first part sum.
  std::uint64_t preload_cycles = 0;
  std::uint64_t tmmu_busy_cycles = 0;
  /// Cycles after the first issue in which the TMMU had work but issued none.
  std::uint64_t tmmu_stall_cycles = 0;
  std::uint64_t psau_busy_cycles = 0;
  std::uint64_t psau_stall_cycles = 0;
  std::uint64_t afau_busy_cycles = 0;
  std::uint64_t afau_stall_cycles = 0;
  std::uint64_t dma_cycles = 0;
  std::uint64_t dma_words = 0;
  std::uint64_t part_sums_emitted = 0;
  FifoStats tmmu_to_psau;
  FifoStats psau_to_afau;
  FifoStats afau_to_output;

  std::size_t max_fifo_occupancy() const;

  friend bool operator==(const SimStats&, const SimStats&) = default;
};

struct SimResult {
  Tensor2D output;
  SimStats stats;
};

/// Values crossing the inter-unit FIFOs, in order.
struct SimTrace {
  std::vector<float> tmmu_to_psau_pushed;
  std::vector<float> tmmu_to_psau_popped;
  std::vector<float> psau_to_afau_pushed;
  std::vector<float> psau_to_afau_popped;
};

class DeadlockError : public Error {
 public:
  DeadlockError(const std::string& what, std::string unit_states)
      : Error(what + "\n" + unit_states), unit_states_(std::move(unit_states)) {}
  const std::string& unit_states() const { return unit_states_; }

 private:
  std::string unit_states_;
};

/// Pairwise reduction used by the TMMU adder tree: each stage adds
/// neighbours (0+1, 2+3, ...) and an odd element passes through.
float adder_tree_sum(std::span<const float> products);

/// Cycle-level run of Y = f(X W) through DMA -> TMMU -> PSAU -> AFAU.
SimResult sim_run(const SimConfig& cfg, const Tensor2D& weights, const Tensor2D& input,
                  const PwlTable& activation, SimTrace* trace = nullptr);

/// Stats export: Ni,No,batch,tile_size,fifo_depth,dma_bw,total_cycles,
/// tmmu_busy,tmmu_stall,part_sums,max_fifo_occupancy,clock_mhz,sim_time_us
void write_stats_csv_header(std::ostream& os);
void write_stats_csv_row(std::ostream& os, const RunShape& shape, const SimConfig& cfg,
                         const SimStats& stats);

}  // namespace dlau
