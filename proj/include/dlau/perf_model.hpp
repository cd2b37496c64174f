#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "dlau/simulator.hpp"

namespace dlau {

struct CycleEstimate {
  std::uint64_t tmmu_busy = 0;  // batch * ceil(Ni/T) * No
  std::uint64_t preload = 0;    // cycles until the first tile block is on chip
  std::uint64_t steady = 0;     // first issue to last issue, bandwidth-bounded
  std::uint64_t drain = 0;      // adder tree + AFAU + three FIFO hand-offs
  std::uint64_t writeback_tail = 0;
  std::uint64_t total = 0;
  std::string assumptions;
};

/// Closed-form counterpart of sim_run's timeline. Exact when the DMA keeps
/// up (dma_words_per_cycle >= T); an approximation when it is starved.
CycleEstimate estimate_cycles(std::size_t ni, std::size_t no, std::size_t batch,
                              const SimConfig& cfg);

struct UnitResources {
  std::string unit;
  std::uint32_t brams = 0;
  std::uint32_t dsps = 0;
};

/// BRAM/DSP counts calibrated on the 32x32-tile prototype:
///   TMMU: T BRAMs, 3 DSPs per float multiplier (T) + 2 per tree adder (T-1)
///   PSAU: 1 BRAM, 2 DSPs    AFAU: 2 BRAMs (a and b tables), 7 DSPs
/// FF and LUT counts are not modeled.
struct ResourceEstimate {
  std::size_t tile_size = 0;
  UnitResources tmmu;
  UnitResources psau;
  UnitResources afau;
  UnitResources total;
  std::string formulas;
};

ResourceEstimate estimate_resources(std::size_t tile_size);

/// CSV with component,brams,dsps,ffs,luts; FF/LUT are written as NA.
void write_resources_csv(std::ostream& os, const ResourceEstimate& est);

struct ReportRun {
  std::string label;
  RunShape shape;
  SimConfig config;
  SimStats stats;
};

/// Cycles per weight-matrix element and row: total / (batch * Ni * No).
/// The CPU work of a layer scales with Ni * No, so this is the inverse of
/// speedup up to a constant.
double cycles_per_element(const ReportRun& run);

/// Stats columns plus label, cycles_per_element, baseline and cycle_ratio
/// (total_cycles / baseline total_cycles). Without `baseline_label` each run
/// is compared with the largest-tile run of the same (Ni, No, batch). Rows
/// are sorted by Ni, No, tile size, then the remaining columns.
void speedup_report(std::span<const ReportRun> runs, std::ostream& os,
                    const std::optional<std::string>& baseline_label = std::nullopt);

}  // namespace dlau
