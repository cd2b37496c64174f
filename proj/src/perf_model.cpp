#include "dlau/perf_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>
#include <vector>

#include "dlau/csv.hpp"

namespace dlau {

namespace {

std::uint64_t words_to_cycles(double words, double rate) {
  return static_cast<std::uint64_t>(std::ceil(words / rate));
}

}  // namespace

CycleEstimate estimate_cycles(std::size_t ni, std::size_t no, std::size_t batch,
                              const SimConfig& cfg) {
  cfg.validate();
  if (ni == 0 || no == 0 || batch == 0) {
    throw InvalidArgument("estimate_cycles: Ni, No and batch must be >= 1");
  }
  const double bw = cfg.dma_words_per_cycle;
  const std::size_t tiles = (ni + cfg.tile_size - 1) / cfg.tile_size;
  const std::size_t first_len = std::min(cfg.tile_size, ni);

  CycleEstimate est;
  est.tmmu_busy = static_cast<std::uint64_t>(batch) * tiles * no;

  // Weights and node values travel on separate channels; the first block
  // must be complete on both before the first issue.
  const double first_weights = static_cast<double>(first_len * no);
  est.preload = std::max(words_to_cycles(first_weights, bw),
                         words_to_cycles(static_cast<double>(first_len), bw));

  const double weight_rows_streamed = cfg.cache_weights ? 1.0 : static_cast<double>(batch);
  const double weight_words = weight_rows_streamed * static_cast<double>(ni * no);
  const double node_words = static_cast<double>(batch * ni);
  // No block starts before its final word arrives. With resident weights
  // every block of the later rows still issues after the last weight word.
  const std::uint64_t blocks_after_last_weight =
      cfg.cache_weights ? 1 + (batch - 1) * tiles : 1;
  const std::uint64_t bandwidth_bound =
      std::max(words_to_cycles(weight_words, bw) + blocks_after_last_weight * no,
               words_to_cycles(node_words, bw) + no);
  const std::uint64_t issue_end = std::max(est.preload + est.tmmu_busy, bandwidth_bound);
  est.steady = issue_end - est.preload;

  est.drain = cfg.adder_latency() + cfg.afau_latency + 3;
  const std::uint64_t writeback = words_to_cycles(static_cast<double>(no), bw);
  est.writeback_tail = writeback > no ? writeback - no : 0;
  est.total = est.preload + est.steady + est.drain + est.writeback_tail;

  std::ostringstream notes;
  notes << "one part sum per cycle when operands are ready; double-buffered tile blocks; "
        << "weight and node channels at " << csv::num(bw) << " words/cycle each"
        << (cfg.cache_weights ? "; weights resident after the first row" : "")
        << "; drain = adder tree " << cfg.adder_latency() << " + AFAU " << cfg.afau_latency
        << " + 3 FIFO hand-offs";
  est.assumptions = notes.str();
  return est;
}

ResourceEstimate estimate_resources(std::size_t tile_size) {
  if (tile_size == 0) throw InvalidArgument("estimate_resources: tile size must be >= 1");
  const auto t = static_cast<std::uint32_t>(tile_size);
  ResourceEstimate est;
  est.tile_size = tile_size;
  est.tmmu = {"TMMU", t, 3 * t + 2 * (t - 1)};
  est.psau = {"PSAU", 1, 2};
  est.afau = {"AFAU", 2, 7};
  est.total = {"Total", est.tmmu.brams + est.psau.brams + est.afau.brams,
               est.tmmu.dsps + est.psau.dsps + est.afau.dsps};
  est.formulas =
      "TMMU brams = T; TMMU dsps = 3*T (float multipliers) + 2*(T-1) (tree adders); "
      "PSAU = 1 bram, 2 dsps; AFAU = 2 brams (a, b tables), 7 dsps";
  return est;
}

void write_resources_csv(std::ostream& os, const ResourceEstimate& est) {
  os << "component,brams,dsps,ffs,luts\n";
  for (const UnitResources* u : {&est.tmmu, &est.psau, &est.afau, &est.total}) {
    os << u->unit << ',' << u->brams << ',' << u->dsps << ",NA,NA\n";
  }
}

double cycles_per_element(const ReportRun& run) {
  const double elements = static_cast<double>(run.shape.batch) *
                          static_cast<double>(run.shape.ni) * static_cast<double>(run.shape.no);
  return static_cast<double>(run.stats.total_cycles) / elements;
}

void speedup_report(std::span<const ReportRun> runs, std::ostream& os,
                    const std::optional<std::string>& baseline_label) {
  if (runs.empty()) throw InvalidArgument("speedup_report needs at least one run");
  std::set<std::string> labels;
  for (const auto& r : runs) {
    if (!labels.insert(r.label).second) {
      throw InvalidArgument("speedup_report: duplicate label '" + r.label + "'");
    }
  }

  std::vector<const ReportRun*> order;
  for (const auto& r : runs) order.push_back(&r);
  auto key = [](const ReportRun* r) {
    return std::tuple(r->shape.ni, r->shape.no, r->config.tile_size, r->shape.batch,
                      r->config.fifo_depth, r->config.dma_words_per_cycle, r->label);
  };
  std::sort(order.begin(), order.end(),
            [&](const ReportRun* a, const ReportRun* b) { return key(a) < key(b); });

  const ReportRun* fixed = nullptr;
  if (baseline_label) {
    for (const auto& r : runs) {
      if (r.label == *baseline_label) fixed = &r;
    }
    if (!fixed) throw InvalidArgument("speedup_report: unknown baseline '" + *baseline_label + "'");
  }
  // Largest tile per shape; the sorted order makes the last one win.
  std::map<std::tuple<std::size_t, std::size_t, std::size_t>, const ReportRun*> group_baseline;
  for (const ReportRun* r : order) {
    auto& slot = group_baseline[{r->shape.ni, r->shape.no, r->shape.batch}];
    if (!slot || r->config.tile_size >= slot->config.tile_size) slot = r;
  }

  std::ostringstream header;
  write_stats_csv_header(header);
  std::string columns = header.str();
  columns.pop_back();
  os << "label," << columns << ",cycles_per_element,baseline,cycle_ratio\n";
  for (const ReportRun* r : order) {
    const ReportRun* base =
        fixed ? fixed : group_baseline.at({r->shape.ni, r->shape.no, r->shape.batch});
    std::ostringstream row;
    write_stats_csv_row(row, r->shape, r->config, r->stats);
    std::string stats_row = row.str();
    stats_row.pop_back();
    const double ratio = static_cast<double>(r->stats.total_cycles) /
                         static_cast<double>(base->stats.total_cycles);
    os << r->label << ',' << stats_row << ',' << csv::num(cycles_per_element(*r)) << ','
       << base->label << ',' << csv::num(ratio) << '\n';
  }
}

}  // namespace dlau
