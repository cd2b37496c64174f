#include "dlau/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <sstream>

#include "dlau/csv.hpp"
#include "dlau/fifo.hpp"
#include "dlau/weight_banks.hpp"

namespace dlau {

std::size_t ceil_log2(std::size_t n) {
  std::size_t stages = 0;
  for (std::size_t span = 1; span < n; span <<= 1) ++stages;
  return stages;
}

std::size_t SimConfig::adder_latency() const {
  return adder_tree_latency.value_or(ceil_log2(std::max<std::size_t>(tile_size, 2)) + 1);
}

void SimConfig::validate() const {
  if (tile_size == 0) throw InvalidArgument("tile_size must be >= 1");
  if (fifo_depth == 0) throw InvalidArgument("fifo_depth must be >= 1");
  if (!(dma_words_per_cycle >= 0.125) || !std::isfinite(dma_words_per_cycle)) {
    throw InvalidArgument("dma_words_per_cycle must be a finite value >= 0.125");
  }
  const std::size_t min_tree = ceil_log2(std::max<std::size_t>(tile_size, 2));
  if (adder_latency() < min_tree) {
    throw InvalidArgument("adder_tree_latency " + std::to_string(adder_latency()) +
                          " is shorter than the " + std::to_string(min_tree) +
                          "-stage adder tree");
  }
  if (afau_latency == 0) throw InvalidArgument("afau_latency must be >= 1");
  if (!(clock_mhz > 0.0) || !std::isfinite(clock_mhz)) {
    throw InvalidArgument("clock_mhz must be positive");
  }
}

std::size_t SimStats::max_fifo_occupancy() const {
  return std::max({tmmu_to_psau.max_occupancy, psau_to_afau.max_occupancy,
                   afau_to_output.max_occupancy});
}

float adder_tree_sum(std::span<const float> products) {
  if (products.empty()) return 0.0f;
  std::vector<float> level(products.begin(), products.end());
  while (level.size() > 1) {
    const std::size_t half = level.size() / 2;
    for (std::size_t i = 0; i < half; ++i) level[i] = level[2 * i] + level[2 * i + 1];
    if (level.size() % 2 == 1) {
      level[half] = level.back();
      level.resize(half + 1);
    } else {
      level.resize(half);
    }
  }
  return level[0];
}

namespace {

struct PartSum {
  std::size_t row;
  std::size_t col;
  std::size_t tile;
  float value;
};

struct OutputWord {
  std::size_t row;
  std::size_t col;
  float value;
};

struct Block {
  std::size_t row;
  std::size_t tile;
  std::size_t start;
  std::size_t len;
};

// One half of the double buffer: the weight banks' rows for a tile block
// plus the node register (Reg_a or Reg_b) that feeds them.
struct OperandSlot {
  std::optional<std::size_t> block;
  std::vector<float> weights;  // bank r, column j at r * No + j
  std::vector<float> nodes;
  std::size_t weight_words_needed = 0;
  std::size_t weight_words_loaded = 0;
  std::size_t node_words_needed = 0;
  std::size_t node_words_loaded = 0;

  bool ready_for(std::size_t b) const {
    return block == b && weight_words_loaded == weight_words_needed &&
           node_words_loaded == node_words_needed;
  }
};

// Fixed-depth pipeline that freezes while its head cannot leave.
template <typename T>
class StagePipeline {
 public:
  explicit StagePipeline(std::size_t depth) : stages_(depth) {}

  const std::optional<T>& head() const { return stages_.back(); }
  void clear_head() { stages_.back().reset(); }

  // Returns true when anything moved.
  bool shift(std::optional<T> incoming) {
    bool moved = incoming.has_value();
    for (std::size_t s = stages_.size() - 1; s > 0; --s) {
      moved = moved || stages_[s - 1].has_value();
      stages_[s] = std::move(stages_[s - 1]);
    }
    stages_[0] = std::move(incoming);
    return moved;
  }

  std::size_t occupancy() const {
    return static_cast<std::size_t>(
        std::count_if(stages_.begin(), stages_.end(), [](const auto& s) { return s.has_value(); }));
  }

 private:
  std::vector<std::optional<T>> stages_;
};

struct DmaChannel {
  double credit = 0.0;
  std::size_t next_block = 0;
};

enum class Stream { Weights, Nodes };

FifoStats snapshot(const auto& fifo) {
  return {fifo.push_count(), fifo.pop_count(), fifo.stall_count(), fifo.max_occupancy()};
}

class Simulator {
 public:
  Simulator(const SimConfig& cfg, const Tensor2D& w, const Tensor2D& x, const PwlTable& table,
            SimTrace* trace)
      : cfg_(cfg),
        x_(x),
        table_(table),
        trace_(trace),
        ni_(w.rows()),
        no_(w.cols()),
        tiles_((ni_ + cfg.tile_size - 1) / cfg.tile_size),
        banks_(load_weights_banked(w, cfg.tile_size)),
        tree_(cfg.adder_latency()),
        afau_(cfg.afau_latency),
        tmmu_to_psau_(cfg.fifo_depth),
        psau_to_afau_(cfg.fifo_depth),
        afau_to_output_(cfg.fifo_depth),
        accumulators_(no_, 0.0f),
        products_(cfg.tile_size, 0.0f),
        output_(x.rows(), no_) {
    for (std::size_t n = 0; n < x.rows(); ++n) {
      for (std::size_t t = 0; t < tiles_; ++t) {
        const std::size_t start = t * cfg.tile_size;
        blocks_.push_back({n, t, start, std::min(cfg.tile_size, ni_ - start)});
      }
    }
    for (auto& slot : slots_) {
      slot.weights.assign(cfg.tile_size * no_, 0.0f);
      slot.nodes.assign(cfg.tile_size, 0.0f);
    }
    // With every write-back, dma credit can take this long to reach one word.
    idle_limit_ = static_cast<std::uint64_t>(std::ceil(1.0 / cfg.dma_words_per_cycle)) +
                  cfg.adder_latency() + cfg.afau_latency + 8;
  }

  SimResult run() {
    const std::uint64_t outputs = x_.rows() * no_;
    std::uint64_t idle = 0;
    for (cycle_ = 0; written_ < outputs; ++cycle_) {
      // Downstream first so same-cycle FIFO hand-off is well defined.
      bool progress = step_writeback();
      progress = step_afau() || progress;
      progress = step_psau() || progress;
      progress = step_tmmu() || progress;
      progress = step_dma() || progress;
      if (progress) {
        idle = 0;
      } else if (++idle > idle_limit_) {
        throw DeadlockError("simulation made no progress for " + std::to_string(idle) +
                                " cycles at cycle " + std::to_string(cycle_),
                            dump_state());
      }
    }
    stats_.total_cycles = cycle_;
    stats_.tmmu_to_psau = snapshot(tmmu_to_psau_);
    stats_.psau_to_afau = snapshot(psau_to_afau_);
    stats_.afau_to_output = snapshot(afau_to_output_);
    return {std::move(output_), stats_};
  }

 private:
  bool step_writeback() {
    double budget = writeback_credit_ + cfg_.dma_words_per_cycle;
    bool moved = false;
    while (budget >= 1.0 && !afau_to_output_.empty()) {
      const OutputWord word = *afau_to_output_.pop();
      output_(word.row, word.col) = word.value;
      ++written_;
      ++stats_.dma_words;
      budget -= 1.0;
      moved = true;
    }
    writeback_credit_ = afau_to_output_.empty() ? 0.0 : budget;
    if (moved) dma_active_ = true;
    return moved;
  }

  bool step_afau() {
    bool progress = false;
    if (const auto& head = afau_.head()) {
      if (!afau_to_output_.try_push(*head)) {
        ++stats_.afau_stall_cycles;
        return false;
      }
      afau_.clear_head();
      progress = true;
    }
    std::optional<OutputWord> incoming;
    if (auto word = psau_to_afau_.pop()) {
      if (trace_) trace_->psau_to_afau_popped.push_back(word->value);
      word->value = static_cast<float>(pwl_sigmoid(table_, static_cast<double>(word->value)));
      incoming = *word;
      ++stats_.afau_busy_cycles;
    }
    return afau_.shift(incoming) || progress;
  }

  bool step_psau() {
    const PartSum* ps = tmmu_to_psau_.front();
    if (!ps) return false;
    const float sum = (ps->tile == 0 ? 0.0f : accumulators_[ps->col]) + ps->value;
    if (ps->tile + 1 == tiles_) {
      if (!psau_to_afau_.try_push({ps->row, ps->col, sum})) {
        ++stats_.psau_stall_cycles;
        return false;
      }
      if (trace_) trace_->psau_to_afau_pushed.push_back(sum);
    }
    accumulators_[ps->col] = sum;
    if (trace_) trace_->tmmu_to_psau_popped.push_back(ps->value);
    tmmu_to_psau_.pop();
    ++stats_.psau_busy_cycles;
    return true;
  }

  bool step_tmmu() {
    const bool work_left = issue_block_ < blocks_.size();
    bool progress = false;
    if (const auto& head = tree_.head()) {
      if (!tmmu_to_psau_.try_push(*head)) {
        if (started_ && work_left) ++stats_.tmmu_stall_cycles;
        return false;
      }
      if (trace_) trace_->tmmu_to_psau_pushed.push_back(head->value);
      ++stats_.part_sums_emitted;
      tree_.clear_head();
      progress = true;
    }

    std::optional<PartSum> issued;
    if (work_left) {
      OperandSlot& slot = slots_[issue_block_ % 2];
      if (slot.ready_for(issue_block_)) {
        issued = compute_part_sum(slot, blocks_[issue_block_]);
        if (!started_) {
          started_ = true;
          stats_.preload_cycles = cycle_;
        }
        ++stats_.tmmu_busy_cycles;
        if (++issue_col_ == no_) {
          slot.block.reset();  // the standby side may now refill it
          issue_col_ = 0;
          ++issue_block_;
        }
      } else if (started_) {
        ++stats_.tmmu_stall_cycles;
      }
    }
    return tree_.shift(issued) || progress;
  }

  PartSum compute_part_sum(const OperandSlot& slot, const Block& block) {
    for (std::size_t r = 0; r < cfg_.tile_size; ++r) {
      products_[r] = slot.weights[r * no_ + issue_col_] * slot.nodes[r];
    }
    return {block.row, issue_col_, block.tile, adder_tree_sum(products_)};
  }

  void assign(OperandSlot& slot, std::size_t b) {
    const Block& block = blocks_[b];
    slot.block = b;
    std::fill(slot.weights.begin(), slot.weights.end(), 0.0f);
    std::fill(slot.nodes.begin(), slot.nodes.end(), 0.0f);
    slot.node_words_needed = block.len;
    slot.node_words_loaded = 0;
    slot.weight_words_loaded = 0;
    if (cfg_.cache_weights && block.row > 0) {
      // Resident since the first batch row streamed it.
      for (std::size_t r = 0; r < block.len; ++r) {
        const auto src = banks_.row(r, block.tile);
        std::copy(src.begin(), src.end(), slot.weights.begin() + static_cast<long>(r * no_));
      }
      slot.weight_words_needed = 0;
    } else {
      slot.weight_words_needed = block.len * no_;
    }
  }

  bool fill(DmaChannel& ch, Stream stream) {
    double budget = ch.credit + cfg_.dma_words_per_cycle;
    bool moved = false;
    for (;;) {
      if (ch.next_block >= blocks_.size()) {
        budget = 0.0;
        break;
      }
      OperandSlot& slot = slots_[ch.next_block % 2];
      if (!slot.block) {
        assign(slot, ch.next_block);
      } else if (*slot.block != ch.next_block) {
        budget = 0.0;  // standby buffer still holds an unfinished block
        break;
      }
      const Block& block = blocks_[ch.next_block];
      std::size_t& loaded =
          stream == Stream::Weights ? slot.weight_words_loaded : slot.node_words_loaded;
      const std::size_t needed =
          stream == Stream::Weights ? slot.weight_words_needed : slot.node_words_needed;
      if (loaded == needed) {
        ++ch.next_block;
        continue;
      }
      if (budget < 1.0) break;
      const std::size_t count =
          std::min(static_cast<std::size_t>(std::floor(budget)), needed - loaded);
      for (std::size_t w = loaded; w < loaded + count; ++w) {
        if (stream == Stream::Weights) {
          const std::size_t r = w / no_;
          const std::size_t j = w % no_;
          slot.weights[r * no_ + j] = banks_.row(r, block.tile)[j];
        } else {
          slot.nodes[w] = x_(block.row, block.start + w);
        }
      }
      loaded += count;
      budget -= static_cast<double>(count);
      stats_.dma_words += count;
      moved = true;
    }
    ch.credit = budget;
    return moved;
  }

  bool step_dma() {
    bool moved = fill(weight_channel_, Stream::Weights);
    moved = fill(node_channel_, Stream::Nodes) || moved;
    if (moved || dma_active_) ++stats_.dma_cycles;
    dma_active_ = false;
    return moved;
  }

  std::string dump_state() const {
    std::ostringstream os;
    os << "cycle " << cycle_ << '\n'
       << "  tmmu: block " << issue_block_ << '/' << blocks_.size() << " col " << issue_col_
       << " tree occupancy " << tree_.occupancy() << '\n'
       << "  tmmu->psau fifo: " << tmmu_to_psau_.occupancy() << '/' << tmmu_to_psau_.depth()
       << '\n'
       << "  psau->afau fifo: " << psau_to_afau_.occupancy() << '/' << psau_to_afau_.depth()
       << '\n'
       << "  afau pipeline occupancy " << afau_.occupancy() << ", output buffer "
       << afau_to_output_.occupancy() << '/' << afau_to_output_.depth() << '\n'
       << "  dma: weights next block " << weight_channel_.next_block << ", nodes next block "
       << node_channel_.next_block << ", outputs written " << written_ << '\n';
    for (std::size_t s = 0; s < slots_.size(); ++s) {
      const auto& slot = slots_[s];
      os << "  slot " << s << ": ";
      if (slot.block) {
        os << "block " << *slot.block << " weights " << slot.weight_words_loaded << '/'
           << slot.weight_words_needed << " nodes " << slot.node_words_loaded << '/'
           << slot.node_words_needed << '\n';
      } else {
        os << "free\n";
      }
    }
    return os.str();
  }

  const SimConfig& cfg_;
  const Tensor2D& x_;
  const PwlTable& table_;
  SimTrace* trace_;
  std::size_t ni_;
  std::size_t no_;
  std::size_t tiles_;
  WeightBanks banks_;
  std::vector<Block> blocks_;
  std::array<OperandSlot, 2> slots_;
  StagePipeline<PartSum> tree_;
  StagePipeline<OutputWord> afau_;
  FifoModel<PartSum> tmmu_to_psau_;
  FifoModel<OutputWord> psau_to_afau_;
  FifoModel<OutputWord> afau_to_output_;
  std::vector<float> accumulators_;
  std::vector<float> products_;
  Tensor2D output_;
  DmaChannel weight_channel_;
  DmaChannel node_channel_;
  double writeback_credit_ = 0.0;
  bool dma_active_ = false;
  std::size_t issue_block_ = 0;
  std::size_t issue_col_ = 0;
  bool started_ = false;
  std::uint64_t written_ = 0;
  std::uint64_t cycle_ = 0;
  std::uint64_t idle_limit_ = 0;
  SimStats stats_;
};

}  // namespace

SimResult sim_run(const SimConfig& cfg, const Tensor2D& weights, const Tensor2D& input,
                  const PwlTable& activation, SimTrace* trace) {
  cfg.validate();
  if (weights.empty()) throw DimensionError("sim: empty weight matrix");
  if (input.rows() == 0) throw DimensionError("sim: empty input batch");
  if (input.cols() != weights.rows()) {
    throw DimensionError("sim: input has " + std::to_string(input.cols()) +
                         " columns, weights have " + std::to_string(weights.rows()) + " rows");
  }
  Simulator sim(cfg, weights, input, activation, trace);
  return sim.run();
}

void write_stats_csv_header(std::ostream& os) {
  os << "Ni,No,batch,tile_size,fifo_depth,dma_bw,total_cycles,tmmu_busy,tmmu_stall,part_sums,"
        "max_fifo_occupancy,clock_mhz,sim_time_us\n";
}

void write_stats_csv_row(std::ostream& os, const RunShape& shape, const SimConfig& cfg,
                         const SimStats& stats) {
  const double sim_time_us = static_cast<double>(stats.total_cycles) / cfg.clock_mhz;
  os << shape.ni << ',' << shape.no << ',' << shape.batch << ',' << cfg.tile_size << ','
     << cfg.fifo_depth << ',' << csv::num(cfg.dma_words_per_cycle) << ',' << stats.total_cycles
     << ',' << stats.tmmu_busy_cycles << ',' << stats.tmmu_stall_cycles << ','
     << stats.part_sums_emitted << ',' << stats.max_fifo_occupancy() << ','
     << csv::num(cfg.clock_mhz) << ',' << csv::num(sim_time_us) << '\n';
}

}  // namespace dlau
