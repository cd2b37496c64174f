#include "dlau/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "dlau/activation.hpp"
#include "dlau/csv.hpp"
#include "dlau/nn_core.hpp"
#include "dlau/perf_model.hpp"
#include "dlau/run_config.hpp"
#include "dlau/simulator.hpp"
#include "dlau/synthetic.hpp"
#include "dlau/tensor_file.hpp"
#include "dlau/tiled_engine.hpp"

namespace dlau {

namespace {

/// Raised for problems writing report files; maps to the input-file exit code.
class OutputFileError : public Error {
 public:
  using Error::Error;
};

// Runs `emit` against the file at `path`, or `fallback` when no path is set.
void emit_to(const std::string& path, std::ostream& fallback,
             const std::function<void(std::ostream&)>& emit) {
  if (path.empty()) {
    emit(fallback);
    return;
  }
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw OutputFileError("cannot open " + path + " for writing");
  emit(os);
  if (!os) throw OutputFileError("write failed for " + path);
}

std::vector<std::size_t> parse_count_list(const std::string& flag, const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw InvalidArgument(flag + ": '" + item + "' is not a positive integer");
    }
  }
  if (out.empty()) throw InvalidArgument(flag + " needs at least one value");
  return out;
}

struct GenArgs {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::uint64_t seed = 1;
  std::string out;
  bool zeros = false;
};

struct RunArgs {
  std::string weights;
  std::string input;
  std::size_t tile_size = 32;
  bool exact = false;
  double pwl_k = kDefaultPwlK;
  bool check = false;
  std::string out;
};

// Flags mirror the config keys; values stay strings so the config parser
// reports every problem with the key name.
struct SimArgs {
  std::string config;
  std::map<std::string, std::string> overrides;
  bool cache_weights = false;
  std::string weights;
  std::string input;
  std::string out;
  std::string stats_out;
};

struct SweepArgs {
  std::string sizes = "64,128,256";
  std::string tiles = "8,16,32";
  std::uint64_t seed = 1;
  std::size_t batch = 1;
  std::size_t fifo_depth = 64;
  double dma_bw = 32.0;
  double pwl_k = kDefaultPwlK;
  std::size_t jobs = 0;
  std::string baseline;
  std::string out;
};

struct ProfileArgs {
  std::string workload;
  std::string layers = "784,256,256,10";
  std::size_t batch = 1;
  std::string out;
};

struct ResourcesArgs {
  std::size_t tile_size = 32;
  std::string out;
};

void cmd_gen(const GenArgs& a) {
  Tensor2D t = a.zeros ? Tensor2D(a.rows, a.cols) : gen_synthetic(a.rows, a.cols, a.seed);
  write_tensor(a.out, t);
}

void cmd_run(const RunArgs& a, std::ostream& out) {
  const Tensor2D w = read_tensor(a.weights);
  const Tensor2D x = read_tensor(a.input);
  const Activation f = a.exact ? Activation::exact() : Activation::pwl(build_pwl_table(a.pwl_k));
  const Tensor2D y = tiled_forward(w, x, {a.tile_size, x.rows()}, f);
  if (!a.out.empty()) write_tensor(a.out, y);
  if (a.check) {
    double max_diff = 0.0;
    for (std::size_t n = 0; n < x.rows(); ++n) {
      const auto pre = matvec_naive<float>(w, x.row(n));
      for (std::size_t j = 0; j < pre.size(); ++j) {
        const double ref = static_cast<float>(f(static_cast<double>(pre[j])));
        max_diff = std::max(max_diff, std::abs(ref - static_cast<double>(y(n, j))));
      }
    }
    out << "max_abs_diff," << csv::num(max_diff) << '\n';
  }
}

void cmd_sim(const SimArgs& a, std::ostream& out) {
  ConfigOverrides overrides(a.overrides.begin(), a.overrides.end());
  std::optional<Tensor2D> w;
  std::optional<Tensor2D> x;
  if (!a.weights.empty()) {
    w = read_tensor(a.weights);
    if (!a.overrides.count("ni")) overrides.emplace_back("ni", std::to_string(w->rows()));
    if (!a.overrides.count("no")) overrides.emplace_back("no", std::to_string(w->cols()));
  }
  if (!a.input.empty()) {
    x = read_tensor(a.input);
    if (!a.overrides.count("batch")) overrides.emplace_back("batch", std::to_string(x->rows()));
  }
  if (a.cache_weights) overrides.emplace_back("cache_weights", "true");
  const RunConfig rc = load_run_config(
      a.config.empty() ? std::nullopt : std::optional<std::filesystem::path>(a.config),
      overrides);
  if (!w) w = gen_synthetic(*rc.ni, *rc.no, rc.seed);
  if (!x) x = gen_synthetic(rc.batch, *rc.ni, rc.seed + 1);
  if (w->rows() != *rc.ni || w->cols() != *rc.no || x->rows() != rc.batch) {
    throw DimensionError("weights " + std::to_string(w->rows()) + "x" +
                         std::to_string(w->cols()) + " and input with " +
                         std::to_string(x->rows()) + " rows disagree with the configured ni=" +
                         std::to_string(*rc.ni) + " no=" + std::to_string(*rc.no) +
                         " batch=" + std::to_string(rc.batch));
  }
  const SimConfig cfg = rc.sim_config();
  const SimResult result = sim_run(cfg, *w, *x, build_pwl_table(rc.pwl_k));
  if (!a.out.empty()) write_tensor(a.out, result.output);
  emit_to(a.stats_out, out, [&](std::ostream& os) {
    write_stats_csv_header(os);
    write_stats_csv_row(os, {*rc.ni, *rc.no, rc.batch}, cfg, result.stats);
  });
}

void cmd_sweep(const SweepArgs& a, std::ostream& out) {
  const auto sizes = parse_count_list("--sizes", a.sizes);
  const auto tiles = parse_count_list("--tiles", a.tiles);
  if (!is_valid_pwl_k(a.pwl_k)) throw InvalidArgument("--pwl-k must be one of 8..0.125");
  const PwlTable table = build_pwl_table(a.pwl_k);

  std::vector<ReportRun> runs;
  for (std::size_t n : sizes) {
    for (std::size_t t : tiles) {
      ReportRun r;
      r.label = "n" + std::to_string(n) + "_t" + std::to_string(t);
      r.shape = {n, n, a.batch};
      r.config.tile_size = t;
      r.config.fifo_depth = a.fifo_depth;
      r.config.dma_words_per_cycle = a.dma_bw;
      r.config.validate();
      runs.push_back(std::move(r));
    }
  }
  // Deduplicate repeated list entries so labels stay unique.
  std::sort(runs.begin(), runs.end(),
            [](const ReportRun& x, const ReportRun& y) { return x.label < y.label; });
  runs.erase(std::unique(runs.begin(), runs.end(),
                         [](const ReportRun& x, const ReportRun& y) { return x.label == y.label; }),
             runs.end());

  // Runs are independent; each worker owns a disjoint stride of `runs`.
  const std::size_t jobs = std::clamp<std::size_t>(
      a.jobs ? a.jobs : std::max(1u, std::thread::hardware_concurrency()), 1, runs.size());
  std::vector<std::exception_ptr> failures(jobs);
  {
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < runs.size(); i += jobs) {
            ReportRun& r = runs[i];
            const Tensor2D weights = gen_synthetic(r.shape.ni, r.shape.no, a.seed);
            const Tensor2D input = gen_synthetic(r.shape.batch, r.shape.ni, a.seed + 1);
            r.stats = sim_run(r.config, weights, input, table).stats;
          }
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  const auto baseline = a.baseline.empty() ? std::nullopt : std::optional<std::string>(a.baseline);
  emit_to(a.out, out, [&](std::ostream& os) { speedup_report(runs, os, baseline); });
}

void cmd_profile(const ProfileArgs& a, std::ostream& out) {
  NetworkSpec spec;
  spec.layer_sizes = parse_count_list("--layers", a.layers);
  const Workload workload = parse_workload(a.workload);
  const OpCountReport r = profile_ops(workload, spec, a.batch);
  emit_to(a.out, out, [&](std::ostream& os) {
    os << "workload,layers,batch,mm_ops,activation_ops,vector_ops,mm_share,activation_share,"
          "vector_share\n";
    std::string layers;
    for (std::size_t s : spec.layer_sizes) layers += (layers.empty() ? "" : "-") + std::to_string(s);
    os << workload_name(workload) << ',' << layers << ',' << a.batch << ',' << r.mm_ops << ','
       << r.activation_ops << ',' << r.vector_ops << ',' << csv::num(r.mm_share()) << ','
       << csv::num(r.activation_share()) << ',' << csv::num(r.vector_share()) << '\n';
  });
}

void cmd_resources(const ResourcesArgs& a, std::ostream& out) {
  const ResourceEstimate est = estimate_resources(a.tile_size);
  emit_to(a.out, out, [&](std::ostream& os) { write_resources_csv(os, est); });
}

}  // namespace

int execute_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cycle-level model of a tiled three-stage deep-learning accelerator", "dlau"};
  app.require_subcommand(1, 1);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write a seeded synthetic DLT1 tensor");
  gen_cmd->add_option("--rows", gen.rows, "Row count")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--cols", gen.cols, "Column count")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--seed", gen.seed, "Generator seed");
  gen_cmd->add_option("--out", gen.out, "Output tensor path")->required();
  gen_cmd->add_flag("--zeros", gen.zeros, "Write an all-zero tensor instead");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Functional tiled forward pass");
  run_cmd->add_option("--weights", run.weights, "Weight tensor (Ni x No)")->required();
  run_cmd->add_option("--input", run.input, "Input tensor (batch x Ni)")->required();
  run_cmd->add_option("--tile-size", run.tile_size, "Tile size")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--exact-sigmoid", run.exact, "Use the exact sigmoid instead of PWL");
  run_cmd->add_option("--pwl-k", run.pwl_k, "PWL segment width");
  run_cmd->add_flag("--check", run.check, "Print max |diff| against the untiled reference");
  run_cmd->add_option("--out", run.out, "Output tensor path");

  SimArgs sim;
  auto* sim_cmd = app.add_subcommand("sim", "Cycle-level simulation of one layer");
  sim_cmd->add_option("--config", sim.config, "key = value config file");
  for (const auto& [flag, key] : std::vector<std::pair<std::string, std::string>>{
           {"--ni", "ni"},
           {"--no", "no"},
           {"--batch", "batch"},
           {"--tile-size", "tile_size"},
           {"--fifo-depth", "fifo_depth"},
           {"--dma-bw", "dma_words_per_cycle"},
           {"--pwl-k", "pwl_k"},
           {"--seed", "seed"},
           {"--clock-mhz", "clock_mhz"},
           {"--adder-latency", "adder_tree_latency"},
           {"--afau-latency", "afau_latency"}}) {
    sim_cmd->add_option_function<std::string>(
        flag, [&sim, key = key](const std::string& v) { sim.overrides[key] = v; },
        "Overrides config key " + key);
  }
  sim_cmd->add_flag("--cache-weights", sim.cache_weights, "Keep weights resident across rows");
  sim_cmd->add_option("--weights", sim.weights, "Weight tensor (default: synthetic)");
  sim_cmd->add_option("--input", sim.input, "Input tensor (default: synthetic)");
  sim_cmd->add_option("--out", sim.out, "Output tensor path");
  sim_cmd->add_option("--stats-out", sim.stats_out, "Stats CSV path (default: stdout)");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Simulate sizes x tile sizes, CSV report");
  sweep_cmd->add_option("--sizes", sweep.sizes, "Square layer sizes, comma separated");
  sweep_cmd->add_option("--tiles", sweep.tiles, "Tile sizes, comma separated");
  sweep_cmd->add_option("--seed", sweep.seed, "Generator seed");
  sweep_cmd->add_option("--batch", sweep.batch, "Batch size")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--fifo-depth", sweep.fifo_depth, "FIFO depth")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--dma-bw", sweep.dma_bw, "DMA words per cycle");
  sweep_cmd->add_option("--pwl-k", sweep.pwl_k, "PWL segment width");
  sweep_cmd->add_option("--jobs", sweep.jobs, "Worker threads (default: all cores)");
  sweep_cmd->add_option("--baseline", sweep.baseline, "Label of the baseline run");
  sweep_cmd->add_option("--out", sweep.out, "Report CSV path (default: stdout)");

  ProfileArgs profile;
  auto* profile_cmd = app.add_subcommand("profile", "Operation-count hot-spot profile");
  profile_cmd->add_option("--workload", profile.workload, "feedforward, rbm or bp")->required();
  profile_cmd->add_option("--layers", profile.layers, "Layer sizes, comma separated");
  profile_cmd->add_option("--batch", profile.batch, "Batch size")->check(CLI::PositiveNumber);
  profile_cmd->add_option("--out", profile.out, "CSV path (default: stdout)");

  ResourcesArgs resources;
  auto* resources_cmd = app.add_subcommand("resources", "BRAM/DSP estimate for a tile size");
  resources_cmd->add_option("--tile-size", resources.tile_size, "Tile size")
      ->check(CLI::PositiveNumber);
  resources_cmd->add_option("--out", resources.out, "CSV path (default: stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "dlau: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*gen_cmd) cmd_gen(gen);
    if (*run_cmd) cmd_run(run, out);
    if (*sim_cmd) cmd_sim(sim, out);
    if (*sweep_cmd) cmd_sweep(sweep, out);
    if (*profile_cmd) cmd_profile(profile, out);
    if (*resources_cmd) cmd_resources(resources, out);
  } catch (const ConfigError& e) {
    err << "dlau: config error: " << e.what() << '\n';
    return e.kind() == ConfigError::Kind::Io ? kExitInputFile : kExitUsage;
  } catch (const TensorFileError& e) {
    err << "dlau: tensor file error: " << e.what() << '\n';
    return kExitInputFile;
  } catch (const OutputFileError& e) {
    err << "dlau: " << e.what() << '\n';
    return kExitInputFile;
  } catch (const DimensionError& e) {
    err << "dlau: shape mismatch: " << e.what() << '\n';
    return kExitInputFile;
  } catch (const InvalidArgument& e) {
    err << "dlau: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DeadlockError& e) {
    err << "dlau: simulation deadlock: " << e.what() << '\n';
    return kExitSimulation;
  } catch (const std::exception& e) {
    err << "dlau: internal error: " << e.what() << '\n';
    return kExitSimulation;
  }
  return kExitOk;
}

}  // namespace dlau
