#pragma once

// Command implementations behind the CLI binary.  Each cmd_* function does
// the work of one subcommand and returns the process exit code:
//
//   0  success
//   2  validation failure (config, flags, parameters)
//   3  I/O failure (missing or unwritable files)
//   4  an acceptance check failed (lossless replay mismatch, TV too high)
//
// They are plain functions over streams so tests can drive them without
// spawning processes.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "speclab/bench.hpp"
#include "speclab/config.hpp"
#include "speclab/decode.hpp"

namespace speclab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitAcceptance = 4;

// Options shared by every subcommand.
struct CommonOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed_override;  // replaces decode.seed
  std::int32_t threads = 1;
  bool make_dirs = false;  // create out_dir if missing
};

// Deterministic prompt synthesis: prompt `index` under `seed` is `length`
// uniform tokens from a derived stream, independent of every other index.
Context synth_prompt(std::uint64_t seed, std::int32_t index,
                     std::int32_t length, const Vocab& vocab);

// One full config run: every prompt decoded (in parallel across `threads`,
// ordered deterministically by prompt index), per-prompt results merged.
struct SimulationOutput {
  std::vector<DecodeResult> per_prompt;
  RunMetrics merged;
};
SimulationOutput run_simulation(const RunConfig& config,
                                const CommonOptions& common);

// Estimates the draft/target cost ratio c from wall-clock next_dist timings
// over the run's synthesized prompts.
double measure_cost_ratio(const ModelPair& pair, const RunConfig& config);

// simulate: decode under a config; writes metrics.csv + funnel.csv into
// out_dir, prints a summary line, and in greedy mode replays the target-only
// oracle (mismatch exits 4 — losslessness is part of the contract).
int cmd_simulate(const std::filesystem::path& config_path,
                 const CommonOptions& common, bool measure_c,
                 std::ostream& out, std::ostream& err);

// sweep: one simulation per axis value; writes sweep.csv (and curve.csv for
// beta sweeps, one difficulty bucket per value).
int cmd_sweep(const std::filesystem::path& sweep_path,
              const CommonOptions& common, std::ostream& out,
              std::ostream& err);

struct BenchTreeOptions {
  BenchConfig config;
  std::filesystem::path out_csv = "bench.csv";
};

// bench-tree: times the dual top-K and confidence-gated layer kernels and
// writes the comparison CSV.
int cmd_bench_tree(const BenchTreeOptions& options, const CommonOptions& common,
                   std::ostream& out, std::ostream& err);

// verify-lossless: exhaustively enumerates the target distribution over
// short completions, runs many seeded stochastic decodes, and compares by
// total variation.  Exits 4 when the distance exceeds the threshold.
struct VerifyLosslessOptions {
  std::int64_t trials = 200000;
  double tv_threshold = 0.02;
};
int cmd_verify_lossless(const std::filesystem::path& config_path,
                        const VerifyLosslessOptions& options,
                        const CommonOptions& common, std::ostream& out,
                        std::ostream& err);

// plot: renders CSV artifacts (any subset of funnel/curve/sweep) to SVG.
struct PlotOptions {
  std::optional<std::filesystem::path> funnel_csv;
  std::optional<std::filesystem::path> curve_csv;
  std::optional<std::filesystem::path> sweep_csv;
};
int cmd_plot(const PlotOptions& options, const CommonOptions& common,
             std::ostream& out, std::ostream& err);

}  // namespace speclab
