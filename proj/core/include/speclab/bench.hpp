#pragma once

// Layer-expansion kernel micro-benchmark.
//
// One draft-tree layer boils down to a selection problem over parents x
// vocab candidate scores.  Two kernels compete:
//
//   dual_topk — the fixed-shape layer step: a top-K selection inside every
//               parent's distribution, then a second top-K over the union
//               of survivors.  Two ranking passes per layer.
//   gated     — the confidence-gate step: one pass to find the best path
//               score, one masked gather of everything above mu * max.  No
//               ranking at all.
//
// Inputs are synthesized Zipf-shaped parent distributions (seeded
// per-parent permutations), so the skew dial alpha controls how much of
// the mass the gate can discard.  Both kernels are checked against the
// builders-module selection (static_layer_select / gate_layer) on every
// configuration before timing begins; a mismatch aborts the run.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "speclab/builders.hpp"

namespace speclab {

struct BenchConfig {
  std::vector<std::int32_t> vocab_sizes{32000, 128000, 152000};
  std::vector<double> alphas{0.7, 1.35, 5.0};
  std::int32_t K = 10;
  double mu = 0.03;
  std::int32_t parents = 10;     // simulated frontier width per layer
  std::int32_t warmup_iters = 20;   // discarded
  std::int32_t timed_iters = 100;
  std::uint64_t seed = 1;
};

// Throws ParamError on out-of-range fields.
void validate_bench_config(const BenchConfig& config);

struct BenchResult {
  std::int32_t vocab_size = 0;
  double alpha = 0.0;
  std::string kernel;            // "dual_topk" | "gated"
  double mean_latency_us = 0.0;  // median-of-means over timed iterations
  double stddev_us = 0.0;
  double speedup_vs_dual = 1.0;  // dual mean latency / this kernel's
};

// Runs every (vocab, alpha) cell with both kernels: warmup_iters discarded,
// timed_iters measured, latency summarized as the median of 10-iteration
// chunk means (robust to scheduler noise) with the per-iteration standard
// deviation alongside.  Results are ordered (vocab, alpha, dual before
// gated).  Throws Error if a kernel's output ever disagrees with the
// builders-module selection it claims to implement.
std::vector<BenchResult> bench_layer_kernels(const BenchConfig& config);

// CSV columns: vocab_size, alpha, kernel, mean_latency_us, speedup_vs_dual.
// Deterministic bytes for identical results.
void export_bench(const std::vector<BenchResult>& results,
                  const std::filesystem::path& path);

}  // namespace speclab
