#include "speclab/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "speclab/csv.hpp"
#include "speclab/models.hpp"

namespace speclab {
namespace {

// Candidate produced by a kernel: parent frontier slot + token.
struct KernelEntry {
  std::int32_t parent = 0;
  TokenId token = 0;
  double path_prob = 0.0;
  double draft_prob = 0.0;

  friend bool operator==(const KernelEntry&, const KernelEntry&) = default;
};

bool kernel_entry_before(const KernelEntry& a, const KernelEntry& b) {
  if (a.path_prob != b.path_prob) return a.path_prob > b.path_prob;
  if (a.parent != b.parent) return a.parent < b.parent;
  return a.token < b.token;
}

struct LayerInputs {
  std::vector<double> parent_paths;             // one per frontier slot
  std::vector<std::vector<double>> parent_dists;  // full vocab each
};

LayerInputs synthesize_inputs(std::int32_t vocab, double alpha,
                              std::int32_t parents, std::uint64_t seed) {
  LayerInputs inputs;
  inputs.parent_paths = zipf_weights(parents, 1.0);
  const std::vector<double> base = zipf_weights(vocab, alpha);
  inputs.parent_dists.reserve(static_cast<std::size_t>(parents));
  for (std::int32_t p = 0; p < parents; ++p) {
    std::vector<TokenId> perm(static_cast<std::size_t>(vocab));
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(p)));
    portable_shuffle(perm, rng);
    std::vector<double> dist(static_cast<std::size_t>(vocab));
    for (std::size_t r = 0; r < dist.size(); ++r)
      dist[static_cast<std::size_t>(perm[r])] = base[r];
    inputs.parent_dists.push_back(std::move(dist));
  }
  return inputs;
}

// The fixed-shape layer: per-parent top-K by probability (ties toward lower
// tokens), then the union cut to the K best path scores.  Mirrors the
// standard dual-ranking implementation: one partial sort inside each parent,
// one sort over the union.
std::vector<KernelEntry> dual_topk_kernel(const LayerInputs& in,
                                          std::int32_t K,
                                          std::vector<TokenId>& scratch) {
  std::vector<KernelEntry> survivors;
  survivors.reserve(in.parent_dists.size() * static_cast<std::size_t>(K));
  for (std::size_t p = 0; p < in.parent_dists.size(); ++p) {
    const std::vector<double>& dist = in.parent_dists[p];
    scratch.resize(dist.size());
    std::iota(scratch.begin(), scratch.end(), 0);
    const auto by_prob = [&dist](TokenId a, TokenId b) {
      const double pa = dist[static_cast<std::size_t>(a)];
      const double pb = dist[static_cast<std::size_t>(b)];
      if (pa != pb) return pa > pb;
      return a < b;
    };
    const std::size_t k =
        std::min(static_cast<std::size_t>(K), scratch.size());
    std::nth_element(scratch.begin(),
                     scratch.begin() + static_cast<std::ptrdiff_t>(k - 1),
                     scratch.end(), by_prob);
    std::sort(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(k),
              by_prob);
    for (std::size_t i = 0; i < k; ++i) {
      const TokenId t = scratch[i];
      const double dp = dist[static_cast<std::size_t>(t)];
      if (dp <= 0.0) break;  // sorted run: nothing after has mass either
      const double path = in.parent_paths[p] * dp;
      if (path < kProbUnderflow) continue;
      survivors.push_back({static_cast<std::int32_t>(p), t, path, dp});
    }
  }
  std::sort(survivors.begin(), survivors.end(), kernel_entry_before);
  if (survivors.size() > static_cast<std::size_t>(K))
    survivors.resize(static_cast<std::size_t>(K));
  return survivors;
}

// The confidence gate: one pass for the anchor (best path score), one masked
// gather of everything above mu * anchor.  No ranking.
std::vector<KernelEntry> gated_kernel(const LayerInputs& in, double mu) {
  double anchor = 0.0;
  for (std::size_t p = 0; p < in.parent_dists.size(); ++p) {
    const double parent_path = in.parent_paths[p];
    for (const double dp : in.parent_dists[p])
      anchor = std::max(anchor, parent_path * dp);
  }
  const double threshold = std::max(mu * anchor, kProbUnderflow);

  std::vector<KernelEntry> kept;
  for (std::size_t p = 0; p < in.parent_dists.size(); ++p) {
    const double parent_path = in.parent_paths[p];
    const std::vector<double>& dist = in.parent_dists[p];
    for (std::size_t t = 0; t < dist.size(); ++t) {
      const double path = parent_path * dist[t];
      if (path >= threshold)
        kept.push_back({static_cast<std::int32_t>(p),
                        static_cast<TokenId>(t), path, dist[t]});
    }
  }
  return kept;
}

// Reference selection through the builders module, for the equivalence
// check.
CandidatePool reference_pool(const LayerInputs& in) {
  CandidatePool pool;
  for (std::size_t p = 0; p < in.parent_dists.size(); ++p) {
    const double parent_path = in.parent_paths[p];
    const std::vector<double>& dist = in.parent_dists[p];
    for (std::size_t t = 0; t < dist.size(); ++t) {
      const double dp = dist[t];
      if (dp <= 0.0) continue;
      const double path = parent_path * dp;
      if (path < kProbUnderflow) continue;
      pool.entries.push_back({NodeId{static_cast<std::uint32_t>(p)},
                              static_cast<TokenId>(t), path, dp});
    }
  }
  return pool;
}

std::vector<KernelEntry> from_pool_entries(const std::vector<PoolEntry>& v) {
  std::vector<KernelEntry> out;
  out.reserve(v.size());
  for (const PoolEntry& e : v)
    out.push_back({static_cast<std::int32_t>(e.parent.index), e.token,
                   e.path_prob, e.draft_prob});
  return out;
}

void check_equivalence(const LayerInputs& in, const BenchConfig& config) {
  const CandidatePool pool = reference_pool(in);

  std::vector<TokenId> scratch;
  std::vector<KernelEntry> dual = dual_topk_kernel(in, config.K, scratch);
  std::vector<KernelEntry> dual_ref =
      from_pool_entries(static_layer_select(pool, config.K));
  std::sort(dual.begin(), dual.end(), kernel_entry_before);
  std::sort(dual_ref.begin(), dual_ref.end(), kernel_entry_before);
  if (dual != dual_ref)
    throw Error("dual_topk kernel diverged from the builders selection");

  std::vector<KernelEntry> gated = gated_kernel(in, config.mu);
  std::vector<KernelEntry> gated_ref = from_pool_entries(
      gate_layer(pool, config.mu, std::numeric_limits<std::size_t>::max())
          .kept);
  std::sort(gated.begin(), gated.end(), kernel_entry_before);
  std::sort(gated_ref.begin(), gated_ref.end(), kernel_entry_before);
  if (gated != gated_ref)
    throw Error("gated kernel diverged from the builders selection");
}

// Keeps the optimizer from discarding kernel work.
volatile double g_bench_sink = 0.0;

template <typename Fn>
std::vector<double> time_iterations(Fn&& fn, std::int32_t warmup,
                                    std::int32_t timed) {
  using clock = std::chrono::steady_clock;
  for (std::int32_t i = 0; i < warmup; ++i) g_bench_sink = fn();
  std::vector<double> micros;
  micros.reserve(static_cast<std::size_t>(timed));
  for (std::int32_t i = 0; i < timed; ++i) {
    const auto t0 = clock::now();
    g_bench_sink = fn();
    const auto t1 = clock::now();
    micros.push_back(
        std::chrono::duration<double, std::micro>(t1 - t0).count());
  }
  return micros;
}

double median_of_means(const std::vector<double>& samples) {
  const std::size_t chunk = std::max<std::size_t>(1, samples.size() / 10);
  std::vector<double> means;
  for (std::size_t begin = 0; begin < samples.size(); begin += chunk) {
    const std::size_t end = std::min(begin + chunk, samples.size());
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) sum += samples[i];
    means.push_back(sum / static_cast<double>(end - begin));
  }
  std::sort(means.begin(), means.end());
  const std::size_t mid = means.size() / 2;
  return means.size() % 2 ? means[mid]
                          : 0.5 * (means[mid - 1] + means[mid]);
}

double stddev(const std::vector<double>& samples) {
  if (samples.size() < 2) return 0.0;
  const double mean =
      std::accumulate(samples.begin(), samples.end(), 0.0) /
      static_cast<double>(samples.size());
  double acc = 0.0;
  for (double s : samples) acc += (s - mean) * (s - mean);
  return std::sqrt(acc / static_cast<double>(samples.size() - 1));
}

}  // namespace

void validate_bench_config(const BenchConfig& config) {
  if (config.vocab_sizes.empty())
    throw ParamError("bench needs at least one vocab size");
  for (std::int32_t v : config.vocab_sizes)
    if (v < 2) throw ParamError("bench vocab sizes must be at least 2");
  if (config.alphas.empty())
    throw ParamError("bench needs at least one alpha");
  for (double a : config.alphas)
    if (!(a > 0.0)) throw ParamError("bench alphas must be positive");
  if (config.K < 1) throw ParamError("bench K must be at least 1");
  if (!(config.mu > 0.0 && config.mu <= 1.0))
    throw ParamError("bench mu must lie in (0, 1]");
  if (config.parents < 1) throw ParamError("bench parents must be at least 1");
  if (config.warmup_iters < 0)
    throw ParamError("bench warmup_iters must be non-negative");
  if (config.timed_iters < 1)
    throw ParamError("bench timed_iters must be at least 1");
}

std::vector<BenchResult> bench_layer_kernels(const BenchConfig& config) {
  validate_bench_config(config);

  std::vector<BenchResult> results;
  for (std::size_t vi = 0; vi < config.vocab_sizes.size(); ++vi) {
    for (std::size_t ai = 0; ai < config.alphas.size(); ++ai) {
      const std::int32_t vocab = config.vocab_sizes[vi];
      const double alpha = config.alphas[ai];
      const LayerInputs inputs = synthesize_inputs(
          vocab, alpha, config.parents,
          derive_seed(config.seed, vi * config.alphas.size() + ai));
      check_equivalence(inputs, config);

      std::vector<TokenId> scratch;
      const std::vector<double> dual_us = time_iterations(
          [&] {
            const auto kept = dual_topk_kernel(inputs, config.K, scratch);
            double sum = 0.0;
            for (const KernelEntry& e : kept) sum += e.path_prob;
            return sum;
          },
          config.warmup_iters, config.timed_iters);
      const std::vector<double> gated_us = time_iterations(
          [&] {
            const auto kept = gated_kernel(inputs, config.mu);
            double sum = 0.0;
            for (const KernelEntry& e : kept) sum += e.path_prob;
            return sum;
          },
          config.warmup_iters, config.timed_iters);

      BenchResult dual;
      dual.vocab_size = vocab;
      dual.alpha = alpha;
      dual.kernel = "dual_topk";
      dual.mean_latency_us = median_of_means(dual_us);
      dual.stddev_us = stddev(dual_us);
      dual.speedup_vs_dual = 1.0;

      BenchResult gated;
      gated.vocab_size = vocab;
      gated.alpha = alpha;
      gated.kernel = "gated";
      gated.mean_latency_us = median_of_means(gated_us);
      gated.stddev_us = stddev(gated_us);
      gated.speedup_vs_dual =
          gated.mean_latency_us > 0.0
              ? dual.mean_latency_us / gated.mean_latency_us
              : 0.0;

      results.push_back(std::move(dual));
      results.push_back(std::move(gated));
    }
  }
  return results;
}

void export_bench(const std::vector<BenchResult>& results,
                  const std::filesystem::path& path) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(results.size());
  for (const BenchResult& r : results)
    rows.push_back({std::to_string(r.vocab_size), format_double(r.alpha),
                    r.kernel, format_double(r.mean_latency_us),
                    format_double(r.speedup_vs_dual)});
  write_csv(path,
            {"vocab_size", "alpha", "kernel", "mean_latency_us",
             "speedup_vs_dual"},
            rows);
}

}  // namespace speclab
