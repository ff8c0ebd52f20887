#include "speclab/sim.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>
#include <utility>
#include <variant>

#include "speclab/csv.hpp"
#include "speclab/svg.hpp"

namespace speclab {
namespace {

namespace fs = std::filesystem;

// Disjoint seed-stream ranges so prompt bytes, per-prompt decode draws, and
// verification trials never share generator state.
constexpr std::uint64_t kDecodeStreamBase = 0;
constexpr std::uint64_t kPromptStreamBase = std::uint64_t{1} << 32;
constexpr std::uint64_t kTrialStreamBase = std::uint64_t{1} << 33;

// Runs fn, translating thrown errors into the exit-code contract with a
// single machine-parseable stderr line.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const IoError& e) {
    err << "error[io]: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "error[validation]: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error[internal]: " << e.what() << '\n';
    return 1;
  }
}

void ensure_out_dir(const CommonOptions& common) {
  if (common.make_dirs) {
    std::error_code ec;
    fs::create_directories(common.out_dir, ec);
    if (ec)
      throw IoError("cannot create " + common.out_dir.string() + ": " +
                    ec.message());
  }
  if (!fs::is_directory(common.out_dir))
    throw IoError("output directory " + common.out_dir.string() +
                  " does not exist (pass --mkdirs to create it)");
}

RunConfig with_overrides(RunConfig config, const CommonOptions& common) {
  if (common.seed_override) config.decode.seed = *common.seed_override;
  return config;
}

std::int32_t worker_count(const CommonOptions& common, std::int64_t jobs) {
  if (common.threads < 1) throw ParamError("threads: must be >= 1");
  return static_cast<std::int32_t>(
      std::min<std::int64_t>(common.threads, std::max<std::int64_t>(jobs, 1)));
}

// Pulls indices [0, jobs) off a shared counter across `workers` threads and
// runs body(worker, index); the first thrown error wins and is rethrown
// here.
template <typename Body>
void parallel_for(std::int32_t workers, std::int64_t jobs, const Body& body) {
  std::atomic<std::int64_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto work = [&](std::int32_t worker) {
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= jobs) return;
      try {
        body(worker, i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (std::int32_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
}

void check_decode_spec(const DecodeSpec& d) {
  if (d.mode != "greedy" && d.mode != "stochastic")
    throw ConfigError("decode.mode: expected \"greedy\" or \"stochastic\"");
  if (d.num_prompts < 1)
    throw ConfigError("decode.num_prompts: must be >= 1");
  if (d.prompt_len < 1) throw ConfigError("decode.prompt_len: must be >= 1");
}

DecodeParams decode_params(const DecodeSpec& d) {
  DecodeParams params;
  params.max_new_tokens = d.max_new_tokens;
  params.greedy = d.mode == "greedy";
  params.stop_token = d.stop_token;
  return params;
}

std::string i64(std::int64_t v) { return std::to_string(v); }

}  // namespace

Context synth_prompt(std::uint64_t seed, std::int32_t index,
                     std::int32_t length, const Vocab& vocab) {
  if (index < 0) throw ParamError("prompt index: must be >= 0");
  if (length < 1) throw ParamError("prompt_len: must be >= 1");
  Rng rng(derive_seed(seed,
                      kPromptStreamBase + static_cast<std::uint64_t>(index)));
  Context prompt;
  prompt.tokens.reserve(static_cast<std::size_t>(length));
  for (std::int32_t i = 0; i < length; ++i)
    prompt.tokens.push_back(static_cast<TokenId>(
        uniform_below(rng, static_cast<std::uint64_t>(vocab.size))));
  return prompt;
}

SimulationOutput run_simulation(const RunConfig& config,
                                const CommonOptions& common) {
  const RunConfig cfg = with_overrides(config, common);
  validate_policy(cfg.policy);
  check_decode_spec(cfg.decode);
  const ModelPair pair = build_models(cfg.models);
  const Vocab vocab = pair.target->vocab();
  const DecodeParams params = decode_params(cfg.decode);

  SimulationOutput out;
  out.per_prompt.resize(static_cast<std::size_t>(cfg.decode.num_prompts));
  parallel_for(worker_count(common, cfg.decode.num_prompts),
               cfg.decode.num_prompts, [&](std::int32_t, std::int64_t i) {
                 const Context prompt =
                     synth_prompt(cfg.decode.seed, static_cast<std::int32_t>(i),
                                  cfg.decode.prompt_len, vocab);
                 Rng rng(derive_seed(
                     cfg.decode.seed,
                     kDecodeStreamBase + static_cast<std::uint64_t>(i)));
                 out.per_prompt[static_cast<std::size_t>(i)] =
                     decode(*pair.draft, *pair.target, prompt, cfg.policy,
                            params, rng);
               });
  for (const DecodeResult& r : out.per_prompt)
    out.merged = merge(out.merged, r.metrics);
  return out;
}

double measure_cost_ratio(const ModelPair& pair, const RunConfig& config) {
  const Vocab vocab = pair.target->vocab();
  const std::int32_t n = std::max<std::int32_t>(config.decode.num_prompts, 1);
  std::vector<Context> contexts;
  contexts.reserve(static_cast<std::size_t>(n));
  for (std::int32_t i = 0; i < n; ++i)
    contexts.push_back(
        synth_prompt(config.decode.seed, i, config.decode.prompt_len, vocab));

  // Per-call latency by timing blocks, growing the block until it is long
  // enough for the clock to resolve.
  const auto time_model = [&](const SequenceModel& model) {
    volatile double sink = 0.0;
    for (std::size_t i = 0; i < 8; ++i)
      sink = sink + model.next_dist(contexts[i % contexts.size()]).at(0);
    std::int64_t iters = 32;
    for (;;) {
      const auto t0 = std::chrono::steady_clock::now();
      for (std::int64_t i = 0; i < iters; ++i)
        sink = sink +
               model
                   .next_dist(contexts[static_cast<std::size_t>(i) %
                                       contexts.size()])
                   .at(0);
      const std::chrono::duration<double> elapsed =
          std::chrono::steady_clock::now() - t0;
      if (elapsed.count() >= 1e-3 || iters >= (std::int64_t{1} << 20))
        return elapsed.count() / static_cast<double>(iters);
      iters *= 4;
    }
  };

  const double target_s = time_model(*pair.target);
  const double draft_s = time_model(*pair.draft);
  if (target_s <= 0.0)
    throw MetricError("cost-ratio probe: target latency measured as zero");
  return draft_s / target_s;
}

namespace {

struct ReplayMismatch {
  std::int32_t prompt = 0;
  std::int64_t position = 0;
  TokenId got = 0;
  TokenId expected = 0;
};

// Replays target-only greedy decoding over each prompt and checks the
// committed tokens match position for position.
std::optional<ReplayMismatch> replay_greedy(const RunConfig& cfg,
                                            const ModelPair& pair,
                                            const SimulationOutput& sim) {
  const Vocab vocab = pair.target->vocab();
  for (std::size_t i = 0; i < sim.per_prompt.size(); ++i) {
    const DecodeResult& r = sim.per_prompt[i];
    Context oracle = synth_prompt(cfg.decode.seed, static_cast<std::int32_t>(i),
                                  cfg.decode.prompt_len, vocab);
    const std::size_t prompt_len = oracle.tokens.size();
    for (std::size_t k = prompt_len; k < r.context.tokens.size(); ++k) {
      const TokenId expected = argmax_token(pair.target->next_dist(oracle));
      const TokenId got = r.context.tokens[k];
      if (got != expected)
        return ReplayMismatch{static_cast<std::int32_t>(i),
                              static_cast<std::int64_t>(k - prompt_len), got,
                              expected};
      oracle.tokens.push_back(expected);
    }
  }
  return std::nullopt;
}

}  // namespace

int cmd_simulate(const std::filesystem::path& config_path,
                 const CommonOptions& common, bool measure_c,
                 std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    ensure_out_dir(common);
    const RunConfig cfg = with_overrides(load_run_config(config_path), common);
    const SimulationOutput sim = run_simulation(cfg, common);
    const ModelPair pair = build_models(cfg.models);
    const double c = measure_c ? measure_cost_ratio(pair, cfg) : cfg.speedup_c;

    const std::string policy = policy_name(cfg.policy);
    const std::string beta =
        pair.beta ? format_double(*pair.beta) : std::string();
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < sim.per_prompt.size(); ++i) {
      const RunMetrics& m = sim.per_prompt[i].metrics;
      const double tau = mat(m);
      const double delta = draft_efficiency(m);
      rows.push_back({i64(static_cast<std::int64_t>(i)), policy, beta,
                      std::to_string(derive_seed(cfg.decode.seed,
                                                 kDecodeStreamBase + i)),
                      i64(m.target_forwards), i64(m.draft_forwards),
                      i64(m.committed_tokens), format_double(tau),
                      format_double(delta),
                      format_double(speedup_estimate(tau, delta, c))});
    }
    write_csv(common.out_dir / "metrics.csv",
              {"run_id", "policy", "beta", "seed", "N_p", "N_q", "L", "tau",
               "delta", "R_at_c"},
              rows);

    std::vector<std::vector<std::string>> funnel_rows;
    for (const FunnelRow& r : funnel_export(sim.merged.funnel))
      funnel_rows.push_back({std::to_string(r.depth), std::to_string(r.rank),
                             i64(r.offered), i64(r.accepted),
                             format_double(r.freq)});
    write_csv(common.out_dir / "funnel.csv",
              {"depth", "rank", "offered", "accepted", "freq"}, funnel_rows);

    const double tau = mat(sim.merged);
    const double delta = draft_efficiency(sim.merged);
    out << "simulate: policy=" << policy
        << " prompts=" << sim.per_prompt.size()
        << " steps=" << sim.merged.target_forwards
        << " tokens=" << sim.merged.committed_tokens
        << " tau=" << format_double(tau) << " delta=" << format_double(delta)
        << " R(c=" << format_double(c)
        << ")=" << format_double(speedup_estimate(tau, delta, c))
        << (measure_c ? " [measured c]" : "") << '\n';

    if (cfg.decode.mode == "greedy") {
      if (const auto bad = replay_greedy(cfg, pair, sim)) {
        err << "error[acceptance]: greedy commit diverged from target-only "
               "decoding at prompt "
            << bad->prompt << " position " << bad->position << " (got "
            << bad->got << ", expected " << bad->expected << ")\n";
        out << "lossless: FAIL\n";
        return kExitAcceptance;
      }
      out << "lossless: ok (" << sim.merged.committed_tokens
          << " tokens replayed)\n";
    }
    return kExitOk;
  });
}

namespace {

void apply_axis(RunConfig& cfg, const std::string& axis, double value) {
  const auto as_positive_int = [&](const char* field) {
    const double rounded = std::round(value);
    if (std::abs(value - rounded) > 1e-9 || rounded < 1.0 || rounded > 1e9)
      throw ConfigError(std::string(field) + ": sweep value " +
                        format_double(value) + " is not a positive integer");
    return static_cast<std::int32_t>(rounded);
  };
  if (axis == "mu") {
    std::get<TalonPolicy>(cfg.policy).mu = value;
  } else if (axis == "init_layers") {
    std::get<TalonPolicy>(cfg.policy).init_layers =
        as_positive_int("init_layers");
  } else if (axis == "N") {
    if (auto* talon = std::get_if<TalonPolicy>(&cfg.policy))
      talon->N = as_positive_int("N");
    else
      std::get<StaticEaglePolicy>(cfg.policy).N = as_positive_int("N");
  } else if (axis == "beta") {
    cfg.models.beta = value;
  } else {
    throw ConfigError("axis: unknown \"" + axis + "\"");
  }
}

void check_axis_applies(const SweepSpec& spec) {
  const bool talon = std::holds_alternative<TalonPolicy>(spec.base.policy);
  const bool eagle =
      std::holds_alternative<StaticEaglePolicy>(spec.base.policy);
  if ((spec.axis == "mu" || spec.axis == "init_layers") && !talon)
    throw ConfigError("axis: \"" + spec.axis +
                      "\" applies only to the adaptive (talon) policy");
  if (spec.axis == "N" && !talon && !eagle)
    throw ConfigError(
        "axis: \"N\" applies only to tree policies (talon or eagle)");
  if (spec.axis == "beta" && spec.base.models.kind != "perturbed")
    throw ConfigError(
        "axis: \"beta\" requires models.kind == \"perturbed\"");
}

}  // namespace

int cmd_sweep(const std::filesystem::path& sweep_path,
              const CommonOptions& common, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&]() -> int {
    ensure_out_dir(common);
    const SweepSpec spec = load_sweep_spec(sweep_path);
    if (spec.values.empty()) throw ConfigError("values: must be non-empty");
    check_axis_applies(spec);

    std::vector<std::vector<std::string>> rows;
    std::vector<std::pair<std::string, std::vector<RunMetrics>>> buckets;
    for (const double value : spec.values) {
      RunConfig cfg = spec.base;
      apply_axis(cfg, spec.axis, value);
      const SimulationOutput sim = run_simulation(cfg, common);
      const double tau = mat(sim.merged);
      const double delta = draft_efficiency(sim.merged);
      const double speedup = speedup_estimate(tau, delta, cfg.speedup_c);
      rows.push_back({spec.axis, format_double(value), policy_name(cfg.policy),
                      format_double(tau), format_double(delta),
                      format_double(speedup)});
      if (spec.axis == "beta") {
        std::vector<RunMetrics> per_run;
        per_run.reserve(sim.per_prompt.size());
        for (const DecodeResult& r : sim.per_prompt)
          per_run.push_back(r.metrics);
        buckets.emplace_back(format_double(value), std::move(per_run));
      }
      out << "sweep " << spec.axis << '=' << format_double(value)
          << ": tau=" << format_double(tau)
          << " delta=" << format_double(delta)
          << " R=" << format_double(speedup) << '\n';
    }
    write_csv(common.out_dir / "sweep.csv",
              {"axis", "value", "policy", "tau", "delta", "R_at_c"}, rows);

    if (!buckets.empty()) {
      std::vector<std::vector<std::string>> curve_rows;
      for (const CurveRow& r : delta_tau_curve(buckets))
        curve_rows.push_back({r.bucket, format_double(r.tau_mean),
                              format_double(r.delta_mean),
                              format_double(r.oracle_delta)});
      write_csv(common.out_dir / "curve.csv",
                {"bucket", "tau_mean", "delta_mean", "oracle_delta"},
                curve_rows);
    }
    return kExitOk;
  });
}

int cmd_bench_tree(const BenchTreeOptions& options, const CommonOptions& common,
                   std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    ensure_out_dir(common);
    validate_bench_config(options.config);
    const BenchConfig& bc = options.config;
    out << "bench-tree: dual_topk ranks K=" << bc.K
        << " per parent then re-ranks the "
        << bc.parents * static_cast<std::int64_t>(bc.K)
        << "-candidate union; gated scans the same rows with one mu="
        << format_double(bc.mu) << " threshold pass\n";

    const std::vector<BenchResult> results = bench_layer_kernels(bc);
    char line[160];
    std::snprintf(line, sizeof(line), "%10s %6s %-9s %14s %12s %10s",
                  "vocab", "alpha", "kernel", "mean_us", "stddev_us",
                  "vs_dual");
    out << line << '\n';
    for (const BenchResult& r : results) {
      std::snprintf(line, sizeof(line), "%10d %6.2f %-9s %14.3f %12.3f %10.3f",
                    r.vocab_size, r.alpha, r.kernel.c_str(), r.mean_latency_us,
                    r.stddev_us, r.speedup_vs_dual);
      out << line << '\n';
    }

    const fs::path csv_path = common.out_dir / options.out_csv;
    export_bench(results, csv_path);
    out << "wrote " << csv_path.string() << '\n';
    return kExitOk;
  });
}

namespace {

void enumerate_completions(const SequenceModel& target, Context& ctx,
                           std::vector<TokenId>& seq, std::int64_t horizon,
                           double prob,
                           std::map<std::vector<TokenId>, double>& out) {
  if (static_cast<std::int64_t>(seq.size()) == horizon) {
    out.emplace(seq, prob);
    return;
  }
  const Distribution dist = target.next_dist(ctx);
  for (TokenId t = 0; t < static_cast<TokenId>(dist.size()); ++t) {
    const double p = dist.at(t);
    if (p <= 0.0) continue;
    ctx.tokens.push_back(t);
    seq.push_back(t);
    enumerate_completions(target, ctx, seq, horizon, prob * p, out);
    ctx.tokens.pop_back();
    seq.pop_back();
  }
}

}  // namespace

int cmd_verify_lossless(const std::filesystem::path& config_path,
                        const VerifyLosslessOptions& options,
                        const CommonOptions& common, std::ostream& out,
                        std::ostream& err) {
  return guarded(err, [&]() -> int {
    if (options.trials < 1) throw ParamError("trials: must be >= 1");
    if (!(options.tv_threshold > 0.0))
      throw ParamError("tv-threshold: must be > 0");
    const RunConfig cfg = with_overrides(load_run_config(config_path), common);
    validate_policy(cfg.policy);
    check_decode_spec(cfg.decode);
    if (cfg.decode.stop_token)
      throw ConfigError(
          "decode.stop_token: unsupported by verify-lossless (exact "
          "enumeration assumes fixed-length completions)");
    const ModelPair pair = build_models(cfg.models);
    const Vocab vocab = pair.target->vocab();

    // Longest horizon whose completion set stays enumerable.
    constexpr std::int64_t kMaxSequences = 4096;
    std::int64_t horizon = 0;
    std::int64_t count = 1;
    while (horizon < cfg.decode.max_new_tokens &&
           count * vocab.size <= kMaxSequences) {
      count *= vocab.size;
      ++horizon;
    }
    if (horizon < 1)
      throw ConfigError(
          "models.vocab_size: too large for exact enumeration (needs "
          "vocab_size <= 4096)");

    const Context prompt =
        synth_prompt(cfg.decode.seed, 0, cfg.decode.prompt_len, vocab);
    std::map<std::vector<TokenId>, double> exact;
    {
      Context scratch = prompt;
      std::vector<TokenId> seq;
      enumerate_completions(*pair.target, scratch, seq, horizon, 1.0, exact);
    }

    DecodeParams params = decode_params(cfg.decode);
    params.greedy = false;  // the claim under test is about sampling
    params.max_new_tokens = horizon;

    const std::int32_t workers = worker_count(common, options.trials);
    std::vector<std::map<std::vector<TokenId>, std::int64_t>> partial(
        static_cast<std::size_t>(workers));
    parallel_for(workers, options.trials, [&](std::int32_t worker,
                                              std::int64_t k) {
      Rng rng(derive_seed(cfg.decode.seed,
                          kTrialStreamBase + static_cast<std::uint64_t>(k)));
      const DecodeResult r = decode(*pair.draft, *pair.target, prompt,
                                    cfg.policy, params, rng);
      const std::vector<TokenId> seq(
          r.context.tokens.begin() +
              static_cast<std::ptrdiff_t>(prompt.tokens.size()),
          r.context.tokens.begin() +
              static_cast<std::ptrdiff_t>(prompt.tokens.size() + horizon));
      ++partial[static_cast<std::size_t>(worker)][seq];
    });
    std::map<std::vector<TokenId>, std::int64_t> counts;
    for (const auto& m : partial)
      for (const auto& [seq, n] : m) counts[seq] += n;

    const double trials = static_cast<double>(options.trials);
    double tv = 0.0;
    for (const auto& [seq, p] : exact) {
      const auto it = counts.find(seq);
      const double emp = it == counts.end()
                             ? 0.0
                             : static_cast<double>(it->second) / trials;
      tv += std::abs(p - emp);
      if (it != counts.end()) counts.erase(it);
    }
    for (const auto& [seq, n] : counts)
      tv += static_cast<double>(n) / trials;  // mass outside exact support
    tv *= 0.5;

    out << "verify-lossless: horizon=" << horizon
        << " sequences=" << exact.size() << " trials=" << options.trials
        << " tv=" << format_double(tv)
        << " threshold=" << format_double(options.tv_threshold) << '\n';
    if (tv <= options.tv_threshold) {
      out << "verdict: ok\n";
      return kExitOk;
    }
    err << "error[acceptance]: sampled commits are " << format_double(tv)
        << " total variation from target-only sampling (threshold "
        << format_double(options.tv_threshold) << ")\n";
    out << "verdict: FAIL\n";
    return kExitAcceptance;
  });
}

namespace {

std::size_t require_column(const CsvTable& table, const fs::path& src,
                           const std::string& name) {
  for (std::size_t i = 0; i < table.header.size(); ++i)
    if (table.header[i] == name) return i;
  throw InputError(src.string() + ": missing column \"" + name + "\"");
}

double field_double(const std::string& s, const fs::path& src,
                    const std::string& column) {
  double v{};
  const char* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end)
    throw InputError(src.string() + ": column \"" + column +
                     "\": not a number: \"" + s + "\"");
  return v;
}

std::int64_t field_int(const std::string& s, const fs::path& src,
                       const std::string& column) {
  std::int64_t v{};
  const char* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end)
    throw InputError(src.string() + ": column \"" + column +
                     "\": not an integer: \"" + s + "\"");
  return v;
}

void warn_if_empty(const CsvTable& table, const fs::path& src,
                   std::ostream& err) {
  if (table.rows.empty())
    err << "warning: " << src.string()
        << " has no data rows; wrote placeholder\n";
}

void plot_funnel(const fs::path& src, const fs::path& dst, std::ostream& out,
                 std::ostream& err) {
  const CsvTable table = read_csv(src);
  const std::size_t c_depth = require_column(table, src, "depth");
  const std::size_t c_rank = require_column(table, src, "rank");
  const std::size_t c_offered = require_column(table, src, "offered");
  const std::size_t c_accepted = require_column(table, src, "accepted");
  const std::size_t c_freq = require_column(table, src, "freq");
  std::vector<FunnelRow> rows;
  for (const auto& r : table.rows) {
    FunnelRow row;
    row.depth =
        static_cast<std::int32_t>(field_int(r[c_depth], src, "depth"));
    row.rank = static_cast<std::int32_t>(field_int(r[c_rank], src, "rank"));
    row.offered = field_int(r[c_offered], src, "offered");
    row.accepted = field_int(r[c_accepted], src, "accepted");
    row.freq = field_double(r[c_freq], src, "freq");
    rows.push_back(row);
  }
  warn_if_empty(table, src, err);
  svg_funnel_heatmap(rows, "acceptance funnel", dst);
  out << "plot: wrote " << dst.string() << '\n';
}

void plot_curve(const fs::path& src, const fs::path& dst, std::ostream& out,
                std::ostream& err) {
  const CsvTable table = read_csv(src);
  const std::size_t c_bucket = require_column(table, src, "bucket");
  const std::size_t c_tau = require_column(table, src, "tau_mean");
  const std::size_t c_delta = require_column(table, src, "delta_mean");
  const std::size_t c_oracle = require_column(table, src, "oracle_delta");
  std::vector<CurveRow> rows;
  for (const auto& r : table.rows) {
    CurveRow row;
    row.bucket = r[c_bucket];
    row.tau_mean = field_double(r[c_tau], src, "tau_mean");
    row.delta_mean = field_double(r[c_delta], src, "delta_mean");
    row.oracle_delta = field_double(r[c_oracle], src, "oracle_delta");
    rows.push_back(row);
  }
  warn_if_empty(table, src, err);
  svg_delta_tau(rows, "draft cost vs accepted length", dst);
  out << "plot: wrote " << dst.string() << '\n';
}

void plot_sweep(const fs::path& src, const fs::path& dst, std::ostream& out,
                std::ostream& err) {
  const CsvTable table = read_csv(src);
  const std::size_t c_axis = require_column(table, src, "axis");
  const std::size_t c_value = require_column(table, src, "value");
  const std::size_t c_tau = require_column(table, src, "tau");
  const std::size_t c_delta = require_column(table, src, "delta");
  const std::size_t c_speedup = require_column(table, src, "R_at_c");
  std::vector<SweepPoint> points;
  std::string axis_label = "value";
  for (const auto& r : table.rows) {
    SweepPoint p;
    p.value = field_double(r[c_value], src, "value");
    p.tau = field_double(r[c_tau], src, "tau");
    p.delta = field_double(r[c_delta], src, "delta");
    p.speedup = field_double(r[c_speedup], src, "R_at_c");
    points.push_back(p);
    axis_label = r[c_axis];
  }
  warn_if_empty(table, src, err);
  svg_sweep_lines(points, axis_label, "sweep: " + axis_label, dst);
  out << "plot: wrote " << dst.string() << '\n';
}

}  // namespace

int cmd_plot(const PlotOptions& options, const CommonOptions& common,
             std::ostream& out, std::ostream& err) {
  return guarded(err, [&]() -> int {
    if (!options.funnel_csv && !options.curve_csv && !options.sweep_csv)
      throw ParamError(
          "plot: provide at least one of --funnel, --curve, --sweep");
    ensure_out_dir(common);
    if (options.funnel_csv)
      plot_funnel(*options.funnel_csv, common.out_dir / "funnel.svg", out,
                  err);
    if (options.curve_csv)
      plot_curve(*options.curve_csv, common.out_dir / "curve.svg", out, err);
    if (options.sweep_csv)
      plot_sweep(*options.sweep_csv, common.out_dir / "sweep.svg", out, err);
    return kExitOk;
  });
}

}  // namespace speclab
