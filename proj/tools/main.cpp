// speclab — command-line front end for the speculative-decoding laboratory.
//
// Subcommands:
//   simulate         decode under a JSON config; metrics.csv + funnel.csv
//   sweep            one simulation per axis value; sweep.csv (+ curve.csv)
//   bench-tree       dual top-K vs confidence-gated layer kernel timings
//   verify-lossless  total-variation check of sampled commits vs the target
//   plot             render the CSV artifacts to SVG
//
// Exit codes: 0 success, 2 validation, 3 I/O, 4 acceptance failure.

#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "speclab/sim.hpp"

namespace {

// Options every subcommand shares.  `resolve` turns the raw flag values into
// the CommonOptions the command layer consumes.
struct CommonCli {
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::int32_t threads = 1;
  bool mkdirs = false;
  CLI::Option* seed_opt = nullptr;

  void attach(CLI::App& cmd) {
    cmd.add_option("--out", out_dir, "Directory for output artifacts")
        ->capture_default_str();
    seed_opt =
        cmd.add_option("--seed", seed, "Override the config's decode seed");
    cmd.add_option("--threads", threads,
                   "Worker threads across independent prompts or trials")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd.add_flag("--mkdirs", mkdirs,
                 "Create the output directory if it is missing");
  }

  speclab::CommonOptions resolve() const {
    speclab::CommonOptions common;
    common.out_dir = out_dir;
    if (seed_opt != nullptr && seed_opt->count() > 0)
      common.seed_override = seed;
    common.threads = threads;
    common.make_dirs = mkdirs;
    return common;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "speclab: draft-tree construction policies, lossless verification, "
      "and measurement for speculative decoding"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand(
      "simulate", "Decode under a JSON config; write metrics.csv + funnel.csv");
  std::string sim_config;
  bool sim_measure_c = false;
  CommonCli sim_common;
  sim->add_option("--config", sim_config, "Run config JSON path")->required();
  sim->add_flag("--measure-c", sim_measure_c,
                "Estimate the draft/target cost ratio c from wall-clock "
                "timings instead of the config value");
  sim_common.attach(*sim);

  auto* sweep = app.add_subcommand(
      "sweep",
      "One simulation per axis value; write sweep.csv (+ curve.csv for beta)");
  std::string sweep_config;
  CommonCli sweep_common;
  sweep->add_option("--config", sweep_config, "Sweep spec JSON path")
      ->required();
  sweep_common.attach(*sweep);

  auto* bench = app.add_subcommand(
      "bench-tree",
      "Time the dual top-K and confidence-gated layer kernels");
  speclab::BenchTreeOptions bench_opts;
  std::vector<std::int32_t> bench_vocab;
  std::vector<double> bench_alpha;
  std::string bench_csv = "bench.csv";
  CommonCli bench_common;
  bench->add_option("--vocab", bench_vocab, "Vocabulary sizes (comma list)")
      ->delimiter(',');
  bench->add_option("--alpha", bench_alpha, "Zipf skew values (comma list)")
      ->delimiter(',');
  bench->add_option("--k", bench_opts.config.K, "Per-parent top-K width")
      ->capture_default_str();
  bench->add_option("--mu", bench_opts.config.mu, "Confidence-gate ratio")
      ->capture_default_str();
  bench->add_option("--parents", bench_opts.config.parents,
                    "Simulated frontier width per layer")
      ->capture_default_str();
  bench->add_option("--warmup", bench_opts.config.warmup_iters,
                    "Warmup iterations (discarded)")
      ->capture_default_str();
  bench->add_option("--iters", bench_opts.config.timed_iters,
                    "Timed iterations")
      ->capture_default_str();
  bench->add_option("--out-csv", bench_csv,
                    "Output CSV filename (written inside --out)")
      ->capture_default_str();
  bench_common.attach(*bench);

  auto* verify = app.add_subcommand(
      "verify-lossless",
      "Compare sampled commits against the exact target distribution");
  std::string verify_config;
  speclab::VerifyLosslessOptions verify_opts;
  CommonCli verify_common;
  verify->add_option("--config", verify_config, "Run config JSON path")
      ->required();
  verify->add_option("--trials", verify_opts.trials, "Sampled decode trials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  verify
      ->add_option("--tv-threshold", verify_opts.tv_threshold,
                   "Maximum allowed total variation")
      ->capture_default_str();
  verify_common.attach(*verify);

  auto* plot =
      app.add_subcommand("plot", "Render CSV artifacts to SVG charts");
  std::string plot_funnel;
  std::string plot_curve;
  std::string plot_sweep;
  CommonCli plot_common;
  plot->add_option("--funnel", plot_funnel, "funnel.csv path");
  plot->add_option("--curve", plot_curve, "curve.csv path");
  plot->add_option("--sweep", plot_sweep, "sweep.csv path");
  plot_common.attach(*plot);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << "error[validation]: " << e.what() << '\n';
    return speclab::kExitValidation;
  }

  if (sim->parsed())
    return speclab::cmd_simulate(sim_config, sim_common.resolve(),
                                 sim_measure_c, std::cout, std::cerr);
  if (sweep->parsed())
    return speclab::cmd_sweep(sweep_config, sweep_common.resolve(), std::cout,
                              std::cerr);
  if (bench->parsed()) {
    if (!bench_vocab.empty()) bench_opts.config.vocab_sizes = bench_vocab;
    if (!bench_alpha.empty()) bench_opts.config.alphas = bench_alpha;
    bench_opts.out_csv = bench_csv;
    const speclab::CommonOptions common = bench_common.resolve();
    if (common.seed_override) bench_opts.config.seed = *common.seed_override;
    return speclab::cmd_bench_tree(bench_opts, common, std::cout, std::cerr);
  }
  if (verify->parsed())
    return speclab::cmd_verify_lossless(verify_config, verify_opts,
                                        verify_common.resolve(), std::cout,
                                        std::cerr);
  if (plot->parsed()) {
    speclab::PlotOptions plot_opts;
    if (!plot_funnel.empty()) plot_opts.funnel_csv = plot_funnel;
    if (!plot_curve.empty()) plot_opts.curve_csv = plot_curve;
    if (!plot_sweep.empty()) plot_opts.sweep_csv = plot_sweep;
    return speclab::cmd_plot(plot_opts, plot_common.resolve(), std::cout,
                             std::cerr);
  }
  return 0;
}
