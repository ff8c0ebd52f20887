#pragma once

// JSON run configuration: model pair, expansion policy, decode settings.
//
// A config names everything a run needs to be reproducible: the synthetic
// draft/target pair, the tree policy with its budget, the decode mode and
// seeds, and the draft/target cost ratio c used for speedup estimates.
// Parsing is strict — unknown policy types, missing fields, and
// out-of-range values raise ConfigError naming the offending field.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "speclab/builders.hpp"
#include "speclab/models.hpp"

namespace speclab {

struct TableSpec {
  // Key: context suffix of exactly `order` tokens.  Value: a full
  // distribution over the vocabulary.
  std::map<std::vector<TokenId>, std::vector<double>> entries;
  std::vector<double> fallback;
};

// Recursive description of the model pair.  kind selects the shape:
//   "zipf"      — draft and target are the same ZipfModel (aligned pair).
//   "table"     — explicit n-gram tables; draft defaults to the target.
//   "perturbed" — target is a nested zipf/table spec, draft is its
//                 beta-blend corruption.
struct ModelsSpec {
  std::string kind;
  std::int32_t vocab_size = 0;

  // zipf
  double alpha = 1.0;
  std::uint64_t seed = 0;
  bool permute_per_context = false;

  // table
  std::int32_t order = 1;
  TableSpec target_table;
  std::optional<TableSpec> draft_table;

  // perturbed
  std::shared_ptr<ModelsSpec> target;  // zipf or table only
  double beta = 1.0;
  std::uint64_t noise_seed = 0;
};

struct DecodeSpec {
  std::string mode = "greedy";  // "greedy" | "stochastic"
  std::int64_t max_new_tokens = 64;
  std::optional<TokenId> stop_token;
  std::uint64_t seed = 1;
  std::int32_t num_prompts = 8;
  std::int32_t prompt_len = 4;
};

struct RunConfig {
  ModelsSpec models;
  ExpansionPolicy policy = TalonPolicy{};
  DecodeSpec decode;
  double speedup_c = 0.1;
};

struct SweepSpec {
  std::string axis;  // "mu" | "N" | "init_layers" | "beta"
  std::vector<double> values;
  RunConfig base;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);

// Canonical JSON for a config; parse(serialize(c)) reproduces c exactly.
std::string serialize_run_config(const RunConfig& config);

SweepSpec parse_sweep_spec(const std::string& json_text);
SweepSpec load_sweep_spec(const std::filesystem::path& path);

// The realized draft/target pair plus the alignment dial when one exists.
struct ModelPair {
  std::shared_ptr<const SequenceModel> draft;
  std::shared_ptr<const SequenceModel> target;
  std::optional<double> beta;
};

// Instantiates the models named by the spec.  Invalid distributions or
// parameters surface as ConfigError.
ModelPair build_models(const ModelsSpec& spec);

bool operator==(const TableSpec& a, const TableSpec& b);
bool operator==(const ModelsSpec& a, const ModelsSpec& b);
bool operator==(const DecodeSpec& a, const DecodeSpec& b);
bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace speclab
