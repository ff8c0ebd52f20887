#include "speclab/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace speclab {
namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError(field + ": " + what);
}

const Json& require(const Json& obj, const std::string& field,
                    const std::string& prefix) {
  if (!obj.contains(field)) fail(prefix + field, "missing");
  return obj.at(field);
}

double get_number(const Json& obj, const std::string& field,
                  const std::string& prefix) {
  const Json& v = require(obj, field, prefix);
  if (!v.is_number()) fail(prefix + field, "must be a number");
  return v.get<double>();
}

std::int64_t get_integer(const Json& obj, const std::string& field,
                         const std::string& prefix) {
  const Json& v = require(obj, field, prefix);
  if (!v.is_number_integer()) fail(prefix + field, "must be an integer");
  return v.get<std::int64_t>();
}

std::uint64_t get_u64(const Json& obj, const std::string& field,
                      const std::string& prefix, std::uint64_t fallback) {
  if (!obj.contains(field)) return fallback;
  const Json& v = obj.at(field);
  if (!v.is_number_unsigned() && !v.is_number_integer())
    fail(prefix + field, "must be an unsigned integer");
  if (v.is_number_integer() && v.get<std::int64_t>() < 0)
    fail(prefix + field, "must be non-negative");
  return v.get<std::uint64_t>();
}

std::string get_string(const Json& obj, const std::string& field,
                       const std::string& prefix) {
  const Json& v = require(obj, field, prefix);
  if (!v.is_string()) fail(prefix + field, "must be a string");
  return v.get<std::string>();
}

std::vector<TokenId> parse_suffix_key(const std::string& key,
                                      const std::string& prefix) {
  std::vector<TokenId> tokens;
  std::stringstream ss(key);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      const int value = std::stoi(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
      tokens.push_back(static_cast<TokenId>(value));
    } catch (const std::exception&) {
      fail(prefix, "key '" + key + "' is not a comma-joined token list");
    }
  }
  if (tokens.empty()) fail(prefix, "key '" + key + "' is empty");
  return tokens;
}

std::vector<double> parse_prob_array(const Json& v, const std::string& field) {
  if (!v.is_array()) fail(field, "must be an array of probabilities");
  std::vector<double> probs;
  probs.reserve(v.size());
  for (const Json& p : v) {
    if (!p.is_number()) fail(field, "must contain only numbers");
    probs.push_back(p.get<double>());
  }
  return probs;
}

TableSpec parse_table_spec(const Json& obj, const std::string& prefix) {
  TableSpec spec;
  const Json& entries = require(obj, "entries", prefix);
  if (!entries.is_object()) fail(prefix + "entries", "must be an object");
  for (const auto& [key, value] : entries.items())
    spec.entries[parse_suffix_key(key, prefix + "entries")] =
        parse_prob_array(value, prefix + "entries." + key);
  spec.fallback =
      parse_prob_array(require(obj, "fallback", prefix), prefix + "fallback");
  return spec;
}

ModelsSpec parse_models(const Json& obj, const std::string& prefix,
                        bool allow_perturbed) {
  if (!obj.is_object()) fail(prefix, "must be an object");
  ModelsSpec spec;
  spec.kind = get_string(obj, "kind", prefix + ".");
  const std::string p = prefix + ".";

  if (spec.kind == "zipf") {
    spec.vocab_size =
        static_cast<std::int32_t>(get_integer(obj, "vocab_size", p));
    if (spec.vocab_size < 2) fail(p + "vocab_size", "must be at least 2");
    spec.alpha = get_number(obj, "alpha", p);
    if (!(spec.alpha > 0.0)) fail(p + "alpha", "must be positive");
    spec.seed = get_u64(obj, "seed", p, 0);
    if (obj.contains("permute_per_context")) {
      if (!obj.at("permute_per_context").is_boolean())
        fail(p + "permute_per_context", "must be a boolean");
      spec.permute_per_context = obj.at("permute_per_context").get<bool>();
    }
  } else if (spec.kind == "table") {
    spec.vocab_size =
        static_cast<std::int32_t>(get_integer(obj, "vocab_size", p));
    if (spec.vocab_size < 2) fail(p + "vocab_size", "must be at least 2");
    spec.order = static_cast<std::int32_t>(get_integer(obj, "order", p));
    if (spec.order < 1) fail(p + "order", "must be at least 1");
    spec.target_table =
        parse_table_spec(require(obj, "target", p), p + "target.");
    if (obj.contains("draft"))
      spec.draft_table = parse_table_spec(obj.at("draft"), p + "draft.");
  } else if (spec.kind == "perturbed") {
    if (!allow_perturbed)
      fail(p + "kind", "perturbed pairs cannot nest");
    spec.target = std::make_shared<ModelsSpec>(
        parse_models(require(obj, "target", p), prefix + ".target", false));
    spec.vocab_size = spec.target->vocab_size;
    spec.beta = get_number(obj, "beta", p);
    if (!(spec.beta >= 0.0 && spec.beta <= 1.0))
      fail(p + "beta", "must lie in [0, 1]");
    spec.noise_seed = get_u64(obj, "noise_seed", p, 0);
  } else {
    fail(p + "kind", "must be one of zipf, table, perturbed");
  }
  return spec;
}

ExpansionPolicy parse_policy(const Json& obj) {
  if (!obj.is_object()) fail("policy", "must be an object");
  const std::string type = get_string(obj, "type", "policy.");
  try {
    if (type == "chain") {
      ChainPolicy policy;
      if (obj.contains("gamma"))
        policy.gamma =
            static_cast<std::int32_t>(get_integer(obj, "gamma", "policy."));
      validate_policy(ExpansionPolicy{policy});
      return policy;
    }
    if (type == "eagle") {
      StaticEaglePolicy policy;
      if (obj.contains("K"))
        policy.K = static_cast<std::int32_t>(get_integer(obj, "K", "policy."));
      if (obj.contains("D"))
        policy.D = static_cast<std::int32_t>(get_integer(obj, "D", "policy."));
      if (obj.contains("N"))
        policy.N = static_cast<std::int32_t>(get_integer(obj, "N", "policy."));
      validate_policy(ExpansionPolicy{policy});
      return policy;
    }
    if (type == "talon") {
      TalonPolicy policy;
      if (obj.contains("N"))
        policy.N = static_cast<std::int32_t>(get_integer(obj, "N", "policy."));
      if (obj.contains("K"))
        policy.K = static_cast<std::int32_t>(get_integer(obj, "K", "policy."));
      if (obj.contains("mu")) policy.mu = get_number(obj, "mu", "policy.");
      if (obj.contains("init_layers"))
        policy.init_layers = static_cast<std::int32_t>(
            get_integer(obj, "init_layers", "policy."));
      validate_policy(ExpansionPolicy{policy});
      return policy;
    }
  } catch (const ParamError& e) {
    fail("policy", e.what());
  }
  fail("policy.type", "must be one of chain, eagle, talon");
}

DecodeSpec parse_decode(const Json& obj) {
  DecodeSpec spec;
  if (obj.is_null()) return spec;
  if (!obj.is_object()) fail("decode", "must be an object");
  if (obj.contains("mode")) {
    spec.mode = get_string(obj, "mode", "decode.");
    if (spec.mode != "greedy" && spec.mode != "stochastic")
      fail("decode.mode", "must be greedy or stochastic");
  }
  if (obj.contains("max_new_tokens")) {
    spec.max_new_tokens = get_integer(obj, "max_new_tokens", "decode.");
    if (spec.max_new_tokens < 1)
      fail("decode.max_new_tokens", "must be at least 1");
  }
  if (obj.contains("stop_token") && !obj.at("stop_token").is_null()) {
    const std::int64_t stop = get_integer(obj, "stop_token", "decode.");
    if (stop < 0) fail("decode.stop_token", "must be non-negative");
    spec.stop_token = static_cast<TokenId>(stop);
  }
  spec.seed = get_u64(obj, "seed", "decode.", 1);
  if (obj.contains("num_prompts")) {
    spec.num_prompts =
        static_cast<std::int32_t>(get_integer(obj, "num_prompts", "decode."));
    if (spec.num_prompts < 1) fail("decode.num_prompts", "must be at least 1");
  }
  if (obj.contains("prompt_len")) {
    spec.prompt_len =
        static_cast<std::int32_t>(get_integer(obj, "prompt_len", "decode."));
    if (spec.prompt_len < 1) fail("decode.prompt_len", "must be at least 1");
  }
  return spec;
}

Json table_to_json(const TableSpec& table) {
  Json entries = Json::object();
  for (const auto& [key, dist] : table.entries) {
    std::string joined;
    for (std::size_t i = 0; i < key.size(); ++i) {
      if (i) joined += ',';
      joined += std::to_string(key[i]);
    }
    entries[joined] = dist;
  }
  return Json{{"entries", std::move(entries)}, {"fallback", table.fallback}};
}

Json models_to_json(const ModelsSpec& spec) {
  Json obj;
  obj["kind"] = spec.kind;
  if (spec.kind == "zipf") {
    obj["vocab_size"] = spec.vocab_size;
    obj["alpha"] = spec.alpha;
    obj["seed"] = spec.seed;
    obj["permute_per_context"] = spec.permute_per_context;
  } else if (spec.kind == "table") {
    obj["vocab_size"] = spec.vocab_size;
    obj["order"] = spec.order;
    obj["target"] = table_to_json(spec.target_table);
    if (spec.draft_table) obj["draft"] = table_to_json(*spec.draft_table);
  } else {
    obj["target"] = models_to_json(*spec.target);
    obj["beta"] = spec.beta;
    obj["noise_seed"] = spec.noise_seed;
  }
  return obj;
}

Json policy_to_json(const ExpansionPolicy& policy) {
  Json obj;
  if (const auto* chain = std::get_if<ChainPolicy>(&policy)) {
    obj["type"] = "chain";
    obj["gamma"] = chain->gamma;
  } else if (const auto* eagle = std::get_if<StaticEaglePolicy>(&policy)) {
    obj["type"] = "eagle";
    obj["K"] = eagle->K;
    obj["D"] = eagle->D;
    obj["N"] = eagle->N;
  } else {
    const auto& talon = std::get<TalonPolicy>(policy);
    obj["type"] = "talon";
    obj["N"] = talon.N;
    obj["K"] = talon.K;
    obj["mu"] = talon.mu;
    obj["init_layers"] = talon.init_layers;
  }
  return obj;
}

Json parse_text(const std::string& json_text, const std::string& what) {
  Json parsed = Json::parse(json_text, nullptr, false);
  if (parsed.is_discarded()) fail(what, "is not valid JSON");
  return parsed;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  const Json root = parse_text(json_text, "config");
  if (!root.is_object()) fail("config", "must be a JSON object");

  RunConfig config;
  config.models =
      parse_models(require(root, "models", ""), "models", true);
  config.policy = parse_policy(require(root, "policy", ""));
  config.decode =
      root.contains("decode") ? parse_decode(root.at("decode")) : DecodeSpec{};
  if (root.contains("speedup_c")) {
    if (!root.at("speedup_c").is_number())
      fail("speedup_c", "must be a number");
    config.speedup_c = root.at("speedup_c").get<double>();
    if (!(config.speedup_c >= 0.0)) fail("speedup_c", "must be non-negative");
  }
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str());
}

std::string serialize_run_config(const RunConfig& config) {
  Json root;
  root["models"] = models_to_json(config.models);
  root["policy"] = policy_to_json(config.policy);
  Json decode;
  decode["mode"] = config.decode.mode;
  decode["max_new_tokens"] = config.decode.max_new_tokens;
  if (config.decode.stop_token)
    decode["stop_token"] = *config.decode.stop_token;
  else
    decode["stop_token"] = nullptr;
  decode["seed"] = config.decode.seed;
  decode["num_prompts"] = config.decode.num_prompts;
  decode["prompt_len"] = config.decode.prompt_len;
  root["decode"] = std::move(decode);
  root["speedup_c"] = config.speedup_c;
  return root.dump(2) + "\n";
}

SweepSpec parse_sweep_spec(const std::string& json_text) {
  const Json root = parse_text(json_text, "sweep");
  if (!root.is_object()) fail("sweep", "must be a JSON object");

  SweepSpec spec;
  spec.axis = get_string(root, "axis", "");
  if (spec.axis != "mu" && spec.axis != "N" && spec.axis != "init_layers" &&
      spec.axis != "beta")
    fail("axis", "must be one of mu, N, init_layers, beta");
  const Json& values = require(root, "values", "");
  if (!values.is_array() || values.empty())
    fail("values", "must be a non-empty array");
  for (const Json& v : values) {
    if (!v.is_number()) fail("values", "must contain only numbers");
    spec.values.push_back(v.get<double>());
  }
  const Json& base = require(root, "base", "");
  if (base.is_string())
    spec.base = load_run_config(base.get<std::string>());
  else
    spec.base = parse_run_config(base.dump());
  return spec;
}

SweepSpec load_sweep_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sweep spec " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_sweep_spec(buffer.str());
}

namespace {

std::shared_ptr<const SequenceModel> build_single(const ModelsSpec& spec) {
  try {
    if (spec.kind == "zipf")
      return std::make_shared<ZipfModel>(Vocab(spec.vocab_size), spec.alpha,
                                         spec.seed, spec.permute_per_context);
    if (spec.kind == "table") {
      std::map<std::vector<TokenId>, Distribution> table;
      for (const auto& [key, dist] : spec.target_table.entries)
        table.emplace(key, Distribution(dist));
      return std::make_shared<TableModel>(
          Vocab(spec.vocab_size), spec.order, std::move(table),
          Distribution(spec.target_table.fallback));
    }
  } catch (const Error& e) {
    throw ConfigError("models: " + std::string(e.what()));
  }
  throw ConfigError("models.kind: cannot build '" + spec.kind + "'");
}

std::shared_ptr<const SequenceModel> build_draft_table(const ModelsSpec& spec) {
  try {
    std::map<std::vector<TokenId>, Distribution> table;
    for (const auto& [key, dist] : spec.draft_table->entries)
      table.emplace(key, Distribution(dist));
    return std::make_shared<TableModel>(
        Vocab(spec.vocab_size), spec.order, std::move(table),
        Distribution(spec.draft_table->fallback));
  } catch (const Error& e) {
    throw ConfigError("models.draft: " + std::string(e.what()));
  }
}

}  // namespace

ModelPair build_models(const ModelsSpec& spec) {
  ModelPair pair;
  if (spec.kind == "perturbed") {
    if (!spec.target) throw ConfigError("models.target: missing");
    pair.target = build_single(*spec.target);
    try {
      PerturbedPair perturbed(pair.target, spec.beta, spec.noise_seed);
      pair.draft = perturbed.draft();
    } catch (const Error& e) {
      throw ConfigError("models: " + std::string(e.what()));
    }
    pair.beta = spec.beta;
    return pair;
  }
  pair.target = build_single(spec);
  pair.draft = (spec.kind == "table" && spec.draft_table)
                   ? build_draft_table(spec)
                   : pair.target;
  return pair;
}

bool operator==(const TableSpec& a, const TableSpec& b) {
  return a.entries == b.entries && a.fallback == b.fallback;
}

bool operator==(const ModelsSpec& a, const ModelsSpec& b) {
  if (a.kind != b.kind || a.vocab_size != b.vocab_size) return false;
  if (a.kind == "zipf")
    return a.alpha == b.alpha && a.seed == b.seed &&
           a.permute_per_context == b.permute_per_context;
  if (a.kind == "table")
    return a.order == b.order && a.target_table == b.target_table &&
           a.draft_table == b.draft_table;
  const bool both = a.target && b.target;
  return both && *a.target == *b.target && a.beta == b.beta &&
         a.noise_seed == b.noise_seed;
}

bool operator==(const DecodeSpec& a, const DecodeSpec& b) {
  return a.mode == b.mode && a.max_new_tokens == b.max_new_tokens &&
         a.stop_token == b.stop_token && a.seed == b.seed &&
         a.num_prompts == b.num_prompts && a.prompt_len == b.prompt_len;
}

bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.models == b.models && a.policy == b.policy &&
         a.decode == b.decode && a.speedup_c == b.speedup_c;
}

}  // namespace speclab
