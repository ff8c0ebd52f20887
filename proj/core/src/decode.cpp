#include "speclab/decode.hpp"

#include <algorithm>

namespace speclab {
namespace {

DraftTree build_tree(const SequenceModel& draft, const Context& ctx,
                     const ExpansionPolicy& policy, bool greedy, Rng& rng) {
  if (const auto* chain = std::get_if<ChainPolicy>(&policy))
    return greedy ? build_chain(draft, ctx, *chain)
                  : build_chain(draft, ctx, *chain, rng);
  if (const auto* eagle = std::get_if<StaticEaglePolicy>(&policy))
    return build_static(draft, ctx, *eagle);
  return build_talon(draft, ctx, std::get<TalonPolicy>(policy));
}

}  // namespace

DecodeResult decode(const SequenceModel& draft, const SequenceModel& target,
                    const Context& prompt, const ExpansionPolicy& policy,
                    const DecodeParams& params, Rng& rng) {
  validate_policy(policy);
  if (params.max_new_tokens < 1)
    throw ParamError("decode max_new_tokens must be at least 1");
  if (prompt.tokens.empty()) throw InputError("decode needs a non-empty prompt");

  DecodeResult result;
  result.context = prompt;
  while (result.new_tokens < params.max_new_tokens) {
    const DraftTree tree =
        build_tree(draft, result.context, policy, params.greedy, rng);
    const VerificationOutcome outcome =
        params.greedy ? verify_greedy(tree, target, result.context)
                      : verify_stochastic(tree, target, result.context, rng);
    const std::int64_t forwards = draft_forwards(tree, policy);

    std::vector<TokenId> step_tokens;
    step_tokens.reserve(outcome.accepted_count() + 1);
    for (NodeId id : outcome.accepted_path)
      step_tokens.push_back(tree.node(id).token);
    step_tokens.push_back(outcome.correction_token);

    // A committed stop token ends the run; drafted tokens past it are
    // discarded.
    std::int64_t committed = static_cast<std::int64_t>(step_tokens.size());
    bool stopped = false;
    if (params.stop_token) {
      const auto hit = std::find(step_tokens.begin(), step_tokens.end(),
                                 *params.stop_token);
      if (hit != step_tokens.end()) {
        committed = (hit - step_tokens.begin()) + 1;
        stopped = true;
      }
    }

    record_step(result.metrics, outcome, forwards, committed);
    result.context.tokens.insert(result.context.tokens.end(),
                                 step_tokens.begin(),
                                 step_tokens.begin() + committed);
    result.new_tokens += committed;
    if (stopped) break;
  }
  return result;
}

}  // namespace speclab
