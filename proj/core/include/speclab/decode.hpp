#pragma once

// The full speculative decoding loop: build a draft tree, verify it against
// the target, commit the survivors, repeat until enough tokens are out.

#include <cstdint>
#include <optional>

#include "speclab/builders.hpp"
#include "speclab/metrics.hpp"
#include "speclab/verify.hpp"

namespace speclab {

struct DecodeParams {
  std::int64_t max_new_tokens = 64;     // >= 1
  bool greedy = true;                   // greedy vs stochastic verification
  std::optional<TokenId> stop_token;    // ends decoding once committed
};

struct DecodeResult {
  Context context;       // prompt plus everything committed
  std::int64_t new_tokens = 0;
  RunMetrics metrics;
};

// Runs build -> verify -> commit steps until at least max_new_tokens have
// been committed or the stop token lands.  Drafted tokens past a committed
// stop are discarded, and the final (possibly truncated) step is recorded
// with the count it actually contributed.  `rng` feeds stochastic chain
// drafting and stochastic verification; greedy decoding with deterministic
// builders never touches it, so the same seed gives the same bytes out.
//
// Throws ParamError for max_new_tokens < 1 and InputError for an empty
// prompt (the tree root adopts the prompt's last token).
DecodeResult decode(const SequenceModel& draft, const SequenceModel& target,
                    const Context& prompt, const ExpansionPolicy& policy,
                    const DecodeParams& params, Rng& rng);

}  // namespace speclab
