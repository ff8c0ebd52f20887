#pragma once

// Lossless verification of a draft tree against the target model.
//
// Greedy mode walks the target's argmax path through the tree: the longest
// drafted prefix matching the argmax chain is accepted and the first
// divergence (or the step past a leaf) supplies the correction token.  The
// committed output is, token for token, what target-only greedy decoding
// would have produced.
//
// Stochastic mode plays speculative sampling against the materialized
// children of each visited node.  At a node with residual target
// distribution q and not-yet-rejected children S, the single-step draft
// probabilities renormalized over S form the proposal p-hat; a trial child w
// is drawn from p-hat and accepted with probability min(1, q(w) / p-hat(w)).
// Rejection folds the proposal into the residual — q becomes
// normalize(max(q - p-hat, 0)) — removes w from S, and renormalizes the
// proposal over the survivors.  When S runs dry (or the walk reaches a
// leaf), the correction token is sampled from the current q.  Drawing the
// trial child from the proposal rather than visiting children in a fixed
// order is what makes the committed token exactly q-distributed for trees
// whose children were chosen deterministically; a fixed visiting order with
// the same acceptance ratio would inflate the first child's share.  With a
// seeded generator the whole walk is reproducible.
//
// Cost accounting: one verification step consumes one target forward pass
// regardless of tree size — the per-node next_dist calls below simulate the
// single masked forward over the whole tree that a batched implementation
// would run.

#include <cstdint>
#include <optional>
#include <vector>

#include "speclab/models.hpp"
#include "speclab/random.hpp"
#include "speclab/tree.hpp"

namespace speclab {

// One offered child: its depth, its rank among siblings (1 = highest
// draft_prob, ties toward lower token ids), and whether the verifier
// accepted it.  Every child of every visited node yields a record.
struct AcceptanceRecord {
  NodeId node;
  std::uint32_t depth = 0;
  std::int32_t rank = 0;
  bool accepted = false;
};

struct VerificationOutcome {
  std::vector<NodeId> accepted_path;  // root excluded, in walk order
  TokenId correction_token = 0;
  std::vector<AcceptanceRecord> records;

  std::size_t accepted_count() const { return accepted_path.size(); }
};

// Elementwise normalize(max(q - p, 0)) over two equal-length probability
// vectors.  Throws InputError on length mismatch or when the clipped vector
// has no mass left.
std::vector<double> residual_distribution(const std::vector<double>& q,
                                          const std::vector<double>& p);

VerificationOutcome verify_greedy(const DraftTree& tree,
                                  const SequenceModel& target,
                                  const Context& ctx);

VerificationOutcome verify_stochastic(const DraftTree& tree,
                                      const SequenceModel& target,
                                      const Context& ctx, Rng& rng);

// The committed context: ctx, then the accepted path's tokens, then the
// correction token.
Context commit(const Context& ctx, const DraftTree& tree,
               const VerificationOutcome& outcome);

}  // namespace speclab
