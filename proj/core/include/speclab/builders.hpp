#pragma once

// Draft-tree construction policies.
//
// Three ways to spend a node budget on speculation:
//
//  * chain  — one path of gamma tokens, the classic draft-and-verify shape.
//  * eagle  — fixed-shape baseline: every layer proposes top-K children per
//             parent, shrinks the union back to the K best path scores, and
//             the finished tree is pruned to the N best nodes.  Depth and
//             draft cost are constants of the policy.
//  * talon  — budget-driven adaptive construction: expansion keeps claiming
//             layers until the node budget N is spent.  The first
//             init_layers layers take the top-K pool entries outright
//             (path scores carry no signal yet); every later layer keeps
//             exactly the candidates whose path score clears a confidence
//             gate mu * m_d, where m_d is the best score in the layer's
//             pool.  Aligned models yield deep chains, uncertain ones yield
//             shallow bushes, and the node count lands on N either way.
//
// All selection uses one total order — descending path_prob, then ascending
// parent id, then ascending token id — so builds are fully deterministic
// and reproducible across platforms.

#include <cstdint>
#include <variant>
#include <vector>

#include "speclab/models.hpp"
#include "speclab/random.hpp"
#include "speclab/tree.hpp"

namespace speclab {

struct ChainPolicy {
  std::int32_t gamma = 4;  // drafted tokens per step, >= 1

  friend bool operator==(const ChainPolicy&, const ChainPolicy&) = default;
};

struct StaticEaglePolicy {
  std::int32_t K = 10;  // per-layer width, >= 1
  std::int32_t D = 8;   // expansion iterations run d = 0..D
  std::int32_t N = 60;  // final node budget (root included), >= K + 1

  friend bool operator==(const StaticEaglePolicy&,
                         const StaticEaglePolicy&) = default;
};

struct TalonPolicy {
  std::int32_t N = 60;            // node budget, root included, >= 2
  std::int32_t K = 10;            // width of the un-gated init layers, >= 1
  double mu = 0.03;               // confidence-gate ratio, in (0, 1]
  std::int32_t init_layers = 1;   // layers built by top-K before gating starts

  friend bool operator==(const TalonPolicy&, const TalonPolicy&) = default;
};

using ExpansionPolicy = std::variant<ChainPolicy, StaticEaglePolicy, TalonPolicy>;

// Throws ParamError if any field is outside its documented range.
void validate_policy(const ExpansionPolicy& policy);

// "chain" | "eagle" | "talon" — the names used in configs and CSV output.
const char* policy_name(const ExpansionPolicy& policy);

// One candidate continuation: child `token` under `parent`, with the
// single-step draft probability and the resulting path score.
struct PoolEntry {
  NodeId parent;
  TokenId token = 0;
  double path_prob = 0.0;
  double draft_prob = 0.0;

  friend bool operator==(const PoolEntry&, const PoolEntry&) = default;
};

// All positive-probability continuations of one layer's parents, ordered by
// (parent id ascending, token ascending).  Zero-probability tokens and path
// scores that underflow kProbUnderflow are never materialized.
struct CandidatePool {
  std::vector<PoolEntry> entries;
};

// Result of selecting a layer from a pool.  `anchor` is the best path score
// seen in the pool (the gate's reference point m_d); truncated_by_budget
// records that selection wanted more nodes than the remaining budget allowed.
struct GateOutcome {
  std::vector<PoolEntry> kept;
  double anchor = 0.0;
  bool truncated_by_budget = false;
};

// The shared selection order: descending path_prob, ties broken by ascending
// parent id, then ascending token id.
bool pool_entry_before(const PoolEntry& a, const PoolEntry& b);

// Evaluates the draft model once per parent and collects every surviving
// continuation.  Parents must be non-empty (InputError), all on one depth of
// `tree` (StructuralError if not, or if any id is unknown).
CandidatePool gather_pool(const DraftTree& tree,
                          const std::vector<NodeId>& parents,
                          const SequenceModel& model, const Context& ctx);

// Confidence gate: keeps entries with path_prob >= mu * anchor, orders them
// by the selection order, and truncates to remaining_budget.  The arg-max
// entry always survives when any budget remains.  Empty pool: GatingError;
// mu outside (0, 1]: ParamError.
GateOutcome gate_layer(const CandidatePool& pool, double mu,
                       std::size_t remaining_budget);

// Init-layer selection: the min(K, pool, remaining_budget) best entries in
// the selection order.  Empty pool: GatingError; K < 1: ParamError.
GateOutcome init_top_k(const CandidatePool& pool, std::int32_t K,
                       std::size_t remaining_budget);

// The fixed-shape per-layer step: top-K of each parent's distribution by
// draft_prob (ties toward lower token ids), then the union shrunk to the K
// best path scores.  Factored out so the layer-kernel benchmark can check
// its optimized implementations against the same selection.
std::vector<PoolEntry> static_layer_select(const CandidatePool& pool,
                                           std::int32_t K);

// Budget-driven adaptive construction.  `ctx` must be non-empty
// (InputError); the root adopts its last token.
DraftTree build_talon(const SequenceModel& model, const Context& ctx,
                      const TalonPolicy& policy);

// Fixed-width, fixed-depth construction with a final prune to the N best
// path scores (ancestor-closed by construction of the order).
DraftTree build_static(const SequenceModel& model, const Context& ctx,
                       const StaticEaglePolicy& policy);

// Single-path draft of gamma tokens chosen by argmax.
DraftTree build_chain(const SequenceModel& model, const Context& ctx,
                      const ChainPolicy& policy);

// Single-path draft of gamma tokens sampled from the draft model.
DraftTree build_chain(const SequenceModel& model, const Context& ctx,
                      const ChainPolicy& policy, Rng& rng);

// Draft-model forward passes charged for a tree built under `policy`:
// gamma for chains, D + 1 for the static baseline (its cost is locked by
// shape), the realized depth for talon (one forward per claimed layer).
// Throws InputError when the tree shape contradicts the policy.
std::int64_t draft_forwards(const DraftTree& tree,
                            const ExpansionPolicy& policy);

}  // namespace speclab
