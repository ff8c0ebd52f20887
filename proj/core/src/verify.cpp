#include "speclab/verify.hpp"

#include <algorithm>

namespace speclab {
namespace {

// Children of `node` in trial order: descending draft_prob, ties toward the
// lower token id.  Index in the returned vector + 1 is the sibling rank.
std::vector<NodeId> ranked_children(const DraftTree& tree, NodeId node) {
  std::vector<NodeId> kids = tree.children(node);
  std::sort(kids.begin(), kids.end(), [&tree](NodeId a, NodeId b) {
    const TreeNode& na = tree.node(a);
    const TreeNode& nb = tree.node(b);
    if (na.draft_prob != nb.draft_prob) return na.draft_prob > nb.draft_prob;
    return na.token < nb.token;
  });
  return kids;
}

void record_children(const DraftTree& tree, const std::vector<NodeId>& ranked,
                     std::optional<NodeId> accepted,
                     std::vector<AcceptanceRecord>& records) {
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    AcceptanceRecord rec;
    rec.node = ranked[i];
    rec.depth = tree.node(ranked[i]).depth;
    rec.rank = static_cast<std::int32_t>(i + 1);
    rec.accepted = accepted && *accepted == ranked[i];
    records.push_back(rec);
  }
}

}  // namespace

std::vector<double> residual_distribution(const std::vector<double>& q,
                                          const std::vector<double>& p) {
  if (q.size() != p.size())
    throw InputError("residual_distribution length mismatch");
  std::vector<double> r(q.size());
  double sum = 0.0;
  for (std::size_t t = 0; t < q.size(); ++t) {
    r[t] = std::max(q[t] - p[t], 0.0);
    sum += r[t];
  }
  if (sum <= 0.0)
    throw InputError("residual_distribution has no mass left");
  for (double& v : r) v /= sum;
  return r;
}

VerificationOutcome verify_greedy(const DraftTree& tree,
                                  const SequenceModel& target,
                                  const Context& ctx) {
  VerificationOutcome out;
  Context here = ctx;
  NodeId node = tree.root();
  for (;;) {
    const Distribution q = target.next_dist(here);
    const TokenId want = argmax_token(q);
    const std::vector<NodeId> ranked = ranked_children(tree, node);

    std::optional<NodeId> match;
    for (NodeId child : ranked)
      if (tree.node(child).token == want) {
        match = child;
        break;
      }
    record_children(tree, ranked, match, out.records);

    if (!match) {
      out.correction_token = want;
      return out;
    }
    out.accepted_path.push_back(*match);
    here.tokens.push_back(want);
    node = *match;
  }
}

VerificationOutcome verify_stochastic(const DraftTree& tree,
                                      const SequenceModel& target,
                                      const Context& ctx, Rng& rng) {
  VerificationOutcome out;
  Context here = ctx;
  NodeId node = tree.root();
  for (;;) {
    std::vector<double> q = target.next_dist(here).probs();
    const std::vector<NodeId> ranked = ranked_children(tree, node);

    // Not-yet-rejected siblings, kept in trial (rank) order.
    std::vector<NodeId> remaining = ranked;
    std::optional<NodeId> accepted;
    while (!remaining.empty()) {
      double denom = 0.0;
      for (NodeId id : remaining) denom += tree.node(id).draft_prob;

      // Draw the trial child from the renormalized sibling proposal.
      const double u_pick = uniform01(rng);
      std::size_t pick = remaining.size() - 1;
      double cum = 0.0;
      for (std::size_t i = 0; i < remaining.size(); ++i) {
        cum += tree.node(remaining[i]).draft_prob / denom;
        if (u_pick < cum) {
          pick = i;
          break;
        }
      }
      const NodeId w = remaining[pick];
      const TreeNode& wn = tree.node(w);
      const double proposal_w = wn.draft_prob / denom;
      const double q_w = q[static_cast<std::size_t>(wn.token)];
      const double ratio = std::min(1.0, q_w / proposal_w);

      if (uniform01(rng) < ratio) {
        accepted = w;
        break;
      }

      // Fold the proposal into the residual and drop the rejected child.
      std::vector<double> proposal(q.size(), 0.0);
      for (NodeId id : remaining) {
        const TreeNode& n = tree.node(id);
        proposal[static_cast<std::size_t>(n.token)] = n.draft_prob / denom;
      }
      q = residual_distribution(q, proposal);
      remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
    }

    record_children(tree, ranked, accepted, out.records);

    if (!accepted) {
      out.correction_token = pick_by_cdf(Distribution(q), uniform01(rng));
      return out;
    }
    out.accepted_path.push_back(*accepted);
    here.tokens.push_back(tree.node(*accepted).token);
    node = *accepted;
  }
}

Context commit(const Context& ctx, const DraftTree& tree,
               const VerificationOutcome& outcome) {
  Context out = ctx;
  for (NodeId id : outcome.accepted_path)
    out.tokens.push_back(tree.node(id).token);
  out.tokens.push_back(outcome.correction_token);
  return out;
}

}  // namespace speclab
