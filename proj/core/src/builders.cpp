#include "speclab/builders.hpp"

#include <algorithm>
#include <string>

namespace speclab {
namespace {

Context extended_context(const Context& ctx, const DraftTree& tree, NodeId id) {
  Context out = ctx;
  for (TokenId t : tree.path_tokens(id)) out.tokens.push_back(t);
  return out;
}

std::vector<ChildSpec> to_child_specs(const std::vector<PoolEntry>& kept) {
  std::vector<ChildSpec> specs;
  specs.reserve(kept.size());
  for (const PoolEntry& e : kept)
    specs.push_back({e.parent, e.token, e.draft_prob});
  return specs;
}

}  // namespace

void validate_policy(const ExpansionPolicy& policy) {
  if (const auto* chain = std::get_if<ChainPolicy>(&policy)) {
    if (chain->gamma < 1) throw ParamError("chain gamma must be at least 1");
  } else if (const auto* eagle = std::get_if<StaticEaglePolicy>(&policy)) {
    if (eagle->K < 1) throw ParamError("eagle K must be at least 1");
    if (eagle->D < 0) throw ParamError("eagle D must be non-negative");
    if (eagle->N < eagle->K + 1)
      throw ParamError("eagle N must be at least K + 1");
  } else {
    const auto& talon = std::get<TalonPolicy>(policy);
    if (talon.N < 2) throw ParamError("talon N must be at least 2");
    if (talon.K < 1) throw ParamError("talon K must be at least 1");
    if (!(talon.mu > 0.0 && talon.mu <= 1.0))
      throw ParamError("talon mu must lie in (0, 1]");
    if (talon.init_layers < 1)
      throw ParamError("talon init_layers must be at least 1");
  }
}

const char* policy_name(const ExpansionPolicy& policy) {
  if (std::holds_alternative<ChainPolicy>(policy)) return "chain";
  if (std::holds_alternative<StaticEaglePolicy>(policy)) return "eagle";
  return "talon";
}

bool pool_entry_before(const PoolEntry& a, const PoolEntry& b) {
  if (a.path_prob != b.path_prob) return a.path_prob > b.path_prob;
  if (a.parent != b.parent) return a.parent < b.parent;
  return a.token < b.token;
}

CandidatePool gather_pool(const DraftTree& tree,
                          const std::vector<NodeId>& parents,
                          const SequenceModel& model, const Context& ctx) {
  if (parents.empty()) throw InputError("gather_pool needs at least one parent");
  std::vector<NodeId> ordered = parents;
  std::sort(ordered.begin(), ordered.end());
  const std::uint32_t depth = tree.node(ordered.front()).depth;
  for (NodeId p : ordered)
    if (tree.node(p).depth != depth)
      throw StructuralError("gather_pool parents span multiple depths");

  CandidatePool pool;
  for (NodeId p : ordered) {
    const double parent_path = tree.node(p).path_prob;
    const Distribution dist = model.next_dist(extended_context(ctx, tree, p));
    for (std::size_t t = 0; t < dist.size(); ++t) {
      const double dp = dist.probs()[t];
      if (dp <= 0.0) continue;
      const double path = parent_path * dp;
      if (path < kProbUnderflow) continue;
      pool.entries.push_back({p, static_cast<TokenId>(t), path, dp});
    }
  }
  return pool;
}

GateOutcome gate_layer(const CandidatePool& pool, double mu,
                       std::size_t remaining_budget) {
  if (!(mu > 0.0 && mu <= 1.0)) throw ParamError("gate mu must lie in (0, 1]");
  if (pool.entries.empty()) throw GatingError("gate_layer on an empty pool");

  GateOutcome out;
  for (const PoolEntry& e : pool.entries)
    out.anchor = std::max(out.anchor, e.path_prob);
  if (remaining_budget == 0) {
    out.truncated_by_budget = true;
    return out;
  }

  const double threshold = mu * out.anchor;
  for (const PoolEntry& e : pool.entries)
    if (e.path_prob >= threshold) out.kept.push_back(e);
  std::sort(out.kept.begin(), out.kept.end(), pool_entry_before);
  if (out.kept.size() > remaining_budget) {
    out.truncated_by_budget = true;
    out.kept.resize(remaining_budget);
  }
  return out;
}

GateOutcome init_top_k(const CandidatePool& pool, std::int32_t K,
                       std::size_t remaining_budget) {
  if (K < 1) throw ParamError("init_top_k K must be at least 1");
  if (pool.entries.empty()) throw GatingError("init_top_k on an empty pool");

  GateOutcome out;
  for (const PoolEntry& e : pool.entries)
    out.anchor = std::max(out.anchor, e.path_prob);
  if (remaining_budget == 0) {
    out.truncated_by_budget = true;
    return out;
  }

  std::vector<PoolEntry> sorted = pool.entries;
  std::sort(sorted.begin(), sorted.end(), pool_entry_before);
  const std::size_t want =
      std::min(sorted.size(), static_cast<std::size_t>(K));
  out.truncated_by_budget = want > remaining_budget;
  sorted.resize(std::min(want, remaining_budget));
  out.kept = std::move(sorted);
  return out;
}

std::vector<PoolEntry> static_layer_select(const CandidatePool& pool,
                                           std::int32_t K) {
  // Per-parent top-K by single-step probability, ties toward lower tokens.
  std::vector<PoolEntry> survivors;
  std::size_t begin = 0;
  while (begin < pool.entries.size()) {
    std::size_t end = begin;
    while (end < pool.entries.size() &&
           pool.entries[end].parent == pool.entries[begin].parent)
      ++end;
    std::vector<PoolEntry> group(pool.entries.begin() + begin,
                                 pool.entries.begin() + end);
    std::sort(group.begin(), group.end(),
              [](const PoolEntry& a, const PoolEntry& b) {
                if (a.draft_prob != b.draft_prob)
                  return a.draft_prob > b.draft_prob;
                return a.token < b.token;
              });
    if (group.size() > static_cast<std::size_t>(K))
      group.resize(static_cast<std::size_t>(K));
    survivors.insert(survivors.end(), group.begin(), group.end());
    begin = end;
  }

  // Union shrunk to the K best path scores under the selection order.
  std::sort(survivors.begin(), survivors.end(), pool_entry_before);
  if (survivors.size() > static_cast<std::size_t>(K))
    survivors.resize(static_cast<std::size_t>(K));
  return survivors;
}

DraftTree build_talon(const SequenceModel& model, const Context& ctx,
                      const TalonPolicy& policy) {
  validate_policy(policy);
  if (ctx.tokens.empty())
    throw InputError("build_talon needs a non-empty context");

  const auto budget = static_cast<std::size_t>(policy.N);
  DraftTree tree(ctx.tokens.back(), budget);
  std::vector<NodeId> parents{tree.root()};
  std::int32_t d = 0;
  while (tree.size() < budget) {
    const CandidatePool pool = gather_pool(tree, parents, model, ctx);
    if (pool.entries.empty()) break;  // all continuations underflowed
    const std::size_t remaining = budget - tree.size();
    const GateOutcome outcome = d < policy.init_layers
                                    ? init_top_k(pool, policy.K, remaining)
                                    : gate_layer(pool, policy.mu, remaining);
    if (outcome.kept.empty()) break;
    const std::vector<ChildSpec> specs = to_child_specs(outcome.kept);
    parents = tree.add_layer(specs);
    ++d;
  }
  return tree;
}

DraftTree build_static(const SequenceModel& model, const Context& ctx,
                       const StaticEaglePolicy& policy) {
  validate_policy(policy);

  const TokenId root_token = ctx.tokens.empty() ? kBeginMarker : ctx.tokens.back();
  const std::size_t working_budget =
      1 + static_cast<std::size_t>(policy.D + 1) *
              static_cast<std::size_t>(policy.K);
  DraftTree tree(root_token, working_budget);
  std::vector<NodeId> parents{tree.root()};
  for (std::int32_t d = 0; d <= policy.D; ++d) {
    const CandidatePool pool = gather_pool(tree, parents, model, ctx);
    if (pool.entries.empty()) break;
    const std::vector<PoolEntry> kept = static_layer_select(pool, policy.K);
    const std::vector<ChildSpec> specs = to_child_specs(kept);
    parents = tree.add_layer(specs);
  }

  // Prune to the N best path scores.  Nodes are ordered by descending
  // path_prob with ties broken by (parent id, token); the root sorts first
  // and every ancestor outranks its descendants, so the prefix is already
  // ancestor-closed.
  std::vector<NodeId> order;
  order.reserve(tree.size());
  for (const TreeNode& n : tree.nodes()) order.push_back(n.id);
  std::sort(order.begin(), order.end(), [&tree](NodeId a, NodeId b) {
    const TreeNode& na = tree.node(a);
    const TreeNode& nb = tree.node(b);
    if (na.path_prob != nb.path_prob) return na.path_prob > nb.path_prob;
    const std::int64_t pa = na.parent ? na.parent->index : -1;
    const std::int64_t pb = nb.parent ? nb.parent->index : -1;
    if (pa != pb) return pa < pb;
    return na.token < nb.token;
  });
  if (order.size() > static_cast<std::size_t>(policy.N))
    order.resize(static_cast<std::size_t>(policy.N));

  std::vector<bool> keep(tree.size(), false);
  for (NodeId id : order) keep[id.index] = true;
  for (NodeId id : order) {
    const auto& parent = tree.node(id).parent;
    if (parent && !keep[parent->index])
      throw StructuralError("static prune violated ancestor closure");
  }

  // Rebuild with the final budget, preserving creation order so ids stay
  // topological.
  DraftTree pruned(root_token, static_cast<std::size_t>(policy.N));
  std::vector<NodeId> remap(tree.size());
  remap[0] = pruned.root();
  for (std::uint32_t depth = 1; depth <= tree.max_depth(); ++depth) {
    std::vector<ChildSpec> specs;
    std::vector<std::uint32_t> original;
    for (NodeId id : tree.layers()[depth]) {
      if (!keep[id.index]) continue;
      const TreeNode& n = tree.node(id);
      specs.push_back({remap[n.parent->index], n.token, n.draft_prob});
      original.push_back(id.index);
    }
    if (specs.empty()) break;
    const std::vector<NodeId> ids = pruned.add_layer(specs);
    for (std::size_t i = 0; i < ids.size(); ++i) remap[original[i]] = ids[i];
  }
  return pruned;
}

namespace {

DraftTree build_chain_impl(const SequenceModel& model, const Context& ctx,
                           const ChainPolicy& policy, Rng* rng) {
  validate_policy(policy);

  const TokenId root_token = ctx.tokens.empty() ? kBeginMarker : ctx.tokens.back();
  DraftTree tree(root_token, static_cast<std::size_t>(policy.gamma) + 1);
  NodeId tip = tree.root();
  Context running = ctx;
  for (std::int32_t step = 0; step < policy.gamma; ++step) {
    const Distribution dist = model.next_dist(running);
    const TokenId token = rng ? sample(dist, *rng) : argmax_token(dist);
    const ChildSpec spec{tip, token, dist.at(token)};
    tip = tree.add_layer(std::span<const ChildSpec>(&spec, 1)).front();
    running.tokens.push_back(token);
  }
  return tree;
}

}  // namespace

DraftTree build_chain(const SequenceModel& model, const Context& ctx,
                      const ChainPolicy& policy) {
  return build_chain_impl(model, ctx, policy, nullptr);
}

DraftTree build_chain(const SequenceModel& model, const Context& ctx,
                      const ChainPolicy& policy, Rng& rng) {
  return build_chain_impl(model, ctx, policy, &rng);
}

std::int64_t draft_forwards(const DraftTree& tree,
                            const ExpansionPolicy& policy) {
  validate_policy(policy);
  if (const auto* chain = std::get_if<ChainPolicy>(&policy)) {
    const bool is_chain =
        tree.size() == static_cast<std::size_t>(chain->gamma) + 1 &&
        tree.max_depth() == static_cast<std::uint32_t>(chain->gamma);
    if (!is_chain)
      throw InputError("tree shape does not match the chain policy");
    return chain->gamma;
  }
  if (const auto* eagle = std::get_if<StaticEaglePolicy>(&policy)) {
    if (tree.size() > static_cast<std::size_t>(eagle->N) ||
        tree.max_depth() > static_cast<std::uint32_t>(eagle->D) + 1)
      throw InputError("tree shape does not match the eagle policy");
    return static_cast<std::int64_t>(eagle->D) + 1;
  }
  const auto& talon = std::get<TalonPolicy>(policy);
  if (tree.size() > static_cast<std::size_t>(talon.N))
    throw InputError("tree shape does not match the talon policy");
  return static_cast<std::int64_t>(tree.max_depth());
}

}  // namespace speclab
