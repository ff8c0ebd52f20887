#include "speclab/tree.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "speclab/types.hpp"

namespace speclab {

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.size() < 2) throw InputError("distribution needs at least 2 entries");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw InputError("distribution entries must be non-negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance)
    throw InputError("distribution sums to " + std::to_string(sum) +
                     ", expected 1 within 1e-9");
}

DraftTree::DraftTree(TokenId root_token, std::size_t budget) : budget_(budget) {
  if (budget < 1) throw ParamError("tree budget must be at least 1");
  TreeNode root;
  root.id = NodeId{0};
  root.token = root_token;
  nodes_.push_back(root);
  layers_.push_back({NodeId{0}});
  children_.emplace_back();
}

void DraftTree::check_id(NodeId id) const {
  if (id.index >= nodes_.size())
    throw StructuralError("node id " + std::to_string(id.index) +
                          " out of range for tree of size " +
                          std::to_string(nodes_.size()));
}

const TreeNode& DraftTree::node(NodeId id) const {
  check_id(id);
  return nodes_[id.index];
}

const std::vector<NodeId>& DraftTree::children(NodeId id) const {
  check_id(id);
  return children_[id.index];
}

std::vector<NodeId> DraftTree::add_layer(std::span<const ChildSpec> entries) {
  if (entries.empty()) return {};

  for (const ChildSpec& e : entries) check_id(e.parent);
  const std::uint32_t parent_depth = nodes_[entries.front().parent.index].depth;
  for (const ChildSpec& e : entries) {
    if (nodes_[e.parent.index].depth != parent_depth)
      throw StructuralError("add_layer parents span multiple depths");
    if (!(e.draft_prob > 0.0) || e.draft_prob > 1.0 + 1e-12)
      throw InputError("child draft_prob must lie in (0, 1]");
    for (NodeId sibling : children_[e.parent.index])
      if (nodes_[sibling.index].token == e.token)
        throw StructuralError("duplicate child token under one parent");
  }
  for (std::size_t i = 0; i < entries.size(); ++i)
    for (std::size_t j = i + 1; j < entries.size(); ++j)
      if (entries[i].parent == entries[j].parent &&
          entries[i].token == entries[j].token)
        throw StructuralError("duplicate child token under one parent");

  if (nodes_.size() + entries.size() > budget_)
    throw BudgetError("adding " + std::to_string(entries.size()) +
                      " nodes would exceed budget " + std::to_string(budget_));

  const std::uint32_t child_depth = parent_depth + 1;
  if (layers_.size() <= child_depth) layers_.emplace_back();

  std::vector<NodeId> ids;
  ids.reserve(entries.size());
  for (const ChildSpec& e : entries) {
    TreeNode n;
    n.id = NodeId{static_cast<std::uint32_t>(nodes_.size())};
    n.parent = e.parent;
    n.token = e.token;
    n.depth = child_depth;
    n.draft_prob = e.draft_prob;
    n.path_prob = nodes_[e.parent.index].path_prob * e.draft_prob;
    nodes_.push_back(n);
    children_.emplace_back();
    layers_[child_depth].push_back(n.id);
    children_[e.parent.index].push_back(n.id);
    ids.push_back(n.id);
  }
  return ids;
}

std::vector<NodeId> DraftTree::path_to(NodeId id) const {
  check_id(id);
  std::vector<NodeId> path;
  for (NodeId cur = id;;) {
    path.push_back(cur);
    const auto& parent = nodes_[cur.index].parent;
    if (!parent) break;
    cur = *parent;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<TokenId> DraftTree::path_tokens(NodeId id) const {
  std::vector<NodeId> path = path_to(id);
  std::vector<TokenId> tokens;
  tokens.reserve(path.size() - 1);
  for (std::size_t i = 1; i < path.size(); ++i)
    tokens.push_back(nodes_[path[i].index].token);
  return tokens;
}

std::vector<NodeId> DraftTree::leaves() const {
  std::vector<NodeId> out;
  for (const TreeNode& n : nodes_)
    if (children_[n.id.index].empty()) out.push_back(n.id);
  return out;
}

TreeMask build_mask(const DraftTree& tree) {
  const std::size_t n = tree.size();
  std::vector<std::uint8_t> bits(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const TreeNode& node = tree.nodes()[i];
    if (node.parent) {
      const std::size_t p = node.parent->index;
      std::copy(bits.begin() + static_cast<std::ptrdiff_t>(p * n),
                bits.begin() + static_cast<std::ptrdiff_t>(p * n + n),
                bits.begin() + static_cast<std::ptrdiff_t>(i * n));
    }
    bits[i * n + i] = 1;
  }
  return TreeMask(n, std::move(bits));
}

}  // namespace speclab
