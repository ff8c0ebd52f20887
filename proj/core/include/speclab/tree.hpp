#pragma once

// Draft trees: the data structure every expansion policy builds and every
// verifier walks.
//
// Nodes are stored root-first in creation order and a NodeId is simply the
// node's index into that array, so parents always precede children and
// layer-by-layer construction appends contiguous runs.  The root represents
// the last committed token; it carries path_prob 1 and counts against the
// node budget, so a tree built under budget N holds at most N nodes total.
//
// path_prob of a node is the product of draft_prob along its root path
// (root excluded) — the path score used for ranking and gating.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "speclab/error.hpp"
#include "speclab/types.hpp"

namespace speclab {

struct NodeId {
  std::uint32_t index = 0;
  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

struct TreeNode {
  NodeId id;
  std::optional<NodeId> parent;  // empty only for the root
  TokenId token = 0;
  std::uint32_t depth = 0;
  double path_prob = 1.0;   // product of draft_prob along the root path
  double draft_prob = 1.0;  // single-step probability under the draft model
};

// One requested child in an add_layer call.
struct ChildSpec {
  NodeId parent;
  TokenId token = 0;
  double draft_prob = 0.0;
};

// Ancestor matrix in row-major order: at(i, j) is true iff node j lies on
// node i's root path (self included).  This is the attention-mask shape a
// tree-structured verification step needs.
class TreeMask {
 public:
  TreeMask(std::size_t n, std::vector<std::uint8_t> bits)
      : n_(n), bits_(std::move(bits)) {}

  std::size_t size() const { return n_; }
  bool at(std::size_t i, std::size_t j) const { return bits_[i * n_ + j] != 0; }

 private:
  std::size_t n_;
  std::vector<std::uint8_t> bits_;
};

class DraftTree {
 public:
  // A fresh tree holding only the root.  `budget` caps the total node count,
  // root included; it must be at least 1.
  DraftTree(TokenId root_token, std::size_t budget);

  std::size_t size() const { return nodes_.size(); }
  std::size_t budget() const { return budget_; }
  NodeId root() const { return NodeId{0}; }
  TokenId root_token() const { return nodes_[0].token; }

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& node(NodeId id) const;

  // Layer d lists the ids at depth d; layer 0 is always {root}.
  const std::vector<std::vector<NodeId>>& layers() const { return layers_; }
  std::uint32_t max_depth() const {
    return static_cast<std::uint32_t>(layers_.size() - 1);
  }

  const std::vector<NodeId>& children(NodeId id) const;

  // Appends one batch of children.  All parents must already exist and share
  // a single depth d; the new nodes land on layer d+1 with path_prob =
  // parent.path_prob * draft_prob.  Returns the new ids in input order.
  //
  // Throws StructuralError for unknown parents, mixed parent depths, or a
  // duplicate token among a parent's children; BudgetError if the batch
  // would push the node count past the budget; InputError for a draft_prob
  // outside (0, 1].
  std::vector<NodeId> add_layer(std::span<const ChildSpec> entries);

  // Root-to-node inclusive id path.
  std::vector<NodeId> path_to(NodeId id) const;

  // Tokens along the root path of `id`, root's own token excluded — exactly
  // the suffix a model context gains when decoding down to `id`.
  std::vector<TokenId> path_tokens(NodeId id) const;

  // Ids of all nodes without children, ascending.
  std::vector<NodeId> leaves() const;

 private:
  void check_id(NodeId id) const;

  std::size_t budget_;
  std::vector<TreeNode> nodes_;
  std::vector<std::vector<NodeId>> layers_;
  std::vector<std::vector<NodeId>> children_;
};

TreeMask build_mask(const DraftTree& tree);

}  // namespace speclab
