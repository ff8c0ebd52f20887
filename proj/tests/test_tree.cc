#include "speclab/tree.hpp"

#include <gtest/gtest.h>

#include <vector>

namespace speclab {
namespace {

DraftTree three_layer_tree() {
  // root(7) -> {a=1 (0.6), b=2 (0.4)}; a -> {c=3 (0.5)}
  DraftTree tree(7, 8);
  const std::vector<ChildSpec> layer1{{tree.root(), 1, 0.6},
                                      {tree.root(), 2, 0.4}};
  const std::vector<NodeId> ids = tree.add_layer(layer1);
  const std::vector<ChildSpec> layer2{{ids[0], 3, 0.5}};
  tree.add_layer(layer2);
  return tree;
}

TEST(DraftTree, RootOnlyShape) {
  const DraftTree tree(5, 3);
  EXPECT_EQ(tree.size(), 1u);
  EXPECT_EQ(tree.budget(), 3u);
  EXPECT_EQ(tree.root_token(), 5);
  EXPECT_EQ(tree.max_depth(), 0u);
  EXPECT_EQ(tree.node(tree.root()).path_prob, 1.0);
  EXPECT_FALSE(tree.node(tree.root()).parent.has_value());
  EXPECT_THROW(DraftTree(5, 0), ParamError);
}

TEST(DraftTree, LayeredGrowthAndPathProducts) {
  const DraftTree tree = three_layer_tree();
  EXPECT_EQ(tree.size(), 4u);
  EXPECT_EQ(tree.max_depth(), 2u);
  ASSERT_EQ(tree.layers().size(), 3u);
  EXPECT_EQ(tree.layers()[0].size(), 1u);
  EXPECT_EQ(tree.layers()[1].size(), 2u);
  EXPECT_EQ(tree.layers()[2].size(), 1u);

  const TreeNode& a = tree.node(NodeId{1});
  const TreeNode& b = tree.node(NodeId{2});
  const TreeNode& c = tree.node(NodeId{3});
  EXPECT_EQ(a.token, 1);
  EXPECT_EQ(a.depth, 1u);
  EXPECT_DOUBLE_EQ(a.path_prob, 0.6);
  EXPECT_DOUBLE_EQ(b.path_prob, 0.4);
  EXPECT_DOUBLE_EQ(c.path_prob, 0.6 * 0.5);
  ASSERT_TRUE(c.parent.has_value());
  EXPECT_EQ(c.parent->index, 1u);
}

TEST(DraftTree, PathQueriesExcludeRootToken) {
  const DraftTree tree = three_layer_tree();
  const std::vector<NodeId> path = tree.path_to(NodeId{3});
  ASSERT_EQ(path.size(), 3u);
  EXPECT_EQ(path[0].index, 0u);
  EXPECT_EQ(path[1].index, 1u);
  EXPECT_EQ(path[2].index, 3u);

  const std::vector<TokenId> tokens = tree.path_tokens(NodeId{3});
  ASSERT_EQ(tokens.size(), 2u);
  EXPECT_EQ(tokens[0], 1);
  EXPECT_EQ(tokens[1], 3);
  EXPECT_TRUE(tree.path_tokens(tree.root()).empty());
}

TEST(DraftTree, LeavesAndChildren) {
  const DraftTree tree = three_layer_tree();
  const std::vector<NodeId> leaves = tree.leaves();
  ASSERT_EQ(leaves.size(), 2u);
  EXPECT_EQ(leaves[0].index, 2u);
  EXPECT_EQ(leaves[1].index, 3u);
  ASSERT_EQ(tree.children(NodeId{1}).size(), 1u);
  EXPECT_EQ(tree.children(NodeId{1})[0].index, 3u);
  EXPECT_TRUE(tree.children(NodeId{3}).empty());
}

TEST(DraftTree, BudgetIsEnforced) {
  DraftTree tree(0, 3);
  const std::vector<ChildSpec> two{{tree.root(), 1, 0.5},
                                   {tree.root(), 2, 0.5}};
  tree.add_layer(two);  // exactly at budget
  const std::vector<ChildSpec> one_more{{NodeId{1}, 3, 0.5}};
  EXPECT_THROW(tree.add_layer(one_more), BudgetError);
  EXPECT_EQ(tree.size(), 3u);
}

TEST(DraftTree, StructuralValidation) {
  DraftTree tree(0, 10);
  const std::vector<ChildSpec> bad_parent{{NodeId{5}, 1, 0.5}};
  EXPECT_THROW(tree.add_layer(bad_parent), StructuralError);

  const std::vector<ChildSpec> dup{{tree.root(), 1, 0.5},
                                   {tree.root(), 1, 0.4}};
  EXPECT_THROW(tree.add_layer(dup), StructuralError);

  const std::vector<ChildSpec> zero_prob{{tree.root(), 1, 0.0}};
  EXPECT_THROW(tree.add_layer(zero_prob), InputError);
  const std::vector<ChildSpec> above_one{{tree.root(), 1, 1.5}};
  EXPECT_THROW(tree.add_layer(above_one), InputError);

  const std::vector<ChildSpec> ok{{tree.root(), 1, 1.0}};
  tree.add_layer(ok);
  const std::vector<ChildSpec> mixed{{tree.root(), 2, 0.5},
                                     {NodeId{1}, 2, 0.5}};
  EXPECT_THROW(tree.add_layer(mixed), StructuralError);

  EXPECT_THROW(tree.node(NodeId{99}), StructuralError);
}

TEST(TreeMask, AncestorOrSelfBits) {
  const DraftTree tree = three_layer_tree();
  const TreeMask mask = build_mask(tree);
  ASSERT_EQ(mask.size(), 4u);
  // Every node sees itself and the root.
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_TRUE(mask.at(i, i));
    EXPECT_TRUE(mask.at(i, 0));
  }
  // c (=3) descends from a (=1) but not b (=2).
  EXPECT_TRUE(mask.at(3, 1));
  EXPECT_FALSE(mask.at(3, 2));
  // Siblings never see each other; parents never see children.
  EXPECT_FALSE(mask.at(1, 2));
  EXPECT_FALSE(mask.at(2, 1));
  EXPECT_FALSE(mask.at(0, 1));
  EXPECT_FALSE(mask.at(1, 3));
}

TEST(Distribution, ValidatesShapeAndMass) {
  EXPECT_NO_THROW(Distribution({0.5, 0.5}));
  EXPECT_NO_THROW(Distribution({1.0, 0.0, 0.0}));
  EXPECT_THROW(Distribution({1.0}), InputError);           // too short
  EXPECT_THROW(Distribution({0.5, 0.4}), InputError);      // mass off
  EXPECT_THROW(Distribution({-0.1, 1.1}), InputError);     // negative entry
  EXPECT_NO_THROW(Distribution({0.5, 0.5 + 5e-10}));       // inside tolerance
}

TEST(Vocab, Validation) {
  EXPECT_THROW(Vocab(1), ParamError);
  const Vocab v(4);
  EXPECT_TRUE(v.contains(0));
  EXPECT_TRUE(v.contains(3));
  EXPECT_FALSE(v.contains(4));
  EXPECT_FALSE(v.contains(-1));
}

}  // namespace
}  // namespace speclab
