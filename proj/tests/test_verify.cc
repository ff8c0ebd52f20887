#include "speclab/verify.hpp"

#include <gtest/gtest.h>

#include <map>
#include <memory>
#include <vector>

#include "oracles.hpp"
#include "speclab/builders.hpp"
#include "speclab/decode.hpp"

namespace speclab {
namespace {

// Vocabulary {0,1,2}; after any context the target says [0.5, 0.3, 0.2].
std::shared_ptr<TableModel> flat_target() {
  return std::make_shared<TableModel>(
      Vocab(3), 1, std::map<std::vector<TokenId>, Distribution>{},
      Distribution({0.5, 0.3, 0.2}));
}

// root(0) -> {token 0 (draft 0.6), token 1 (draft 0.3)}.
DraftTree two_child_tree() {
  DraftTree tree(0, 4);
  tree.add_layer(std::vector<ChildSpec>{{tree.root(), 0, 0.6},
                                        {tree.root(), 1, 0.3}});
  return tree;
}

std::shared_ptr<TableModel> branching_model() {
  std::map<std::vector<TokenId>, Distribution> table;
  table.emplace(std::vector<TokenId>{1}, Distribution({0.0, 0.0, 0.6, 0.4}));
  table.emplace(std::vector<TokenId>{2},
                Distribution({0.55, 0.45, 0.0, 0.0}));
  table.emplace(std::vector<TokenId>{3}, Distribution({0.9, 0.1, 0.0, 0.0}));
  table.emplace(std::vector<TokenId>{0},
                Distribution({0.0, 1.0, 0.0, 0.0}));
  return std::make_shared<TableModel>(
      Vocab(4), 1, std::move(table), Distribution({0.25, 0.25, 0.25, 0.25}));
}

std::shared_ptr<TableModel> cyclic_model(std::int32_t vocab) {
  std::map<std::vector<TokenId>, Distribution> table;
  for (TokenId t = 0; t < vocab; ++t) {
    std::vector<double> row(static_cast<std::size_t>(vocab), 0.0);
    row[static_cast<std::size_t>((t + 1) % vocab)] = 1.0;
    table.emplace(std::vector<TokenId>{t}, Distribution(row));
  }
  std::vector<double> fb(static_cast<std::size_t>(vocab), 0.0);
  fb[1] = 1.0;
  return std::make_shared<TableModel>(Vocab(vocab), 1, std::move(table),
                                      Distribution(fb));
}

TEST(ResidualDistribution, HandComputedExample) {
  const std::vector<double> r = residual_distribution(
      {0.5, 0.3, 0.2}, {0.6, 0.2, 0.2});
  ASSERT_EQ(r.size(), 3u);
  EXPECT_DOUBLE_EQ(r[0], 0.0);
  EXPECT_DOUBLE_EQ(r[1], 1.0);
  EXPECT_DOUBLE_EQ(r[2], 0.0);

  EXPECT_THROW(residual_distribution({0.5, 0.5}, {0.5, 0.3, 0.2}),
               InputError);
  EXPECT_THROW(residual_distribution({0.5, 0.5}, {0.5, 0.5}), InputError);
}

TEST(VerifyGreedy, WalksTheArgmaxPathAndRecordsEveryOffer) {
  const auto model = branching_model();
  const Context ctx{{1}};
  // root(1) -> {2 (0.6), 3 (0.4)}; node 2 -> {0 (0.55)}.
  DraftTree tree(1, 8);
  const auto l1 = tree.add_layer(std::vector<ChildSpec>{
      {tree.root(), 2, 0.6}, {tree.root(), 3, 0.4}});
  tree.add_layer(std::vector<ChildSpec>{{l1[0], 0, 0.55}});

  const VerificationOutcome out = verify_greedy(tree, *model, ctx);
  ASSERT_EQ(out.accepted_path.size(), 2u);
  EXPECT_EQ(tree.node(out.accepted_path[0]).token, 2);
  EXPECT_EQ(tree.node(out.accepted_path[1]).token, 0);
  EXPECT_EQ(out.correction_token, 1);  // after {1,2,0} the argmax is 1

  // Records: depth 1 offers rank 1 (token 2, accepted) and rank 2 (token 3);
  // depth 2 offers rank 1 (token 0, accepted).
  ASSERT_EQ(out.records.size(), 3u);
  EXPECT_EQ(out.records[0].depth, 1u);
  EXPECT_EQ(out.records[0].rank, 1);
  EXPECT_TRUE(out.records[0].accepted);
  EXPECT_EQ(out.records[1].rank, 2);
  EXPECT_FALSE(out.records[1].accepted);
  EXPECT_EQ(out.records[2].depth, 2u);
  EXPECT_TRUE(out.records[2].accepted);

  const Context committed = commit(ctx, tree, out);
  EXPECT_EQ(committed.tokens, (std::vector<TokenId>{1, 2, 0, 1}));
}

TEST(VerifyGreedy, DivergenceAtTheRootAcceptsNothing) {
  const auto model = branching_model();
  const Context ctx{{1}};
  DraftTree tree(1, 4);
  tree.add_layer(std::vector<ChildSpec>{{tree.root(), 3, 0.4}});  // argmax is 2

  const VerificationOutcome out = verify_greedy(tree, *model, ctx);
  EXPECT_TRUE(out.accepted_path.empty());
  EXPECT_EQ(out.accepted_count(), 0u);
  EXPECT_EQ(out.correction_token, 2);
  ASSERT_EQ(out.records.size(), 1u);
  EXPECT_FALSE(out.records[0].accepted);
}

TEST(VerifyGreedy, SiblingRanksFollowDraftProbThenToken) {
  const auto model = branching_model();
  DraftTree tree(1, 8);
  // Deliberately inserted in "wrong" order: ranks must come from draft_prob.
  tree.add_layer(std::vector<ChildSpec>{{tree.root(), 3, 0.4},
                                        {tree.root(), 2, 0.6}});
  const VerificationOutcome out = verify_greedy(tree, *model, Context{{1}});
  ASSERT_EQ(out.records.size(), 2u);
  EXPECT_EQ(tree.node(out.records[0].node).token, 2);  // rank 1: 0.6
  EXPECT_EQ(out.records[0].rank, 1);
  EXPECT_EQ(tree.node(out.records[1].node).token, 3);

  // Equal draft probabilities: the lower token id gets rank 1.
  DraftTree ties(1, 8);
  ties.add_layer(std::vector<ChildSpec>{{ties.root(), 3, 0.5},
                                        {ties.root(), 2, 0.5}});
  const VerificationOutcome tied = verify_greedy(ties, *model, Context{{1}});
  EXPECT_EQ(ties.node(tied.records[0].node).token, 2);
}

TEST(VerifyGreedy, MatchesTargetOnlyGreedyOnRandomTrees) {
  for (int i = 0; i < 20; ++i) {
    const int vocab = 3 + (i % 4);
    const auto model = oracle::random_table_model(
        vocab, 1, 7000 + static_cast<std::uint64_t>(i));
    Context ctx;
    ctx.tokens.push_back(static_cast<TokenId>(i % vocab));
    const DraftTree tree =
        build_static(*model, ctx, StaticEaglePolicy{2, 3, 9});
    const VerificationOutcome out = verify_greedy(tree, *model, ctx);

    const std::vector<TokenId> want = oracle::greedy_reference(
        *model, ctx, static_cast<std::int64_t>(out.accepted_count()) + 1);
    std::vector<TokenId> got;
    for (const NodeId id : out.accepted_path)
      got.push_back(tree.node(id).token);
    got.push_back(out.correction_token);
    EXPECT_EQ(got, want) << "case " << i;
  }
}

TEST(VerifyStochastic, OneStepCommitIsExactlyTargetDistributed) {
  const auto target = flat_target();
  const Context ctx{{0}};
  const DraftTree tree = two_child_tree();

  // By hand: P(commit 0) = 2/3 * min(1, 0.5/(2/3)) = 0.5, P(commit 1) =
  // 1/3 * min(1, 0.3/(1/3)) = 0.3, P(commit 2) = 0.2 via the residual
  // correction.  Check the sampled frequencies against those exact values.
  Rng rng(2024);
  const int n = 200000;
  std::vector<int> counts(3, 0);
  for (int i = 0; i < n; ++i) {
    const VerificationOutcome out = verify_stochastic(tree, *target, ctx, rng);
    const TokenId first = out.accepted_path.empty()
                              ? out.correction_token
                              : tree.node(out.accepted_path[0]).token;
    ++counts[static_cast<std::size_t>(first)];
  }
  EXPECT_NEAR(counts[0] / static_cast<double>(n), 0.5, 0.01);
  EXPECT_NEAR(counts[1] / static_cast<double>(n), 0.3, 0.01);
  EXPECT_NEAR(counts[2] / static_cast<double>(n), 0.2, 0.01);
}

TEST(VerifyStochastic, SeededWalksAreReproducible) {
  const auto target = flat_target();
  const Context ctx{{0}};
  const DraftTree tree = two_child_tree();
  Rng a(99);
  Rng b(99);
  for (int i = 0; i < 50; ++i) {
    const VerificationOutcome oa = verify_stochastic(tree, *target, ctx, a);
    const VerificationOutcome ob = verify_stochastic(tree, *target, ctx, b);
    EXPECT_EQ(oa.accepted_path, ob.accepted_path);
    EXPECT_EQ(oa.correction_token, ob.correction_token);
  }
}

TEST(VerifyStochastic, OneHotAlignedChainAcceptsEverything) {
  const auto model = cyclic_model(4);
  const Context ctx{{0}};
  const DraftTree tree = build_chain(*model, ctx, ChainPolicy{4});
  Rng rng(5);
  for (int i = 0; i < 25; ++i) {
    const VerificationOutcome out = verify_stochastic(tree, *model, ctx, rng);
    EXPECT_EQ(out.accepted_count(), 4u);  // every drafted token survives
    EXPECT_EQ(out.correction_token, 1);   // ...0,1,2,3,0 -> next is 1
  }
}

TEST(VerifyStochastic, TwoStepDecodeMatchesExactEnumeration) {
  const auto target = oracle::random_table_model(3, 1, 551);
  const auto draft = oracle::random_table_model(3, 1, 552);
  const Context prompt{{1}};
  const int horizon = 2;
  const auto exact = oracle::enumerate_exact(*target, prompt, horizon);

  DecodeParams params;
  params.max_new_tokens = horizon;
  params.greedy = false;
  const TalonPolicy policy{5, 2, 0.2, 1};

  std::map<std::vector<TokenId>, std::int64_t> counts;
  const std::int64_t trials = 30000;
  for (std::int64_t k = 0; k < trials; ++k) {
    Rng rng(derive_seed(31337, static_cast<std::uint64_t>(k)));
    const DecodeResult r =
        decode(*draft, *target, prompt, policy, params, rng);
    const std::vector<TokenId> seq(
        r.context.tokens.begin() + 1,
        r.context.tokens.begin() + 1 + horizon);
    ++counts[seq];
  }
  const double tv = oracle::total_variation(exact, counts, trials);
  EXPECT_LE(tv, 0.02) << "tv=" << tv;
}

TEST(Commit, AppendsAcceptedTokensThenCorrection) {
  DraftTree tree(9, 4);
  const auto ids = tree.add_layer(
      std::vector<ChildSpec>{{tree.root(), 5, 0.9}});
  VerificationOutcome out;
  out.accepted_path = {ids[0]};
  out.correction_token = 7;
  const Context committed = commit(Context{{9}}, tree, out);
  EXPECT_EQ(committed.tokens, (std::vector<TokenId>{9, 5, 7}));
}

}  // namespace
}  // namespace speclab
