#pragma once

// Synthetic sequence models with closed-form conditionals.
//
// The laboratory never runs a neural network: draft/target pairs are small
// deterministic models whose next-token distributions can be tabulated or
// computed exactly, so every downstream claim (losslessness, acceptance
// behaviour, budget laws) can be checked against enumeration instead of
// against another stochastic system.

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "speclab/random.hpp"
#include "speclab/types.hpp"

namespace speclab {

// Token id 0 doubles as the begin-of-sequence marker used to left-pad short
// contexts for table lookups.
inline constexpr TokenId kBeginMarker = 0;

struct Context {
  std::vector<TokenId> tokens;

  friend bool operator==(const Context&, const Context&) = default;
};

class SequenceModel {
 public:
  virtual ~SequenceModel() = default;

  // Exact next-token distribution after `ctx`.  Throws InputError if any
  // context token lies outside the vocabulary.
  virtual Distribution next_dist(const Context& ctx) const = 0;
  virtual Vocab vocab() const = 0;
};

// Hashable key for per-context pseudo-randomness (permutations, noise).
std::uint64_t context_hash(const Context& ctx, std::uint64_t seed);

// Normalized Zipf law over ranks 1..V: entry r is proportional to r^-alpha.
// Throws ParamError for alpha <= 0 or V < 1.
std::vector<double> zipf_weights(std::int32_t vocab_size, double alpha);

// An n-gram lookup model: the conditional depends only on the last `order`
// tokens, left-padded with kBeginMarker when the context is shorter.
// Suffixes missing from the table fall back to a designated distribution.
class TableModel : public SequenceModel {
 public:
  TableModel(Vocab vocab, std::int32_t order,
             std::map<std::vector<TokenId>, Distribution> table,
             Distribution fallback);

  Distribution next_dist(const Context& ctx) const override;
  Vocab vocab() const override { return vocab_; }
  std::int32_t order() const { return order_; }

  // The padded lookup key for `ctx` — exposed for tests and enumeration.
  std::vector<TokenId> suffix_key(const Context& ctx) const;

 private:
  Vocab vocab_;
  std::int32_t order_;
  std::map<std::vector<TokenId>, Distribution> table_;
  Distribution fallback_;
};

// Zipf-shaped conditionals: rank r gets weight r^-alpha (normalized), ranks
// mapping to token ids either identically or through a permutation keyed by
// the context hash, which makes every context see a reshuffled head.
class ZipfModel : public SequenceModel {
 public:
  ZipfModel(Vocab vocab, double alpha, std::uint64_t seed,
            bool permute_per_context);

  Distribution next_dist(const Context& ctx) const override;
  Vocab vocab() const override { return vocab_; }

 private:
  Vocab vocab_;
  double alpha_;
  std::uint64_t seed_;
  bool permute_per_context_;
  std::vector<double> base_weights_;  // rank-ordered, cached at construction
};

// A draft/target pair where the draft is a controlled corruption of the
// target: draft(ctx) = beta * target(ctx) + (1 - beta) * noise(ctx), with
// Zipf(0.7)-shaped noise permuted per context under noise_seed.  beta is the
// alignment dial: 1 reproduces the target exactly, 0 is pure noise.
class PerturbedPair {
 public:
  PerturbedPair(std::shared_ptr<const SequenceModel> target, double beta,
                std::uint64_t noise_seed);

  std::shared_ptr<const SequenceModel> target() const { return target_; }
  std::shared_ptr<const SequenceModel> draft() const { return draft_; }
  double beta() const { return beta_; }

 private:
  std::shared_ptr<const SequenceModel> target_;
  std::shared_ptr<const SequenceModel> draft_;
  double beta_;
};

// Inverse-CDF pick: the first token whose cumulative probability exceeds u,
// zero-probability tokens skipped.  Exposed so tests can drive exact u
// values; sample() draws u from the rng and delegates here.
TokenId pick_by_cdf(const Distribution& dist, double u);

TokenId sample(const Distribution& dist, Rng& rng);

// Highest-probability token, ties resolved toward the lowest id.
TokenId argmax_token(const Distribution& dist);

}  // namespace speclab
