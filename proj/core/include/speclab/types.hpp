#pragma once

// Vocabulary and probability-distribution primitives shared by every other
// module.  Distributions live in linear space: draft trees at practical
// budgets never multiply more than a few dozen probabilities together, so
// log-space bookkeeping would buy nothing and cost clarity.  Products that
// underflow below kProbUnderflow are treated as exact zeros by callers.

#include <cstdint>
#include <vector>

#include "speclab/error.hpp"

namespace speclab {

using TokenId = std::int32_t;

// Products smaller than this are indistinguishable from zero for our
// purposes; candidate generation drops them rather than propagating
// denormals.
inline constexpr double kProbUnderflow = 1e-300;

// Tolerance for "sums to one" at Distribution construction.
inline constexpr double kSumTolerance = 1e-9;

struct Vocab {
  std::int32_t size = 0;

  explicit Vocab(std::int32_t n) : size(n) {
    if (n < 2) throw ParamError("vocab size must be at least 2");
  }
  bool contains(TokenId t) const { return t >= 0 && t < size; }
  friend bool operator==(const Vocab&, const Vocab&) = default;
};

// A validated categorical distribution over token ids 0..V-1.  Construction
// rejects negative entries and sums outside [1 - kSumTolerance,
// 1 + kSumTolerance]; afterwards every consumer may assume normalization.
class Distribution {
 public:
  explicit Distribution(std::vector<double> probs);

  std::size_t size() const { return probs_.size(); }
  double at(TokenId t) const { return probs_[static_cast<std::size_t>(t)]; }
  const std::vector<double>& probs() const { return probs_; }

  friend bool operator==(const Distribution& a, const Distribution& b) {
    return a.probs_ == b.probs_;
  }

 private:
  std::vector<double> probs_;
};

}  // namespace speclab
