#include "speclab/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <string>

namespace speclab {
namespace {

void check_context(const Context& ctx, const Vocab& vocab) {
  for (TokenId t : ctx.tokens)
    if (!vocab.contains(t))
      throw InputError("context token " + std::to_string(t) +
                       " outside vocab of size " + std::to_string(vocab.size));
}

// Permutation of 0..n-1 drawn from a seeded generator; maps rank index to
// token id.
std::vector<TokenId> seeded_permutation(std::int32_t n, std::uint64_t seed) {
  std::vector<TokenId> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  portable_shuffle(perm, rng);
  return perm;
}

}  // namespace

std::uint64_t context_hash(const Context& ctx, std::uint64_t seed) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(ctx.tokens.size() * sizeof(TokenId));
  for (TokenId t : ctx.tokens) {
    const auto u = static_cast<std::uint32_t>(t);
    for (int shift = 0; shift < 32; shift += 8)
      bytes.push_back(static_cast<std::uint8_t>((u >> shift) & 0xFF));
  }
  return fnv1a64(bytes, seed);
}

std::vector<double> zipf_weights(std::int32_t vocab_size, double alpha) {
  if (vocab_size < 1) throw ParamError("zipf vocab size must be positive");
  if (!(alpha > 0.0)) throw ParamError("zipf alpha must be positive");
  std::vector<double> w(static_cast<std::size_t>(vocab_size));
  double sum = 0.0;
  for (std::int32_t r = 1; r <= vocab_size; ++r) {
    const double v = std::pow(static_cast<double>(r), -alpha);
    w[static_cast<std::size_t>(r - 1)] = v;
    sum += v;
  }
  for (double& v : w) v /= sum;
  return w;
}

TableModel::TableModel(Vocab vocab, std::int32_t order,
                       std::map<std::vector<TokenId>, Distribution> table,
                       Distribution fallback)
    : vocab_(vocab),
      order_(order),
      table_(std::move(table)),
      fallback_(std::move(fallback)) {
  if (order < 1) throw ParamError("table model order must be at least 1");
  const auto expect = static_cast<std::size_t>(vocab.size);
  if (fallback_.size() != expect)
    throw InputError("fallback distribution size does not match vocab");
  for (const auto& [key, dist] : table_) {
    if (key.size() != static_cast<std::size_t>(order))
      throw InputError("table key length does not match order");
    for (TokenId t : key)
      if (!vocab.contains(t)) throw InputError("table key token outside vocab");
    if (dist.size() != expect)
      throw InputError("table distribution size does not match vocab");
  }
}

std::vector<TokenId> TableModel::suffix_key(const Context& ctx) const {
  const auto m = static_cast<std::size_t>(order_);
  std::vector<TokenId> key(m, kBeginMarker);
  const std::size_t have = std::min(ctx.tokens.size(), m);
  for (std::size_t i = 0; i < have; ++i)
    key[m - have + i] = ctx.tokens[ctx.tokens.size() - have + i];
  return key;
}

Distribution TableModel::next_dist(const Context& ctx) const {
  check_context(ctx, vocab_);
  const auto it = table_.find(suffix_key(ctx));
  return it != table_.end() ? it->second : fallback_;
}

ZipfModel::ZipfModel(Vocab vocab, double alpha, std::uint64_t seed,
                     bool permute_per_context)
    : vocab_(vocab),
      alpha_(alpha),
      seed_(seed),
      permute_per_context_(permute_per_context),
      base_weights_(zipf_weights(vocab.size, alpha)) {}

Distribution ZipfModel::next_dist(const Context& ctx) const {
  check_context(ctx, vocab_);
  if (!permute_per_context_) return Distribution(base_weights_);
  const std::vector<TokenId> perm =
      seeded_permutation(vocab_.size, context_hash(ctx, seed_));
  std::vector<double> probs(base_weights_.size());
  for (std::size_t r = 0; r < base_weights_.size(); ++r)
    probs[static_cast<std::size_t>(perm[r])] = base_weights_[r];
  return Distribution(std::move(probs));
}

namespace {

// Zipf(0.7)-shaped noise whose rank-to-token map is reshuffled per context.
class PerturbedDraft : public SequenceModel {
 public:
  PerturbedDraft(std::shared_ptr<const SequenceModel> target, double beta,
                 std::uint64_t noise_seed)
      : target_(std::move(target)),
        beta_(beta),
        noise_seed_(noise_seed),
        noise_weights_(zipf_weights(target_->vocab().size, 0.7)) {}

  Distribution next_dist(const Context& ctx) const override {
    const Distribution base = target_->next_dist(ctx);
    const std::vector<TokenId> perm = seeded_permutation(
        target_->vocab().size, context_hash(ctx, noise_seed_));
    std::vector<double> probs(base.size());
    for (std::size_t r = 0; r < probs.size(); ++r)
      probs[static_cast<std::size_t>(perm[r])] =
          (1.0 - beta_) * noise_weights_[r];
    double sum = 0.0;
    for (std::size_t t = 0; t < probs.size(); ++t) {
      probs[t] += beta_ * base.probs()[t];
      sum += probs[t];
    }
    for (double& p : probs) p /= sum;
    return Distribution(std::move(probs));
  }

  Vocab vocab() const override { return target_->vocab(); }

 private:
  std::shared_ptr<const SequenceModel> target_;
  double beta_;
  std::uint64_t noise_seed_;
  std::vector<double> noise_weights_;
};

}  // namespace

PerturbedPair::PerturbedPair(std::shared_ptr<const SequenceModel> target,
                             double beta, std::uint64_t noise_seed)
    : target_(std::move(target)), beta_(beta) {
  if (!target_) throw InputError("perturbed pair needs a target model");
  if (!(beta >= 0.0 && beta <= 1.0))
    throw ParamError("perturbed pair beta must lie in [0, 1]");
  draft_ = std::make_shared<PerturbedDraft>(target_, beta, noise_seed);
}

TokenId pick_by_cdf(const Distribution& dist, double u) {
  double cum = 0.0;
  TokenId last_nonzero = -1;
  for (std::size_t t = 0; t < dist.size(); ++t) {
    const double p = dist.probs()[t];
    if (p <= 0.0) continue;
    cum += p;
    last_nonzero = static_cast<TokenId>(t);
    if (u < cum) return last_nonzero;
  }
  // Floating-point slack at the top of the CDF: fall back to the last token
  // with mass.
  return last_nonzero;
}

TokenId sample(const Distribution& dist, Rng& rng) {
  return pick_by_cdf(dist, uniform01(rng));
}

TokenId argmax_token(const Distribution& dist) {
  const auto& p = dist.probs();
  return static_cast<TokenId>(
      std::max_element(p.begin(), p.end()) - p.begin());
}

}  // namespace speclab
