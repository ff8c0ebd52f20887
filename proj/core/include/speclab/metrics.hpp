#pragma once

// Measurement machinery for decoding runs.
//
// The quantities of interest per run:
//
//   tau   = L / N_p   mean accepted tokens per verification step, bonus
//                     (correction) token included — the wall-clock win.
//   delta = N_q / N_p mean draft forwards per verification step — the
//                     draft-side cost of obtaining tau.
//   R(c)  = tau / (1 + c * delta)   estimated end-to-end speedup when one
//                     draft forward costs c target forwards.  c is supplied
//                     by the caller (configs carry it; a timing probe can
//                     estimate it) rather than assumed.
//
// The acceptance funnel cross-tabulates verifier decisions by (depth,
// sibling rank): each offered child increments its cell, acceptance
// increments the cell's hit count.  Aggregated over enough steps it shows
// where in the tree acceptance mass actually lives.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "speclab/error.hpp"
#include "speclab/verify.hpp"

namespace speclab {

struct FunnelCell {
  std::int64_t offered = 0;
  std::int64_t accepted = 0;
};

class FunnelMatrix {
 public:
  void record(std::uint32_t depth, std::int32_t rank, bool accepted);
  void merge(const FunnelMatrix& other);

  const std::map<std::pair<std::int32_t, std::int32_t>, FunnelCell>& cells()
      const {
    return cells_;
  }

 private:
  std::map<std::pair<std::int32_t, std::int32_t>, FunnelCell> cells_;
};

struct RunMetrics {
  std::int64_t target_forwards = 0;   // N_p: one per verification step
  std::int64_t draft_forwards = 0;    // N_q: draft cost across steps
  std::int64_t committed_tokens = 0;  // L: accepted + bonus tokens
  std::vector<std::int64_t> per_step_committed;  // each entry >= 1, sums to L
  FunnelMatrix funnel;
};

// Folds one verification step into the counters: N_p grows by one, N_q by
// `forwards`, L by accepted_count + 1, and every acceptance record lands in
// the funnel.  `committed_override` replaces the committed-token count for
// the step when a stop token truncated the commit; it must be >= 1.
void record_step(RunMetrics& metrics, const VerificationOutcome& outcome,
                 std::int64_t forwards,
                 std::int64_t committed_override = -1);

// Mean accepted tokens per step (tau).  MetricError when no steps recorded.
double mat(const RunMetrics& metrics);

// Mean draft forwards per step (delta).  MetricError when no steps recorded.
double draft_efficiency(const RunMetrics& metrics);

// R(c) = tau / (1 + c * delta).  ParamError for tau < 1, delta < 0, or
// c < 0.
double speedup_estimate(double tau, double delta, double cost_ratio);

// Counters and funnel of two disjoint runs, combined as if their step
// streams were concatenated.
RunMetrics merge(const RunMetrics& a, const RunMetrics& b);

struct FunnelRow {
  std::int32_t depth = 0;
  std::int32_t rank = 0;
  std::int64_t offered = 0;
  std::int64_t accepted = 0;
  double freq = 0.0;  // accepted / offered
};

// Funnel cells flattened in (depth, rank) order.
std::vector<FunnelRow> funnel_export(const FunnelMatrix& funnel);

struct CurveRow {
  std::string bucket;
  double tau_mean = 0.0;
  double delta_mean = 0.0;
  double oracle_delta = 0.0;  // where the tau = delta oracle line sits
};

// Per-bucket mean (tau, delta) across runs, one row per difficulty bucket,
// with the tau = delta oracle reference.  MetricError for an empty bucket
// or a bucket containing a step-less run.
std::vector<CurveRow> delta_tau_curve(
    const std::vector<std::pair<std::string, std::vector<RunMetrics>>>&
        buckets);

}  // namespace speclab
