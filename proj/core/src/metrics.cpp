#include "speclab/metrics.hpp"

namespace speclab {

void FunnelMatrix::record(std::uint32_t depth, std::int32_t rank,
                          bool accepted) {
  FunnelCell& cell = cells_[{static_cast<std::int32_t>(depth), rank}];
  cell.offered += 1;
  if (accepted) cell.accepted += 1;
}

void FunnelMatrix::merge(const FunnelMatrix& other) {
  for (const auto& [key, cell] : other.cells_) {
    FunnelCell& mine = cells_[key];
    mine.offered += cell.offered;
    mine.accepted += cell.accepted;
  }
}

void record_step(RunMetrics& metrics, const VerificationOutcome& outcome,
                 std::int64_t forwards, std::int64_t committed_override) {
  if (forwards < 0) throw ParamError("record_step forwards must be >= 0");
  const std::int64_t committed =
      committed_override >= 0
          ? committed_override
          : static_cast<std::int64_t>(outcome.accepted_count()) + 1;
  if (committed < 1)
    throw ParamError("a verification step commits at least one token");

  metrics.target_forwards += 1;
  metrics.draft_forwards += forwards;
  metrics.committed_tokens += committed;
  metrics.per_step_committed.push_back(committed);
  for (const AcceptanceRecord& rec : outcome.records)
    metrics.funnel.record(rec.depth, rec.rank, rec.accepted);
}

double mat(const RunMetrics& metrics) {
  if (metrics.target_forwards == 0)
    throw MetricError("tau undefined before any verification step");
  return static_cast<double>(metrics.committed_tokens) /
         static_cast<double>(metrics.target_forwards);
}

double draft_efficiency(const RunMetrics& metrics) {
  if (metrics.target_forwards == 0)
    throw MetricError("delta undefined before any verification step");
  return static_cast<double>(metrics.draft_forwards) /
         static_cast<double>(metrics.target_forwards);
}

double speedup_estimate(double tau, double delta, double cost_ratio) {
  if (!(tau >= 1.0)) throw ParamError("speedup requires tau >= 1");
  if (!(delta >= 0.0)) throw ParamError("speedup requires delta >= 0");
  if (!(cost_ratio >= 0.0)) throw ParamError("speedup requires c >= 0");
  return tau / (1.0 + cost_ratio * delta);
}

RunMetrics merge(const RunMetrics& a, const RunMetrics& b) {
  RunMetrics out = a;
  out.target_forwards += b.target_forwards;
  out.draft_forwards += b.draft_forwards;
  out.committed_tokens += b.committed_tokens;
  out.per_step_committed.insert(out.per_step_committed.end(),
                                b.per_step_committed.begin(),
                                b.per_step_committed.end());
  out.funnel.merge(b.funnel);
  return out;
}

std::vector<FunnelRow> funnel_export(const FunnelMatrix& funnel) {
  std::vector<FunnelRow> rows;
  rows.reserve(funnel.cells().size());
  for (const auto& [key, cell] : funnel.cells()) {
    FunnelRow row;
    row.depth = key.first;
    row.rank = key.second;
    row.offered = cell.offered;
    row.accepted = cell.accepted;
    row.freq = cell.offered > 0 ? static_cast<double>(cell.accepted) /
                                      static_cast<double>(cell.offered)
                                : 0.0;
    rows.push_back(row);
  }
  return rows;
}

std::vector<CurveRow> delta_tau_curve(
    const std::vector<std::pair<std::string, std::vector<RunMetrics>>>&
        buckets) {
  std::vector<CurveRow> rows;
  rows.reserve(buckets.size());
  for (const auto& [bucket, runs] : buckets) {
    if (runs.empty())
      throw MetricError("delta_tau_curve bucket '" + bucket + "' is empty");
    double tau_sum = 0.0;
    double delta_sum = 0.0;
    for (const RunMetrics& run : runs) {
      tau_sum += mat(run);
      delta_sum += draft_efficiency(run);
    }
    CurveRow row;
    row.bucket = bucket;
    row.tau_mean = tau_sum / static_cast<double>(runs.size());
    row.delta_mean = delta_sum / static_cast<double>(runs.size());
    row.oracle_delta = row.tau_mean;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace speclab
