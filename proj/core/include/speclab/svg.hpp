#pragma once

// Hand-emitted, self-contained SVG charts for run artifacts.  No plotting
// dependency: each writer lays out a fixed-size canvas, draws axes and data
// primitives directly, and produces a file that renders anywhere.

#include <filesystem>
#include <string>
#include <vector>

#include "speclab/metrics.hpp"

namespace speclab {

// Depth x sibling-rank heatmap of acceptance frequency.  Cells carry their
// accepted/offered frequency as both color and label.
void svg_funnel_heatmap(const std::vector<FunnelRow>& rows,
                        const std::string& title,
                        const std::filesystem::path& path);

// Scatter of (delta_mean, tau_mean) per bucket with the dashed tau = delta
// oracle diagonal.
void svg_delta_tau(const std::vector<CurveRow>& rows, const std::string& title,
                   const std::filesystem::path& path);

struct SweepPoint {
  double value = 0.0;  // swept axis value
  double tau = 0.0;
  double delta = 0.0;
  double speedup = 0.0;
};

// Line chart of tau, delta, and R against the swept axis.
void svg_sweep_lines(const std::vector<SweepPoint>& points,
                     const std::string& axis_label, const std::string& title,
                     const std::filesystem::path& path);

}  // namespace speclab
