#include "speclab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace speclab {
namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

std::ofstream open_svg(const std::filesystem::path& path, int width,
                       int height) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
      << height << "\" font-family=\"sans-serif\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height
      << "\" fill=\"white\"/>\n";
  return out;
}

void close_svg(std::ofstream& out, const std::filesystem::path& path) {
  out << "</svg>\n";
  if (!out) throw IoError("failed writing " + path.string());
}

void draw_title(std::ofstream& out, int width, const std::string& title) {
  out << "<text x=\"" << width / 2
      << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << title
      << "</text>\n";
}

// White-to-blue ramp for frequencies in [0, 1].
std::string heat_color(double f) {
  f = std::clamp(f, 0.0, 1.0);
  const int r = static_cast<int>(std::lround(255.0 - 221.0 * f));
  const int g = static_cast<int>(std::lround(255.0 - 153.0 * f));
  const int b = static_cast<int>(std::lround(255.0 - 51.0 * f));
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

void empty_note(std::ofstream& out, int width, int height) {
  out << "<text x=\"" << width / 2 << "\" y=\"" << height / 2
      << "\" text-anchor=\"middle\" font-size=\"14\" fill=\"#888\">"
         "no data</text>\n";
}

struct Scale {
  double lo = 0.0;
  double hi = 1.0;
  double px0 = 0.0;
  double px1 = 1.0;

  double operator()(double v) const {
    if (hi == lo) return 0.5 * (px0 + px1);
    return px0 + (v - lo) / (hi - lo) * (px1 - px0);
  }
};

// Assumes y maps its low value to the bottom pixel row (y.px0 > y.px1).
void draw_axes(std::ofstream& out, const Scale& x, const Scale& y,
               const std::string& x_label, const std::string& y_label) {
  out << "<line x1=\"" << fmt(x.px0) << "\" y1=\"" << fmt(y.px0)
      << "\" x2=\"" << fmt(x.px1) << "\" y2=\"" << fmt(y.px0)
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << fmt(x.px0) << "\" y1=\"" << fmt(y.px0)
      << "\" x2=\"" << fmt(x.px0) << "\" y2=\"" << fmt(y.px1)
      << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double tx = x.lo + (x.hi - x.lo) * i / 4.0;
    const double ty = y.lo + (y.hi - y.lo) * i / 4.0;
    out << "<text x=\"" << fmt(x(tx)) << "\" y=\"" << fmt(y.px0 + 16)
        << "\" text-anchor=\"middle\" font-size=\"10\">" << fmt(tx)
        << "</text>\n";
    out << "<text x=\"" << fmt(x.px0 - 6) << "\" y=\"" << fmt(y(ty) + 3)
        << "\" text-anchor=\"end\" font-size=\"10\">" << fmt(ty)
        << "</text>\n";
  }
  out << "<text x=\"" << fmt(0.5 * (x.px0 + x.px1)) << "\" y=\""
      << fmt(y.px0 + 34) << "\" text-anchor=\"middle\" font-size=\"12\">"
      << x_label << "</text>\n";
  out << "<text x=\"14\" y=\"" << fmt(0.5 * (y.px1 + y.px0))
      << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 "
      << fmt(0.5 * (y.px1 + y.px0)) << ")\">" << y_label << "</text>\n";
}

}  // namespace

void svg_funnel_heatmap(const std::vector<FunnelRow>& rows,
                        const std::string& title,
                        const std::filesystem::path& path) {
  std::int32_t max_depth = 0;
  std::int32_t max_rank = 0;
  for (const FunnelRow& r : rows) {
    max_depth = std::max(max_depth, r.depth);
    max_rank = std::max(max_rank, r.rank);
  }

  const int cell = 46;
  const int left = 80;
  const int top = 50;
  const int width = std::max(360, left + max_rank * cell + 30);
  const int height = std::max(220, top + max_depth * cell + 50);
  std::ofstream out = open_svg(path, width, height);
  draw_title(out, width, title);

  if (rows.empty()) {
    empty_note(out, width, height);
    close_svg(out, path);
    return;
  }

  for (const FunnelRow& r : rows) {
    const int x = left + (r.rank - 1) * cell;
    const int y = top + (r.depth - 1) * cell;
    out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell - 2
        << "\" height=\"" << cell - 2 << "\" fill=\"" << heat_color(r.freq)
        << "\" stroke=\"#ccc\"/>\n";
    out << "<text x=\"" << x + cell / 2 - 1 << "\" y=\"" << y + cell / 2 + 3
        << "\" text-anchor=\"middle\" font-size=\"10\">" << fmt(r.freq)
        << "</text>\n";
  }
  for (std::int32_t d = 1; d <= max_depth; ++d)
    out << "<text x=\"" << left - 8 << "\" y=\""
        << top + (d - 1) * cell + cell / 2 + 3
        << "\" text-anchor=\"end\" font-size=\"11\">depth " << d
        << "</text>\n";
  for (std::int32_t k = 1; k <= max_rank; ++k)
    out << "<text x=\"" << left + (k - 1) * cell + cell / 2 - 1 << "\" y=\""
        << top + max_depth * cell + 16
        << "\" text-anchor=\"middle\" font-size=\"11\">" << k << "</text>\n";
  out << "<text x=\"" << left + (max_rank * cell) / 2 << "\" y=\""
      << top + max_depth * cell + 34
      << "\" text-anchor=\"middle\" font-size=\"12\">sibling rank</text>\n";
  close_svg(out, path);
}

void svg_delta_tau(const std::vector<CurveRow>& rows, const std::string& title,
                   const std::filesystem::path& path) {
  const int width = 460;
  const int height = 400;
  std::ofstream out = open_svg(path, width, height);
  draw_title(out, width, title);

  if (rows.empty()) {
    empty_note(out, width, height);
    close_svg(out, path);
    return;
  }

  double lo = 0.0;
  double hi = 1.0;
  for (const CurveRow& r : rows) {
    hi = std::max({hi, r.tau_mean, r.delta_mean});
  }
  hi *= 1.1;

  const Scale x{lo, hi, 70.0, width - 30.0};
  const Scale y{lo, hi, height - 60.0, 50.0};  // low value at the bottom

  draw_axes(out, x, y, "mean draft forwards per step (delta)",
            "mean accepted tokens per step (tau)");

  // Oracle diagonal tau = delta.
  out << "<line x1=\"" << fmt(x(lo)) << "\" y1=\"" << fmt(y(lo)) << "\" x2=\""
      << fmt(x(hi)) << "\" y2=\"" << fmt(y(hi))
      << "\" stroke=\"#888\" stroke-dasharray=\"6 4\"/>\n";
  out << "<text x=\"" << fmt(x(hi * 0.82)) << "\" y=\""
      << fmt(y(hi * 0.82) - 8)
      << "\" font-size=\"10\" fill=\"#888\">tau = delta</text>\n";

  for (const CurveRow& r : rows) {
    out << "<circle cx=\"" << fmt(x(r.delta_mean)) << "\" cy=\""
        << fmt(y(r.tau_mean)) << "\" r=\"4\" fill=\"#cc4422\"/>\n";
    out << "<text x=\"" << fmt(x(r.delta_mean) + 7) << "\" y=\""
        << fmt(y(r.tau_mean) + 3) << "\" font-size=\"10\">" << r.bucket
        << "</text>\n";
  }
  close_svg(out, path);
}

void svg_sweep_lines(const std::vector<SweepPoint>& points,
                     const std::string& axis_label, const std::string& title,
                     const std::filesystem::path& path) {
  const int width = 520;
  const int height = 400;
  std::ofstream out = open_svg(path, width, height);
  draw_title(out, width, title);

  if (points.empty()) {
    empty_note(out, width, height);
    close_svg(out, path);
    return;
  }

  std::vector<SweepPoint> sorted = points;
  std::sort(sorted.begin(), sorted.end(),
            [](const SweepPoint& a, const SweepPoint& b) {
              return a.value < b.value;
            });

  double xlo = sorted.front().value;
  double xhi = sorted.back().value;
  if (xlo == xhi) {
    xlo -= 0.5;
    xhi += 0.5;
  }
  double yhi = 1.0;
  for (const SweepPoint& p : sorted)
    yhi = std::max({yhi, p.tau, p.delta, p.speedup});
  yhi *= 1.1;

  const Scale x{xlo, xhi, 70.0, width - 110.0};
  const Scale y{0.0, yhi, height - 60.0, 50.0};
  draw_axes(out, x, y, axis_label, "per-step means");

  const struct {
    const char* name;
    const char* color;
    double SweepPoint::*field;
  } series[] = {{"tau", "#cc4422", &SweepPoint::tau},
                {"delta", "#2266cc", &SweepPoint::delta},
                {"R", "#22aa55", &SweepPoint::speedup}};

  for (const auto& s : series) {
    out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" points=\"";
    for (const SweepPoint& p : sorted)
      out << fmt(x(p.value)) << ',' << fmt(y(p.*(s.field))) << ' ';
    out << "\"/>\n";
    for (const SweepPoint& p : sorted)
      out << "<circle cx=\"" << fmt(x(p.value)) << "\" cy=\""
          << fmt(y(p.*(s.field))) << "\" r=\"3\" fill=\"" << s.color
          << "\"/>\n";
  }
  for (std::size_t i = 0; i < 3; ++i) {
    const double ly = 60.0 + 18.0 * static_cast<double>(i);
    out << "<line x1=\"" << width - 95 << "\" y1=\"" << fmt(ly) << "\" x2=\""
        << width - 75 << "\" y2=\"" << fmt(ly) << "\" stroke=\""
        << series[i].color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << width - 70 << "\" y=\"" << fmt(ly + 4)
        << "\" font-size=\"11\">" << series[i].name << "</text>\n";
  }
  close_svg(out, path);
}

}  // namespace speclab
