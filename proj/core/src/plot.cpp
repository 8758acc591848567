#include "gff/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "gff/csv.hpp"
#include "gff/errors.hpp"

namespace gff {

namespace {

constexpr int k_width = 640;
constexpr int k_height = 420;
constexpr int k_margin_left = 64;
constexpr int k_margin_right = 24;
constexpr int k_margin_top = 40;
constexpr int k_margin_bottom = 56;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Range {
  double lo;
  double hi;
  double span() const { return hi - lo; }
};

Range padded_range(double lo, double hi) {
  if (!(hi > lo)) {
    // Degenerate data collapses to a unit-wide window around the value.
    const double c = lo;
    return {c - 0.5, c + 0.5};
  }
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

double sx(const Range& r, double v) {
  return k_margin_left + (v - r.lo) / r.span() * (k_width - k_margin_left - k_margin_right);
}

double sy(const Range& r, double v) {
  return k_height - k_margin_bottom -
         (v - r.lo) / r.span() * (k_height - k_margin_top - k_margin_bottom);
}

void open_svg(std::string& s, const PlotSeries& series) {
  char head[256];
  std::snprintf(head, sizeof(head),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                "viewBox=\"0 0 %d %d\">\n",
                k_width, k_height, k_width, k_height);
  s += head;
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!series.title.empty()) {
    s += "<text x=\"" + num(k_width / 2.0) +
         "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
         series.title + "</text>\n";
  }
}

void draw_axes(std::string& s, const PlotSeries& series, const Range& xr, const Range& yr) {
  const double x0 = k_margin_left, x1 = k_width - k_margin_right;
  const double y0 = k_height - k_margin_bottom, y1 = k_margin_top;
  s += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x1) + "\" y2=\"" +
       num(y0) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x0) + "\" y2=\"" +
       num(y1) + "\" stroke=\"black\"/>\n";
  s += "<text x=\"" + num(x0 - 6) + "\" y=\"" + num(y0 + 4) +
       "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + num(yr.lo) +
       "</text>\n";
  s += "<text x=\"" + num(x0 - 6) + "\" y=\"" + num(y1 + 4) +
       "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + num(yr.hi) +
       "</text>\n";
  s += "<text x=\"" + num(x0) + "\" y=\"" + num(y0 + 18) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + num(xr.lo) +
       "</text>\n";
  s += "<text x=\"" + num(x1) + "\" y=\"" + num(y0 + 18) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + num(xr.hi) +
       "</text>\n";
  if (!series.x_label.empty()) {
    s += "<text x=\"" + num((x0 + x1) / 2) + "\" y=\"" + num(k_height - 14.0) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
         series.x_label + "</text>\n";
  }
  if (!series.y_label.empty()) {
    s += "<text x=\"18\" y=\"" + num((y0 + y1) / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
         "transform=\"rotate(-90 18 " +
         num((y0 + y1) / 2) + ")\">" + series.y_label + "</text>\n";
  }
}

std::string render_line(const PlotSeries& series) {
  if (series.x.size() != series.y.size()) {
    throw ValidationError("plot: line series needs matching x and y lengths");
  }
  const auto [xmin_it, xmax_it] = std::minmax_element(series.x.begin(), series.x.end());
  const auto [ymin_it, ymax_it] = std::minmax_element(series.y.begin(), series.y.end());
  const Range xr = padded_range(*xmin_it, *xmax_it);
  const Range yr = padded_range(*ymin_it, *ymax_it);

  std::string s;
  open_svg(s, series);
  draw_axes(s, series, xr, yr);
  s += "<polyline fill=\"none\" stroke=\"#1f4e8c\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < series.x.size(); ++i) {
    if (i) s += ' ';
    s += num(sx(xr, series.x[i])) + "," + num(sy(yr, series.y[i]));
  }
  s += "\"/>\n</svg>\n";
  return s;
}

std::string render_histogram(const PlotSeries& series) {
  if (series.bins < 1) throw ValidationError("plot: histogram needs bins >= 1");
  const auto [min_it, max_it] = std::minmax_element(series.x.begin(), series.x.end());
  const double lo = *min_it, hi = *max_it;

  std::vector<double> counts;
  Range xr{0.0, 1.0};
  if (hi > lo) {
    counts.assign(static_cast<std::size_t>(series.bins), 0.0);
    const double w = (hi - lo) / series.bins;
    for (double v : series.x) {
      auto b = static_cast<std::size_t>((v - lo) / w);
      counts[std::min(b, counts.size() - 1)] += 1.0;
    }
    xr = {lo, hi};
  } else {
    // All values identical: one full-height bar.
    counts.assign(1, static_cast<double>(series.x.size()));
    xr = {lo - 0.5, lo + 0.5};
  }
  const double peak = *std::max_element(counts.begin(), counts.end());
  const Range yr{0.0, peak > 0.0 ? peak : 1.0};

  std::string s;
  open_svg(s, series);
  draw_axes(s, series, xr, yr);
  const double bw = xr.span() / static_cast<double>(counts.size());
  for (std::size_t b = 0; b < counts.size(); ++b) {
    if (counts[b] <= 0.0) continue;
    const double x = sx(xr, xr.lo + static_cast<double>(b) * bw);
    const double xe = sx(xr, xr.lo + static_cast<double>(b + 1) * bw);
    const double y = sy(yr, counts[b]);
    const double y0 = sy(yr, 0.0);
    s += "<rect class=\"bar\" x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" +
         num(xe - x) + "\" height=\"" + num(y0 - y) + "\" fill=\"#4a7abc\" stroke=\"white\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

std::string render_heatmap(const PlotSeries& series) {
  if (series.rows < 1 || series.cols < 1 ||
      static_cast<std::size_t>(series.rows) * static_cast<std::size_t>(series.cols) !=
          series.x.size()) {
    throw ValidationError("plot: heatmap needs rows * cols matching the value count");
  }
  const auto [min_it, max_it] = std::minmax_element(series.x.begin(), series.x.end());
  const double lo = *min_it;
  const double span = *max_it > lo ? *max_it - lo : 1.0;

  std::string s;
  open_svg(s, series);
  const double plot_w = k_width - k_margin_left - k_margin_right;
  const double plot_h = k_height - k_margin_top - k_margin_bottom;
  const double cw = plot_w / series.cols;
  const double ch = plot_h / series.rows;
  for (int r = 0; r < series.rows; ++r) {
    for (int c = 0; c < series.cols; ++c) {
      const double v = series.x[static_cast<std::size_t>(r) * series.cols + c];
      const double t = (v - lo) / span;
      // Light-to-dark blue ramp.
      const int red = static_cast<int>(std::lround(235.0 - 190.0 * t));
      const int green = static_cast<int>(std::lround(240.0 - 160.0 * t));
      const int blue = 255;
      char fill[24];
      std::snprintf(fill, sizeof(fill), "#%02x%02x%02x", red, green, blue);
      s += "<rect class=\"cell\" x=\"" + num(k_margin_left + c * cw) + "\" y=\"" +
           num(k_margin_top + r * ch) + "\" width=\"" + num(cw) + "\" height=\"" + num(ch) +
           "\" fill=\"" + fill + "\"/>\n";
    }
  }
  if (!series.x_label.empty()) {
    s += "<text x=\"" + num(k_width / 2.0) + "\" y=\"" + num(k_height - 14.0) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
         series.x_label + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace

std::string render_svg(const PlotSeries& series, PlotKind kind) {
  if (series.x.empty()) throw ValidationError("plot: empty series");
  switch (kind) {
    case PlotKind::line:
      return render_line(series);
    case PlotKind::histogram:
      return render_histogram(series);
    case PlotKind::heatmap:
      return render_heatmap(series);
  }
  throw ValidationError("plot: unknown kind");
}

void emit_plot(const PlotSeries& series, PlotKind kind, const std::string& path) {
  write_text_file(path, render_svg(series, kind));
}

}  // namespace gff
