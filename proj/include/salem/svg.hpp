#pragma once

// Standalone log-log SVG plots for decay profiles and regularity scans.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "salem/fourier.hpp"
#include "salem/regularity.hpp"

namespace salem {

/// Maps log10 data coordinates onto the plot rectangle.
struct LogAxes {
  double lx_min = 0, lx_max = 1, ly_min = 0, ly_max = 1;
  double width = 640, height = 480, margin = 60;

  double x_scale() const { return (width - 2 * margin) / (lx_max - lx_min); }
  double y_scale() const { return (height - 2 * margin) / (ly_max - ly_min); }
  double px(double x) const { return margin + (std::log10(x) - lx_min) * x_scale(); }
  double py(double y) const { return margin + (ly_max - std::log10(y)) * y_scale(); }
};

namespace detail {

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

inline LogAxes fit_axes(const std::vector<double>& xs, const std::vector<double>& ys) {
  LogAxes ax;
  auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
  auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
  ax.lx_min = std::floor(std::log10(*xmin));
  ax.lx_max = std::ceil(std::log10(*xmax));
  ax.ly_min = std::floor(std::log10(*ymin));
  ax.ly_max = std::ceil(std::log10(*ymax));
  if (ax.lx_max <= ax.lx_min) ax.lx_max = ax.lx_min + 1;
  if (ax.ly_max <= ax.ly_min) ax.ly_max = ax.ly_min + 1;
  return ax;
}

inline std::string header(const LogAxes& ax, const std::string& title) {
  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(ax.width) + "\" height=\"" +
       fmt(ax.height) + "\" viewBox=\"0 0 " + fmt(ax.width) + " " + fmt(ax.height) + "\">\n";
  s += "<title>" + title + "</title>\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + fmt(ax.width) + "\" height=\"" + fmt(ax.height) +
       "\" fill=\"white\"/>\n";
  s += "<g class=\"plot\" data-x-scale=\"" + fmt(ax.x_scale()) + "\" data-y-scale=\"" +
       fmt(ax.y_scale()) + "\">\n";
  const double x0 = ax.margin, x1 = ax.width - ax.margin;
  const double y0 = ax.margin, y1 = ax.height - ax.margin;
  s += "<rect x=\"" + fmt(x0) + "\" y=\"" + fmt(y0) + "\" width=\"" + fmt(x1 - x0) +
       "\" height=\"" + fmt(y1 - y0) + "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double d = ax.lx_min; d <= ax.lx_max; d += 1) {
    const double x = ax.px(std::pow(10.0, d));
    s += "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y1 + 18) +
         "\" font-size=\"11\" text-anchor=\"middle\">1e" + std::to_string(static_cast<int>(d)) +
         "</text>\n";
  }
  for (double d = ax.ly_min; d <= ax.ly_max; d += 1) {
    const double y = ax.py(std::pow(10.0, d));
    s += "<text x=\"" + fmt(x0 - 6) + "\" y=\"" + fmt(y + 4) +
         "\" font-size=\"11\" text-anchor=\"end\">1e" + std::to_string(static_cast<int>(d)) +
         "</text>\n";
  }
  return s;
}

inline std::string footer() { return "</g>\n</svg>\n"; }

inline std::string line(const LogAxes& ax, const std::string& cls, const std::string& color,
                        double xa, double ya, double xb, double yb) {
  return "<line class=\"" + cls + "\" x1=\"" + fmt(ax.px(xa)) + "\" y1=\"" + fmt(ax.py(ya)) +
         "\" x2=\"" + fmt(ax.px(xb)) + "\" y2=\"" + fmt(ax.py(yb)) + "\" stroke=\"" + color +
         "\" stroke-width=\"1.5\"/>\n";
}

inline std::string dot(const LogAxes& ax, const std::string& cls, double x, double y) {
  return "<circle class=\"" + cls + "\" cx=\"" + fmt(ax.px(x)) + "\" cy=\"" + fmt(ax.py(y)) +
         "\" r=\"3\"/>\n";
}

}  // namespace detail

/// Band suprema, fitted C k^(-sigma/2) line and an optional target envelope
/// with the target exponent, anchored at the first band.
inline std::string emit_svg(const DecayProfile& prof, std::optional<double> target_sigma = {}) {
  require(!prof.bands.empty(), "emit_svg: empty decay profile");
  if (prof.flat_zero) {
    LogAxes ax;
    std::string s = detail::header(ax, "Fourier decay profile");
    s += "<text class=\"annotation\" x=\"" + detail::fmt(ax.width / 2) + "\" y=\"" +
         detail::fmt(ax.height / 2) + "\" text-anchor=\"middle\">no decay data (flat-zero profile)</text>\n";
    return s + detail::footer();
  }
  std::vector<double> xs, ys;
  for (const auto& b : prof.bands) {
    if (!b.in_fit) continue;
    xs.push_back(static_cast<double>(b.lo));
    ys.push_back(b.sup);
  }
  const double ka = xs.front(), kb = xs.back();
  const double fa = prof.c_hat * std::pow(ka, -prof.sigma_hat / 2);
  const double fb = prof.c_hat * std::pow(kb, -prof.sigma_hat / 2);
  std::vector<double> all_y = ys;
  all_y.push_back(fa);
  all_y.push_back(fb);
  std::optional<std::pair<double, double>> env;
  if (target_sigma) {
    const double c = ys.front() * std::pow(ka, *target_sigma / 2);
    env = std::make_pair(c * std::pow(ka, -*target_sigma / 2), c * std::pow(kb, -*target_sigma / 2));
    all_y.push_back(env->first);
    all_y.push_back(env->second);
  }
  const LogAxes ax = detail::fit_axes(xs, all_y);
  std::string s = detail::header(ax, "Fourier decay profile");
  for (std::size_t i = 0; i < xs.size(); ++i) s += detail::dot(ax, "band-sup", xs[i], ys[i]);
  s += detail::line(ax, "fit", "#d62728", ka, fa, kb, fb);
  if (env) s += detail::line(ax, "target", "#1f77b4", ka, env->first, kb, env->second);
  s += "<text x=\"" + detail::fmt(ax.width - ax.margin) + "\" y=\"" + detail::fmt(ax.margin - 10) +
       "\" font-size=\"12\" text-anchor=\"end\">sigma_hat = " + detail::fmt(prof.sigma_hat) +
       ", C_hat = " + detail::fmt(prof.c_hat) + "</text>\n";
  return s + detail::footer();
}

/// Max and min ball masses per radius with the C r^t envelopes.
inline std::string emit_svg(const RegularityReport& rep) {
  require(!rep.rows.empty(), "emit_svg: empty regularity report");
  std::vector<double> xs, ys;
  for (const auto& row : rep.rows) {
    xs.push_back(static_cast<double>(to_big_float(row.r)));
    ys.push_back(static_cast<double>(to_big_float(row.max_mass)));
    ys.push_back(std::max(1e-300, static_cast<double>(to_big_float(row.min_support_mass))));
  }
  const double ra = *std::min_element(xs.begin(), xs.end());
  const double rb = *std::max_element(xs.begin(), xs.end());
  auto env = [&](double c, double r) { return c * std::pow(r, rep.t); };
  std::vector<double> all_y = ys;
  for (double c : {rep.c_upper, rep.c_lower}) {
    all_y.push_back(env(c, ra));
    all_y.push_back(env(c, rb));
  }
  const LogAxes ax = detail::fit_axes(xs, all_y);
  std::string s = detail::header(ax, "Ball mass scan");
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    s += detail::dot(ax, "max-mass", xs[i], ys[2 * i]);
    s += detail::dot(ax, "min-mass", xs[i], ys[2 * i + 1]);
  }
  s += detail::line(ax, "upper", "#d62728", ra, env(rep.c_upper, ra), rb, env(rep.c_upper, rb));
  s += detail::line(ax, "lower", "#1f77b4", ra, env(rep.c_lower, ra), rb, env(rep.c_lower, rb));
  return s + detail::footer();
}

}  // namespace salem
