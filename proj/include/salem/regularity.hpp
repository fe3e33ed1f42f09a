#pragma once

// Exact ball masses of mu_n and the Frostman / Ahlfors constant scans.
//
// Balls are open intervals (x - r, x + r), optionally wrapped onto R/Z. The
// level-n measure has constant density Q_n / P_n on each surviving cell, so a
// ball's mass is the difference of the cumulative distribution at its two
// ends, computed with exact rationals.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "salem/cantor_tree.hpp"
#include "salem/common.hpp"

namespace salem {

namespace detail {

// mu([0, y)) for y in [0, 1].
inline Rational cumulative_mass(const StepMeasure& mu, const Rational& y) {
  if (y <= 0) return Rational(0);
  if (y >= 1) return Rational(1);
  const Rational u = y * mu.denominator;
  const BigInt f = boost::multiprecision::numerator(u) / boost::multiprecision::denominator(u);
  const auto it = std::lower_bound(mu.offsets.begin(), mu.offsets.end(), f);
  Rational count(BigInt(it - mu.offsets.begin()));
  if (it != mu.offsets.end() && *it == f) count += u - Rational(f);
  return count * mu.mass_per_cell;
}

}  // namespace detail

inline Rational ball_mass(const StepMeasure& mu, const Rational& x, const Rational& r, bool circle) {
  require(r > 0 && r <= 1, "ball_mass needs 0 < r <= 1");
  require(x >= 0 && x < 1, "ball_mass needs x in [0, 1)");
  const Rational lo = x - r;
  const Rational hi = x + r;
  if (!circle) return detail::cumulative_mass(mu, hi) - detail::cumulative_mass(mu, lo);
  if (2 * r >= 1) return Rational(1);  // misses at most one point of the circle
  if (lo < 0)
    return detail::cumulative_mass(mu, hi) + 1 - detail::cumulative_mass(mu, lo + 1);
  if (hi > 1)
    return 1 - detail::cumulative_mass(mu, lo) + detail::cumulative_mass(mu, hi - 1);
  return detail::cumulative_mass(mu, hi) - detail::cumulative_mass(mu, lo);
}

inline Rational ball_mass(const MeasureTree& tree, std::size_t n, const Rational& x,
                          const Rational& r, bool circle) {
  return ball_mass(level_intervals(tree, n), x, r, circle);
}

struct MassSample {
  Rational x;
  Rational r;
  Rational mass;
  double ratio = 0.0;  // mass / r^t
};

struct RadiusRow {
  Rational r;
  Rational max_mass;
  Rational min_support_mass;
  double max_ratio = 0.0;
  double min_ratio = 0.0;
};

struct RegularityReport {
  Variant variant = Variant::Custom;
  std::size_t level = 0;
  double t = 0.0;
  bool circle = true;
  std::vector<RadiusRow> rows;
  double c_upper = 0.0;  // max mu(B(x, r)) / r^t
  double c_lower = 0.0;  // min over cell midpoints
  // Variant A only: (2M + 1) and 1 / (M^t |X|) with the schedule's t.
  std::optional<double> reference_upper;
  std::optional<double> reference_lower;
  std::optional<bool> upper_within_reference;
  std::optional<bool> lower_within_reference;
  std::vector<MassSample> samples;  // filled when dump is requested
};

struct ScanOptions {
  bool circle = true;
  std::size_t grid_points = 256;  // stratified centers (2i + 1) / (2G)
  bool dump = false;
};

/// Smallest radius at which mu_n still reflects the limit mass: M_n / Q_n.
inline Rational resolution_floor(const Schedule& s, std::size_t n) {
  if (n == 0) return Rational(0);
  return Rational(BigInt(s.base(n)), s.Q(n));
}

/// Dyadic radii 2^-j lying in [floor, 1].
inline std::vector<Rational> dyadic_radii(const Rational& floor) {
  std::vector<Rational> out;
  Rational r = 1;
  while (r >= floor && r > 0) {
    out.push_back(r);
    r /= 2;
    if (floor == 0 && out.size() >= 20) break;
  }
  return out;
}

inline RegularityReport frostman_scan(const MeasureTree& tree, std::size_t n, double t,
                                      const std::vector<Rational>& radii,
                                      const ScanOptions& opt = {}) {
  require(n <= tree.depth(), "frostman_scan: level exceeds tree depth");
  require(t > 0.0, "frostman_scan needs t > 0");
  require(!radii.empty(), "frostman_scan needs at least one radius");
  const Schedule& s = tree.schedule();
  const Rational floor = resolution_floor(s, n);
  for (const auto& r : radii)
    require(r >= floor && r <= 1, "frostman_scan: radius below the resolution floor M_n/Q_n or above 1");

  const StepMeasure mu = level_intervals(tree, n);
  std::vector<Rational> centers, support;
  for (const auto& c : mu.offsets) {
    const Rational left(c, mu.denominator);
    const Rational mid(2 * c + 1, 2 * mu.denominator);
    centers.push_back(left);
    centers.push_back(mid);
    const Rational right(c + 1, mu.denominator);
    centers.push_back(right >= 1 ? right - 1 : right);
    support.push_back(mid);
  }
  for (std::size_t i = 0; i < opt.grid_points; ++i)
    centers.emplace_back(BigInt(2 * i + 1), BigInt(2 * opt.grid_points));

  RegularityReport rep;
  rep.variant = s.variant();
  rep.level = n;
  rep.t = t;
  rep.circle = opt.circle;

  std::optional<BigFloat> ref_up, ref_lo;
  std::optional<BigFloat> ta;
  if (s.variant() == Variant::TheoremA) {
    ta = BigFloat(*s.t());
    const BigFloat m(s.base(1));
    ref_up = 2 * m + 1;
    ref_lo = 1 / (boost::multiprecision::pow(m, *ta) * BigFloat(s.branching(1)));
    rep.reference_upper = static_cast<double>(*ref_up);
    rep.reference_lower = static_cast<double>(*ref_lo);
    rep.upper_within_reference = true;
    rep.lower_within_reference = true;
  }

  bool first = true;
  for (const auto& r : radii) {
    const BigFloat rt = boost::multiprecision::pow(to_big_float(r), BigFloat(t));
    std::optional<BigFloat> rta;
    if (ta) rta = boost::multiprecision::pow(to_big_float(r), *ta);
    RadiusRow row;
    row.r = r;
    bool row_first = true;
    for (const auto& x : centers) {
      const Rational mass = ball_mass(mu, x, r, opt.circle);
      if (row_first || mass > row.max_mass) row.max_mass = mass;
      row_first = false;
      if (rta && to_big_float(mass) > *ref_up * *rta) rep.upper_within_reference = false;
      if (opt.dump)
        rep.samples.push_back({x, r, mass, static_cast<double>(to_big_float(mass) / rt)});
    }
    row_first = true;
    for (const auto& x : support) {
      const Rational mass = ball_mass(mu, x, r, opt.circle);
      if (row_first || mass < row.min_support_mass) row.min_support_mass = mass;
      row_first = false;
      if (rta && to_big_float(mass) < *ref_lo * *rta) rep.lower_within_reference = false;
    }
    row.max_ratio = static_cast<double>(to_big_float(row.max_mass) / rt);
    row.min_ratio = static_cast<double>(to_big_float(row.min_support_mass) / rt);
    if (first || row.max_ratio > rep.c_upper) rep.c_upper = row.max_ratio;
    if (first || row.min_ratio < rep.c_lower) rep.c_lower = row.min_ratio;
    first = false;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

struct TheoremBLevel {
  std::size_t level = 0;
  Rational radius;      // 1 / (n+1)!
  Rational max_mass;
  Rational bound;       // 2 / P_n
  bool within_bound = true;
  double ratio = 0.0;   // max_mass / r^(1 - 2 eps)
};

struct TheoremBReport {
  double epsilon = 0.0;
  std::vector<TheoremBLevel> levels;
  bool all_within_bound = true;
  bool ratio_nonincreasing = true;  // trend flag only
};

/// At each level n in [n_lo, n_hi] with r = 1/(n+1)!: max_x mu_n(x-r, x+r) <= 2/P_n.
inline TheoremBReport theorem_b_mass_check(const MeasureTree& tree, std::size_t n_lo,
                                           std::size_t n_hi, double epsilon,
                                           std::size_t grid_points = 256) {
  require(tree.schedule().variant() == Variant::TheoremB,
          "theorem_b_mass_check needs a variant B tree");
  require(epsilon > 0.0 && epsilon < 0.5, "theorem_b_mass_check needs epsilon in (0, 1/2)");
  require(n_lo >= 1 && n_lo <= n_hi && n_hi <= tree.depth(),
          "theorem_b_mass_check: level range must lie in [1, depth]");
  TheoremBReport rep;
  rep.epsilon = epsilon;
  for (std::size_t n = n_lo; n <= n_hi; ++n) {
    const StepMeasure mu = level_intervals(tree, n);
    TheoremBLevel row;
    row.level = n;
    row.radius = Rational(BigInt(1), factorial(static_cast<unsigned>(n + 1)));
    row.bound = Rational(BigInt(2), tree.schedule().P(n));
    std::vector<Rational> centers;
    for (const auto& c : mu.offsets) {
      centers.emplace_back(c, mu.denominator);
      centers.emplace_back(2 * c + 1, 2 * mu.denominator);
      const Rational right(c + 1, mu.denominator);
      centers.push_back(right >= 1 ? right - 1 : right);
    }
    for (std::size_t i = 0; i < grid_points; ++i)
      centers.emplace_back(BigInt(2 * i + 1), BigInt(2 * grid_points));
    for (const auto& x : centers) {
      const Rational m = ball_mass(mu, x, row.radius, true);
      if (m > row.max_mass) row.max_mass = m;
    }
    row.within_bound = row.max_mass <= row.bound;
    row.ratio = static_cast<double>(
        to_big_float(row.max_mass) /
        boost::multiprecision::pow(to_big_float(row.radius), BigFloat(1 - 2 * epsilon)));
    rep.all_within_bound = rep.all_within_bound && row.within_bound;
    if (!rep.levels.empty() && row.ratio > rep.levels.back().ratio) rep.ratio_nonincreasing = false;
    rep.levels.push_back(std::move(row));
  }
  return rep;
}

}  // namespace salem
