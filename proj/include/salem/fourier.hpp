#pragma once

/**
 * @file fourier.hpp
 * @brief Fourier coefficients of step measures and martingale diagnostics.
 *
 * Convention: mu^(k) = integral of exp(-2 pi i k x) d mu(x). For a cell
 * [c/Q, (c+1)/Q) the transform is
 *   (1/Q) exp(-pi i k (2c+1)/Q) sinc(pi k/Q),
 * and the residue k(2c+1) mod 2Q is reduced in integers before it is turned
 * into an angle, so the phase error does not grow with k or Q.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <ostream>
#include <span>
#include <vector>

#include "salem/cantor_tree.hpp"
#include "salem/common.hpp"

namespace salem {

namespace detail {

// Neumaier summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline std::uint64_t mod_u64(std::int64_t k, std::uint64_t m) {
  const __int128 r = static_cast<__int128>(k) % static_cast<__int128>(m);
  return static_cast<std::uint64_t>(r < 0 ? r + m : r);
}

// Representative of r (in [0, 2q)) in (-q, q].
inline std::int64_t centered(std::uint64_t r, std::uint64_t q) {
  return r > q ? static_cast<std::int64_t>(r) - static_cast<std::int64_t>(2 * q)
               : static_cast<std::int64_t>(r);
}

}  // namespace detail

/// Evaluates mu_n^(k) for a fixed level. Construction cost O(P_n).
class SpectralEvaluator {
 public:
  explicit SpectralEvaluator(const StepMeasure& mu)
      : level_(mu.level), q_big_(mu.denominator), cells_(mu.offsets.size()) {
    const BigInt two_q = 2 * q_big_;
    inv_p_ = 1.0 / static_cast<double>(mu.offsets.size());
    fast_ = two_q <= (BigInt(1) << 62);
    if (fast_) {
      q_ = static_cast<std::uint64_t>(q_big_);
      two_q_ = 2 * q_;
      odd_.reserve(cells_);
      for (const auto& c : mu.offsets) odd_.push_back(2 * static_cast<std::uint64_t>(c) + 1);
    } else {
      big_odd_.reserve(cells_);
      for (const auto& c : mu.offsets) big_odd_.push_back(2 * c + 1);
    }
  }

  std::size_t level() const { return level_; }
  const BigInt& denominator() const { return q_big_; }
  std::size_t cells() const { return cells_; }

  std::complex<double> operator()(std::int64_t k) const {
    return fast_ ? eval_fast(k) : eval_big(k);
  }

 private:
  std::complex<double> eval_fast(std::int64_t k) const {
    const std::uint64_t kk = detail::mod_u64(k, two_q_);
    const double q = static_cast<double>(q_);
    detail::CompensatedSum re, im;
    const bool narrow = two_q_ <= (std::uint64_t{1} << 32);
    for (const std::uint64_t odd : odd_) {
      const std::uint64_t r =
          narrow ? kk * odd % two_q_
                 : static_cast<std::uint64_t>(static_cast<unsigned __int128>(kk) * odd % two_q_);
      const double angle = -std::numbers::pi * (static_cast<double>(detail::centered(r, q_)) / q);
      re.add(std::cos(angle));
      im.add(std::sin(angle));
    }
    double sinc = 1.0;
    if (k != 0) {
      const double kc = static_cast<double>(detail::centered(kk, q_));
      sinc = std::sin(std::numbers::pi * (kc / q)) /
             (std::numbers::pi * (static_cast<double>(k) / q));
    }
    return {sinc * re.value() * inv_p_, sinc * im.value() * inv_p_};
  }

  std::complex<double> eval_big(std::int64_t k) const {
    const BigInt two_q = 2 * q_big_;
    BigInt kk = BigInt(k) % two_q;
    if (kk < 0) kk += two_q;
    const long double q = q_big_.convert_to<long double>();
    auto centered_ratio = [&](const BigInt& r) {
      const BigInt c = r > q_big_ ? BigInt(r - two_q) : r;
      return static_cast<double>(c.convert_to<long double>() / q);
    };
    detail::CompensatedSum re, im;
    for (const auto& odd : big_odd_) {
      const BigInt r = (kk * odd) % two_q;
      const double angle = -std::numbers::pi * centered_ratio(r);
      re.add(std::cos(angle));
      im.add(std::sin(angle));
    }
    double sinc = 1.0;
    if (k != 0) {
      sinc = std::sin(std::numbers::pi * centered_ratio(kk)) /
             (std::numbers::pi * static_cast<double>(static_cast<long double>(k) / q));
    }
    return {sinc * re.value() * inv_p_, sinc * im.value() * inv_p_};
  }

  std::size_t level_;
  BigInt q_big_;
  std::size_t cells_;
  double inv_p_ = 1.0;
  bool fast_ = true;
  std::uint64_t q_ = 1;
  std::uint64_t two_q_ = 2;
  std::vector<std::uint64_t> odd_;
  std::vector<BigInt> big_odd_;
};

/// integral over [c/Q, (c+1)/Q) of exp(-2 pi i k x) dx.
inline std::complex<double> interval_ft(const BigInt& c, const BigInt& q, std::int64_t k) {
  require(q >= 1 && c >= 0 && c < q, "interval_ft needs 0 <= c < Q");
  StepMeasure cell;
  cell.denominator = q;
  cell.offsets = {c};
  // Single-cell measure has density Q; undo it.
  return SpectralEvaluator(cell)(k) / q.convert_to<double>();
}

inline std::complex<double> mu_hat(const MeasureTree& tree, std::size_t n, std::int64_t k) {
  return SpectralEvaluator(level_intervals(tree, n))(k);
}

struct FourierCoefficient {
  std::int64_t k = 0;
  std::complex<double> value;
};

struct FourierCoeffs {
  std::size_t level = 0;
  std::vector<FourierCoefficient> values;  // ascending k
};

inline FourierCoeffs mu_hat_batch(const SpectralEvaluator& eval, std::span<const std::int64_t> ks) {
  std::vector<std::int64_t> sorted(ks.begin(), ks.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  FourierCoeffs out;
  out.level = eval.level();
  out.values.resize(sorted.size());
  parallel_for(sorted.size(), [&](std::size_t i) {
    out.values[i] = {sorted[i], eval(sorted[i])};
  });
  return out;
}

inline FourierCoeffs mu_hat_batch(const MeasureTree& tree, std::size_t n,
                                  std::span<const std::int64_t> ks) {
  return mu_hat_batch(SpectralEvaluator(level_intervals(tree, n)), ks);
}

/// All k in [k_lo, k_hi].
inline FourierCoeffs mu_hat_range(const MeasureTree& tree, std::size_t n, std::int64_t k_lo,
                                  std::int64_t k_hi) {
  require(k_lo <= k_hi, "empty frequency range");
  std::vector<std::int64_t> ks;
  ks.reserve(static_cast<std::size_t>(k_hi - k_lo + 1));
  for (std::int64_t k = k_lo; k <= k_hi; ++k) ks.push_back(k);
  return mu_hat_batch(tree, n, ks);
}

inline void write_coefficients_csv(const FourierCoeffs& coeffs, std::ostream& out) {
  out << "k,re,im,abs\n";
  char buf[128];
  for (const auto& c : coeffs.values) {
    std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%.17g\n", static_cast<long long>(c.k),
                  c.value.real(), c.value.imag(), std::abs(c.value));
    out << buf;
  }
}

// ---------------------------------------------------------------------------
// Decay profile
// ---------------------------------------------------------------------------

struct DecayBand {
  int exponent = 0;        // band [2^exponent, 2^(exponent+1))
  std::int64_t lo = 0;
  std::int64_t hi = 0;     // inclusive
  double sup = 0.0;
  std::int64_t argmax = 0;
  bool in_fit = false;
};

struct DecayProfile {
  std::size_t level = 0;
  std::int64_t k_min = 1;
  std::vector<DecayBand> bands;
  bool flat_zero = false;
  std::size_t fitted_bands = 0;
  double sigma_hat = 0.0;  // -2 * slope of log sup against log k
  double c_hat = 0.0;
};

inline constexpr double kFlatZeroTolerance = 1e-12;

/// Band suprema over complete dyadic bands of positive k >= k_min and a
/// least-squares fit log sup = log C - (sigma/2) log k.
inline DecayProfile decay_profile(const FourierCoeffs& coeffs, std::int64_t k_min) {
  DecayProfile prof;
  prof.level = coeffs.level;
  prof.k_min = std::max<std::int64_t>(k_min, 1);
  std::vector<FourierCoefficient> pos;
  for (const auto& c : coeffs.values)
    if (c.k >= prof.k_min) pos.push_back(c);
  for (int b = 0; b < 62; ++b) {
    const std::int64_t lo = std::int64_t{1} << b;
    const std::int64_t hi = (lo << 1) - 1;
    if (lo < prof.k_min) continue;
    auto first = std::lower_bound(pos.begin(), pos.end(), lo,
                                  [](const FourierCoefficient& c, std::int64_t k) { return c.k < k; });
    auto last = std::upper_bound(pos.begin(), pos.end(), hi,
                                 [](std::int64_t k, const FourierCoefficient& c) { return k < c.k; });
    if (last - first != hi - lo + 1) continue;  // incomplete band
    DecayBand band{b, lo, hi, 0.0, lo, false};
    for (auto it = first; it != last; ++it) {
      const double a = std::abs(it->value);
      if (a > band.sup) {
        band.sup = a;
        band.argmax = it->k;
      }
    }
    prof.bands.push_back(band);
  }
  require(prof.bands.size() >= 3, "decay_profile needs at least 3 complete dyadic bands above k_min");
  prof.flat_zero = std::all_of(prof.bands.begin(), prof.bands.end(),
                               [](const DecayBand& b) { return b.sup <= kFlatZeroTolerance; });
  if (prof.flat_zero) return prof;

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (auto& b : prof.bands) {
    if (b.sup <= 0.0) continue;  // log undefined; excluded from the fit
    b.in_fit = true;
    const double x = b.exponent * std::numbers::ln2;
    const double y = std::log(b.sup);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  require(n >= 3, "decay_profile: fewer than 3 bands with nonzero sup");
  const double dn = static_cast<double>(n);
  const double slope = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / dn;
  prof.fitted_bands = n;
  prof.sigma_hat = -2.0 * slope;
  prof.c_hat = std::exp(intercept);
  return prof;
}

// ---------------------------------------------------------------------------
// Martingale diagnostics
// ---------------------------------------------------------------------------

/// Relative defect of mu_n^(k + Q l) (k + Q l) = k mu_n^(k).
inline double modulation_check(const SpectralEvaluator& eval, std::int64_t k, std::int64_t ell) {
  require(ell != 0, "modulation_check needs l != 0");
  const BigInt& q = eval.denominator();
  require(BigInt(k < 0 ? -k : k) < q, "modulation_check needs |k| < Q_n");
  const BigInt shifted = BigInt(k) + q * ell;
  require(shifted <= BigInt(std::numeric_limits<std::int64_t>::max()) &&
              shifted >= BigInt(std::numeric_limits<std::int64_t>::min()),
          "modulation_check: k + Q l overflows 64-bit");
  const auto k2 = static_cast<std::int64_t>(shifted);
  const std::complex<double> lhs = static_cast<double>(k2) * eval(k2);
  const std::complex<double> rhs = static_cast<double>(k) * eval(k);
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
}

inline double modulation_check(const MeasureTree& tree, std::size_t n, std::int64_t k,
                               std::int64_t ell) {
  return modulation_check(SpectralEvaluator(level_intervals(tree, n)), k, ell);
}

/// 4 exp(-kappa^2 / (4 R^2 J)); values above 1 are returned unchanged.
inline double hoeffding_bound(double kappa, double r, std::uint64_t j) {
  require(kappa > 0.0 && r > 0.0 && j >= 1, "hoeffding_bound needs kappa, R > 0 and J >= 1");
  return 4.0 * std::exp(-kappa * kappa / (4.0 * r * r * static_cast<double>(j)));
}

struct IncrementBound {
  double per_k = 0.0;        // 4 exp(-L_{n+1}^2 P_n Q_n^-sigma / (16 M_{n+1}^(2+sigma)))
  double union_proxy = 0.0;  // min(1, 2 Q_{n+1} per_k)
  double exponent = 0.0;     // the quantity inside exp(-.)
};

inline IncrementBound increment_bound(const Schedule& s, std::size_t n, double sigma) {
  require(sigma > 0.0, "increment_bound needs sigma > 0");
  require(n + 1 <= s.levels(), "increment_bound: level n + 1 beyond the schedule");
  using boost::multiprecision::exp;
  using boost::multiprecision::pow;
  const BigFloat sig(sigma);
  const BigFloat l(s.branching(n + 1));
  const BigFloat m(s.base(n + 1));
  const BigFloat e = l * l * BigFloat(s.P(n)) * pow(BigFloat(s.Q(n)), -sig) /
                     (BigFloat(16) * pow(m, BigFloat(2) + sig));
  const BigFloat per_k = BigFloat(4) * exp(-e);
  const BigFloat proxy = BigFloat(2) * BigFloat(s.Q(n + 1)) * per_k;
  IncrementBound out;
  out.exponent = static_cast<double>(e);
  out.per_k = static_cast<double>(per_k);
  out.union_proxy = proxy < 1 ? static_cast<double>(proxy) : 1.0;
  return out;
}

struct IncrementReport {
  std::size_t level = 0;
  double sigma = 0.0;
  double threshold = 0.0;          // Q_{n+1}^(-sigma/2)
  std::int64_t k_limit = 0;        // scanned 0 < |k| <= k_limit
  double coverage = 1.0;           // scanned / (2 (Q_{n+1} - 1))
  std::vector<FourierCoefficient> increments;  // value = mu_{n+1}^ - mu_n^
  std::uint64_t exceedances = 0;
  double max_increment = 0.0;
  IncrementBound bound;
};

inline constexpr std::int64_t kDefaultKCap = std::int64_t{1} << 20;

inline IncrementReport increment_scan(const MeasureTree& tree, std::size_t n, double sigma,
                                      std::int64_t k_cap = kDefaultKCap) {
  require(n + 1 <= tree.depth(), "increment_scan needs tree depth >= n + 1");
  require(k_cap >= 1, "k_cap must be positive");
  const Schedule& s = tree.schedule();
  const BigInt q_next = s.Q(n + 1);
  const BigInt full = q_next - 1;
  const std::int64_t limit =
      full < BigInt(k_cap) ? static_cast<std::int64_t>(full) : k_cap;

  IncrementReport rep;
  rep.level = n;
  rep.sigma = sigma;
  rep.threshold = static_cast<double>(boost::multiprecision::pow(BigFloat(q_next), BigFloat(-sigma / 2)));
  rep.k_limit = limit;
  rep.coverage = full == 0 ? 1.0 : static_cast<double>(BigFloat(limit) / BigFloat(full));
  rep.bound = increment_bound(s, n, sigma);

  const SpectralEvaluator coarse(level_intervals(tree, n));
  const SpectralEvaluator fine(level_intervals(tree, n + 1));
  std::vector<std::int64_t> ks;
  ks.reserve(static_cast<std::size_t>(2 * limit));
  for (std::int64_t k = -limit; k <= limit; ++k)
    if (k != 0) ks.push_back(k);
  rep.increments.resize(ks.size());
  parallel_for(ks.size(), [&](std::size_t i) {
    rep.increments[i] = {ks[i], fine(ks[i]) - coarse(ks[i])};
  });
  for (const auto& inc : rep.increments) {
    const double a = std::abs(inc.value);
    rep.max_increment = std::max(rep.max_increment, a);
    if (a > rep.threshold) ++rep.exceedances;
  }
  return rep;
}

/// 4 Q_{n1}^(-sigma/2), the telescoped envelope on Q_{n1} <= |k| < Q_{n1+1}.
inline double tail_envelope(const Schedule& s, double sigma, std::size_t n1) {
  require(sigma > 0.0, "tail_envelope needs sigma > 0");
  require(n1 <= s.levels(), "tail_envelope: n1 beyond the schedule");
  for (std::size_t i = 0; i < n1 && i + 1 <= s.levels(); ++i)
    if (s.Q(i + 1) < 2 * s.Q(i)) throw std::logic_error("tail_envelope: Q_{n+1} >= 2 Q_n fails");
  return static_cast<double>(BigFloat(4) * boost::multiprecision::pow(BigFloat(s.Q(n1)), BigFloat(-sigma / 2)));
}

}  // namespace salem
