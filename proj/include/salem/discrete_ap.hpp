#pragma once

/**
 * @file discrete_ap.hpp
 * @brief Progression-free sets in {1..N} and Z/mZ.
 *
 * Covers the integer side of the construction: exhaustive and sphere-shell
 * progression-free sets, the doubling embedding into Z/mZ, and the
 * "interval union" certificate. For X in Z/mZ, let I(X) be the union of the
 * cells [j/m, (j+1)/m), j in X, on the circle R/Z. Points x in I_a, y in I_b,
 * z in I_c with fractional offsets d_x, d_y, d_z in [0, 1) satisfy
 * x + z = 2y (mod 1) iff (a + c - 2b) + (d_x + d_z - 2 d_y) = 0 (mod m).
 * The offset combination ranges over the open interval (-2, 2), so an AP
 * spanning cells (a, b, c) exists iff (a + c - 2b) mod m is one of
 * {m - 1, 0, 1}. Pairwise-distinct points can always be chosen in that case
 * as long as the three cells are not all the same cell.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "salem/common.hpp"
#include "salem/residue_set.hpp"

namespace salem {

// ---------------------------------------------------------------------------
// Integer progressions
// ---------------------------------------------------------------------------

/// True iff no x < y < z in `values` has x + z = 2y.
inline bool is_ap_free(std::span<const std::uint64_t> values) {
  std::vector<std::uint64_t> s(values.begin(), values.end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t k = i + 2; k < s.size(); ++k) {
      const std::uint64_t sum = s[i] + s[k];
      if (sum % 2 != 0) continue;
      if (std::binary_search(s.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                             s.begin() + static_cast<std::ptrdiff_t>(k), sum / 2))
        return false;
    }
  }
  return true;
}

/// Lexicographically smallest (a, b, c) of pairwise-distinct elements with
/// a + c = 2b (mod n).
inline std::optional<ApWitness> find_3ap_mod(const ResidueSet& set) {
  const std::uint64_t n = set.modulus();
  for (auto a : set.elements()) {
    for (auto b : set.elements()) {
      if (b == a) continue;
      const std::uint64_t c = (2 * b % n + n - a) % n;
      if (c != a && c != b && set.contains(c)) return ApWitness{a, b, c, ApKind::Modular};
    }
  }
  return std::nullopt;
}

struct UniformityCoefficients {
  double max_coeff = 0.0;
  std::uint64_t argmax_k = 0;
  double threshold = 0.0;
};

/// max_{0<k<n} |(1/n) sum_{a in A} exp(-2 pi i a k / n)| and |A|^2/n^2 - 1/n.
inline UniformityCoefficients dft_uniformity(const ResidueSet& set) {
  const std::uint64_t n = set.modulus();
  require(n >= 2, "dft_uniformity needs modulus >= 2");
  UniformityCoefficients out;
  const double dn = static_cast<double>(n);
  for (std::uint64_t k = 1; k < n; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (auto a : set.elements()) {
      const double phase = -2.0 * std::numbers::pi * static_cast<double>(a * k % n) / dn;
      acc += std::polar(1.0, phase);
    }
    const double v = std::abs(acc) / dn;
    if (v > out.max_coeff) {
      out.max_coeff = v;
      out.argmax_k = k;
    }
  }
  const double size = static_cast<double>(set.size());
  out.threshold = size * size / (dn * dn) - 1.0 / dn;
  return out;
}

struct UniformityReport {
  bool condition_holds = false;
  std::optional<ApWitness> ap;
  UniformityCoefficients coefficients;
};

inline UniformityReport uniformity_demo(const ResidueSet& set) {
  UniformityReport r;
  r.coefficients = dft_uniformity(set);
  r.condition_holds = r.coefficients.max_coeff < r.coefficients.threshold;
  r.ap = find_3ap_mod(set);
  return r;
}

struct UniformityTally {
  std::uint64_t modulus = 0;
  std::uint64_t subsets = 0;
  std::uint64_t condition_holds = 0;
  std::uint64_t violations = 0;  // condition holds but no AP
};

/// Every subset of Z/nZ (bitmask enumeration).
inline UniformityTally uniformity_exhaustive(std::uint64_t n) {
  require(n >= 2 && n <= 24, "exhaustive uniformity sweep supports 2 <= n <= 24");
  UniformityTally t{n, 0, 0, 0};
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<std::uint64_t> el;
    for (std::uint64_t i = 0; i < n; ++i)
      if (mask >> i & 1) el.push_back(i);
    const auto r = uniformity_demo(ResidueSet(n, std::move(el)));
    ++t.subsets;
    if (r.condition_holds) {
      ++t.condition_holds;
      if (!r.ap) ++t.violations;
    }
  }
  return t;
}

/// Random subsets with independent fair-coin membership.
inline UniformityTally uniformity_random(std::uint64_t n, std::uint64_t samples,
                                         std::uint64_t seed) {
  require(n >= 2, "uniformity sweep needs n >= 2");
  std::mt19937_64 rng(seed ^ (n * 0x9e3779b97f4a7c15ULL));
  std::bernoulli_distribution coin(0.5);
  UniformityTally t{n, 0, 0, 0};
  for (std::uint64_t s = 0; s < samples; ++s) {
    std::vector<std::uint64_t> el;
    for (std::uint64_t i = 0; i < n; ++i)
      if (coin(rng)) el.push_back(i);
    const auto r = uniformity_demo(ResidueSet(n, std::move(el)));
    ++t.subsets;
    if (r.condition_holds) {
      ++t.condition_holds;
      if (!r.ap) ++t.violations;
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Progression-free subsets of {1..N}
// ---------------------------------------------------------------------------

namespace detail {

// Branch-and-bound over {1..len}, ascending, include-first. Elements that
// would complete an AP with two chosen ones are marked forbidden. The bound
// uses r3 of the remaining interval, which is known for shorter lengths.
class ApFreeSearch {
 public:
  ApFreeSearch(std::uint64_t len, const std::vector<std::uint64_t>& r3, std::uint64_t target)
      : len_(len), r3_(r3), target_(target), forbidden_(len + 2, 0) {}

  std::optional<std::vector<std::uint64_t>> run() {
    if (target_ == 0) return std::vector<std::uint64_t>{};
    if (dfs(1)) return found_;
    return std::nullopt;
  }

 private:
  std::uint64_t bound_from(std::uint64_t pos) const {
    if (pos > len_) return 0;
    const std::uint64_t remaining = len_ - pos + 1;
    std::uint64_t free_count = 0;
    for (std::uint64_t p = pos; p <= len_; ++p) free_count += forbidden_[p] == 0;
    // r3_ covers lengths < len_ only; at pos == 1 fall back to the target.
    const std::uint64_t r = remaining < r3_.size() ? r3_[remaining] : target_;
    return std::min(r, free_count);
  }

  bool dfs(std::uint64_t pos) {
    if (chosen_.size() == target_) {
      found_ = chosen_;
      return true;
    }
    if (chosen_.size() + bound_from(pos) < target_) return false;
    for (std::uint64_t p = pos; p <= len_; ++p) {
      if (forbidden_[p]) continue;
      if (chosen_.size() + bound_from(p) < target_) return false;
      std::vector<std::uint64_t> marked;
      for (auto s : chosen_) {
        const std::uint64_t f = 2 * p - s;
        if (f <= len_ && forbidden_[f] == 0) {
          forbidden_[f] = 1;
          marked.push_back(f);
        }
      }
      chosen_.push_back(p);
      if (dfs(p + 1)) return true;
      chosen_.pop_back();
      for (auto f : marked) forbidden_[f] = 0;
    }
    return false;
  }

  std::uint64_t len_;
  const std::vector<std::uint64_t>& r3_;
  std::uint64_t target_;
  std::vector<char> forbidden_;
  std::vector<std::uint64_t> chosen_;
  std::vector<std::uint64_t> found_;
};

}  // namespace detail

/// Lexicographically smallest maximum-size AP-free subset of {1..n}.
inline std::vector<std::uint64_t> max_ap_free_subset(std::uint64_t n) {
  // r3[len] = largest AP-free subset of an interval of length len. Each step
  // grows by at most one, so only "can we reach r3[len-1] + 1" is searched.
  std::vector<std::uint64_t> r3{0};
  for (std::uint64_t len = 1;; ++len) {
    if (len > n) return {};
    detail::ApFreeSearch up(len, r3, r3.back() + 1);
    auto grown = up.run();
    if (len == n) {
      if (grown) return *grown;
      detail::ApFreeSearch same(len, r3, r3.back());
      return *same.run();
    }
    r3.push_back(grown ? r3.back() + 1 : r3.back());
  }
}

struct BehrendSet {
  std::vector<std::uint64_t> elements;  // ascending, subset of {1..m'}
  SearchMethod method = SearchMethod::Exhaustive;
  std::uint64_t digit_base = 0;   // sphere parameters (heuristic only)
  std::uint64_t digit_count = 0;
  std::uint64_t norm = 0;
};

/**
 * AP-free subset of {1, ..., m_prime}.
 *
 * Up to `exhaustive_threshold` the result is a maximum-size set. Above it the
 * sphere construction is used: integers whose base-d digits are all < d/2 add
 * without carries, so x + z = 2y forces x_i + z_i = 2 y_i digitwise, and on a
 * fixed sphere sum(x_i^2) = r strict convexity forces x = y = z. The largest
 * shell over d in [3, 40] and digit counts up to ceil(log_d m') + 1 wins;
 * ties keep the first hit in (d, k, norm) order.
 */
inline BehrendSet behrend_sphere(std::uint64_t m_prime, std::uint64_t exhaustive_threshold = 64) {
  require(m_prime >= 1, "behrend_sphere needs m' >= 1");
  BehrendSet out;
  if (m_prime <= exhaustive_threshold) {
    out.elements = max_ap_free_subset(m_prime);
    out.method = SearchMethod::Exhaustive;
    return out;
  }
  out.method = SearchMethod::Heuristic;
  for (std::uint64_t d = 3; d <= 40; ++d) {
    std::uint64_t kmax = 1;
    for (std::uint64_t p = d; p < m_prime; p *= d) ++kmax;  // ceil(log_d m') for m' > 1
    kmax += 1;
    std::uint64_t pow_d = 1;
    for (std::uint64_t k = 1; k <= kmax; ++k) {
      if (pow_d > m_prime) break;  // larger k adds no new candidates
      pow_d *= d;
      const std::uint64_t limit = std::min<std::uint64_t>(m_prime, pow_d - 1);
      // norm -> members
      std::vector<std::vector<std::uint64_t>> shells;
      for (std::uint64_t x = 1; x <= limit; ++x) {
        std::uint64_t v = x, norm = 0;
        bool ok = true;
        while (v > 0) {
          const std::uint64_t digit = v % d;
          if (2 * digit >= d) {
            ok = false;
            break;
          }
          norm += digit * digit;
          v /= d;
        }
        if (!ok) continue;
        if (shells.size() <= norm) shells.resize(norm + 1);
        shells[norm].push_back(x);
      }
      for (std::uint64_t norm = 0; norm < shells.size(); ++norm) {
        if (shells[norm].size() > out.elements.size()) {
          out.elements = shells[norm];
          out.digit_base = d;
          out.digit_count = k;
          out.norm = norm;
        }
      }
    }
  }
  return out;
}

/// {2x mod m : x in X'}; every x must lie in [1, floor(m/5)].
inline ResidueSet double_embed(std::span<const std::uint64_t> x_prime, std::uint64_t m) {
  require(m >= 1, "double_embed needs m >= 1");
  const std::uint64_t cap = m / 5;
  std::vector<std::uint64_t> out;
  out.reserve(x_prime.size());
  for (auto x : x_prime) {
    require(x >= 1 && x <= cap, "double_embed: element " + std::to_string(x) +
                                    " outside [1, floor(m/5)] = [1, " + std::to_string(cap) + "]");
    out.push_back((2 * x) % m);
  }
  return ResidueSet(m, std::move(out));
}

// ---------------------------------------------------------------------------
// Interval-union certificate
// ---------------------------------------------------------------------------

/// True iff cells (a, b, c) of width 1/m host pairwise-distinct x, y, z with
/// x + z = 2y (mod 1).
inline bool cells_admit_ap(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t m) {
  if (a == b && b == c) return false;
  const std::uint64_t d = ((a + c) % m + 2 * (m - b % m)) % m;
  return d == 0 || d == 1 || d == m - 1;
}

struct PropertyIIResult {
  bool holds = true;
  std::optional<ApWitness> witness;
};

/// Decides whether every 3-AP in I(X) lies inside one cell. The witness is
/// the lexicographically smallest offending triple of three distinct cells,
/// or the smallest offending triple overall when no such triple exists.
inline PropertyIIResult property_ii_oracle(const ResidueSet& set) {
  const std::uint64_t m = set.modulus();
  require(m >= 2, "property_ii_oracle needs modulus >= 2");
  std::optional<ApWitness> first;
  for (auto a : set.elements()) {
    for (auto b : set.elements()) {
      // c = 2b - a + s for s in {-1, 0, 1}; scan candidates in ascending order.
      std::uint64_t cands[3];
      const std::uint64_t base = (2 * b % m + m - a) % m;
      cands[0] = (base + m - 1) % m;
      cands[1] = base;
      cands[2] = (base + 1) % m;
      std::sort(cands, cands + 3);
      for (auto c : cands) {
        if (!set.contains(c) || !cells_admit_ap(a, b, c, m)) continue;
        const ApWitness w{a, b, c, ApKind::IntervalSpanning};
        if (a != b && b != c && a != c) return {false, w};
        if (!first) first = w;
      }
    }
  }
  if (first) return {false, first};
  return {true, std::nullopt};
}

/**
 * Maximum-cardinality subset of Z/mZ passing property_ii_oracle.
 *
 * For m <= exhaustive_threshold: depth-first search in ascending order,
 * include-first, so the first set of a new record size is the
 * lexicographically smallest of that size. Translation invariance lets the
 * search fix 0 as a member. Larger m fall back to the doubled Behrend set.
 */
inline BaseSet max_property_ii(std::uint64_t m, std::uint64_t exhaustive_threshold = 25) {
  require(m >= 2, "max_property_ii needs m >= 2");
  if (m > exhaustive_threshold) {
    const auto xp = behrend_sphere(m / 5);
    return {double_embed(xp.elements, m), SearchMethod::Heuristic};
  }

  std::vector<std::uint64_t> best{0};
  std::vector<std::uint64_t> chosen{0};

  auto compatible = [m](std::uint64_t x, std::uint64_t e, const std::vector<std::uint64_t>& s) {
    auto bad = [m](std::uint64_t p, std::uint64_t q, std::uint64_t r) {
      return cells_admit_ap(p, q, r, m);
    };
    auto check_with = [&](std::uint64_t w) {
      return bad(x, e, w) || bad(x, w, e) || bad(e, x, w) || bad(e, w, x) || bad(w, x, e) ||
             bad(w, e, x);
    };
    if (check_with(x) || check_with(e)) return false;
    for (auto w : s)
      if (check_with(w)) return false;
    return true;
  };

  std::vector<std::uint64_t> initial;
  for (std::uint64_t x = 1; x < m; ++x)
    if (compatible(x, 0, {})) initial.push_back(x);

  // candidates are already compatible with every chosen element
  auto dfs = [&](auto&& self, const std::vector<std::uint64_t>& candidates) -> void {
    if (chosen.size() > best.size()) best = chosen;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (chosen.size() + (candidates.size() - i) <= best.size()) return;
      const std::uint64_t e = candidates[i];
      std::vector<std::uint64_t> next;
      for (std::size_t j = i + 1; j < candidates.size(); ++j)
        if (compatible(candidates[j], e, chosen)) next.push_back(candidates[j]);
      chosen.push_back(e);
      self(self, next);
      chosen.pop_back();
    }
  };
  dfs(dfs, initial);
  return {ResidueSet(m, best), SearchMethod::Exhaustive};
}

}  // namespace salem
