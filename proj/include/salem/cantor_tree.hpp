#pragma once

/**
 * @file cantor_tree.hpp
 * @brief Random Cantor-series measures built from translated base sets.
 *
 * Level n uses base M_n. A word j_1...j_n names the cell
 * [c/Q_n, (c+1)/Q_n) with Q_n = M_1...M_n and c = sum_i j_i Q_n / Q_i.
 * Each realized node at level n draws a translation l in [M_{n+1}] and keeps
 * the children (B_{n+1} + l) mod M_{n+1}, where B_{n+1} is the level's base
 * set. Level-n survivors therefore number P_n = L_1...L_n with L_n = |B_n|,
 * and each carries mass 1/P_n.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "salem/common.hpp"
#include "salem/discrete_ap.hpp"
#include "salem/residue_set.hpp"

namespace salem {

enum class Variant { TheoremA, TheoremB, Custom };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::TheoremA: return "A";
    case Variant::TheoremB: return "B";
    case Variant::Custom: return "custom";
  }
  return "?";
}

inline std::optional<Variant> parse_variant(const std::string& s) {
  if (s == "A") return Variant::TheoremA;
  if (s == "B") return Variant::TheoremB;
  if (s == "custom") return Variant::Custom;
  return std::nullopt;
}

namespace detail {

// Sign of ln(p) - ln(scale) - n t ln(base). Double precision first; near
// ties (closer than 1e-12 in log space) are re-decided at 50 digits.
inline int compare_log_power(const BigInt& p, std::uint64_t base, std::uint64_t n, double t,
                             std::uint64_t scale = 1) {
  using boost::multiprecision::log;
  const BigFloat lp = log(BigFloat(p));
  const double lhs = static_cast<double>(lp);
  const double rhs = std::log(static_cast<double>(scale)) +
                     static_cast<double>(n) * t * std::log(static_cast<double>(base));
  if (std::abs(lhs - rhs) >= 1e-12) return lhs < rhs ? -1 : 1;
  const BigFloat exact_rhs =
      log(BigFloat(scale)) + BigFloat(n) * BigFloat(t) * log(BigFloat(base));
  if (lp < exact_rhs) return -1;
  if (lp > exact_rhs) return 1;
  return 0;
}

}  // namespace detail

/// Per-level bases M_n, branch counts L_n and base sets B_n (1-indexed levels).
class Schedule {
 public:
  Schedule() = default;

  /// Generic constructor; validates every invariant of the variant.
  static Schedule from_parts(Variant variant, std::vector<BaseSet> base_sets,
                             std::optional<double> t) {
    Schedule s;
    s.variant_ = variant;
    s.t_ = t;
    s.base_sets_ = std::move(base_sets);
    for (const auto& b : s.base_sets_) {
      s.bases_.push_back(b.set.modulus());
      s.branching_.push_back(b.set.size());
    }
    s.finish();
    return s;
  }

  static Schedule custom(std::vector<BaseSet> base_sets) {
    return from_parts(Variant::Custom, std::move(base_sets), std::nullopt);
  }

  /// Every level keeps all of [M]; mu_n is Lebesgue measure.
  static Schedule uniform(std::vector<std::uint64_t> bases) {
    std::vector<BaseSet> sets;
    for (auto m : bases) sets.push_back({ResidueSet::full(m), SearchMethod::Exhaustive});
    return custom(std::move(sets));
  }

  Variant variant() const { return variant_; }
  std::optional<double> t() const { return t_; }
  std::size_t levels() const { return bases_.size(); }

  /// M_n, L_n, B_n for 1 <= n <= levels().
  std::uint64_t base(std::size_t n) const { return bases_.at(n - 1); }
  std::uint64_t branching(std::size_t n) const { return branching_.at(n - 1); }
  const BaseSet& base_set(std::size_t n) const { return base_sets_.at(n - 1); }

  std::span<const std::uint64_t> bases() const { return bases_; }
  std::span<const std::uint64_t> branchings() const { return branching_; }
  std::span<const BaseSet> base_sets() const { return base_sets_; }

  /// Q_n = M_1...M_n and P_n = L_1...L_n, n in [0, levels()].
  const BigInt& Q(std::size_t n) const { return q_.at(n); }
  const BigInt& P(std::size_t n) const { return p_.at(n); }

  friend bool operator==(const Schedule& a, const Schedule& b) {
    return a.variant_ == b.variant_ && a.t_ == b.t_ && a.base_sets_ == b.base_sets_;
  }

 private:
  void finish() {
    require(!bases_.empty(), "schedule needs at least one level");
    q_.assign(1, BigInt(1));
    p_.assign(1, BigInt(1));
    for (std::size_t i = 0; i < bases_.size(); ++i) {
      require(bases_[i] >= 2, "schedule: M_n must be >= 2");
      require(branching_[i] >= 1 && branching_[i] <= bases_[i],
              "schedule: 1 <= L_n <= M_n violated at level " + std::to_string(i + 1));
      q_.push_back(q_.back() * bases_[i]);
      p_.push_back(p_.back() * branching_[i]);
    }
    if (variant_ == Variant::TheoremA) validate_a();
    if (variant_ == Variant::TheoremB) validate_b();
    if (variant_ != Variant::TheoremA) t_.reset();
  }

  void validate_a() const {
    require(t_.has_value() && *t_ > 0.0 && *t_ < 1.0, "variant A needs t in (0, 1)");
    const double t = *t_;
    const std::uint64_t m = bases_[0];
    const BaseSet& gen = base_sets_[0];
    const std::uint64_t x = gen.set.size();
    require(detail::compare_log_power(BigInt(x), m, 1, t) > 0,
            "variant A needs |X| > M^t (|X| = " + std::to_string(x) + ", M = " +
                std::to_string(m) + ")");
    require(property_ii_oracle(gen.set).holds, "variant A base set fails the interval-AP property");
    const ResidueSet singleton(m, {0});
    for (std::size_t n = 1; n <= bases_.size(); ++n) {
      require(bases_[n - 1] == m, "variant A needs constant M_n");
      // L_{n} = |X| iff P_{n-1} < M^{n t}
      const bool grow = n == 1 || detail::compare_log_power(p_[n - 1], m, n, t) < 0;
      const BaseSet& b = base_sets_[n - 1];
      if (grow)
        require(b.set == gen.set, "variant A level " + std::to_string(n) + " must use X");
      else
        require(b.set == singleton, "variant A level " + std::to_string(n) + " must be {0}");
      // M^{nt} <= P_n < |X| M^{nt}
      require(detail::compare_log_power(p_[n], m, n, t) >= 0,
              "variant A lower mass bound violated at level " + std::to_string(n));
      require(detail::compare_log_power(p_[n], m, n, t, x) < 0,
              "variant A upper mass bound violated at level " + std::to_string(n));
    }
  }

  void validate_b() const {
    for (std::size_t n = 1; n <= bases_.size(); ++n) {
      const std::uint64_t expect = n == 1 ? 2 : n;
      require(bases_[n - 1] == expect, "variant B needs M_1 = 2 and M_n = n");
      require(property_ii_oracle(base_sets_[n - 1].set).holds,
              "variant B base set fails the interval-AP property at level " + std::to_string(n));
    }
  }

  Variant variant_ = Variant::Custom;
  std::optional<double> t_;
  std::vector<std::uint64_t> bases_;
  std::vector<std::uint64_t> branching_;
  std::vector<BaseSet> base_sets_;
  std::vector<BigInt> q_;
  std::vector<BigInt> p_;
};

/// L_1 = |X|; L_{n+1} = |X| if L_1...L_n < M^{(n+1)t}, else 1.
inline Schedule schedule_a(std::uint64_t m, const BaseSet& x, double t, std::size_t n_max) {
  require(m >= 2, "schedule_a needs M >= 2");
  require(t > 0.0 && t < 1.0, "schedule_a needs t in (0, 1)");
  require(n_max >= 1, "schedule_a needs n_max >= 1");
  require(x.set.modulus() == m, "schedule_a: base set modulus must equal M");
  require(detail::compare_log_power(BigInt(x.set.size()), m, 1, t) > 0,
          "schedule_a needs |X| > M^t");
  require(property_ii_oracle(x.set).holds, "schedule_a: base set fails the interval-AP property");
  std::vector<BaseSet> levels;
  BigInt p = 1;
  const BaseSet singleton{ResidueSet(m, {0}), SearchMethod::Exhaustive};
  for (std::size_t n = 0; n < n_max; ++n) {
    const bool grow = n == 0 || detail::compare_log_power(p, m, n + 1, t) < 0;
    levels.push_back(grow ? x : singleton);
    p *= grow ? x.set.size() : 1;
  }
  return Schedule::from_parts(Variant::TheoremA, std::move(levels), t);
}

/// M_1 = 2, M_n = n; level n keeps a maximum interval-AP-free set of Z/M_nZ.
inline Schedule schedule_b(std::size_t n_max, std::uint64_t exhaustive_threshold = 25) {
  require(n_max >= 1, "schedule_b needs n_max >= 1");
  std::vector<BaseSet> levels;
  for (std::size_t n = 1; n <= n_max; ++n)
    levels.push_back(max_property_ii(n == 1 ? 2 : n, exhaustive_threshold));
  return Schedule::from_parts(Variant::TheoremB, std::move(levels), std::nullopt);
}

/// A word j_1...j_n in the symbolic tree.
struct NodePath {
  std::vector<std::uint64_t> digits;

  std::size_t length() const { return digits.size(); }

  NodePath child(std::uint64_t digit) const {
    NodePath p{digits};
    p.digits.push_back(digit);
    return p;
  }

  /// "j1.j2.j3"; the root is the empty string.
  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < digits.size(); ++i) {
      if (i) s += '.';
      s += std::to_string(digits[i]);
    }
    return s;
  }

  static NodePath parse(const std::string& s) {
    NodePath p;
    if (s.empty()) return p;
    std::size_t pos = 0;
    while (true) {
      const std::size_t dot = s.find('.', pos);
      const std::string tok = s.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
      if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
        throw SchemaError("malformed node path '" + s + "'");
      p.digits.push_back(std::stoull(tok));
      if (dot == std::string::npos) break;
      pos = dot + 1;
    }
    return p;
  }

  friend bool operator==(const NodePath&, const NodePath&) = default;
  friend auto operator<=>(const NodePath&, const NodePath&) = default;
};

/**
 * Translation for a node, derived from (seed, path) alone.
 *
 * The path is folded into a 64-bit state with splitmix64:
 *   h = mix(seed ^ 0x53414c454d2d3031), h = mix(h ^ mix(j_i + 1)) per digit.
 * Draw i is mix(h + (i + 1) * 0x9e3779b97f4a7c15); draws at or above the
 * largest multiple of M below 2^64 are rejected, so the result is uniform on
 * [M].
 */
inline std::uint64_t derive_translation(std::uint64_t seed, const NodePath& path, std::uint64_t m) {
  require(m >= 1, "derive_translation needs M >= 1");
  auto mix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  std::uint64_t h = mix(seed ^ 0x53414c454d2d3031ULL);
  for (auto d : path.digits) h = mix(h ^ mix(d + 1));
  if (m == 1) return 0;
  // 2^64 mod m, computed without overflow
  const std::uint64_t rem = (std::numeric_limits<std::uint64_t>::max() % m + 1) % m;
  for (std::uint64_t i = 1;; ++i) {
    const std::uint64_t u = mix(h + i * 0x9e3779b97f4a7c15ULL);
    if (rem == 0 || u < std::numeric_limits<std::uint64_t>::max() - rem + 1) return u % m;
  }
}

/// Exact cell [numerator/denominator, (numerator + 1)/denominator).
struct CellInterval {
  BigInt numerator;
  BigInt denominator;

  Rational lower() const { return Rational(numerator, denominator); }
  Rational upper() const { return Rational(numerator + 1, denominator); }
};

inline CellInterval interval_of(const NodePath& path, const Schedule& schedule) {
  require(path.length() <= schedule.levels(), "path longer than the schedule");
  BigInt c = 0;
  for (std::size_t i = 0; i < path.length(); ++i) {
    const std::uint64_t m = schedule.base(i + 1);
    require(path.digits[i] < m, "digit " + std::to_string(path.digits[i]) +
                                    " out of range at level " + std::to_string(i + 1));
    c = c * m + path.digits[i];
  }
  return {c, schedule.Q(path.length())};
}

struct TreeNode {
  NodePath path;
  BigInt offset;  // cell numerator over Q_n

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Level-n measure mu_n: P_n disjoint cells of width 1/Q, each of mass 1/P_n.
struct StepMeasure {
  std::size_t level = 0;
  BigInt denominator = 1;
  std::vector<BigInt> offsets;  // strictly increasing, in [0, Q)
  Rational mass_per_cell = 1;

  std::size_t cells() const { return offsets.size(); }
};

class MeasureTree;
MeasureTree build_tree(const Schedule& schedule, std::uint64_t seed, std::size_t depth);

/// The realized subtree J_0, ..., J_depth. Immutable after construction.
class MeasureTree {
 public:
  using TranslationSource = std::function<std::uint64_t(const NodePath&, std::uint64_t base)>;

  /// Realizes the tree using translations drawn from `source`.
  static MeasureTree realize(Schedule schedule, std::uint64_t seed, std::size_t depth,
                             const TranslationSource& source) {
    require(depth <= schedule.levels(), "tree depth " + std::to_string(depth) +
                                            " exceeds schedule length " +
                                            std::to_string(schedule.levels()));
    MeasureTree tree;
    tree.schedule_ = std::move(schedule);
    tree.seed_ = seed;
    tree.depth_ = depth;
    tree.levels_.push_back({TreeNode{NodePath{}, BigInt(0)}});
    for (std::size_t n = 0; n < depth; ++n) {
      const std::uint64_t m = tree.schedule_.base(n + 1);
      const ResidueSet& base = tree.schedule_.base_set(n + 1).set;
      std::vector<std::uint64_t> shifts;
      std::vector<TreeNode> next;
      shifts.reserve(tree.levels_[n].size());
      next.reserve(tree.levels_[n].size() * base.size());
      for (const auto& node : tree.levels_[n]) {
        const std::uint64_t ell = source(node.path, m);
        if (ell >= m)
          throw SchemaError("translation " + std::to_string(ell) + " at node '" +
                            node.path.to_string() + "' is outside [0, " + std::to_string(m) + ")");
        shifts.push_back(ell);
        const ResidueSet children = base.translated(ell);
        if (children.size() != tree.schedule_.branching(n + 1))
          throw SchemaError("child set size differs from L_n at node '" + node.path.to_string() + "'");
        for (auto a : children.elements())
          next.push_back(TreeNode{node.path.child(a), node.offset * m + a});
      }
      tree.translations_.push_back(std::move(shifts));
      tree.levels_.push_back(std::move(next));
    }
    return tree;
  }

  const Schedule& schedule() const { return schedule_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t depth() const { return depth_; }

  /// Realized nodes of J_n, sorted by offset.
  std::span<const TreeNode> level(std::size_t n) const {
    require(n <= depth_, "level " + std::to_string(n) + " exceeds tree depth");
    return levels_[n];
  }

  /// Translation of the i-th node of J_n (n < depth).
  std::uint64_t translation_at(std::size_t n, std::size_t i) const {
    return translations_.at(n).at(i);
  }

  /// Child set X_j of the i-th node of J_n as a residue set mod M_{n+1}.
  ResidueSet child_set(std::size_t n, std::size_t i) const {
    return schedule_.base_set(n + 1).set.translated(translation_at(n, i));
  }

  /// Index of `path` in J_{|path|}, if realized.
  std::optional<std::size_t> find(const NodePath& path) const {
    if (path.length() > depth_) return std::nullopt;
    const CellInterval cell = interval_of(path, schedule_);
    const auto& lvl = levels_[path.length()];
    auto it = std::lower_bound(lvl.begin(), lvl.end(), cell.numerator,
                               [](const TreeNode& n, const BigInt& c) { return n.offset < c; });
    if (it == lvl.end() || it->offset != cell.numerator) return std::nullopt;
    return static_cast<std::size_t>(it - lvl.begin());
  }

  std::optional<std::uint64_t> translation(const NodePath& path) const {
    if (path.length() >= depth_) return std::nullopt;
    auto idx = find(path);
    if (!idx) return std::nullopt;
    return translations_[path.length()][*idx];
  }

  friend bool operator==(const MeasureTree& a, const MeasureTree& b) {
    return a.schedule_ == b.schedule_ && a.seed_ == b.seed_ && a.depth_ == b.depth_ &&
           a.translations_ == b.translations_ && a.levels_ == b.levels_;
  }

 private:
  Schedule schedule_;
  std::uint64_t seed_ = 0;
  std::size_t depth_ = 0;
  std::vector<std::vector<TreeNode>> levels_;
  std::vector<std::vector<std::uint64_t>> translations_;
};

inline MeasureTree build_tree(const Schedule& schedule, std::uint64_t seed, std::size_t depth) {
  return MeasureTree::realize(schedule, seed, depth,
                              [seed](const NodePath& p, std::uint64_t m) {
                                return derive_translation(seed, p, m);
                              });
}

inline StepMeasure level_intervals(const MeasureTree& tree, std::size_t n) {
  require(n <= tree.depth(), "level " + std::to_string(n) + " exceeds tree depth");
  StepMeasure mu;
  mu.level = n;
  mu.denominator = tree.schedule().Q(n);
  const auto nodes = tree.level(n);
  mu.offsets.reserve(nodes.size());
  for (const auto& node : nodes) {
    if (!mu.offsets.empty() && !(mu.offsets.back() < node.offset))
      throw std::logic_error("level cells overlap or are unsorted");
    mu.offsets.push_back(node.offset);
  }
  mu.mass_per_cell = Rational(BigInt(1), tree.schedule().P(n));
  return mu;
}

/// mu(I_j): 1/P_n for surviving nodes, 0 for pruned ones.
inline Rational cell_mass(const MeasureTree& tree, const NodePath& path) {
  require(path.length() <= tree.depth(), "path deeper than the tree");
  (void)interval_of(path, tree.schedule());  // digit validation
  if (!tree.find(path)) return Rational(0);
  return Rational(BigInt(1), tree.schedule().P(path.length()));
}

}  // namespace salem
