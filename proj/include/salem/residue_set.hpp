#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "salem/common.hpp"

namespace salem {

/// A subset of Z/mZ, stored as strictly increasing representatives in [0, m).
class ResidueSet {
 public:
  ResidueSet() = default;

  ResidueSet(std::uint64_t modulus, std::vector<std::uint64_t> elements)
      : modulus_(modulus), elements_(std::move(elements)) {
    require(modulus_ >= 1, "residue set modulus must be at least 1");
    std::sort(elements_.begin(), elements_.end());
    require(std::adjacent_find(elements_.begin(), elements_.end()) == elements_.end(),
            "residue set contains duplicate elements");
    require(elements_.empty() || elements_.back() < modulus_,
            "residue set element out of range [0, m)");
  }

  static ResidueSet full(std::uint64_t modulus) {
    std::vector<std::uint64_t> all(modulus);
    for (std::uint64_t i = 0; i < modulus; ++i) all[i] = i;
    return ResidueSet(modulus, std::move(all));
  }

  std::uint64_t modulus() const { return modulus_; }
  std::span<const std::uint64_t> elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }
  bool empty() const { return elements_.empty(); }

  bool contains(std::uint64_t x) const {
    return std::binary_search(elements_.begin(), elements_.end(), x);
  }

  /// (X + shift) mod m.
  ResidueSet translated(std::uint64_t shift) const {
    std::vector<std::uint64_t> out;
    out.reserve(elements_.size());
    shift %= modulus_;
    for (auto e : elements_) out.push_back((e + shift) % modulus_);
    return ResidueSet(modulus_, std::move(out));
  }

  /// Lexicographically smallest translate; a key for translation-invariant
  /// properties.
  ResidueSet canonical_translate() const {
    ResidueSet best = *this;
    for (auto e : elements_) {
      ResidueSet cand = translated(modulus_ - e);
      if (cand.elements_ < best.elements_) best = std::move(cand);
    }
    return best;
  }

  friend bool operator==(const ResidueSet&, const ResidueSet&) = default;
  friend auto operator<=>(const ResidueSet& a, const ResidueSet& b) {
    if (auto c = a.modulus_ <=> b.modulus_; c != 0) return c;
    return a.elements_ <=> b.elements_;
  }

 private:
  std::uint64_t modulus_ = 1;
  std::vector<std::uint64_t> elements_;
};

enum class ApKind { Integer, Modular, IntervalSpanning };

inline const char* to_string(ApKind k) {
  switch (k) {
    case ApKind::Integer: return "integer-AP";
    case ApKind::Modular: return "modular-AP";
    case ApKind::IntervalSpanning: return "interval-spanning-AP";
  }
  return "unknown";
}

struct ApWitness {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  std::uint64_t c = 0;
  ApKind kind = ApKind::Integer;

  friend bool operator==(const ApWitness&, const ApWitness&) = default;
};

/// How a base set was obtained.
enum class SearchMethod { Exhaustive, Heuristic };

inline const char* to_string(SearchMethod m) {
  return m == SearchMethod::Exhaustive ? "exhaustive" : "heuristic";
}

inline std::optional<SearchMethod> parse_search_method(const std::string& s) {
  if (s == "exhaustive") return SearchMethod::Exhaustive;
  if (s == "heuristic") return SearchMethod::Heuristic;
  return std::nullopt;
}

struct BaseSet {
  ResidueSet set;
  SearchMethod method = SearchMethod::Exhaustive;

  friend bool operator==(const BaseSet&, const BaseSet&) = default;
};

}  // namespace salem
