#pragma once

// JSON views of the analysis outputs. Exact rationals are written as "p/q"
// strings next to a double approximation.

#include <string>

#include "json.hpp"
#include "salem/ap_verifier.hpp"
#include "salem/discrete_ap.hpp"
#include "salem/fourier.hpp"
#include "salem/regularity.hpp"

namespace salem {

inline std::string rational_string(const Rational& q) {
  const BigInt& num = boost::multiprecision::numerator(q);
  const BigInt& den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline Rational parse_rational(const std::string& s) {
  const auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(BigInt(s));
    const BigInt num(s.substr(0, slash));
    const BigInt den(s.substr(slash + 1));
    require(den != 0, "zero denominator in '" + s + "'");
    return Rational(num, den);
  } catch (const std::runtime_error&) {
    throw PreconditionError("malformed rational '" + s + "'");
  }
}

inline nlohmann::json to_json(const ApWitness& w) {
  return {{"a", w.a}, {"b", w.b}, {"c", w.c}, {"kind", to_string(w.kind)}};
}

inline nlohmann::json to_json(const ResidueSet& s) {
  return {{"m", s.modulus()},
          {"elements", std::vector<std::uint64_t>(s.elements().begin(), s.elements().end())}};
}

inline nlohmann::json to_json(const UniformityTally& t) {
  return {{"n", t.modulus},
          {"subsets", t.subsets},
          {"condition_holds", t.condition_holds},
          {"violations", t.violations}};
}

inline nlohmann::json to_json(const DecayProfile& p) {
  nlohmann::json bands = nlohmann::json::array();
  for (const auto& b : p.bands)
    bands.push_back({{"band", b.exponent},
                     {"k_lo", b.lo},
                     {"k_hi", b.hi},
                     {"sup", b.sup},
                     {"argmax_k", b.argmax},
                     {"in_fit", b.in_fit}});
  nlohmann::json j{{"level", p.level},         {"k_min", p.k_min},
                   {"bands", std::move(bands)}, {"flat_zero", p.flat_zero},
                   {"fitted_bands", p.fitted_bands}};
  if (p.flat_zero) {
    j["sigma_hat"] = nullptr;
    j["c_hat"] = nullptr;
  } else {
    j["sigma_hat"] = p.sigma_hat;
    j["c_hat"] = p.c_hat;
  }
  return j;
}

inline nlohmann::json to_json(const IncrementBound& b) {
  return {{"per_k", b.per_k}, {"union_proxy", b.union_proxy}, {"exponent", b.exponent}};
}

inline nlohmann::json to_json(const IncrementReport& r, bool include_increments = true) {
  nlohmann::json j{{"level", r.level},
                   {"sigma", r.sigma},
                   {"threshold", r.threshold},
                   {"k_limit", r.k_limit},
                   {"coverage", r.coverage},
                   {"scanned", r.increments.size()},
                   {"exceedances", r.exceedances},
                   {"max_increment", r.max_increment},
                   {"bound", to_json(r.bound)}};
  if (include_increments) {
    nlohmann::json inc = nlohmann::json::array();
    for (const auto& v : r.increments) inc.push_back({v.k, std::abs(v.value)});
    j["increments"] = std::move(inc);
  }
  return j;
}

inline nlohmann::json to_json(const RegularityReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"r", rational_string(row.r)},
                    {"max_mass", rational_string(row.max_mass)},
                    {"min_support_mass", rational_string(row.min_support_mass)},
                    {"max_ratio", row.max_ratio},
                    {"min_ratio", row.min_ratio}});
  nlohmann::json j{{"variant", to_string(r.variant)},
                   {"level", r.level},
                   {"t", r.t},
                   {"circle", r.circle},
                   {"radii", std::move(rows)},
                   {"c_upper", r.c_upper},
                   {"c_lower", r.c_lower}};
  auto opt = [](const auto& o) { return o ? nlohmann::json(*o) : nlohmann::json(nullptr); };
  j["reference_upper"] = opt(r.reference_upper);
  j["reference_lower"] = opt(r.reference_lower);
  j["upper_within_reference"] = opt(r.upper_within_reference);
  j["lower_within_reference"] = opt(r.lower_within_reference);
  return j;
}

inline nlohmann::json to_json(const TheoremBReport& r) {
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& l : r.levels)
    levels.push_back({{"level", l.level},
                      {"r", rational_string(l.radius)},
                      {"max_mass", rational_string(l.max_mass)},
                      {"bound", rational_string(l.bound)},
                      {"within_bound", l.within_bound},
                      {"ratio", l.ratio}});
  return {{"epsilon", r.epsilon},
          {"levels", std::move(levels)},
          {"all_within_bound", r.all_within_bound},
          {"ratio_nonincreasing", r.ratio_nonincreasing}};
}

inline nlohmann::json to_json(const ApCertificate& c) {
  nlohmann::json verdicts = nlohmann::json::array();
  for (const auto& v : c.nodes.verdicts) {
    nlohmann::json e{{"set", to_json(v.canonical)}, {"holds", v.holds}};
    if (v.witness) e["witness"] = to_json(*v.witness);
    verdicts.push_back(std::move(e));
  }
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : c.nodes.failures)
    failures.push_back({{"path", f.path.to_string()}, {"witness", to_json(f.witness)}});
  nlohmann::json triples = nlohmann::json::array();
  for (const auto& t : c.feasible_triples) triples.push_back({t.a.str(), t.b.str(), t.c.str()});
  return {{"level", c.level},
          {"mode", c.wrap ? "circle" : "line"},
          {"certified", c.certified},
          {"verdict", c.certified ? "certified-to-depth-" + std::to_string(c.level) : "not-certified"},
          {"node_certificates",
           {{"all_pass", c.nodes.all_pass},
            {"nodes_checked", c.nodes.nodes_checked},
            {"verdicts", std::move(verdicts)},
            {"failures", std::move(failures)}}},
          {"feasible_triples", std::move(triples)},
          {"note", c.note}};
}

}  // namespace salem
