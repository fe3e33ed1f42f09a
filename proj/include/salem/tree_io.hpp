#pragma once

// Tree persistence. Schema (version 1):
//   { "version": 1, "variant": "A" | "B" | "custom", "seed": u64, "depth": n,
//     "t": number | null, "M": [...], "L": [...],
//     "base_sets": [{ "m": .., "elements": [..], "method": "exhaustive" | "heuristic" }, ...],
//     "translations": { "j1.j2...": l, ... }   // optional
//   }
// Without "translations" the tree is re-derived from the seed. Q_n and other
// big integers are always recomputed.

#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "json.hpp"
#include "salem/cantor_tree.hpp"

namespace salem {

inline constexpr int kTreeFormatVersion = 1;

inline nlohmann::json tree_to_json(const MeasureTree& tree, bool materialize_translations) {
  const Schedule& s = tree.schedule();
  nlohmann::json j;
  j["version"] = kTreeFormatVersion;
  j["variant"] = to_string(s.variant());
  j["seed"] = tree.seed();
  j["depth"] = tree.depth();
  j["t"] = s.t() ? nlohmann::json(*s.t()) : nlohmann::json(nullptr);
  j["M"] = std::vector<std::uint64_t>(s.bases().begin(), s.bases().end());
  j["L"] = std::vector<std::uint64_t>(s.branchings().begin(), s.branchings().end());
  nlohmann::json sets = nlohmann::json::array();
  for (const auto& b : s.base_sets()) {
    sets.push_back({{"m", b.set.modulus()},
                    {"elements", std::vector<std::uint64_t>(b.set.elements().begin(),
                                                            b.set.elements().end())},
                    {"method", to_string(b.method)}});
  }
  j["base_sets"] = std::move(sets);
  if (materialize_translations) {
    nlohmann::json tr = nlohmann::json::object();
    for (std::size_t n = 0; n < tree.depth(); ++n) {
      const auto nodes = tree.level(n);
      for (std::size_t i = 0; i < nodes.size(); ++i)
        tr[nodes[i].path.to_string()] = tree.translation_at(n, i);
    }
    j["translations"] = std::move(tr);
  }
  return j;
}

namespace detail {

template <class T>
T json_get(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw SchemaError(std::string("tree file: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("tree file: bad field '") + key + "': " + e.what());
  }
}

inline std::uint64_t json_u64(const nlohmann::json& v, const std::string& what) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw SchemaError("tree file: " + what + " must be a non-negative integer");
  return v.get<std::uint64_t>();
}

}  // namespace detail

inline MeasureTree tree_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("tree file: top level must be an object");
  const int version = detail::json_get<int>(j, "version");
  if (version != kTreeFormatVersion)
    throw SchemaError("tree file: unsupported version " + std::to_string(version));
  const auto variant = parse_variant(detail::json_get<std::string>(j, "variant"));
  if (!variant) throw SchemaError("tree file: unknown variant");
  if (!j.contains("seed")) throw SchemaError("tree file: missing field 'seed'");
  const std::uint64_t seed = detail::json_u64(j["seed"], "seed");
  if (!j.contains("depth")) throw SchemaError("tree file: missing field 'depth'");
  const std::uint64_t depth = detail::json_u64(j["depth"], "depth");
  std::optional<double> t;
  if (j.contains("t") && !j["t"].is_null()) {
    if (!j["t"].is_number()) throw SchemaError("tree file: 't' must be a number or null");
    t = j["t"].get<double>();
  }
  const auto ms = detail::json_get<std::vector<std::uint64_t>>(j, "M");
  const auto ls = detail::json_get<std::vector<std::uint64_t>>(j, "L");
  if (!j.contains("base_sets") || !j["base_sets"].is_array())
    throw SchemaError("tree file: 'base_sets' must be an array");
  const auto& raw_sets = j["base_sets"];
  if (ms.size() != ls.size() || raw_sets.size() != ms.size())
    throw SchemaError("tree file: M, L and base_sets lengths differ");

  std::vector<BaseSet> sets;
  try {
    for (std::size_t i = 0; i < raw_sets.size(); ++i) {
      const auto& b = raw_sets[i];
      const auto m = detail::json_get<std::uint64_t>(b, "m");
      const auto el = detail::json_get<std::vector<std::uint64_t>>(b, "elements");
      const auto method = parse_search_method(detail::json_get<std::string>(b, "method"));
      if (!method) throw SchemaError("tree file: unknown base set method");
      if (m != ms[i]) throw SchemaError("tree file: base set modulus differs from M at level " +
                                        std::to_string(i + 1));
      if (el.size() != ls[i]) throw SchemaError("tree file: |base set| differs from L at level " +
                                                std::to_string(i + 1));
      sets.push_back({ResidueSet(m, el), *method});
    }
  } catch (const PreconditionError& e) {
    throw SchemaError(std::string("tree file: invalid base set: ") + e.what());
  }

  Schedule schedule;
  try {
    schedule = Schedule::from_parts(*variant, std::move(sets), t);
  } catch (const PreconditionError& e) {
    throw SchemaError(std::string("tree file: schedule invariant violated: ") + e.what());
  }
  if (depth > schedule.levels()) throw SchemaError("tree file: depth exceeds schedule length");

  if (!j.contains("translations")) {
    return build_tree(schedule, seed, depth);
  }
  const auto& tr = j["translations"];
  if (!tr.is_object()) throw SchemaError("tree file: 'translations' must be an object");
  std::map<NodePath, std::uint64_t> table;
  for (auto it = tr.begin(); it != tr.end(); ++it)
    table[NodePath::parse(it.key())] = detail::json_u64(it.value(), "translation");
  std::size_t used = 0;
  MeasureTree tree = MeasureTree::realize(
      schedule, seed, depth, [&](const NodePath& p, std::uint64_t) -> std::uint64_t {
        auto it = table.find(p);
        if (it == table.end())
          throw SchemaError("tree file: no translation for realized node '" + p.to_string() + "'");
        ++used;
        return it->second;
      });
  if (used != table.size())
    throw SchemaError("tree file: translations listed for nodes outside the realized tree");
  return tree;
}

inline std::string save_tree_string(const MeasureTree& tree, bool materialize_translations) {
  return tree_to_json(tree, materialize_translations).dump(2) + "\n";
}

inline void save_tree(const MeasureTree& tree, const std::string& path,
                      bool materialize_translations = true) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw SchemaError("cannot open '" + path + "' for writing");
  out << save_tree_string(tree, materialize_translations);
  if (!out) throw SchemaError("write failed for '" + path + "'");
}

inline MeasureTree load_tree_string(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("tree file: not valid JSON: ") + e.what());
  }
  return tree_from_json(j);
}

inline MeasureTree load_tree(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_tree_string(ss.str());
}

}  // namespace salem
