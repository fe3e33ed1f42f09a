#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

#include "salem/tree_io.hpp"

using namespace salem;
using nlohmann::json;

namespace {

MeasureTree fixture(std::uint64_t seed = 42, std::size_t depth = 3) {
  const auto s = schedule_a(25, {ResidueSet(25, {2, 4, 8, 10}), SearchMethod::Exhaustive}, 0.4, 8);
  return build_tree(s, seed, depth);
}

}  // namespace

TEST(TreeIo, RoundTripFixture) {
  const auto tree = fixture();
  EXPECT_EQ(load_tree_string(save_tree_string(tree, true)), tree);
  EXPECT_EQ(load_tree_string(save_tree_string(tree, false)), tree);
}

TEST(TreeIo, RoundTripTheoremBAndCustom) {
  const auto b = build_tree(schedule_b(30), 9, 16);
  EXPECT_EQ(load_tree_string(save_tree_string(b, true)), b);
  const auto c = build_tree(Schedule::uniform({3, 4, 5}), 1, 2);
  EXPECT_EQ(load_tree_string(save_tree_string(c, false)), c);
}

TEST(TreeIo, FileRoundTrip) {
  const auto path = (std::filesystem::temp_directory_path() / "salem_tree_io_test.json").string();
  const auto tree = fixture(5, 2);
  save_tree(tree, path);
  EXPECT_EQ(load_tree(path), tree);
  std::remove(path.c_str());
  EXPECT_THROW(load_tree(path), SchemaError);
}

TEST(TreeIo, SchemaShape) {
  const json j = tree_to_json(fixture(), true);
  EXPECT_EQ(j["version"], 1);
  EXPECT_EQ(j["variant"], "A");
  EXPECT_EQ(j["seed"], 42);
  EXPECT_EQ(j["depth"], 3);
  EXPECT_DOUBLE_EQ(j["t"].get<double>(), 0.4);
  EXPECT_EQ(j["M"].size(), 8u);
  EXPECT_EQ(j["base_sets"][0]["elements"], json({2, 4, 8, 10}));
  EXPECT_EQ(j["base_sets"][0]["method"], "exhaustive");
  EXPECT_EQ(j["translations"].size(), 1u + 4 + 16);
  EXPECT_TRUE(j["translations"].contains(""));
  EXPECT_FALSE(tree_to_json(fixture(), false).contains("translations"));
  EXPECT_TRUE(tree_to_json(build_tree(schedule_b(3), 0, 1), false)["t"].is_null());
}

TEST(TreeIo, TamperedTranslationRejected) {
  json j = tree_to_json(fixture(), true);
  j["translations"]["2"] = 25;
  EXPECT_THROW(tree_from_json(j), SchemaError);
}

TEST(TreeIo, OmittedTranslationsRederived) {
  json j = tree_to_json(fixture(), true);
  j.erase("translations");
  EXPECT_EQ(tree_from_json(j), fixture());
}

TEST(TreeIo, MaterializedTranslationsAreHonoured) {
  json j = tree_to_json(fixture(42, 1), true);
  const std::uint64_t old = j["translations"][""];
  j["translations"][""] = (old + 1) % 25;
  const auto tree = tree_from_json(j);
  EXPECT_EQ(tree.translation(NodePath{}), (old + 1) % 25);
}

TEST(TreeIo, SchemaViolations) {
  const json good = tree_to_json(fixture(), true);
  auto expect_bad = [](json j) { EXPECT_THROW(tree_from_json(j), SchemaError) << j.dump(); };
  {
    json j = good; j["version"] = 2; expect_bad(j);
  }
  {
    json j = good; j["variant"] = "C"; expect_bad(j);
  }
  {
    json j = good; j.erase("seed"); expect_bad(j);
  }
  {
    json j = good; j["depth"] = 9; expect_bad(j);
  }
  {
    json j = good; j["L"][0] = 3; expect_bad(j);
  }
  {
    json j = good; j["base_sets"][0]["elements"] = json({0, 1, 2, 3}); j["base_sets"][1] = j["base_sets"][0]; expect_bad(j);
  }
  {
    json j = good;
    j["translations"].erase(fixture().level(1)[0].path.to_string());
    expect_bad(j);
  }
  {
    json j = good; j["translations"]["24.24"] = 0; expect_bad(j);
  }
  {
    json j = good; j["translations"]["x"] = 0; expect_bad(j);
  }
  {
    json j = good; j["translations"][""] = -1; expect_bad(j);
  }
  {
    json j = good; j["base_sets"][0]["method"] = "magic"; expect_bad(j);
  }
  EXPECT_THROW(load_tree_string("{not json"), SchemaError);
  EXPECT_THROW(load_tree_string("[]"), SchemaError);
}
