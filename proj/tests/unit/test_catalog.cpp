#include <gtest/gtest.h>

#include <set>

#include "support/common.hpp"

using namespace nbbook;
using testkit::cc;

namespace {

Catalog cat_of(std::initializer_list<std::pair<const char*, const char*>> fns) {
  Catalog c;
  c.version = "t";
  for (const auto& [n, code] : fns) c.functions.emplace(n, cc(code));
  return c;
}

}  // namespace

TEST(Category, ThirtyThreeCodes) {
  const auto all = all_category_codes();
  EXPECT_EQ(all.size(), 33u);
  std::set<std::string> names;
  for (const auto& c : all) {
    names.insert(c.str());
    EXPECT_EQ(CategoryCode::parse(c.str()), c);
    EXPECT_FALSE(code_description(c).empty()) << c.str();
  }
  EXPECT_EQ(names.size(), 33u);
  EXPECT_TRUE(names.contains("PP0"));
  EXPECT_TRUE(names.contains("ML8"));
  for (const char* bad : {"O1", "L0", "L5", "PP6", "ML9", "XX1", "", "ST", "ml1", "V10"}) {
    EXPECT_FALSE(CategoryCode::parse(bad)) << bad;
  }
  EXPECT_EQ(code_description(cc("ST4")), "Statistical Test");
  EXPECT_EQ(code_description(cc("L2")), "Fetch/Load");
}

TEST(Catalog, LoadAndLookup) {
  const auto cat = load_catalog(
      R"({"version":"v","functions":{"pandas.read_csv":"L2","scipy.stats.ttest_ind":"ST4"},"fallback_names":{"sort":"PP3"}})");
  EXPECT_EQ(lookup(cat, "pandas.read_csv"), cc("L2"));
  EXPECT_EQ(lookup(cat, "scipy.stats.ttest_ind"), cc("ST4"));
  EXPECT_EQ(lookup(cat, "df.sort"), cc("PP3"));
  EXPECT_FALSE(lookup(cat, "totally.unknown.fn"));
  EXPECT_FALSE(lookup(cat, "Pandas.read_csv.x"));
}

TEST(Catalog, OtherCodeRejected) {
  try {
    load_catalog(R"({"version":"v","functions":{"x":"O1"},"fallback_names":{}})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidCategoryCode);
  }
  EXPECT_THROW(load_catalog("{"), Error);
  EXPECT_THROW(load_catalog(R"({"functions":{},"fallback_names":{}})"), Error);
  EXPECT_THROW(load_catalog(R"({"version":"v","functions":{"x":3},"fallback_names":{}})"), Error);
}

TEST(Catalog, MergeShadowsAndUnions) {
  const auto base = cat_of({{"f", "L1"}, {"g", "PP1"}, {"h", "V1"}});
  EXPECT_EQ(lookup(merge_extension(base, cat_of({{"f", "L2"}})), "f"), cc("L2"));
  Catalog empty;
  EXPECT_EQ(merge_extension(base, empty), base);
  EXPECT_EQ(merge_extension(base, cat_of({{"a", "ML1"}, {"b", "ML2"}})).functions.size(), 5u);
}

TEST(Catalog, MergeAssociative) {
  const auto a = cat_of({{"f", "L1"}, {"g", "PP1"}});
  const auto b = cat_of({{"g", "PP2"}, {"h", "V1"}});
  const auto c = cat_of({{"f", "ML1"}, {"k", "S1"}});
  EXPECT_EQ(merge_extension(merge_extension(a, b), c), merge_extension(a, merge_extension(b, c)));
}

TEST(Catalog, SerializeRoundTrip) {
  const auto& seed = testkit::seed_catalog();
  EXPECT_EQ(load_catalog(serialize_catalog(seed)), seed);
}

TEST(Catalog, SeedCoverage) {
  const auto& seed = testkit::seed_catalog();
  EXPECT_GE(seed.functions.size(), 150u);
  std::set<std::string> used;
  for (const auto& [n, c] : seed.functions) used.insert(c.str());
  for (const auto& [n, c] : seed.fallback_names) used.insert(c.str());
  EXPECT_EQ(used.size(), 33u);
  EXPECT_EQ(lookup(seed, "pandas.read_csv"), cc("L2"));
  EXPECT_EQ(lookup(seed, "t.test"), cc("ST4"));
  EXPECT_EQ(lookup(seed, "numpy.mean"), cc("ST1"));
  EXPECT_EQ(lookup(seed, "accuracy"), cc("ML4"));
  EXPECT_EQ(lookup(seed, "df.sort"), cc("PP3"));
}
