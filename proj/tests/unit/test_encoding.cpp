#include <gtest/gtest.h>

#include <random>

#include "support/common.hpp"
#include "support/oracles.hpp"

using namespace nbbook;
using testkit::codes;
using testkit::encoded;

namespace {

Catalog small_catalog() {
  return load_catalog(R"({"version":"t","functions":{"pandas.read_csv":"L2","numpy.mean":"ST1"},
                          "fallback_names":{"accuracy":"ML4","sort":"PP3","hist":"V1"}})");
}

std::vector<std::pair<std::size_t, std::size_t>> ranges(const std::vector<Segment>& segs) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& s : segs) out.emplace_back(s.begin, s.end);
  return out;
}

}  // namespace

TEST(Encode, ImportThenLoad) {
  const auto nb = testkit::notebook_from_cells({{CellKind::Code, "import pandas as pd\npd.read_csv('x')"}});
  const auto enc = encode_notebook(nb, small_catalog());
  EXPECT_EQ(enc.codes(), codes({"L1", "L2"}));
  EXPECT_EQ(enc.units[0].source, UnitSource::ImportStatement);
  EXPECT_TRUE(enc.unknown_calls.empty());
}

TEST(Encode, NestedCallInnermostFirst) {
  const auto nb = testkit::notebook_from_cells({{CellKind::Code, "np.mean(accuracy(y_test, pred))"}});
  Catalog cat = small_catalog();
  cat.functions.emplace("np.mean", testkit::cc("ST1"));
  EXPECT_EQ(encode_notebook(nb, cat).codes(), codes({"ML4", "ST1"}));
}

TEST(Encode, EmptyAndUnknown) {
  const auto empty = encode_notebook(Notebook{}, small_catalog());
  EXPECT_TRUE(empty.units.empty());
  EXPECT_TRUE(empty.unknown_calls.empty());
  const auto nb = testkit::notebook_from_cells({{CellKind::Markdown, "pd.read_csv()"}, {CellKind::Code, "mystery(1)"}});
  const auto enc = encode_notebook(nb, small_catalog());
  EXPECT_TRUE(enc.units.empty());
  ASSERT_EQ(enc.unknown_calls.size(), 1u);
  EXPECT_EQ(enc.unknown_calls[0].qualified_name, "mystery");
  EXPECT_EQ(enc.unknown_calls[0].cell_index, 1u);
}

TEST(Collapse, SixSortsBecomeOne) {
  std::vector<std::pair<CellKind, std::string>> cells;
  for (int i = 0; i < 6; ++i) cells.emplace_back(CellKind::Code, "df.sort()");
  const auto enc = collapse_runs(encode_notebook(testkit::notebook_from_cells(cells), small_catalog()));
  ASSERT_EQ(enc.units.size(), 1u);
  EXPECT_EQ(enc.units[0].code, testkit::cc("PP3"));
  EXPECT_EQ(enc.units[0].multiplicity, 6u);
  EXPECT_EQ(enc.units[0].span.first_cell, 0u);
  EXPECT_EQ(enc.units[0].span.last_cell, 5u);
}

TEST(Collapse, MixedRuns) {
  const auto out = collapse_runs(encoded(codes({"L2", "PP3", "PP3", "V1", "V1", "L2"})));
  EXPECT_EQ(out.codes(), codes({"L2", "PP3", "V1", "L2"}));
  std::vector<std::size_t> mult;
  for (const auto& u : out.units) mult.push_back(u.multiplicity);
  EXPECT_EQ(mult, (std::vector<std::size_t>{1, 2, 2, 1}));
  EXPECT_EQ(collapse_runs(out), out);
}

TEST(Collapse, MatchesRunLengthOracle) {
  std::mt19937 rng(7);
  const auto all = all_category_codes();
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<CategoryCode> seq;
    const std::size_t n = std::uniform_int_distribution<std::size_t>(0, 40)(rng);
    for (std::size_t k = 0; k < n; ++k) seq.push_back(all[std::uniform_int_distribution<std::size_t>(0, 3)(rng)]);
    const auto out = collapse_runs(encoded(seq));
    const auto runs = oracle::run_lengths(seq);
    ASSERT_EQ(out.units.size(), runs.size());
    std::size_t total = 0;
    for (std::size_t k = 0; k < runs.size(); ++k) {
      EXPECT_EQ(out.units[k].code, runs[k].first);
      EXPECT_EQ(out.units[k].multiplicity, runs[k].second);
      total += out.units[k].multiplicity;
    }
    EXPECT_EQ(total, n);
    EXPECT_EQ(collapse_runs(out), out);
  }
}

TEST(Segment, Examples) {
  auto s = segment(encoded(codes({"L2", "PP3", "V1"})));
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0], (Segment{0, 3, 0, 2}));

  s = segment(encoded(codes({"PP3", "PP4"})));
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0], (Segment{0, 2, std::nullopt, std::nullopt}));

  s = segment(encoded(codes({"L2", "ML2", "ML4", "PP1", "L2", "V1"})));
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0], (Segment{0, 3, 0, 2}));
  EXPECT_EQ(s[1], (Segment{3, 4, std::nullopt, std::nullopt}));
  EXPECT_EQ(s[2], (Segment{4, 6, 4, 5}));

  EXPECT_TRUE(segment(EncodedNotebook{}).empty());
  s = segment(encoded(codes({"L1", "PP1"})));
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0], (Segment{0, 2, 0, std::nullopt}));
}

TEST(Segment, PartitionsUnitRange) {
  std::mt19937 rng(11);
  const auto all = all_category_codes();
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<CategoryCode> seq;
    const std::size_t n = std::uniform_int_distribution<std::size_t>(0, 30)(rng);
    for (std::size_t k = 0; k < n; ++k) seq.push_back(all[std::uniform_int_distribution<std::size_t>(0, 32)(rng)]);
    const auto segs = segment(encoded(seq));
    std::size_t next = 0;
    for (const auto& [b, e] : ranges(segs)) {
      ASSERT_EQ(b, next);
      ASSERT_LT(b, e);
      next = e;
    }
    EXPECT_EQ(next, n);
    for (const auto& sg : segs) {
      if (sg.opener) {
        EXPECT_EQ(seq[*sg.opener].group(), CategoryGroup::L);
      }
      if (sg.closer) {
        EXPECT_EQ(*sg.closer, sg.end - 1);
      }
    }
  }
}

TEST(Repeats, ModelVerifyLoop) {
  const auto reps = flag_repeats(encoded(codes({"ML2", "ML4", "ML2", "ML4", "ML2", "ML4"})), 2, 2);
  ASSERT_EQ(reps.size(), 1u);
  EXPECT_EQ(reps[0].subsequence, codes({"ML2", "ML4"}));
  EXPECT_EQ(reps[0].count, 3u);
  EXPECT_EQ(reps[0].occurrences, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 2}, {2, 4}, {4, 6}}));
  EXPECT_TRUE(flag_repeats(encoded(codes({"L1", "L2", "PP1", "V1"}))).empty());
}

// Every repeated subsequence is either reported with its exact greedy count
// or has all its greedy occurrences inside ground covered by reported ones.
TEST(Repeats, AgreesWithEnumeration) {
  std::mt19937 rng(3);
  const auto all = all_category_codes();
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<CategoryCode> seq;
    const std::size_t n = std::uniform_int_distribution<std::size_t>(0, 24)(rng);
    for (std::size_t k = 0; k < n; ++k) seq.push_back(all[std::uniform_int_distribution<std::size_t>(0, 2)(rng)]);
    const auto reps = flag_repeats(encoded(seq), 2, 2);
    std::vector<bool> covered(n, false);
    for (const auto& r : reps) {
      EXPECT_EQ(r.count, oracle::count_non_overlapping(seq, r.subsequence));
      EXPECT_GE(r.count, 2u);
      for (const auto& [b, e] : r.occurrences) {
        for (std::size_t k = b; k < e; ++k) covered[k] = true;
      }
    }
    for (std::size_t len = 2; len <= n; ++len) {
      for (std::size_t s = 0; s + len <= n; ++s) {
        const std::vector<CategoryCode> sub(seq.begin() + static_cast<long>(s), seq.begin() + static_cast<long>(s + len));
        if (oracle::count_non_overlapping(seq, sub) < 2) continue;
        for (std::size_t p = 0; p + len <= n;) {
          if (!std::equal(sub.begin(), sub.end(), seq.begin() + static_cast<long>(p))) {
            ++p;
            continue;
          }
          for (std::size_t k = p; k < p + len; ++k) EXPECT_TRUE(covered[k]) << oracle::token_string(sub);
          p += len;
        }
      }
    }
  }
}

TEST(Dump, JsonLinesFormat) {
  auto enc = collapse_runs(encoded(codes({"PP3", "PP3", "L2"})));
  EXPECT_EQ(dump_encoding_jsonl(enc),
            "{\"code\":\"PP3\",\"mult\":2,\"cells\":[1,2]}\n{\"code\":\"L2\",\"mult\":1,\"cells\":[3,3]}\n");
  EXPECT_EQ(dump_encoding_jsonl(EncodedNotebook{}), "");
}
