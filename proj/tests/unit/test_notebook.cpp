#include <gtest/gtest.h>

#include "support/common.hpp"

using namespace nbbook;
using testkit::read_file;

namespace {

// Counts the elements of the top-level "cells" array with a character walk
// that knows only about strings, escapes and bracket depth.
std::size_t walk_cell_count(const std::string& s) {
  std::size_t depth = 0;
  bool in_str = false;
  std::string last_key;
  std::string cur;
  std::size_t cells_depth = 0;
  std::size_t count = 0;
  bool expecting_element = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (in_str) {
      if (c == '\\') {
        cur += s[++i];
      } else if (c == '"') {
        in_str = false;
        last_key = cur;
      } else {
        cur += c;
      }
      continue;
    }
    if (c == ' ' || c == '\n' || c == '\t' || c == '\r') continue;
    if (cells_depth && depth == cells_depth && expecting_element && c != ']') {
      ++count;
      expecting_element = false;
    }
    switch (c) {
      case '"': in_str = true; cur.clear(); break;
      case '{':
      case '[':
        ++depth;
        if (c == '[' && depth == 2 && last_key == "cells") {
          cells_depth = depth;
          expecting_element = true;
        }
        break;
      case '}':
      case ']':
        if (depth == cells_depth) cells_depth = 0;
        --depth;
        break;
      case ',':
        if (cells_depth && depth == cells_depth) expecting_element = true;
        break;
      default: break;
    }
  }
  return count;
}

}  // namespace

TEST(Text, Iso8601RoundTrip) {
  EXPECT_EQ(text::format_iso8601(0), "1970-01-01T00:00:00Z");
  EXPECT_EQ(text::format_iso8601(1700000000), "2023-11-14T22:13:20Z");
  EXPECT_EQ(text::parse_iso8601("2023-11-14T22:13:20Z"), 1700000000);
  EXPECT_FALSE(text::parse_iso8601("2023-11-14 22:13:20"));
  EXPECT_FALSE(text::parse_iso8601("2023-02-30T00:00:00Z"));
}

TEST(Text, Utf8LengthCountsCodePoints) {
  EXPECT_EQ(text::utf8_length("abc"), 3u);
  EXPECT_EQ(text::utf8_length("h\xC3\xA9llo"), 5u);
  EXPECT_EQ(text::utf8_length("\xE2\x80\xA6"), 1u);
}

TEST(Text, Base64RoundTrip) {
  for (std::string s : {"", "a", "ab", "abc", "abcd", "\x89PNG\r\n"}) {
    EXPECT_EQ(text::base64_decode(text::base64_encode(s)), s);
  }
  EXPECT_EQ(text::base64_encode("Man"), "TWFu");
}

TEST(Notebook, MinimalCodeCell) {
  const auto nb = parse_notebook(
      R"j({"nbformat":4,"nbformat_minor":5,"metadata":{},"cells":[{"cell_type":"code","source":"pd.read_csv('x.csv')","outputs":[]}]})j");
  ASSERT_EQ(nb.cells.size(), 1u);
  EXPECT_EQ(nb.cells[0].kind, CellKind::Code);
  EXPECT_EQ(nb.cells[0].source, "pd.read_csv('x.csv')");
  EXPECT_EQ(nb.cells[0].display_number(), 1u);
}

TEST(Notebook, ListSourceConcatenated) {
  const auto nb = parse_notebook(R"({"nbformat":4,"cells":[{"cell_type":"markdown","source":["# T\n","body"]}]})");
  EXPECT_EQ(nb.cells[0].source, "# T\nbody");
  EXPECT_EQ(nb.cells[0].kind, CellKind::Markdown);
}

TEST(Notebook, ZeroCells) {
  EXPECT_TRUE(parse_notebook(R"({"nbformat":4,"cells":[]})").cells.empty());
  EXPECT_TRUE(parse_notebook(R"({"nbformat":4})").cells.empty());
}

TEST(Notebook, Errors) {
  auto kind_of = [](const std::string& raw) {
    try {
      parse_notebook(raw);
    } catch (const Error& e) {
      return e.kind();
    }
    ADD_FAILURE() << "no error for " << raw;
    return ErrorKind::MalformedConfig;
  };
  EXPECT_EQ(kind_of("{\"nbformat\":4,\"cells\":["), ErrorKind::MalformedJson);
  EXPECT_EQ(kind_of(read_file(testkit::fixture("corrupt.ipynb"))), ErrorKind::MalformedJson);
  EXPECT_EQ(kind_of(R"({"nbformat":3,"worksheets":[]})"), ErrorKind::UnsupportedFormat);
  EXPECT_EQ(kind_of(R"({"cells":[]})"), ErrorKind::UnsupportedFormat);
  EXPECT_EQ(kind_of("[1,2]"), ErrorKind::UnsupportedFormat);
}

TEST(Notebook, IdDefaultsToContentHash) {
  const std::string raw = R"({"nbformat":4,"cells":[]})";
  EXPECT_EQ(parse_notebook(raw).id, "sha:" + text::fnv1a_hex(raw));
  EXPECT_EQ(parse_notebook(raw, "given").id, "given");
}

TEST(Notebook, StudyStandInsMatchJsonWalker) {
  for (const char* name : {"study_houseprices.ipynb", "study_movierating.ipynb", "tiny.ipynb"}) {
    const std::string raw = read_file(testkit::fixture(name));
    const auto nb = parse_notebook(raw);
    EXPECT_EQ(nb.cells.size(), walk_cell_count(raw)) << name;
  }
  EXPECT_EQ(walk_cell_count(read_file(testkit::fixture("study_houseprices.ipynb"))), 166u);
}

TEST(Outputs, MimeRules) {
  const auto nb = parse_notebook(R"({"nbformat":4,"cells":[
    {"cell_type":"code","source":"","outputs":[{"output_type":"display_data","data":{"image/png":"iVBORw0K\n","text/plain":"<Figure>"}}]},
    {"cell_type":"code","source":"","outputs":[]},
    {"cell_type":"code","source":"","outputs":[{"output_type":"error","ename":"KeyError","evalue":"'x'","traceback":[]}]},
    {"cell_type":"markdown","source":"text"}]})");
  EXPECT_EQ(classify_outputs(nb.cells[0]), std::set<OutputKind>{OutputKind::Image});
  EXPECT_EQ(nb.cells[0].outputs[0].data, "iVBORw0K");
  EXPECT_TRUE(classify_outputs(nb.cells[1]).empty());
  EXPECT_EQ(classify_outputs(nb.cells[2]), std::set<OutputKind>{OutputKind::Error});
  EXPECT_TRUE(classify_outputs(nb.cells[3]).empty());
}

TEST(Outputs, PlainTextDataframeIsTable) {
  const std::string df =
      "   Id  MSSubClass  LotArea\n"
      "0   1          60     8450\n"
      "1   2          20     9600\n";
  EXPECT_TRUE(looks_like_table_text(df));
  const std::string series = "SalePrice    1459\ndtype: int64\n";
  EXPECT_FALSE(looks_like_table_text(series));
  EXPECT_FALSE(looks_like_table_text("0.1213\n"));
  EXPECT_FALSE(looks_like_table_text(""));
}

// Ten output-bearing cells from the two stand-ins, labelled by reading them.
TEST(Outputs, HandLabelledStandInCells) {
  const auto h = testkit::load_fixture("study_houseprices.ipynb");
  const auto m = testkit::load_fixture("study_movierating.ipynb");
  struct Label {
    const Notebook* nb;
    std::size_t display;
    OutputKind kind;
  };
  const std::vector<Label> labels = {
      {&h, 6, OutputKind::Table},   // train.head()
      {&h, 7, OutputKind::Image},   // scatter plot
      {&h, 12, OutputKind::Text},   // shape tuple
      {&h, 14, OutputKind::Table},  // missing-value frame
      {&h, 25, OutputKind::Text},   // Series with dtype footer
      {&h, 35, OutputKind::Text},   // df.info() stream
      {&h, 66, OutputKind::Text},   // printed score
      {&m, 7, OutputKind::Table},   // describe()
      {&m, 9, OutputKind::Image},   // histogram
      {&m, 17, OutputKind::Text},   // value_counts Series
  };
  for (const auto& l : labels) {
    EXPECT_EQ(classify_outputs(l.nb->cells[l.display - 1]), std::set<OutputKind>{l.kind})
        << l.nb->id << " cell " << l.display;
  }
}
