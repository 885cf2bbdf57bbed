#include <gtest/gtest.h>

#include "support/common.hpp"

using namespace nbbook;

namespace {

Notebook code_nb(std::initializer_list<const char*> sources) {
  std::vector<std::pair<CellKind, std::string>> cells;
  for (const char* s : sources) cells.emplace_back(CellKind::Code, s);
  return testkit::notebook_from_cells(cells);
}

std::vector<std::string> names(const std::vector<CallEvent>& events) {
  std::vector<std::string> out;
  for (const auto& e : events) out.push_back(e.qualified_name);
  return out;
}

std::vector<std::string> calls_of(const Notebook& nb, std::size_t cell) {
  const auto aliases = resolve_aliases(nb);
  return names(extract_calls(nb.cells[cell], aliases, collect_definitions(nb, aliases)));
}

}  // namespace

TEST(Aliases, ImportForms) {
  const auto m = resolve_aliases(code_nb({"import pandas as pd\nfrom numpy import mean as m\nimport os.path\n"
                                          "from sklearn.linear_model import Lasso, Ridge as R\nfrom . import helpers"}));
  EXPECT_EQ(m.entries.at("pd"), "pandas");
  EXPECT_EQ(m.entries.at("m"), "numpy.mean");
  EXPECT_EQ(m.entries.at("os"), "os");
  EXPECT_EQ(m.entries.at("Lasso"), "sklearn.linear_model.Lasso");
  EXPECT_EQ(m.entries.at("R"), "sklearn.linear_model.Ridge");
  EXPECT_EQ(m.entries.at("helpers"), "helpers");
  EXPECT_EQ(m.apply("pd.read_csv"), "pandas.read_csv");
  EXPECT_EQ(m.apply("m"), "numpy.mean");
  EXPECT_EQ(m.apply("df.head"), "df.head");
}

TEST(Aliases, ApplyIsIdempotentOnCanonicalNames) {
  const auto m = resolve_aliases(code_nb({"import numpy as np\nimport pandas as pd"}));
  for (const char* n : {"np.mean", "pd.read_csv", "x.y"}) EXPECT_EQ(m.apply(m.apply(n)), m.apply(n));
  EXPECT_TRUE(resolve_aliases(code_nb({"x = 1"})).entries.empty());
}

TEST(Aliases, ImportsInsideDefsCount) {
  const auto m = resolve_aliases(code_nb({"def f():\n    import seaborn as sns\n    return 1"}));
  EXPECT_EQ(m.entries.at("sns"), "seaborn");
}

TEST(Extract, InnermostFirst) {
  EXPECT_EQ(calls_of(code_nb({"import numpy as np\nnp.mean(accuracy(y_test, pred))"}), 0),
            (std::vector<std::string>{"accuracy", "numpy.mean"}));
  EXPECT_EQ(calls_of(code_nb({"f(g(h()))"}), 0), (std::vector<std::string>{"h", "g", "f"}));
  EXPECT_EQ(calls_of(code_nb({"a(); b(c())\nd()"}), 0), (std::vector<std::string>{"a", "c", "b", "d"}));
}

TEST(Extract, StringsAndCommentsIgnored) {
  EXPECT_TRUE(calls_of(code_nb({"\"read_csv()\" # a comment"}), 0).empty());
  EXPECT_TRUE(calls_of(code_nb({"# pd.read_csv('x')\n'''\nf()\n'''"}), 0).empty());
  EXPECT_EQ(calls_of(code_nb({"print(f\"{x}\")  # g()"}), 0), (std::vector<std::string>{"print"}));
  EXPECT_TRUE(calls_of(code_nb({"%matplotlib inline\n!pip install x"}), 0).empty());
}

TEST(Extract, LineAndDepth) {
  const auto nb = code_nb({"x = 1\nf(g())"});
  const auto ev = extract_calls(nb.cells[0], {}, {});
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_EQ(ev[0].line_index, 1u);
  EXPECT_EQ(ev[0].nesting_depth, 1u);
  EXPECT_EQ(ev[1].nesting_depth, 0u);
  EXPECT_LT(ev[0].seq, ev[1].seq);
}

TEST(Extract, MethodChains) {
  EXPECT_EQ(calls_of(code_nb({"import pandas as pd\npd.read_csv('x').head()"}), 0),
            (std::vector<std::string>{"pandas.read_csv", "head"}));
}

TEST(Definitions, SingleCallBody) {
  const auto nb = code_nb({"import pandas as pd", "def load(): return pd.read_csv('x')"});
  const auto defs = collect_definitions(nb, resolve_aliases(nb));
  ASSERT_TRUE(defs.entries.contains("load"));
  EXPECT_EQ(names(defs.entries.at("load")), (std::vector<std::string>{"pandas.read_csv"}));
  EXPECT_TRUE(collect_definitions(code_nb({"x = f()"}), {}).entries.empty());
}

TEST(Definitions, LaterDefShadows) {
  const auto nb = code_nb({"def f():\n    return g()", "import t\ndef f():\n    return t.test(a, b)"});
  const auto defs = collect_definitions(nb, resolve_aliases(nb));
  EXPECT_EQ(names(defs.entries.at("f")), (std::vector<std::string>{"t.test"}));
}

TEST(Definitions, SpliceAtCallSite) {
  const auto nb = code_nb({"import pandas as pd\ndef load():\n    return pd.read_csv('x')", "y = 2\nload()"});
  const auto aliases = resolve_aliases(nb);
  const auto ev = extract_calls(nb.cells[1], aliases, collect_definitions(nb, aliases));
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(ev[0].qualified_name, "pandas.read_csv");
  EXPECT_EQ(ev[0].origin, CallOrigin::Spliced);
  EXPECT_EQ(ev[0].cell_index, 1u);
  EXPECT_EQ(ev[0].line_index, 1u);
  // the def cell itself emits nothing for the body
  EXPECT_TRUE(extract_calls(nb.cells[0], aliases, collect_definitions(nb, aliases)).empty());
}

TEST(Definitions, SelfRecursionDoesNotLoop) {
  const auto nb = code_nb({"def f(n):\n    return f(n - 1)", "f(3)"});
  EXPECT_EQ(calls_of(nb, 1), (std::vector<std::string>{"f"}));
}

TEST(Definitions, MutualCallsSpliceOneLevel) {
  const auto nb = code_nb({"def a():\n    return b()\ndef b():\n    return np.mean(x)", "a()"});
  EXPECT_EQ(calls_of(nb, 1), (std::vector<std::string>{"b"}));
}

TEST(Definitions, ClassMethodsAreNotDefs) {
  const auto nb = code_nb({"class M:\n    def fit(self):\n        return train(x)\n", "fit()"});
  EXPECT_FALSE(collect_definitions(nb, {}).entries.contains("fit"));
}
