// Command-line front end: analyze, corpus, export, serve.

#include <algorithm>
#include <atomic>
#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nbbook/nbbook.hpp"
#include "nbbook/server.hpp"

#ifndef NBBOOK_DATA_DIR
#define NBBOOK_DATA_DIR "data"
#endif

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kPartial = 1;
constexpr int kFatal = 2;

struct Fatal {
  std::string message;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Fatal{"cannot read " + p.string()};
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& p, std::string_view bytes) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Fatal{"cannot write " + p.string()};
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

struct Catalogs {
  std::string catalog = std::string(NBBOOK_DATA_DIR) + "/catalog.json";
  std::string extension;
  std::string patterns = std::string(NBBOOK_DATA_DIR) + "/patterns.json";

  nbbook::Catalog load_functions() const {
    auto cat = nbbook::load_catalog(read_file(catalog));
    if (!extension.empty()) cat = nbbook::merge_extension(cat, nbbook::load_catalog(read_file(extension)));
    return cat;
  }
  std::vector<nbbook::PurposePattern> load_patterns() const { return nbbook::load_pattern_catalog(read_file(patterns)); }
};

void add_catalog_flags(CLI::App* cmd, Catalogs& c) {
  cmd->add_option("--catalog", c.catalog, "Function catalog JSON")->capture_default_str();
  cmd->add_option("--extend-catalog", c.extension, "Extra catalog whose entries shadow --catalog");
  cmd->add_option("--patterns", c.patterns, "Purpose pattern catalog JSON")->capture_default_str();
}

std::string codes_label(const std::vector<nbbook::CategoryCode>& codes) {
  std::string s = "[";
  for (std::size_t k = 0; k < codes.size(); ++k) s += (k ? "," : "") + codes[k].str();
  return s + "]";
}

// ----------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string notebook;
  std::string out = ".";
  bool dump_encoding = false;
  nbbook::AnalysisOptions options;
};

int cmd_analyze(const AnalyzeArgs& args, const Catalogs& catalogs) {
  const fs::path nb_path(args.notebook);
  if (!fs::is_regular_file(nb_path)) throw Fatal{"no such notebook: " + nb_path.string()};
  const auto catalog = catalogs.load_functions();
  const auto patterns = catalogs.load_patterns();
  nbbook::Notebook nb;
  try {
    nb = nbbook::parse_notebook(read_file(nb_path), nb_path.stem().string());
  } catch (const nbbook::Error& e) {
    throw Fatal{nb_path.string() + ": " + e.what()};
  }
  const auto a = nbbook::analyze(nb, catalog, patterns, args.options);

  fs::path out(args.out);
  if (out.extension() != ".json") out /= nb_path.stem().string() + ".overlay.json";
  write_file(out, nbbook::serialize_overlay(a.overlay));
  if (args.dump_encoding) {
    fs::path dump = out;
    dump.replace_filename(nb_path.stem().string() + ".encoding.jsonl");
    write_file(dump, nbbook::dump_encoding_jsonl(a.collapsed));
  }

  if (!a.raw.unknown_calls.empty()) {
    std::cerr << "warning: " << a.raw.unknown_calls.size() << " call(s) not in the catalog\n";
  }
  for (const auto& r : a.repeats) {
    std::cerr << "note: " << codes_label(r.subsequence) << " repeats " << r.count << " times; review for a purpose\n";
  }
  std::cout << out.string() << "\n";
  return kOk;
}

// ------------------------------------------------------------------ corpus

struct CorpusArgs {
  std::string dir;
  std::string out;
  std::string json;
};

int cmd_corpus(const CorpusArgs& args, const Catalogs& catalogs) {
  const auto catalog = catalogs.load_functions();
  const auto patterns = catalogs.load_patterns();
  if (!fs::is_directory(args.dir)) throw Fatal{"no such directory: " + args.dir};

  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(args.dir)) {
    if (e.is_regular_file() && e.path().extension() == ".ipynb") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<std::vector<nbbook::PatternMatch>> matches;
  std::vector<std::string> names;
  bool partial = false;
  for (const auto& f : files) {
    try {
      const auto nb = nbbook::parse_notebook(read_file(f), f.stem().string());
      auto a = nbbook::analyze(nb, catalog, patterns);
      matches.push_back(std::move(a.matches));
      names.push_back(f.filename().string());
    } catch (const nbbook::Error& e) {
      std::cerr << "warning: skipping " << f.string() << ": " << e.what() << "\n";
      partial = true;
    }
  }
  const auto table = nbbook::tally_matches(matches, patterns, names);
  const auto csv = nbbook::frequency_csv(table);
  if (args.out.empty()) {
    std::cout << csv;
  } else {
    write_file(args.out, csv);
  }
  if (!args.json.empty()) write_file(args.json, nbbook::frequency_json(table));
  return partial ? kPartial : kOk;
}

// ------------------------------------------------------------------ export

struct ExportArgs {
  std::string overlay;
  std::string annotations;
  std::string format = "markdown";
  std::string expand = "none";
  std::string out;
  std::string exported_at;
};

nbbook::AnnotationStore load_annotations(const std::string& path, const nbbook::OverlayDocument& overlay) {
  nbbook::AnnotationStore store;
  store.notebook_id = overlay.notebook_id;
  if (path.empty() || !fs::exists(path)) return store;
  return nbbook::load_store(read_file(path), overlay.notebook_id, std::span<const nbbook::Cell>(overlay.cells), false);
}

int cmd_export(const ExportArgs& args) {
  const auto overlay = nbbook::parse_overlay(read_file(args.overlay));
  const auto store = load_annotations(args.annotations, overlay);
  const auto format = nbbook::parse_export_format(args.format);
  const auto vs = nbbook::parse_expand_spec(overlay, args.expand);
  nbbook::ExportOptions opts;
  opts.exported_at = nbbook::default_export_time(store);
  if (!args.exported_at.empty()) {
    const auto t = nbbook::text::parse_iso8601(args.exported_at);
    if (!t) throw Fatal{"--exported-at must look like 2024-01-31T12:00:00Z"};
    opts.exported_at = *t;
  }
  const auto result = nbbook::export_document(overlay, store, vs, format, opts);
  if (args.out.empty()) {
    std::cout << result.document;
    if (!result.attachments.empty()) {
      std::cerr << "warning: " << result.attachments.size() << " image(s) not written; pass --out to keep them\n";
    }
    return kOk;
  }
  const fs::path out(args.out);
  write_file(out, result.document);
  const fs::path assets = out.parent_path() / opts.asset_dir;
  for (const auto& a : result.attachments) write_file(assets / a.name, a.bytes);
  return kOk;
}

// ------------------------------------------------------------------- serve

struct ServeArgs {
  std::string overlay;
  std::string annotations;
  std::string viewer_dir;
  int port = 8765;
};

std::atomic<bool> g_stop{false};

int cmd_serve(const ServeArgs& args) {
  nbbook::ServerConfig cfg;
  cfg.port = args.port;
  cfg.annotations_path = args.annotations;
  cfg.viewer_dir = args.viewer_dir;
  nbbook::OverlayServer server(read_file(args.overlay), cfg);
  int port = 0;
  try {
    port = server.start();
  } catch (const std::runtime_error& e) {
    throw Fatal{e.what()};
  }
  std::cerr << "serving http://127.0.0.1:" << port << "/\n";
  std::signal(SIGINT, [](int) { g_stop = true; });
  std::signal(SIGTERM, [](int) { g_stop = true; });
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(200));
  server.stop();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Read a notebook as a book: chapters, purpose sections, annotations, export."};
  app.require_subcommand(1);

  Catalogs catalogs;
  AnalyzeArgs analyze;
  auto* a = app.add_subcommand("analyze", "Write <name>.overlay.json for one notebook");
  a->add_option("notebook", analyze.notebook, "Input .ipynb")->required();
  a->add_option("--out", analyze.out, "Output directory, or a .json file path")->capture_default_str();
  a->add_flag("--dump-encoding", analyze.dump_encoding, "Also write <name>.encoding.jsonl");
  a->add_option("--min-repeat-len", analyze.options.min_repeat_len)->capture_default_str();
  a->add_option("--min-repeat-count", analyze.options.min_repeat_count)->capture_default_str();
  add_catalog_flags(a, catalogs);

  CorpusArgs corpus;
  auto* c = app.add_subcommand("corpus", "Count purpose patterns over a directory of notebooks");
  c->add_option("dir", corpus.dir, "Directory of .ipynb files")->required();
  c->add_option("--out", corpus.out, "CSV output (stdout when omitted)");
  c->add_option("--json", corpus.json, "Also write the JSON twin here");
  add_catalog_flags(c, catalogs);

  ExportArgs exp;
  auto* e = app.add_subcommand("export", "Export the expanded view of an overlay");
  e->add_option("overlay", exp.overlay, "Overlay JSON")->required();
  e->add_option("--annotations", exp.annotations, "Annotation sidecar JSON");
  e->add_option("--format", exp.format, "markdown|html|snapshot-json")->capture_default_str();
  e->add_option("--expand", exp.expand, "all|none|C.S,C,...")->capture_default_str();
  e->add_option("--out", exp.out, "Output file (stdout when omitted)");
  e->add_option("--exported-at", exp.exported_at, "Timestamp written into snapshots");

  ServeArgs serve;
  auto* s = app.add_subcommand("serve", "Serve an overlay and its annotations over local HTTP");
  s->add_option("overlay", serve.overlay, "Overlay JSON")->required();
  s->add_option("--annotations", serve.annotations, "Annotation sidecar JSON, created on first write");
  s->add_option("--port", serve.port)->capture_default_str();
  s->add_option("--viewer-dir", serve.viewer_dir, "Static viewer bundle");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? kOk : kFatal;
  }

  try {
    if (*a) return cmd_analyze(analyze, catalogs);
    if (*c) return cmd_corpus(corpus, catalogs);
    if (*e) return cmd_export(exp);
    if (*s) return cmd_serve(serve);
  } catch (const Fatal& f) {
    std::cerr << "error: " << f.message << "\n";
  } catch (const nbbook::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
  }
  return kFatal;
}
