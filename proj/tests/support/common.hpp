#pragma once

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nbbook/nbbook.hpp"

namespace testkit {

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& bytes) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << bytes;
}

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(NBBOOK_FIXTURES) / name; }
inline std::filesystem::path golden(const std::string& name) { return std::filesystem::path(NBBOOK_GOLDEN) / name; }

inline const nbbook::Catalog& seed_catalog() {
  static const nbbook::Catalog c = nbbook::load_catalog(read_file(std::string(NBBOOK_DATA_DIR) + "/catalog.json"));
  return c;
}

inline const std::vector<nbbook::PurposePattern>& seed_patterns() {
  static const auto p = nbbook::load_pattern_catalog(read_file(std::string(NBBOOK_DATA_DIR) + "/patterns.json"));
  return p;
}

inline nbbook::Notebook load_fixture(const std::string& name) {
  const std::filesystem::path p = fixture(name);
  return nbbook::parse_notebook(read_file(p), p.stem().string());
}

inline nbbook::CategoryCode cc(const char* s) { return *nbbook::CategoryCode::parse(s); }

inline std::vector<nbbook::CategoryCode> codes(std::initializer_list<const char*> names) {
  std::vector<nbbook::CategoryCode> out;
  for (const char* n : names) out.push_back(cc(n));
  return out;
}

/// Encoded notebook with one unit per code, unit k sitting in cell k.
inline nbbook::EncodedNotebook encoded(const std::vector<nbbook::CategoryCode>& seq) {
  nbbook::EncodedNotebook enc;
  for (std::size_t k = 0; k < seq.size(); ++k) {
    enc.units.push_back(nbbook::EncodedUnit{seq[k], nbbook::SourceSpan{k, 0, k, 0}});
  }
  return enc;
}

inline nbbook::Notebook notebook_from_cells(const std::vector<std::pair<nbbook::CellKind, std::string>>& cells) {
  nbbook::Notebook nb;
  nb.id = "nb";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    nbbook::Cell c;
    c.index = i;
    c.kind = cells[i].first;
    c.source = cells[i].second;
    nb.cells.push_back(c);
  }
  return nb;
}

/// Runs `cmd` through the shell and returns its exit status.
inline int run(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace testkit
