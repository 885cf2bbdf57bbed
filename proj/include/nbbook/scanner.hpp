#pragma once

// Tokenizer-level scanning of Python cell sources: string/comment masking,
// balanced-bracket call detection, import statements, and top-level `def`
// blocks. No grammar is built; malformed regions simply yield nothing.

#include <algorithm>
#include <iterator>
#include <cstddef>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace nbbook::scan {

struct ScannedCall {
  std::string name;  // dotted chain as written, e.g. "pd.read_csv" or "head"
  std::size_t line = 0;
  std::size_t depth = 0;  // number of enclosing call frames
};

struct ScannedImport {
  std::string statement;  // whitespace-normalized, parentheses removed
  std::size_t line = 0;
};

using ScanItem = std::variant<ScannedCall, ScannedImport>;

struct ScannedDef {
  std::string name;
  std::size_t line = 0;
  std::vector<ScanItem> body;
};

struct ScanResult {
  std::vector<ScanItem> items;  // top level, in emission order
  std::vector<ScannedDef> defs;
};

inline bool is_ident_start(char c) noexcept {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || static_cast<unsigned char>(c) >= 0x80;
}
inline bool is_ident_char(char c) noexcept { return is_ident_start(c) || (c >= '0' && c <= '9'); }

inline bool is_keyword(std::string_view w) noexcept {
  static constexpr std::string_view kKeywords[] = {
      "False", "None",    "True",  "and",    "as",       "assert", "async", "await",  "break",
      "class", "continue", "def",  "del",    "elif",     "else",   "except", "finally", "for",
      "from",  "global",  "if",    "import", "in",       "is",     "lambda", "nonlocal", "not",
      "or",    "pass",    "raise", "return", "try",      "while",  "with",  "yield"};
  return std::find(std::begin(kKeywords), std::end(kKeywords), w) != std::end(kKeywords);
}

/// Replaces string literals, comments and shell/magic lines (`!cmd`, `%magic`)
/// with spaces. Newlines are preserved so offsets and line numbers still match.
inline std::string mask_source(std::string_view src) {
  std::string out(src);
  std::size_t i = 0;
  bool line_start = true;
  auto blank = [&](std::size_t from, std::size_t to) {
    for (std::size_t k = from; k < to && k < out.size(); ++k) {
      if (out[k] != '\n') out[k] = ' ';
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (c == '\n') {
      line_start = true;
      ++i;
      continue;
    }
    if (line_start) {
      if (c == ' ' || c == '\t') {
        ++i;
        continue;
      }
      line_start = false;
      if (c == '%' || c == '!') {
        std::size_t end = src.find('\n', i);
        if (end == std::string_view::npos) end = src.size();
        blank(i, end);
        i = end;
        continue;
      }
    }
    if (c == '#') {
      std::size_t end = src.find('\n', i);
      if (end == std::string_view::npos) end = src.size();
      blank(i, end);
      i = end;
      continue;
    }
    if (c == '"' || c == '\'') {
      const bool triple = i + 2 < src.size() && src[i + 1] == c && src[i + 2] == c;
      std::size_t j = i + (triple ? 3 : 1);
      while (j < src.size()) {
        if (src[j] == '\\') {
          j += 2;
          continue;
        }
        if (!triple && src[j] == '\n') break;
        if (src[j] == c) {
          if (!triple) {
            ++j;
            break;
          }
          if (j + 2 < src.size() && src[j + 1] == c && src[j + 2] == c) {
            j += 3;
            break;
          }
        }
        ++j;
      }
      j = std::min(j, src.size());
      blank(i, j);
      i = j;
      continue;
    }
    ++i;
  }
  return out;
}

namespace detail {

inline std::vector<std::size_t> line_starts(std::string_view s) {
  std::vector<std::size_t> starts{0};
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\n') starts.push_back(i + 1);
  }
  return starts;
}

inline std::size_t line_of(const std::vector<std::size_t>& starts, std::size_t offset) {
  auto it = std::upper_bound(starts.begin(), starts.end(), offset);
  return static_cast<std::size_t>(it - starts.begin()) - 1;
}

inline std::string normalize_statement(std::string_view s) {
  std::string out;
  for (char c : s) {
    const bool sep = c == '(' || c == ')' || c == '\\' || c == ' ' || c == '\t' || c == '\n' || c == '\r';
    if (sep) {
      if (!out.empty() && out.back() != ' ') out += ' ';
      continue;
    }
    if (c == ',' && !out.empty() && out.back() == ' ') out.pop_back();
    out += c;
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

inline bool word_at(std::string_view s, std::size_t pos, std::string_view word) {
  if (s.substr(pos, word.size()) != word) return false;
  const std::size_t end = pos + word.size();
  return end >= s.size() || !is_ident_char(s[end]);
}

struct Frame {
  bool is_call = false;
  ScannedCall call;
};

/// Scans masked text and returns calls (emitted at their closing bracket, so
/// nested calls come innermost-first) interleaved with import statements.
inline std::vector<ScanItem> scan_masked(std::string_view m, const std::vector<std::size_t>& starts) {
  std::vector<ScanItem> items;
  std::vector<Frame> stack;
  std::size_t call_frames = 0;
  bool stmt_start = true;
  std::string prev_word;
  std::size_t i = 0;

  while (i < m.size()) {
    const char c = m[i];
    if (c == '\n') {
      const bool continued = i > 0 && m[i - 1] == '\\';
      if (stack.empty() && !continued) stmt_start = true;
      ++i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (stmt_start && stack.empty() && (word_at(m, i, "import") || word_at(m, i, "from"))) {
      // Import statement: runs to the end of the logical line.
      std::size_t j = i;
      int depth = 0;
      while (j < m.size()) {
        if (m[j] == '(') ++depth;
        else if (m[j] == ')') depth = std::max(0, depth - 1);
        else if (m[j] == ';' && depth == 0) break;
        else if (m[j] == '\n' && depth == 0 && !(j > 0 && m[j - 1] == '\\')) break;
        ++j;
      }
      std::string stmt = normalize_statement(m.substr(i, j - i));
      if (stmt.starts_with("import ") || stmt.find(" import ") != std::string::npos) {
        items.emplace_back(ScannedImport{std::move(stmt), line_of(starts, i)});
      }
      i = j;
      continue;
    }
    stmt_start = false;
    if (c == ';') {
      if (stack.empty()) stmt_start = true;
      ++i;
      continue;
    }
    if (is_ident_start(c) && (i == 0 || !is_ident_char(m[i - 1]))) {
      const std::size_t begin = i;
      std::size_t j = i;
      while (j < m.size() && is_ident_char(m[j])) ++j;
      std::size_t segments = 1;
      while (j + 1 < m.size() && m[j] == '.' && is_ident_start(m[j + 1])) {
        ++j;
        while (j < m.size() && is_ident_char(m[j])) ++j;
        ++segments;
      }
      std::string chain(m.substr(begin, j - begin));
      std::size_t k = j;
      while (k < m.size() && (m[k] == ' ' || m[k] == '\t')) ++k;
      const bool defining = prev_word == "def" || prev_word == "class";
      if (k < m.size() && m[k] == '(' && !defining && !(segments == 1 && is_keyword(chain))) {
        Frame f;
        f.is_call = true;
        f.call = ScannedCall{chain, line_of(starts, begin), call_frames};
        stack.push_back(std::move(f));
        ++call_frames;
        prev_word.clear();
        i = k + 1;
        continue;
      }
      prev_word = segments == 1 ? chain : std::string{};
      i = j;
      continue;
    }
    prev_word.clear();
    if (c == '(' || c == '[' || c == '{') {
      stack.push_back(Frame{});
    } else if (c == ')' || c == ']' || c == '}') {
      if (!stack.empty()) {
        Frame f = std::move(stack.back());
        stack.pop_back();
        if (f.is_call) {
          --call_frames;
          items.emplace_back(std::move(f.call));
        }
      }
    }
    ++i;
  }
  return items;
}

struct DefBlock {
  std::string name;
  std::size_t header_begin = 0;  // offset of `def`
  std::size_t body_begin = 0;    // offset just past the header colon
  std::size_t end = 0;           // one past the last character of the block
};

inline std::vector<DefBlock> find_top_level_defs(std::string_view m, const std::vector<std::size_t>& starts) {
  std::vector<DefBlock> blocks;
  std::size_t li = 0;
  while (li < starts.size()) {
    const std::size_t ls = starts[li];
    std::size_t pos = ls;
    if (word_at(m, pos, "async")) {
      pos += 5;
      while (pos < m.size() && (m[pos] == ' ' || m[pos] == '\t')) ++pos;
    }
    if (!word_at(m, pos, "def")) {
      ++li;
      continue;
    }
    std::size_t p = pos + 3;
    while (p < m.size() && (m[p] == ' ' || m[p] == '\t')) ++p;
    const std::size_t name_begin = p;
    while (p < m.size() && is_ident_char(m[p])) ++p;
    if (p == name_begin) {
      ++li;
      continue;
    }
    DefBlock block;
    block.name = std::string(m.substr(name_begin, p - name_begin));
    block.header_begin = ls;
    int depth = 0;
    std::size_t colon = std::string_view::npos;
    for (std::size_t q = p; q < m.size(); ++q) {
      if (m[q] == '(' || m[q] == '[' || m[q] == '{') ++depth;
      else if (m[q] == ')' || m[q] == ']' || m[q] == '}') --depth;
      else if (m[q] == ':' && depth == 0) {
        colon = q;
        break;
      }
    }
    if (colon == std::string_view::npos) {
      ++li;
      continue;  // malformed header: treat the line as ordinary code
    }
    block.body_begin = colon + 1;
    std::size_t next = line_of(starts, colon) + 1;
    while (next < starts.size()) {
      const std::size_t s = starts[next];
      std::size_t e = s;
      while (e < m.size() && m[e] != '\n') ++e;
      const std::string_view line = m.substr(s, e - s);
      const bool blank = line.find_first_not_of(" \t\r") == std::string_view::npos;
      if (!blank && line.front() != ' ' && line.front() != '\t') break;
      ++next;
    }
    block.end = next < starts.size() ? starts[next] : m.size();
    blocks.push_back(block);
    li = next;
  }
  return blocks;
}

inline std::string blank_outside(std::string_view m, std::size_t from, std::size_t to) {
  std::string out(m);
  for (std::size_t k = 0; k < out.size(); ++k) {
    if ((k < from || k >= to) && out[k] != '\n') out[k] = ' ';
  }
  return out;
}

}  // namespace detail

inline ScanResult scan_python(std::string_view source) {
  const std::string masked = mask_source(source);
  const auto starts = detail::line_starts(masked);
  const auto blocks = detail::find_top_level_defs(masked, starts);

  std::string top = masked;
  ScanResult result;
  for (const auto& b : blocks) {
    for (std::size_t k = b.header_begin; k < b.end; ++k) {
      if (top[k] != '\n') top[k] = ' ';
    }
    const std::string body = detail::blank_outside(masked, b.body_begin, b.end);
    result.defs.push_back(
        ScannedDef{b.name, detail::line_of(starts, b.header_begin), detail::scan_masked(body, starts)});
  }
  result.items = detail::scan_masked(top, starts);
  return result;
}

}  // namespace nbbook::scan
