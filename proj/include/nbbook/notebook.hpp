#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "nbbook/error.hpp"
#include "nbbook/text.hpp"

namespace nbbook {

enum class CellKind { Code, Markdown, Raw };
enum class OutputKind { Image, Table, Text, Error, Other };

constexpr std::string_view to_string(CellKind kind) noexcept {
  switch (kind) {
    case CellKind::Code: return "code";
    case CellKind::Markdown: return "markdown";
    case CellKind::Raw: return "raw";
  }
  return "raw";
}

constexpr std::string_view to_string(OutputKind kind) noexcept {
  switch (kind) {
    case OutputKind::Image: return "Image";
    case OutputKind::Table: return "Table";
    case OutputKind::Text: return "Text";
    case OutputKind::Error: return "Error";
    case OutputKind::Other: return "Other";
  }
  return "Other";
}

inline CellKind cell_kind_from_string(std::string_view s) noexcept {
  if (s == "code") return CellKind::Code;
  if (s == "markdown") return CellKind::Markdown;
  return CellKind::Raw;
}

inline OutputKind output_kind_from_string(std::string_view s) noexcept {
  if (s == "Image") return OutputKind::Image;
  if (s == "Table") return OutputKind::Table;
  if (s == "Text") return OutputKind::Text;
  if (s == "Error") return OutputKind::Error;
  return OutputKind::Other;
}

/// Summary of one cell output. `text` holds a plain-text rendering when one
/// exists; `data` holds the base64 payload of image outputs.
struct OutputRecord {
  OutputKind kind = OutputKind::Other;
  std::string mime_hint;
  std::string text;
  std::string data;

  bool operator==(const OutputRecord&) const = default;
};

struct Cell {
  std::size_t index = 0;
  CellKind kind = CellKind::Code;
  std::string source;
  std::vector<OutputRecord> outputs;

  std::size_t display_number() const noexcept { return index + 1; }

  bool operator==(const Cell&) const = default;
};

struct FormatVersion {
  int major = 4;
  int minor = 0;

  bool operator==(const FormatVersion&) const = default;
};

struct Notebook {
  std::string id;
  std::vector<Cell> cells;
  FormatVersion format_version;

  std::size_t size() const noexcept { return cells.size(); }
};

namespace detail {

inline std::string join_multiline(const nlohmann::json& value) {
  if (value.is_string()) return value.get<std::string>();
  std::string out;
  if (value.is_array()) {
    for (const auto& part : value) {
      if (part.is_string()) out += part.get_ref<const std::string&>();
    }
  }
  return out;
}

inline bool is_ellipsis_row(const std::vector<std::string>& tokens) {
  for (const auto& t : tokens) {
    if (t != "..." && t != "…") return false;
  }
  return !tokens.empty();
}

}  // namespace detail

/// Dataframe-style plain text: a header line whose first column (the index) is
/// blank, followed by right-aligned rows sharing the header's right edge.
inline bool looks_like_table_text(std::string_view body) {
  std::vector<std::string_view> lines;
  for (auto line : text::split_lines(body)) {
    line = text::rtrim(line);
    if (!text::trim(line).empty()) lines.push_back(line);
  }
  if (!lines.empty() && text::trim(lines.back()).starts_with('[') && lines.back().find("rows x") != std::string_view::npos) {
    lines.pop_back();
  }
  if (lines.size() < 2) return false;
  const std::string_view header = lines.front();
  if (!text::is_space(header.front())) return false;
  const auto header_tokens = text::split_ws(header);
  if (header_tokens.empty()) return false;

  std::size_t considered = 0;
  std::size_t aligned = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto tokens = text::split_ws(lines[i]);
    if (detail::is_ellipsis_row(tokens)) continue;
    // Index-name line printed under the header by pandas.
    if (i == 1 && tokens.size() == 1 && lines[i].size() < header.size()) continue;
    ++considered;
    if (tokens.size() >= 2 && lines[i].size() == header.size()) ++aligned;
  }
  return aligned >= 1 && aligned * 2 >= considered;
}

inline OutputRecord summarize_output(const nlohmann::json& out) {
  OutputRecord rec;
  const std::string type = out.value("output_type", "");
  if (type == "stream") {
    rec.mime_hint = "stream";
    rec.text = detail::join_multiline(out.value("text", nlohmann::json{}));
    rec.kind = looks_like_table_text(rec.text) ? OutputKind::Table : OutputKind::Text;
    return rec;
  }
  if (type == "error") {
    rec.kind = OutputKind::Error;
    rec.mime_hint = "error";
    rec.text = out.value("ename", "") + ": " + out.value("evalue", "");
    return rec;
  }
  if (type == "display_data" || type == "execute_result" || type == "update_display_data") {
    const auto data_it = out.find("data");
    if (data_it == out.end() || !data_it->is_object() || data_it->empty()) {
      rec.mime_hint = type;
      return rec;
    }
    const auto& bundle = *data_it;
    if (auto plain = bundle.find("text/plain"); plain != bundle.end()) rec.text = detail::join_multiline(*plain);
    for (const auto& [mime, payload] : bundle.items()) {
      if (mime.starts_with("image/")) {
        rec.kind = OutputKind::Image;
        rec.mime_hint = mime;
        std::string raw = detail::join_multiline(payload);
        for (char c : raw) {
          if (c != '\n' && c != '\r') rec.data.push_back(c);
        }
        return rec;
      }
    }
    if (auto html = bundle.find("text/html"); html != bundle.end()) {
      const std::string markup = detail::join_multiline(*html);
      if (markup.find("<table") != std::string::npos) {
        rec.kind = OutputKind::Table;
        rec.mime_hint = "text/html";
        if (rec.text.empty()) rec.text = markup;
        return rec;
      }
    }
    if (bundle.contains("text/plain")) {
      rec.mime_hint = "text/plain";
      rec.kind = looks_like_table_text(rec.text) ? OutputKind::Table : OutputKind::Text;
      return rec;
    }
    rec.mime_hint = bundle.begin().key();
    return rec;
  }
  rec.mime_hint = type;
  return rec;
}

/// Parses an nbformat-4 document. Sources given as string lists are
/// concatenated as-is (each element already carries its newline).
inline Notebook parse_notebook(std::string_view raw, std::string id = {}) {
  nlohmann::json doc = nlohmann::json::parse(raw, nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorKind::MalformedJson, "notebook is not valid JSON");
  if (!doc.is_object()) throw Error(ErrorKind::UnsupportedFormat, "notebook top level is not an object");
  const auto major_it = doc.find("nbformat");
  if (major_it == doc.end() || !major_it->is_number_integer()) {
    throw Error(ErrorKind::UnsupportedFormat, "missing nbformat version");
  }
  Notebook nb;
  nb.id = id.empty() ? "sha:" + text::fnv1a_hex(raw) : std::move(id);
  nb.format_version.major = major_it->get<int>();
  nb.format_version.minor = doc.value("nbformat_minor", 0);
  if (nb.format_version.major != 4) {
    throw Error(ErrorKind::UnsupportedFormat, "nbformat " + std::to_string(nb.format_version.major) + " (only 4 is accepted)");
  }
  const auto cells_it = doc.find("cells");
  if (cells_it == doc.end()) return nb;
  if (!cells_it->is_array()) throw Error(ErrorKind::UnsupportedFormat, "`cells` is not an array");

  for (const auto& entry : *cells_it) {
    Cell cell;
    cell.index = nb.cells.size();
    if (entry.is_object()) {
      cell.kind = cell_kind_from_string(entry.value("cell_type", ""));
      if (auto src = entry.find("source"); src != entry.end()) cell.source = detail::join_multiline(*src);
      if (cell.kind == CellKind::Code) {
        if (auto outs = entry.find("outputs"); outs != entry.end() && outs->is_array()) {
          for (const auto& out : *outs) {
            if (out.is_object()) cell.outputs.push_back(summarize_output(out));
          }
        }
      }
    } else {
      cell.kind = CellKind::Raw;
    }
    nb.cells.push_back(std::move(cell));
  }
  return nb;
}

inline std::set<OutputKind> classify_outputs(const Cell& cell) {
  std::set<OutputKind> kinds;
  if (cell.kind != CellKind::Code) return kinds;
  for (const auto& out : cell.outputs) kinds.insert(out.kind);
  return kinds;
}

}  // namespace nbbook
