#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "nbbook/annotations.hpp"
#include "nbbook/error.hpp"
#include "nbbook/overlay.hpp"
#include "nbbook/text.hpp"

namespace nbbook {

/// Sections are addressed as (chapter number, 1-based section index).
struct ViewState {
  std::set<std::pair<std::size_t, std::size_t>> expanded_sections;
  std::set<std::size_t> expanded_chapters;

  bool operator==(const ViewState&) const = default;
};

enum class ExportFormat { Markdown, Html, SnapshotJson };

inline ExportFormat parse_export_format(std::string_view s) {
  if (s == "markdown" || s == "md") return ExportFormat::Markdown;
  if (s == "html") return ExportFormat::Html;
  if (s == "snapshot-json" || s == "snapshot") return ExportFormat::SnapshotJson;
  throw Error(ErrorKind::UnknownFormat, std::string(s));
}

inline void validate_view_state(const OverlayDocument& overlay, const ViewState& vs) {
  auto chapter = [&](std::size_t number) -> const Chapter* {
    for (const auto& ch : overlay.chapters) {
      if (ch.number == number) return &ch;
    }
    return nullptr;
  };
  for (std::size_t c : vs.expanded_chapters) {
    if (!chapter(c)) throw Error(ErrorKind::InvalidViewState, "no chapter " + std::to_string(c));
  }
  for (const auto& [c, s] : vs.expanded_sections) {
    const Chapter* ch = chapter(c);
    if (!ch) throw Error(ErrorKind::InvalidViewState, "no chapter " + std::to_string(c));
    if (s < 1 || s > ch->sections.size()) {
      throw Error(ErrorKind::InvalidViewState, "no section " + std::to_string(c) + "." + std::to_string(s));
    }
  }
}

inline ViewState expand_all(const OverlayDocument& overlay) {
  ViewState vs;
  for (const auto& ch : overlay.chapters) {
    vs.expanded_chapters.insert(ch.number);
    for (std::size_t s = 1; s <= ch.sections.size(); ++s) vs.expanded_sections.emplace(ch.number, s);
  }
  return vs;
}

/// `all`, `none`, or a comma list of `C` (whole chapter) and `C.S` (one
/// section) entries. Expanding a section also expands its chapter.
inline ViewState parse_expand_spec(const OverlayDocument& overlay, std::string_view spec) {
  spec = text::trim(spec);
  if (spec == "all") return expand_all(overlay);
  ViewState vs;
  if (spec == "none" || spec.empty()) return vs;
  std::size_t start = 0;
  while (start <= spec.size()) {
    std::size_t end = spec.find(',', start);
    if (end == std::string_view::npos) end = spec.size();
    const std::string item(text::trim(spec.substr(start, end - start)));
    start = end + 1;
    if (item.empty()) continue;
    std::size_t c = 0, s = 0;
    char dot = 0;
    char trailing = 0;
    const int n = std::sscanf(item.c_str(), "%zu%c%zu%c", &c, &dot, &s, &trailing);
    if (n == 1) {
      vs.expanded_chapters.insert(c);
      for (const auto& ch : overlay.chapters) {
        if (ch.number != c) continue;
        for (std::size_t k = 1; k <= ch.sections.size(); ++k) vs.expanded_sections.emplace(c, k);
      }
    } else if (n == 3 && dot == '.') {
      vs.expanded_chapters.insert(c);
      vs.expanded_sections.emplace(c, s);
    } else {
      throw Error(ErrorKind::InvalidViewState, "cannot parse expand entry `" + item + "`");
    }
  }
  validate_view_state(overlay, vs);
  return vs;
}

/// Display numbers that an export of `vs` contains: every cell inside an
/// expanded section's range plus every chapter header cell.
inline std::vector<std::size_t> included_cells(const OverlayDocument& overlay, const ViewState& vs) {
  std::set<std::size_t> cells;
  for (const auto& ch : overlay.chapters) {
    if (ch.header_cell) cells.insert(*ch.header_cell);
    for (std::size_t k = 0; k < ch.sections.size(); ++k) {
      if (!vs.expanded_sections.contains({ch.number, k + 1})) continue;
      const auto& r = ch.sections[k].cell_range;
      for (std::size_t d = r.first; d <= r.last; ++d) cells.insert(d);
    }
  }
  return {cells.begin(), cells.end()};
}

struct ExportOptions {
  std::int64_t exported_at = 0;
  std::string asset_dir = "assets";  // Markdown image references point here
};

struct ExportAttachment {
  std::string name;
  std::string mime;
  std::string bytes;  // decoded payload
};

struct ExportResult {
  std::string document;
  std::vector<ExportAttachment> attachments;
};

namespace detail {

inline std::string html_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string image_extension(std::string_view mime) {
  if (mime == "image/jpeg") return "jpg";
  if (mime == "image/svg+xml") return "svg";
  const auto slash = mime.find('/');
  return slash == std::string_view::npos ? "bin" : std::string(mime.substr(slash + 1));
}

inline bool is_text_image(std::string_view mime) { return mime == "image/svg+xml"; }

inline std::string range_label(CellRange r) {
  return r.first == r.last ? "cell " + std::to_string(r.first)
                           : "cells " + std::to_string(r.first) + "-" + std::to_string(r.last);
}

inline std::string fence(std::string_view body) {
  std::string ticks = "```";
  while (body.find(ticks) != std::string_view::npos) ticks += '`';
  return ticks;
}

struct Renderer {
  const OverlayDocument& overlay;
  const ViewState& vs;
  std::vector<Annotation> notes;  // included annotations, query order
  const ExportOptions& options;
  ExportResult result;

  std::vector<Annotation> notes_for(std::size_t display) const {
    std::vector<Annotation> out;
    for (const auto& a : notes) {
      if (a.cell_display == display) out.push_back(a);
    }
    return out;
  }

  std::string callout_md(const Annotation& a) const {
    return "<!-- annotation:" + a.id + " -->\n> **" + std::string(to_string(a.color)) + " highlight** (chars " +
           std::to_string(a.anchor.start_char) + "-" + std::to_string(a.anchor.end_char) + ", " +
           (a.author.empty() ? std::string("anonymous") : a.author) + "): " + a.comment + "\n\n";
  }

  std::string callout_html(const Annotation& a) const {
    return "<aside class=\"annotation " + text::lowercase(to_string(a.color)) + "\" data-annotation=\"" +
           html_escape(a.id) + "\"><span class=\"meta\">" + std::string(to_string(a.color)) + " highlight, chars " +
           std::to_string(a.anchor.start_char) + "-" + std::to_string(a.anchor.end_char) + ", " +
           html_escape(a.author.empty() ? std::string("anonymous") : a.author) + "</span> " + html_escape(a.comment) +
           "</aside>\n";
  }

  void markdown_cell(std::string& out, const Cell& cell) {
    const auto d = cell.display_number();
    out += "<!-- cell:" + std::to_string(d) + " -->\n**Cell " + std::to_string(d) + "**\n\n";
    if (cell.kind == CellKind::Markdown) {
      out += cell.source;
      if (!cell.source.ends_with('\n')) out += '\n';
      out += '\n';
    } else {
      const auto f = fence(cell.source);
      out += f + (cell.kind == CellKind::Code ? "python" : "") + "\n" + cell.source;
      if (!cell.source.ends_with('\n')) out += '\n';
      out += f + "\n\n";
    }
    for (std::size_t k = 0; k < cell.outputs.size(); ++k) {
      const auto& o = cell.outputs[k];
      if (o.kind == OutputKind::Image) {
        const std::string name =
            "cell-" + std::to_string(d) + "-output-" + std::to_string(k + 1) + "." + image_extension(o.mime_hint);
        out += "![Cell " + std::to_string(d) + " output " + std::to_string(k + 1) + "](" + options.asset_dir + "/" +
               name + ")\n\n";
        result.attachments.push_back(
            ExportAttachment{name, o.mime_hint, is_text_image(o.mime_hint) ? o.data : text::base64_decode(o.data)});
      } else if (!o.text.empty()) {
        const auto f = fence(o.text);
        out += f + "text\n" + o.text;
        if (!o.text.ends_with('\n')) out += '\n';
        out += f + "\n\n";
      }
    }
    for (const auto& a : notes_for(d)) out += callout_md(a);
  }

  void html_cell(std::string& out, const Cell& cell) {
    const auto d = cell.display_number();
    out += "<div class=\"cell " + std::string(to_string(cell.kind)) + "\" data-cell=\"" + std::to_string(d) +
           "\"><div class=\"label\">Cell " + std::to_string(d) + "</div>\n";
    out += "<pre class=\"source\"><code>" + html_escape(cell.source) + "</code></pre>\n";
    for (const auto& o : cell.outputs) {
      if (o.kind == OutputKind::Image) {
        const std::string payload = is_text_image(o.mime_hint) ? text::base64_encode(o.data) : o.data;
        out += "<img class=\"output\" alt=\"output\" src=\"data:" + o.mime_hint + ";base64," + payload + "\">\n";
      } else if (!o.text.empty()) {
        out += "<pre class=\"output\">" + html_escape(o.text) + "</pre>\n";
      }
    }
    for (const auto& a : notes_for(d)) out += callout_html(a);
    out += "</div>\n";
  }

  std::string markdown() {
    std::string out = "# " + overlay.notebook_id + "\n\n";
    for (const auto& ch : overlay.chapters) {
      std::string ranges;
      for (const auto& r : ch.cell_ranges) ranges += (ranges.empty() ? "" : ", ") + range_label(r);
      out += "## " + std::to_string(ch.number) + ". " + ch.title + "\n\n";
      out += "_" + ranges + " (" + std::to_string(ch.cell_count()) + " cells)_\n\n";
      if (!ch.description.empty()) out += ch.description + "\n\n";
      if (ch.header_cell) {
        out += "<!-- cell:" + std::to_string(*ch.header_cell) + " -->\n";
        for (const auto& a : notes_for(*ch.header_cell)) out += callout_md(a);
      }
      for (std::size_t k = 0; k < ch.sections.size(); ++k) {
        const auto& s = ch.sections[k];
        const bool expanded = vs.expanded_sections.contains({ch.number, k + 1});
        out += "### " + std::to_string(ch.number) + "." + std::to_string(k + 1) + " " + s.title + " (" +
               range_label(s.cell_range) + ")" + (expanded ? "" : " [collapsed]") + "\n\n";
        if (!expanded) continue;
        for (std::size_t d = s.cell_range.first; d <= s.cell_range.last; ++d) {
          if (const Cell* c = overlay.cell(d)) markdown_cell(out, *c);
        }
      }
    }
    return out;
  }

  std::string html() {
    std::string out =
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>" +
        html_escape(overlay.notebook_id) +
        "</title>\n<style>\n"
        "body{font-family:Georgia,serif;max-width:60rem;margin:2rem auto;color:#222;line-height:1.5}\n"
        "h2{border-bottom:1px solid #ccc}\n"
        ".range{color:#666;font-style:italic}\n"
        ".section.collapsed h3{color:#888}\n"
        ".cell{margin:1rem 0;padding:.5rem;border-left:3px solid #ddd}\n"
        ".cell .label{font-size:.8rem;color:#888}\n"
        "pre{background:#f7f7f7;padding:.5rem;overflow-x:auto}\n"
        "img.output{max-width:100%}\n"
        ".annotation{margin:.5rem 0;padding:.4rem .6rem;border-left:4px solid}\n"
        ".annotation .meta{font-size:.8rem;color:#555}\n"
        ".annotation.yellow{border-color:#e6c200;background:#fff9d6}\n"
        ".annotation.blue{border-color:#3a7bd5;background:#e6f0ff}\n"
        ".annotation.green{border-color:#2e9e44;background:#e5f7e9}\n"
        ".annotation.pink{border-color:#d63384;background:#fde6f1}\n"
        ".annotation.orange{border-color:#e8590c;background:#fff0e3}\n"
        "</style>\n</head>\n<body>\n<h1>" +
        html_escape(overlay.notebook_id) + "</h1>\n";
    for (const auto& ch : overlay.chapters) {
      std::string ranges;
      for (const auto& r : ch.cell_ranges) ranges += (ranges.empty() ? "" : ", ") + range_label(r);
      out += "<section class=\"chapter\" data-chapter=\"" + std::to_string(ch.number) + "\">\n<h2>" +
             std::to_string(ch.number) + ". " + html_escape(ch.title) + "</h2>\n<p class=\"range\">" + ranges + " (" +
             std::to_string(ch.cell_count()) + " cells)</p>\n";
      if (!ch.description.empty()) out += "<p class=\"description\">" + html_escape(ch.description) + "</p>\n";
      if (ch.header_cell) {
        out += "<div class=\"chapter-header\" data-cell=\"" + std::to_string(*ch.header_cell) + "\">\n";
        for (const auto& a : notes_for(*ch.header_cell)) out += callout_html(a);
        out += "</div>\n";
      }
      for (std::size_t k = 0; k < ch.sections.size(); ++k) {
        const auto& s = ch.sections[k];
        const bool expanded = vs.expanded_sections.contains({ch.number, k + 1});
        const std::string id = std::to_string(ch.number) + "." + std::to_string(k + 1);
        out += "<section class=\"section " + std::string(expanded ? "expanded" : "collapsed") +
               "\" data-section=\"" + id + "\">\n<h3>" + id + " " + html_escape(s.title) + " (" +
               range_label(s.cell_range) + ")</h3>\n";
        if (expanded) {
          for (std::size_t d = s.cell_range.first; d <= s.cell_range.last; ++d) {
            if (const Cell* c = overlay.cell(d)) html_cell(out, *c);
          }
        }
        out += "</section>\n";
      }
      out += "</section>\n";
    }
    out += "</body>\n</html>\n";
    return out;
  }

  std::string snapshot() const {
    using detail::ojson;
    ojson doc;
    doc["generator_version"] = std::string(kGeneratorVersion);
    doc["exported_at"] = text::format_iso8601(options.exported_at);
    ojson view;
    view["expanded_chapters"] = ojson::array();
    for (auto c : vs.expanded_chapters) view["expanded_chapters"].push_back(c);
    view["expanded_sections"] = ojson::array();
    for (const auto& [c, s] : vs.expanded_sections) view["expanded_sections"].push_back(ojson::array({c, s}));
    doc["view_state"] = std::move(view);
    doc["annotations"] = ojson::array();
    for (const auto& a : notes) doc["annotations"].push_back(annotation_json(a));

    ojson subset;
    subset["notebook_id"] = overlay.notebook_id;
    subset["generator_version"] = overlay.generator_version;
    subset["chapters"] = ojson::array();
    for (const auto& ch : overlay.chapters) {
      ojson cj;
      cj["number"] = ch.number;
      cj["title"] = ch.title;
      cj["description"] = ch.description;
      cj["cell_ranges"] = ojson::array();
      for (const auto& r : ch.cell_ranges) cj["cell_ranges"].push_back(range_json(r));
      cj["cell_count"] = ch.cell_count();
      cj["header_cell"] = ch.header_cell ? ojson(*ch.header_cell) : ojson(nullptr);
      cj["flags"] = flags_json(ch.flags);
      cj["sections"] = ojson::array();
      for (std::size_t k = 0; k < ch.sections.size(); ++k) {
        ojson sj = section_json(ch.sections[k], k + 1);
        sj["expanded"] = vs.expanded_sections.contains({ch.number, k + 1});
        cj["sections"].push_back(std::move(sj));
      }
      subset["chapters"].push_back(std::move(cj));
    }
    subset["cells"] = ojson::array();
    for (std::size_t d : included_cells(overlay, vs)) {
      if (const Cell* c = overlay.cell(d)) subset["cells"].push_back(cell_json(*c));
    }
    doc["overlay_subset"] = std::move(subset);
    return doc.dump(2) + "\n";
  }
};

}  // namespace detail

/// Renders exactly the expanded sections (plus chapter titles, descriptions
/// and header cells) with the annotations anchored in the included cells.
inline ExportResult export_document(const OverlayDocument& overlay, const AnnotationStore& store, const ViewState& vs,
                                    ExportFormat format, const ExportOptions& options = {}) {
  validate_view_state(overlay, vs);
  const auto cells = included_cells(overlay, vs);
  std::vector<Annotation> notes;
  for (const auto& a : query(store)) {
    if (std::binary_search(cells.begin(), cells.end(), a.cell_display)) notes.push_back(a);
  }
  detail::Renderer r{overlay, vs, std::move(notes), options, {}};
  switch (format) {
    case ExportFormat::Markdown: r.result.document = r.markdown(); break;
    case ExportFormat::Html: r.result.document = r.html(); break;
    case ExportFormat::SnapshotJson: r.result.document = r.snapshot(); break;
  }
  return std::move(r.result);
}

struct ImportedSnapshot {
  ViewState view_state;
  AnnotationStore annotations;
  std::int64_t exported_at = 0;
  std::string generator_version;
};

namespace detail {

/// Compares dotted numeric versions; missing components count as zero.
inline int compare_versions(std::string_view a, std::string_view b) {
  auto next = [](std::string_view& s) {
    std::size_t v = 0, i = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') v = v * 10 + static_cast<std::size_t>(s[i++] - '0');
    s.remove_prefix(std::min(s.size(), i + 1));
    return v;
  };
  while (!a.empty() || !b.empty()) {
    const auto x = next(a);
    const auto y = next(b);
    if (x != y) return x < y ? -1 : 1;
  }
  return 0;
}

}  // namespace detail

inline ImportedSnapshot import_snapshot(std::string_view bytes, std::string_view reader_version = kGeneratorVersion) {
  const auto doc = nlohmann::json::parse(bytes, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw Error(ErrorKind::MalformedSnapshot, "not a JSON object");
  ImportedSnapshot snap;
  try {
    snap.generator_version = doc.at("generator_version").get<std::string>();
    if (detail::compare_versions(snap.generator_version, reader_version) > 0) {
      throw Error(ErrorKind::VersionMismatch,
                  "snapshot written by " + snap.generator_version + ", reader is " + std::string(reader_version));
    }
    const auto ts = text::parse_iso8601(doc.at("exported_at").get<std::string>());
    if (!ts) throw Error(ErrorKind::MalformedSnapshot, "exported_at is not ISO-8601 UTC");
    snap.exported_at = *ts;
    const auto& view = doc.at("view_state");
    for (const auto& c : view.at("expanded_chapters")) snap.view_state.expanded_chapters.insert(c.get<std::size_t>());
    for (const auto& s : view.at("expanded_sections")) {
      if (!s.is_array() || s.size() != 2) throw Error(ErrorKind::MalformedSnapshot, "section reference is not a pair");
      snap.view_state.expanded_sections.emplace(s[0].get<std::size_t>(), s[1].get<std::size_t>());
    }
    const auto& subset = doc.at("overlay_subset");
    snap.annotations.notebook_id = subset.at("notebook_id").get<std::string>();
    for (const auto& a : doc.at("annotations")) {
      snap.annotations.annotations.push_back(annotation_from_json(a, ErrorKind::MalformedSnapshot));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedSnapshot, e.what());
  }
  return snap;
}

}  // namespace nbbook
