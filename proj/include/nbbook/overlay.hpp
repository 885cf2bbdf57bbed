#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "nbbook/category.hpp"
#include "nbbook/encoding.hpp"
#include "nbbook/error.hpp"
#include "nbbook/notebook.hpp"
#include "nbbook/patterns.hpp"
#include "nbbook/text.hpp"

namespace nbbook {

inline constexpr std::string_view kGeneratorVersion = "1.0.0";
inline constexpr std::string_view kDescriptionLeadIn = "In this chapter, the data scientist";
inline constexpr std::size_t kDescriptionMaxSentences = 5;

struct FlagSet {
  bool data = false;
  bool library = false;
  bool graph = false;
  bool table = false;
  bool model = false;
  bool notes = false;

  bool any() const noexcept { return data || library || graph || table || model || notes; }
  bool operator==(const FlagSet&) const = default;
};

/// 1-based inclusive range of display numbers.
struct CellRange {
  std::size_t first = 1;
  std::size_t last = 1;

  std::size_t size() const noexcept { return last >= first ? last - first + 1 : 0; }
  bool contains(std::size_t display) const noexcept { return display >= first && display <= last; }
  bool operator==(const CellRange&) const = default;
};

enum class SectionKind { Purpose, Fallback };

struct Section {
  std::string title;
  CellRange cell_range;
  FlagSet flags;
  PurposeIcon icon = PurposeIcon::Puzzle;
  bool collapsed_default = true;
  SectionKind kind = SectionKind::Fallback;
  CodeSequence matched_sequence;

  bool operator==(const Section&) const = default;
};

struct Chapter {
  std::size_t number = 1;
  std::string title;
  std::string description;
  std::vector<CellRange> cell_ranges;
  std::optional<std::size_t> header_cell;  // display number of the header markdown cell
  FlagSet flags;
  std::vector<Section> sections;

  std::size_t cell_count() const noexcept {
    std::size_t n = 0;
    for (const auto& r : cell_ranges) n += r.size();
    return n;
  }
  bool contains(std::size_t display) const noexcept {
    return std::any_of(cell_ranges.begin(), cell_ranges.end(), [&](const CellRange& r) { return r.contains(display); });
  }
  bool operator==(const Chapter&) const = default;
};

struct ChapterEncodingSummary {
  std::size_t chapter = 1;
  std::size_t units = 0;
  std::size_t segments = 0;

  bool operator==(const ChapterEncodingSummary&) const = default;
};

/// The renderable book. It embeds the cells so the viewer and the exporter
/// need nothing but this document.
struct OverlayDocument {
  std::string notebook_id;
  std::string generator_version;
  std::vector<Chapter> chapters;
  std::vector<ChapterEncodingSummary> encoding_summary;
  std::vector<Cell> cells;

  const Cell* cell(std::size_t display) const noexcept {
    return display >= 1 && display <= cells.size() ? &cells[display - 1] : nullptr;
  }
  bool operator==(const OverlayDocument&) const = default;
};

// ---------------------------------------------------------------- chapters

/// Title of a markdown header cell: the first non-blank line starting with
/// 1-6 '#' characters, markers stripped.
inline std::optional<std::string> header_title(const Cell& cell) {
  if (cell.kind != CellKind::Markdown) return std::nullopt;
  for (auto line : text::split_lines(cell.source)) {
    line = text::trim(line);
    if (line.empty()) continue;
    std::size_t hashes = 0;
    while (hashes < line.size() && line[hashes] == '#') ++hashes;
    if (hashes < 1 || hashes > 6) return std::nullopt;
    std::string_view title = text::trim(line.substr(hashes));
    while (!title.empty() && title.back() == '#') title.remove_suffix(1);
    return std::string(text::trim(title));
  }
  return std::nullopt;
}

/// Header cells open chapters; anything before the first header becomes an
/// implicit "Introduction" chapter.
inline std::vector<Chapter> build_chapters(const Notebook& nb) {
  std::vector<Chapter> chapters;
  for (const auto& cell : nb.cells) {
    const std::size_t display = cell.display_number();
    if (auto title = header_title(cell)) {
      Chapter ch;
      ch.number = chapters.size() + 1;
      ch.title = std::move(*title);
      ch.header_cell = display;
      ch.cell_ranges.push_back(CellRange{display, display});
      chapters.push_back(std::move(ch));
      continue;
    }
    if (chapters.empty()) {
      Chapter intro;
      intro.number = 1;
      intro.title = "Introduction";
      intro.cell_ranges.push_back(CellRange{display, display});
      chapters.push_back(std::move(intro));
      continue;
    }
    chapters.back().cell_ranges.back().last = display;
  }
  return chapters;
}

/// Markdown prose of a chapter with header lines removed, one entry per cell.
inline std::vector<std::string> chapter_markdown(const Notebook& nb, const Chapter& ch) {
  std::vector<std::string> prose;
  for (const auto& cell : nb.cells) {
    if (cell.kind != CellKind::Markdown || !ch.contains(cell.display_number())) continue;
    std::string body;
    for (auto line : text::split_lines(cell.source)) {
      if (text::trim(line).starts_with('#')) continue;
      body.append(line);
      body.push_back('\n');
    }
    if (!text::trim(body).empty()) prose.push_back(std::move(body));
  }
  return prose;
}

namespace detail {

/// Flattens light markdown to plain text: links keep their label, images,
/// HTML tags, emphasis markers, code ticks and list bullets are dropped.
inline std::string strip_markdown(std::string_view md) {
  std::string out;
  for (auto line : text::split_lines(md)) {
    line = text::trim(line);
    if (line.starts_with("- ") || line.starts_with("* ") || line.starts_with("+ ")) line.remove_prefix(2);
    else if (line.starts_with(">")) line.remove_prefix(1);
    else {
      std::size_t d = 0;
      while (d < line.size() && line[d] >= '0' && line[d] <= '9') ++d;
      if (d > 0 && d + 1 < line.size() && line[d] == '.' && line[d + 1] == ' ') line.remove_prefix(d + 2);
    }
    std::size_t i = 0;
    while (i < line.size()) {
      const char c = line[i];
      if (c == '!' && i + 1 < line.size() && line[i + 1] == '[') {
        const auto close = line.find("](", i);
        const auto end = close == std::string_view::npos ? close : line.find(')', close);
        if (end != std::string_view::npos) {
          i = end + 1;
          continue;
        }
      }
      if (c == '[') {
        const auto close = line.find("](", i);
        const auto end = close == std::string_view::npos ? close : line.find(')', close);
        if (end != std::string_view::npos) {
          out.append(line.substr(i + 1, close - i - 1));
          i = end + 1;
          continue;
        }
      }
      if (c == '<') {
        const auto end = line.find('>', i);
        if (end != std::string_view::npos) {
          i = end + 1;
          continue;
        }
      }
      if (c == '*' || c == '`') {
        ++i;
        continue;
      }
      if (c == '_' && i + 1 < line.size() && line[i + 1] == '_') {
        i += 2;
        continue;
      }
      out.push_back(c);
      ++i;
    }
    out.push_back(' ');
  }
  return out;
}

inline std::vector<std::string> split_sentences(std::string_view paragraph) {
  std::vector<std::string> sentences;
  std::string current;
  auto flush = [&] {
    auto t = text::trim(current);
    if (!t.empty()) sentences.emplace_back(t);
    current.clear();
  };
  for (std::size_t i = 0; i < paragraph.size(); ++i) {
    const char c = paragraph[i];
    if (text::is_space(c)) {
      if (!current.empty() && current.back() != ' ') current.push_back(' ');
      continue;
    }
    current.push_back(c);
    if ((c == '.' || c == '!' || c == '?') && (i + 1 == paragraph.size() || text::is_space(paragraph[i + 1]))) flush();
  }
  flush();
  return sentences;
}

inline std::string third_person(std::string_view verb) {
  const std::string v = text::lowercase(verb);
  static const std::map<std::string, std::string, std::less<>> kIrregular = {
      {"are", "is"}, {"have", "has"}, {"do", "does"}, {"go", "goes"}, {"were", "was"}, {"'re", "is"}};
  if (auto it = kIrregular.find(v); it != kIrregular.end()) return it->second;
  static constexpr std::string_view kUnchanged[] = {"will", "can", "could", "should", "would",
                                                    "may",  "might", "must", "shall", "did", "had"};
  for (auto u : kUnchanged) {
    if (v == u) return v;
  }
  if (v.ends_with("ed")) return v;
  auto ends = [&](std::string_view s) { return v.size() >= s.size() && v.ends_with(s); };
  if (ends("s") || ends("x") || ends("z") || ends("ch") || ends("sh") || ends("o")) return v + "es";
  if (v.size() >= 2 && v.back() == 'y' && std::string_view("aeiou").find(v[v.size() - 2]) == std::string_view::npos) {
    return v.substr(0, v.size() - 1) + "ies";
  }
  return v + "s";
}

/// Rewrites a first-person opening ("We define ...", "Here we plot ...",
/// "Let's look ...") as a continuation of the lead-in. Returns nullopt when the
/// sentence does not open that way.
inline std::optional<std::string> continue_lead_in(std::string_view sentence) {
  auto words = text::split_ws(sentence);
  std::size_t i = 0;
  static constexpr std::string_view kAdverbs[] = {"here", "now", "first", "firstly", "next", "then", "finally", "below"};
  if (i < words.size()) {
    std::string w = text::lowercase(words[i]);
    if (!w.empty() && w.back() == ',') w.pop_back();
    for (auto a : kAdverbs) {
      if (w == a) {
        ++i;
        break;
      }
    }
  }
  if (i >= words.size()) return std::nullopt;
  const std::string subject = text::lowercase(words[i]);
  std::string verb;
  if (subject == "we" || subject == "i") {
    if (i + 1 >= words.size()) return std::nullopt;
    verb = third_person(words[i + 1]);
    i += 2;
  } else if (subject == "we'll" || subject == "i'll") {
    verb = "will";
    i += 1;
  } else if (subject == "let's" && i + 1 < words.size()) {
    verb = third_person(words[i + 1]);
    i += 2;
  } else if (subject == "let" && i + 2 < words.size() && text::lowercase(words[i + 1]) == "us") {
    verb = third_person(words[i + 2]);
    i += 3;
  } else {
    return std::nullopt;
  }
  std::string out = verb;
  for (; i < words.size(); ++i) out += " " + words[i];
  return out;
}

}  // namespace detail

/// Chapter introduction: the fixed lead-in followed by the chapter's markdown
/// prose, truncated to five sentences with a trailing ellipsis.
inline std::string compose_description(const std::vector<std::string>& chapter_markdown_texts) {
  std::string paragraph;
  for (const auto& md : chapter_markdown_texts) paragraph += detail::strip_markdown(md) + " ";
  auto sentences = detail::split_sentences(paragraph);
  if (sentences.empty()) return {};
  const bool truncated = sentences.size() > kDescriptionMaxSentences;
  if (truncated) sentences.resize(kDescriptionMaxSentences);

  std::string out(kDescriptionLeadIn);
  if (auto cont = detail::continue_lead_in(sentences.front())) {
    out += " " + *cont;
  } else {
    out += " writes: " + sentences.front();
  }
  for (std::size_t k = 1; k < sentences.size(); ++k) out += " " + sentences[k];
  if (truncated) out += " …";
  return out;
}

// ------------------------------------------------------------------- flags

inline FlagSet compute_flags(std::span<const Cell> cells, std::span<const EncodedUnit> units) {
  FlagSet f;
  for (const auto& u : units) {
    const auto g = u.code.group();
    const int i = u.code.index();
    if (g == CategoryGroup::L && (i == 2 || i == 3)) f.data = true;
    if (g == CategoryGroup::L && i == 1) f.library = true;
    if (g == CategoryGroup::V || (g == CategoryGroup::ST && i == 3)) f.graph = true;
    if (g == CategoryGroup::PP && i == 4) f.table = true;
    if ((g == CategoryGroup::ML && (i == 2 || i == 4 || i == 8)) || (g == CategoryGroup::ST && i == 5)) f.model = true;
  }
  for (const auto& c : cells) {
    if (c.kind == CellKind::Markdown) f.notes = true;
    if (c.kind != CellKind::Code) continue;
    for (const auto& o : c.outputs) {
      if (o.kind == OutputKind::Image) f.graph = true;
      if (o.kind == OutputKind::Table) f.table = true;
    }
  }
  return f;
}

/// Contiguous slice of units whose span starts in [first_index, last_index].
inline std::span<const EncodedUnit> units_in_cells(const EncodedNotebook& enc, std::size_t first_index,
                                                   std::size_t last_index) {
  const auto& u = enc.units;
  auto lo = std::find_if(u.begin(), u.end(), [&](const EncodedUnit& x) { return x.span.first_cell >= first_index; });
  auto hi = std::find_if(lo, u.end(), [&](const EncodedUnit& x) { return x.span.first_cell > last_index; });
  return {lo, hi};
}

inline std::span<const Cell> cells_in_range(const Notebook& nb, CellRange r) {
  if (r.size() == 0 || r.last > nb.cells.size()) return {};
  return std::span<const Cell>(nb.cells).subspan(r.first - 1, r.size());
}

// ---------------------------------------------------------------- sections

namespace detail {

inline PurposeIcon fallback_icon(std::optional<CategoryGroup> g) noexcept {
  if (!g) return PurposeIcon::Archive;
  switch (*g) {
    case CategoryGroup::L: return PurposeIcon::Database;
    case CategoryGroup::PP: return PurposeIcon::Exchange;
    case CategoryGroup::ST: return PurposeIcon::Puzzle;
    case CategoryGroup::V: return PurposeIcon::Camera;
    case CategoryGroup::S: return PurposeIcon::Building;
    case CategoryGroup::ML: return PurposeIcon::Cogs;
  }
  return PurposeIcon::Archive;
}

}  // namespace detail

/// Dominant group (multiplicity-weighted) among units; ties go to the group
/// listed first in the taxonomy.
inline std::optional<CategoryGroup> dominant_group(std::span<const EncodedUnit> units) {
  std::array<std::size_t, kAllGroups.size()> counts{};
  for (const auto& u : units) counts[static_cast<std::size_t>(u.code.group())] += u.multiplicity;
  std::optional<CategoryGroup> best;
  std::size_t best_count = 0;
  for (std::size_t g = 0; g < counts.size(); ++g) {
    if (counts[g] > best_count) {
      best = kAllGroups[g];
      best_count = counts[g];
    }
  }
  return best;
}

/// Purpose sections from matches (expanded to whole cells, earlier match keeps
/// contested cells), then fallback sections over uncovered runs of code cells.
inline std::vector<Section> build_sections(const Notebook& nb, const Chapter& chapter,
                                           const std::vector<PatternMatch>& matches, const EncodedNotebook& enc,
                                           const std::vector<PurposePattern>& patterns = {}) {
  std::vector<std::size_t> code_cells;
  for (const auto& cell : nb.cells) {
    if (cell.kind == CellKind::Code && chapter.contains(cell.display_number())) code_cells.push_back(cell.display_number());
  }
  std::vector<Section> sections;
  if (code_cells.empty()) return sections;

  auto icon_for = [&](const std::string& purpose) {
    for (const auto& p : patterns) {
      if (p.purpose == purpose) return p.icon;
    }
    return PurposeIcon::Puzzle;
  };
  auto section_flags = [&](CellRange r) {
    return compute_flags(cells_in_range(nb, r), units_in_cells(enc, r.first - 1, r.last - 1));
  };

  std::vector<bool> covered(code_cells.size(), false);
  std::size_t claimed_up_to = 0;  // last display number owned by an earlier match
  for (const auto& m : matches) {
    const std::size_t lo = std::max(m.first_cell + 1, claimed_up_to + 1);
    const std::size_t hi = m.last_cell + 1;
    auto first_it = std::lower_bound(code_cells.begin(), code_cells.end(), lo);
    auto last_it = std::upper_bound(code_cells.begin(), code_cells.end(), hi);
    if (first_it == code_cells.end() || first_it >= last_it) continue;
    const CellRange r{*first_it, *(last_it - 1)};
    for (auto it = first_it; it != last_it; ++it) covered[static_cast<std::size_t>(it - code_cells.begin())] = true;
    claimed_up_to = r.last;
    Section s;
    s.title = m.purpose;
    s.cell_range = r;
    s.kind = SectionKind::Purpose;
    s.icon = icon_for(m.purpose);
    s.matched_sequence = m.matched_sequence;
    s.flags = section_flags(r);
    sections.push_back(std::move(s));
  }

  for (std::size_t k = 0; k < code_cells.size();) {
    if (covered[k]) {
      ++k;
      continue;
    }
    std::size_t j = k;
    while (j + 1 < code_cells.size() && !covered[j + 1]) ++j;
    const CellRange r{code_cells[k], code_cells[j]};
    std::vector<EncodedUnit> run_units;
    for (std::size_t q = k; q <= j; ++q) {
      const auto slice = units_in_cells(enc, code_cells[q] - 1, code_cells[q] - 1);
      run_units.insert(run_units.end(), slice.begin(), slice.end());
    }
    const auto group = dominant_group(run_units);
    Section s;
    s.title = group ? std::string(group_name(*group)) : "Code";
    s.cell_range = r;
    s.kind = SectionKind::Fallback;
    s.icon = detail::fallback_icon(group);
    s.flags = section_flags(r);
    sections.push_back(std::move(s));
    k = j + 1;
  }
  std::sort(sections.begin(), sections.end(),
            [](const Section& a, const Section& b) { return a.cell_range.first < b.cell_range.first; });
  return sections;
}

// ----------------------------------------------------------------- overlay

inline void check_tiling(const std::vector<Chapter>& chapters, std::size_t cell_count) {
  std::size_t next = 1;
  for (const auto& ch : chapters) {
    for (const auto& r : ch.cell_ranges) {
      if (r.first != next || r.last < r.first) {
        throw Error(ErrorKind::InvalidTiling, "chapter " + std::to_string(ch.number) + " range starts at " +
                                                  std::to_string(r.first) + ", expected " + std::to_string(next));
      }
      next = r.last + 1;
    }
  }
  if (next != cell_count + 1) {
    throw Error(ErrorKind::InvalidTiling, "chapters cover cells 1.." + std::to_string(next - 1) + " of " +
                                              std::to_string(cell_count));
  }
}

inline OverlayDocument emit_overlay(const Notebook& nb, std::vector<Chapter> chapters,
                                    std::string_view version = kGeneratorVersion,
                                    const EncodedNotebook* collapsed = nullptr) {
  check_tiling(chapters, nb.cells.size());
  OverlayDocument doc;
  doc.notebook_id = nb.id;
  doc.generator_version = std::string(version);
  doc.cells = nb.cells;
  if (collapsed) {
    const auto segs = segment(*collapsed);
    for (const auto& ch : chapters) {
      ChapterEncodingSummary s;
      s.chapter = ch.number;
      for (const auto& u : collapsed->units) {
        if (ch.contains(u.span.first_cell + 1)) ++s.units;
      }
      for (const auto& sg : segs) {
        if (sg.begin < collapsed->units.size() && ch.contains(collapsed->units[sg.begin].span.first_cell + 1)) ++s.segments;
      }
      doc.encoding_summary.push_back(s);
    }
  }
  doc.chapters = std::move(chapters);
  return doc;
}

// ----------------------------------------------------------- serialization

namespace detail {

using ojson = nlohmann::ordered_json;

inline ojson flags_json(const FlagSet& f) {
  ojson j;
  j["data"] = f.data;
  j["library"] = f.library;
  j["graph"] = f.graph;
  j["table"] = f.table;
  j["model"] = f.model;
  j["notes"] = f.notes;
  return j;
}

inline FlagSet flags_from_json(const nlohmann::json& j) {
  FlagSet f;
  f.data = j.at("data").get<bool>();
  f.library = j.at("library").get<bool>();
  f.graph = j.at("graph").get<bool>();
  f.table = j.at("table").get<bool>();
  f.model = j.at("model").get<bool>();
  f.notes = j.at("notes").get<bool>();
  return f;
}

inline ojson range_json(CellRange r) { return ojson::array({r.first, r.last}); }

inline CellRange range_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("cell range must be [first, last]");
  return CellRange{j[0].get<std::size_t>(), j[1].get<std::size_t>()};
}

inline ojson cell_json(const Cell& c) {
  ojson j;
  j["display"] = c.display_number();
  j["kind"] = std::string(to_string(c.kind));
  j["source"] = c.source;
  j["outputs"] = ojson::array();
  for (const auto& o : c.outputs) {
    ojson oj;
    oj["kind"] = std::string(to_string(o.kind));
    oj["mime"] = o.mime_hint;
    if (!o.text.empty()) oj["text"] = o.text;
    if (!o.data.empty()) oj["data"] = o.data;
    j["outputs"].push_back(std::move(oj));
  }
  return j;
}

inline Cell cell_from_json(const nlohmann::json& j) {
  Cell c;
  c.index = j.at("display").get<std::size_t>() - 1;
  c.kind = cell_kind_from_string(j.at("kind").get<std::string>());
  c.source = j.at("source").get<std::string>();
  for (const auto& oj : j.at("outputs")) {
    OutputRecord o;
    o.kind = output_kind_from_string(oj.at("kind").get<std::string>());
    o.mime_hint = oj.value("mime", "");
    o.text = oj.value("text", "");
    o.data = oj.value("data", "");
    c.outputs.push_back(std::move(o));
  }
  return c;
}

inline ojson section_json(const Section& s, std::size_t index) {
  ojson j;
  j["index"] = index;
  j["title"] = s.title;
  j["kind"] = s.kind == SectionKind::Purpose ? "purpose" : "fallback";
  j["cell_range"] = range_json(s.cell_range);
  j["icon"] = std::string(to_string(s.icon));
  j["collapsed_default"] = s.collapsed_default;
  j["flags"] = flags_json(s.flags);
  j["matched_sequence"] = ojson::array();
  for (const auto& c : s.matched_sequence) j["matched_sequence"].push_back(c.str());
  return j;
}

inline Section section_from_json(const nlohmann::json& j) {
  Section s;
  s.title = j.at("title").get<std::string>();
  s.kind = j.at("kind").get<std::string>() == "purpose" ? SectionKind::Purpose : SectionKind::Fallback;
  s.cell_range = range_from_json(j.at("cell_range"));
  const auto icon = icon_from_string(j.at("icon").get<std::string>());
  if (!icon) throw std::invalid_argument("unknown icon");
  s.icon = *icon;
  s.collapsed_default = j.at("collapsed_default").get<bool>();
  s.flags = flags_from_json(j.at("flags"));
  for (const auto& c : j.at("matched_sequence")) {
    const auto code = CategoryCode::parse(c.get<std::string>());
    if (!code) throw std::invalid_argument("invalid category code");
    s.matched_sequence.push_back(*code);
  }
  return s;
}

inline ojson chapter_json(const Chapter& ch) {
  ojson j;
  j["number"] = ch.number;
  j["title"] = ch.title;
  j["description"] = ch.description;
  j["cell_ranges"] = ojson::array();
  for (const auto& r : ch.cell_ranges) j["cell_ranges"].push_back(range_json(r));
  j["cell_count"] = ch.cell_count();
  j["header_cell"] = ch.header_cell ? ojson(*ch.header_cell) : ojson(nullptr);
  j["flags"] = flags_json(ch.flags);
  j["sections"] = ojson::array();
  for (std::size_t k = 0; k < ch.sections.size(); ++k) j["sections"].push_back(section_json(ch.sections[k], k + 1));
  return j;
}

inline Chapter chapter_from_json(const nlohmann::json& j) {
  Chapter ch;
  ch.number = j.at("number").get<std::size_t>();
  ch.title = j.at("title").get<std::string>();
  ch.description = j.at("description").get<std::string>();
  for (const auto& r : j.at("cell_ranges")) ch.cell_ranges.push_back(range_from_json(r));
  if (const auto& h = j.at("header_cell"); !h.is_null()) ch.header_cell = h.get<std::size_t>();
  ch.flags = flags_from_json(j.at("flags"));
  for (const auto& s : j.at("sections")) ch.sections.push_back(section_from_json(s));
  return ch;
}

}  // namespace detail

inline nlohmann::ordered_json overlay_json(const OverlayDocument& doc) {
  detail::ojson j;
  j["notebook_id"] = doc.notebook_id;
  j["generator_version"] = doc.generator_version;
  j["cell_count"] = doc.cells.size();
  j["chapters"] = detail::ojson::array();
  for (const auto& ch : doc.chapters) j["chapters"].push_back(detail::chapter_json(ch));
  j["encoding_summary"] = detail::ojson::array();
  for (const auto& s : doc.encoding_summary) {
    detail::ojson e;
    e["chapter"] = s.chapter;
    e["units"] = s.units;
    e["segments"] = s.segments;
    j["encoding_summary"].push_back(std::move(e));
  }
  j["cells"] = detail::ojson::array();
  for (const auto& c : doc.cells) j["cells"].push_back(detail::cell_json(c));
  return j;
}

/// Deterministic UTF-8 JSON: fixed key order, two-space indent, trailing newline.
inline std::string serialize_overlay(const OverlayDocument& doc) { return overlay_json(doc).dump(2) + "\n"; }

inline OverlayDocument parse_overlay(std::string_view bytes) {
  const auto j = nlohmann::json::parse(bytes, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorKind::MalformedJson, "overlay is not a JSON object");
  try {
    OverlayDocument doc;
    doc.notebook_id = j.at("notebook_id").get<std::string>();
    doc.generator_version = j.at("generator_version").get<std::string>();
    for (const auto& ch : j.at("chapters")) doc.chapters.push_back(detail::chapter_from_json(ch));
    for (const auto& e : j.at("encoding_summary")) {
      doc.encoding_summary.push_back(ChapterEncodingSummary{e.at("chapter").get<std::size_t>(),
                                                            e.at("units").get<std::size_t>(),
                                                            e.at("segments").get<std::size_t>()});
    }
    for (const auto& c : j.at("cells")) doc.cells.push_back(detail::cell_from_json(c));
    return doc;
  } catch (const std::exception& e) {
    throw Error(ErrorKind::MalformedJson, std::string("overlay: ") + e.what());
  }
}

}  // namespace nbbook
