#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "nbbook/catalog.hpp"
#include "nbbook/encoding.hpp"
#include "nbbook/notebook.hpp"
#include "nbbook/overlay.hpp"
#include "nbbook/patterns.hpp"

namespace nbbook {

struct AnalysisOptions {
  std::size_t min_repeat_len = 2;
  std::size_t min_repeat_count = 2;
};

struct Analysis {
  EncodedNotebook raw;        // one unit per call / import, in linear order
  EncodedNotebook collapsed;  // runs merged, never across a chapter boundary
  std::vector<Segment> segments;
  std::vector<RepeatReport> repeats;
  std::vector<PatternMatch> matches;  // unit indices refer to `collapsed`
  OverlayDocument overlay;
};

/// Runs collapse separately inside each chapter so a run of equal codes
/// never straddles a header cell.
inline EncodedNotebook collapse_by_chapter(const EncodedNotebook& raw, const std::vector<Chapter>& chapters) {
  EncodedNotebook out;
  out.unknown_calls = raw.unknown_calls;
  for (const auto& ch : chapters) {
    EncodedNotebook part;
    for (const auto& u : raw.units) {
      if (ch.contains(u.span.first_cell + 1)) part.units.push_back(u);
    }
    const auto merged = collapse_runs(part);
    out.units.insert(out.units.end(), merged.units.begin(), merged.units.end());
  }
  return out;
}

/// Pattern matching restarted at each chapter: header cells stop a match.
inline std::vector<PatternMatch> match_by_chapter(const EncodedNotebook& collapsed, const std::vector<Chapter>& chapters,
                                                  const std::vector<PurposePattern>& patterns) {
  std::vector<PatternMatch> out;
  std::size_t offset = 0;
  for (const auto& ch : chapters) {
    EncodedNotebook part;
    std::size_t k = offset;
    while (k < collapsed.units.size() && ch.contains(collapsed.units[k].span.first_cell + 1)) {
      part.units.push_back(collapsed.units[k]);
      ++k;
    }
    for (auto m : match_patterns(part, patterns)) {
      m.begin += offset;
      m.end += offset;
      out.push_back(std::move(m));
    }
    offset = k;
  }
  return out;
}

inline Analysis analyze(const Notebook& nb, const Catalog& catalog, const std::vector<PurposePattern>& patterns,
                        const AnalysisOptions& options = {}) {
  Analysis a;
  auto chapters = build_chapters(nb);
  a.raw = encode_notebook(nb, catalog);
  a.collapsed = collapse_by_chapter(a.raw, chapters);
  a.segments = segment(a.collapsed);
  a.repeats = flag_repeats(a.collapsed, options.min_repeat_len, options.min_repeat_count);
  a.matches = match_by_chapter(a.collapsed, chapters, patterns);

  for (auto& ch : chapters) {
    ch.description = compose_description(chapter_markdown(nb, ch));
    std::vector<PatternMatch> local;
    for (const auto& m : a.matches) {
      if (ch.contains(m.first_cell + 1)) local.push_back(m);
    }
    ch.sections = build_sections(nb, ch, local, a.collapsed, patterns);
    const auto& r = ch.cell_ranges;
    ch.flags = compute_flags(cells_in_range(nb, CellRange{r.front().first, r.back().last}),
                             units_in_cells(a.collapsed, r.front().first - 1, r.back().last - 1));
  }
  a.overlay = emit_overlay(nb, std::move(chapters), kGeneratorVersion, &a.collapsed);
  return a;
}

}  // namespace nbbook
