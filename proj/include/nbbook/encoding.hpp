#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "nbbook/call_extraction.hpp"
#include "nbbook/catalog.hpp"
#include "nbbook/category.hpp"
#include "nbbook/notebook.hpp"

namespace nbbook {

enum class UnitSource { Call, ImportStatement, SplicedDefinition };

struct SourceSpan {
  std::size_t first_cell = 0;
  std::size_t first_line = 0;
  std::size_t last_cell = 0;
  std::size_t last_line = 0;

  bool operator==(const SourceSpan&) const = default;
};

struct EncodedUnit {
  CategoryCode code;
  SourceSpan span;
  std::size_t multiplicity = 1;
  UnitSource source = UnitSource::Call;

  bool operator==(const EncodedUnit&) const = default;
};

struct UnknownCall {
  std::string qualified_name;
  std::size_t cell_index = 0;

  bool operator==(const UnknownCall&) const = default;
};

struct EncodedNotebook {
  std::vector<EncodedUnit> units;
  std::vector<UnknownCall> unknown_calls;

  std::vector<CategoryCode> codes() const {
    std::vector<CategoryCode> out;
    out.reserve(units.size());
    for (const auto& u : units) out.push_back(u.code);
    return out;
  }

  bool operator==(const EncodedNotebook&) const = default;
};

/// Half-open range of units. `opener` is the L unit that started it (absent
/// for residual segments); `closer` is the V/ML4 unit that ended it.
struct Segment {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::optional<std::size_t> opener;
  std::optional<std::size_t> closer;

  bool operator==(const Segment&) const = default;
};

struct RepeatReport {
  std::vector<CategoryCode> subsequence;
  std::vector<std::pair<std::size_t, std::size_t>> occurrences;  // half-open unit ranges
  std::size_t count = 0;

  bool operator==(const RepeatReport&) const = default;
};

inline const CategoryCode kImportCode = *CategoryCode::make(CategoryGroup::L, 1);

/// Linear-order encoding: import statements become L1 units, catalogued calls
/// become units (innermost-first, user functions spliced at the call site),
/// misses are recorded in `unknown_calls`. Runs are not collapsed here.
inline EncodedNotebook encode_notebook(const Notebook& nb, const Catalog& catalog) {
  const AliasMap aliases = resolve_aliases(nb);
  const DefinitionTable defs = collect_definitions(nb, aliases);
  EncodedNotebook enc;
  for (const auto& cell : nb.cells) {
    if (cell.kind != CellKind::Code) continue;
    for (const auto& item : extract_stream(cell, aliases, defs)) {
      if (item.is_import) {
        const SourceSpan span{cell.index, item.import_line, cell.index, item.import_line};
        enc.units.push_back(EncodedUnit{kImportCode, span, 1, UnitSource::ImportStatement});
        continue;
      }
      const auto& call = item.call;
      if (const auto code = lookup(catalog, call.qualified_name)) {
        const SourceSpan span{call.cell_index, call.line_index, call.cell_index, call.line_index};
        const auto source = call.origin == CallOrigin::Spliced ? UnitSource::SplicedDefinition : UnitSource::Call;
        enc.units.push_back(EncodedUnit{*code, span, 1, source});
      } else {
        enc.unknown_calls.push_back(UnknownCall{call.qualified_name, call.cell_index});
      }
    }
  }
  return enc;
}

/// Merges maximal runs of equal adjacent codes into one unit whose
/// multiplicity is the run's total.
inline EncodedNotebook collapse_runs(const EncodedNotebook& enc) {
  EncodedNotebook out;
  out.unknown_calls = enc.unknown_calls;
  for (const auto& unit : enc.units) {
    if (!out.units.empty() && out.units.back().code == unit.code) {
      auto& last = out.units.back();
      last.multiplicity += unit.multiplicity;
      last.span.last_cell = unit.span.last_cell;
      last.span.last_line = unit.span.last_line;
    } else {
      out.units.push_back(unit);
    }
  }
  return out;
}

inline bool opens_segment(CategoryCode c) noexcept { return c.group() == CategoryGroup::L; }

inline bool closes_segment(CategoryCode c) noexcept {
  return c.group() == CategoryGroup::V || (c.group() == CategoryGroup::ML && c.index() == 4);
}

/// Greedy, non-nested segmentation: an L unit opens a segment when none is
/// open; the first V-group or ML4 unit after it closes it (inclusive).
inline std::vector<Segment> segment(const EncodedNotebook& enc) {
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<Segment> segments;
  const auto& units = enc.units;
  std::size_t open = kNone;
  std::size_t residual = kNone;
  for (std::size_t i = 0; i < units.size(); ++i) {
    if (open == kNone) {
      if (opens_segment(units[i].code)) {
        if (residual != kNone) {
          segments.push_back(Segment{residual, i, std::nullopt, std::nullopt});
          residual = kNone;
        }
        open = i;
      } else if (residual == kNone) {
        residual = i;
      }
      continue;
    }
    if (closes_segment(units[i].code)) {
      segments.push_back(Segment{open, i + 1, open, i});
      open = kNone;
    }
  }
  if (open != kNone) segments.push_back(Segment{open, units.size(), open, std::nullopt});
  if (residual != kNone) segments.push_back(Segment{residual, units.size(), std::nullopt, std::nullopt});
  return segments;
}

namespace detail {

inline char code_key(CategoryCode c) noexcept {
  return static_cast<char>(static_cast<int>(c.group()) * 10 + c.index() + 1);
}

}  // namespace detail

/// Repeated contiguous code subsequences for human review. Occurrences are
/// counted non-overlapping, leftmost first. A candidate is dropped when every
/// one of its occurrences lies inside ground already covered by a stronger
/// report (more covered units, then longer, then earlier).
inline std::vector<RepeatReport> flag_repeats(const EncodedNotebook& enc, std::size_t min_len = 2,
                                              std::size_t min_count = 2) {
  const std::size_t n = enc.units.size();
  min_len = std::max<std::size_t>(min_len, 1);
  min_count = std::max<std::size_t>(min_count, 2);
  std::string keys;
  keys.reserve(n);
  for (const auto& u : enc.units) keys.push_back(detail::code_key(u.code));

  std::vector<RepeatReport> candidates;
  for (std::size_t len = min_len; len * min_count <= n; ++len) {
    std::map<std::string, std::vector<std::size_t>> starts;
    for (std::size_t s = 0; s + len <= n; ++s) starts[keys.substr(s, len)].push_back(s);
    bool any = false;
    for (const auto& [key, positions] : starts) {
      if (positions.size() < min_count) continue;
      RepeatReport rep;
      std::size_t next_free = 0;
      for (std::size_t p : positions) {
        if (p < next_free) continue;
        rep.occurrences.emplace_back(p, p + len);
        next_free = p + len;
      }
      rep.count = rep.occurrences.size();
      if (rep.count < min_count) continue;
      any = true;
      for (std::size_t k = 0; k < len; ++k) rep.subsequence.push_back(enc.units[positions.front() + k].code);
      candidates.push_back(std::move(rep));
    }
    // A longer subsequence never repeats more often than its prefix.
    if (!any) break;
  }

  std::stable_sort(candidates.begin(), candidates.end(), [](const RepeatReport& a, const RepeatReport& b) {
    const auto cov_a = a.count * a.subsequence.size();
    const auto cov_b = b.count * b.subsequence.size();
    if (cov_a != cov_b) return cov_a > cov_b;
    if (a.subsequence.size() != b.subsequence.size()) return a.subsequence.size() > b.subsequence.size();
    return a.occurrences.front().first < b.occurrences.front().first;
  });
  std::vector<bool> covered(n, false);
  std::vector<RepeatReport> reports;
  for (auto& rep : candidates) {
    const bool fresh = std::any_of(rep.occurrences.begin(), rep.occurrences.end(), [&](const auto& occ) {
      for (std::size_t k = occ.first; k < occ.second; ++k) {
        if (!covered[k]) return true;
      }
      return false;
    });
    if (!fresh) continue;
    for (const auto& occ : rep.occurrences) {
      for (std::size_t k = occ.first; k < occ.second; ++k) covered[k] = true;
    }
    reports.push_back(std::move(rep));
  }
  std::sort(reports.begin(), reports.end(), [](const RepeatReport& a, const RepeatReport& b) {
    return std::make_tuple(a.occurrences.front().first, b.subsequence.size()) <
           std::make_tuple(b.occurrences.front().first, a.subsequence.size());
  });
  return reports;
}

/// One JSON object per unit: {"code":"PP3","mult":6,"cells":[4,9]}, where
/// cells are the 1-based display numbers of the span's first and last cell.
inline std::string dump_encoding_jsonl(const EncodedNotebook& enc) {
  std::string out;
  for (const auto& u : enc.units) {
    nlohmann::ordered_json line;
    line["code"] = u.code.str();
    line["mult"] = u.multiplicity;
    line["cells"] = {u.span.first_cell + 1, u.span.last_cell + 1};
    out += line.dump();
    out += '\n';
  }
  return out;
}

}  // namespace nbbook
