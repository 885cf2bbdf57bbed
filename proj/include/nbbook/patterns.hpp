#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "nbbook/category.hpp"
#include "nbbook/encoding.hpp"
#include "nbbook/error.hpp"

namespace nbbook {

enum class PurposeIcon { Archive, Building, Database, Eject, Save, Camera, Exchange, Eye, Cogs, Flask, Magic, Puzzle };

constexpr std::string_view to_string(PurposeIcon icon) noexcept {
  switch (icon) {
    case PurposeIcon::Archive: return "Archive";
    case PurposeIcon::Building: return "Building";
    case PurposeIcon::Database: return "Database";
    case PurposeIcon::Eject: return "Eject";
    case PurposeIcon::Save: return "Save";
    case PurposeIcon::Camera: return "Camera";
    case PurposeIcon::Exchange: return "Exchange";
    case PurposeIcon::Eye: return "Eye";
    case PurposeIcon::Cogs: return "Cogs";
    case PurposeIcon::Flask: return "Flask";
    case PurposeIcon::Magic: return "Magic";
    case PurposeIcon::Puzzle: return "Puzzle";
  }
  return "Puzzle";
}

inline std::optional<PurposeIcon> icon_from_string(std::string_view s) noexcept {
  for (int i = 0; i <= static_cast<int>(PurposeIcon::Puzzle); ++i) {
    const auto icon = static_cast<PurposeIcon>(i);
    if (to_string(icon) == s) return icon;
  }
  return std::nullopt;
}

using CodeSequence = std::vector<CategoryCode>;

struct PurposePattern {
  std::string purpose;
  PurposeIcon icon = PurposeIcon::Puzzle;
  std::vector<CodeSequence> sequences;
  int priority = 0;  // lower wins ties between equally long matches
  std::string description;
  std::string origin;  // "published" or "reconstructed"

  bool operator==(const PurposePattern&) const = default;
};

struct PatternMatch {
  std::string purpose;
  std::size_t begin = 0;  // half-open unit range
  std::size_t end = 0;
  std::size_t first_cell = 0;
  std::size_t last_cell = 0;
  CodeSequence matched_sequence;

  bool operator==(const PatternMatch&) const = default;
};

struct FrequencyRow {
  std::string purpose;
  std::size_t total = 0;
  std::vector<std::size_t> per_notebook;

  bool operator==(const FrequencyRow&) const = default;
};

/// Rows follow pattern-catalog order; per-notebook columns follow corpus order.
struct FrequencyTable {
  std::vector<std::string> notebooks;
  std::vector<FrequencyRow> rows;

  const FrequencyRow* find(std::string_view purpose) const {
    for (const auto& r : rows) {
      if (r.purpose == purpose) return &r;
    }
    return nullptr;
  }

  bool operator==(const FrequencyTable&) const = default;
};

inline std::vector<PurposePattern> load_pattern_catalog(std::string_view config) {
  const auto doc = nlohmann::json::parse(config, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw Error(ErrorKind::MalformedConfig, "pattern catalog is not a JSON object");
  const auto list = doc.find("patterns");
  if (list == doc.end() || !list->is_array()) throw Error(ErrorKind::MalformedConfig, "`patterns` missing or not an array");

  std::vector<PurposePattern> patterns;
  std::set<std::string> seen;
  for (const auto& entry : *list) {
    if (!entry.is_object() || !entry.contains("purpose") || !entry["purpose"].is_string()) {
      throw Error(ErrorKind::MalformedConfig, "pattern entry without a string `purpose`");
    }
    PurposePattern p;
    p.purpose = entry["purpose"].get<std::string>();
    const auto icon = icon_from_string(entry.value("icon", ""));
    if (!icon) throw Error(ErrorKind::MalformedConfig, p.purpose + ": unknown icon");
    p.icon = *icon;
    if (auto pr = entry.find("priority"); pr != entry.end()) {
      if (!pr->is_number_integer()) throw Error(ErrorKind::MalformedConfig, p.purpose + ": priority is not an integer");
      p.priority = pr->get<int>();
    }
    p.description = entry.value("description", "");
    p.origin = entry.value("origin", "");
    const auto seqs = entry.find("sequences");
    if (seqs == entry.end() || !seqs->is_array() || seqs->empty()) {
      throw Error(ErrorKind::MalformedConfig, p.purpose + ": `sequences` must be a non-empty array");
    }
    for (const auto& seq : *seqs) {
      if (!seq.is_array() || seq.empty()) throw Error(ErrorKind::MalformedConfig, p.purpose + ": empty sequence");
      CodeSequence codes;
      for (const auto& c : seq) {
        const auto code = c.is_string() ? CategoryCode::parse(c.get_ref<const std::string&>()) : std::nullopt;
        if (!code) throw Error(ErrorKind::InvalidCategoryCode, p.purpose + ": " + c.dump());
        codes.push_back(*code);
      }
      p.sequences.push_back(std::move(codes));
    }
    if (!seen.insert(p.purpose).second) throw Error(ErrorKind::DuplicatePurpose, p.purpose);
    patterns.push_back(std::move(p));
  }
  std::stable_sort(patterns.begin(), patterns.end(),
                   [](const PurposePattern& a, const PurposePattern& b) { return a.priority < b.priority; });
  return patterns;
}

/// Left-to-right, non-overlapping scan over the collapsed code sequence. At
/// each position the longest matching sequence wins; ties go to the lower
/// priority value, then to catalog order. Multiplicity is ignored.
inline std::vector<PatternMatch> match_patterns(const EncodedNotebook& enc, const std::vector<PurposePattern>& patterns) {
  std::vector<PatternMatch> matches;
  const auto& units = enc.units;
  std::size_t i = 0;
  while (i < units.size()) {
    const PurposePattern* best = nullptr;
    const CodeSequence* best_seq = nullptr;
    for (const auto& p : patterns) {
      for (const auto& seq : p.sequences) {
        if (i + seq.size() > units.size()) continue;
        if (best_seq && (seq.size() < best_seq->size() ||
                         (seq.size() == best_seq->size() && p.priority >= best->priority))) {
          continue;
        }
        bool ok = true;
        for (std::size_t k = 0; k < seq.size() && ok; ++k) ok = units[i + k].code == seq[k];
        if (ok) {
          best = &p;
          best_seq = &seq;
        }
      }
    }
    if (!best) {
      ++i;
      continue;
    }
    const std::size_t end = i + best_seq->size();
    matches.push_back(
        PatternMatch{best->purpose, i, end, units[i].span.first_cell, units[end - 1].span.last_cell, *best_seq});
    i = end;
  }
  return matches;
}

/// Frequency table from matches already computed per notebook. The totals
/// are sums, so notebook order never changes them.
inline FrequencyTable tally_matches(const std::vector<std::vector<PatternMatch>>& per_notebook,
                                    const std::vector<PurposePattern>& patterns,
                                    std::vector<std::string> notebook_names = {}) {
  FrequencyTable table;
  if (notebook_names.size() != per_notebook.size()) {
    notebook_names.clear();
    for (std::size_t k = 0; k < per_notebook.size(); ++k) notebook_names.push_back("notebook-" + std::to_string(k + 1));
  }
  table.notebooks = std::move(notebook_names);
  std::map<std::string, std::size_t, std::less<>> row_of;
  for (const auto& p : patterns) {
    row_of.emplace(p.purpose, table.rows.size());
    table.rows.push_back(FrequencyRow{p.purpose, 0, std::vector<std::size_t>(per_notebook.size(), 0)});
  }
  for (std::size_t nb = 0; nb < per_notebook.size(); ++nb) {
    for (const auto& m : per_notebook[nb]) {
      const auto it = row_of.find(m.purpose);
      if (it == row_of.end()) continue;
      auto& row = table.rows[it->second];
      ++row.per_notebook[nb];
      ++row.total;
    }
  }
  return table;
}

inline FrequencyTable count_frequencies(const std::vector<EncodedNotebook>& corpus,
                                        const std::vector<PurposePattern>& patterns,
                                        std::vector<std::string> notebook_names = {}) {
  std::vector<std::vector<PatternMatch>> matches;
  matches.reserve(corpus.size());
  for (const auto& enc : corpus) matches.push_back(match_patterns(enc, patterns));
  return tally_matches(matches, patterns, std::move(notebook_names));
}

namespace detail {

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline std::string frequency_csv(const FrequencyTable& table) {
  std::string out = "purpose,total,notebook,count\n";
  for (const auto& row : table.rows) {
    for (std::size_t nb = 0; nb < table.notebooks.size(); ++nb) {
      out += detail::csv_field(row.purpose) + "," + std::to_string(row.total) + "," +
             detail::csv_field(table.notebooks[nb]) + "," + std::to_string(row.per_notebook[nb]) + "\n";
    }
  }
  return out;
}

inline std::string frequency_json(const FrequencyTable& table) {
  nlohmann::ordered_json doc;
  doc["notebooks"] = table.notebooks;
  doc["purposes"] = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json r;
    r["purpose"] = row.purpose;
    r["total"] = row.total;
    r["per_notebook"] = row.per_notebook;
    doc["purposes"].push_back(std::move(r));
  }
  return doc.dump(2) + "\n";
}

}  // namespace nbbook
