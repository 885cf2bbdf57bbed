#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "nbbook/error.hpp"
#include "nbbook/notebook.hpp"
#include "nbbook/text.hpp"

namespace nbbook {

enum class HighlightColor { Yellow, Blue, Green, Pink, Orange };

constexpr std::string_view to_string(HighlightColor c) noexcept {
  switch (c) {
    case HighlightColor::Yellow: return "Yellow";
    case HighlightColor::Blue: return "Blue";
    case HighlightColor::Green: return "Green";
    case HighlightColor::Pink: return "Pink";
    case HighlightColor::Orange: return "Orange";
  }
  return "Yellow";
}

inline std::optional<HighlightColor> color_from_string(std::string_view s) noexcept {
  for (auto c : {HighlightColor::Yellow, HighlightColor::Blue, HighlightColor::Green, HighlightColor::Pink,
                 HighlightColor::Orange}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

/// Character (code point) offsets into the cell source, end exclusive.
struct Anchor {
  std::size_t start_char = 0;
  std::size_t end_char = 0;

  bool operator==(const Anchor&) const = default;
};

struct Annotation {
  std::string id;
  std::size_t cell_display = 1;
  Anchor anchor;
  HighlightColor color = HighlightColor::Yellow;
  std::string comment;
  std::string author;
  std::int64_t created_at = 0;  // UTC seconds
  bool orphaned = false;        // set only by unvalidated loads; never persisted

  bool operator==(const Annotation&) const = default;
};

struct AnnotationStore {
  std::string notebook_id;
  std::vector<Annotation> annotations;

  bool operator==(const AnnotationStore&) const = default;
};

/// Throws UnknownCell or AnchorOutOfBounds when `ann` does not fit `cells`.
inline void validate_annotation(const Annotation& ann, std::span<const Cell> cells) {
  if (ann.cell_display < 1 || ann.cell_display > cells.size()) {
    throw Error(ErrorKind::UnknownCell, "cell " + std::to_string(ann.cell_display) + " (notebook has " +
                                            std::to_string(cells.size()) + " cells)");
  }
  const std::size_t length = text::utf8_length(cells[ann.cell_display - 1].source);
  if (ann.anchor.start_char >= ann.anchor.end_char || ann.anchor.end_char > length) {
    throw Error(ErrorKind::AnchorOutOfBounds, "anchor [" + std::to_string(ann.anchor.start_char) + ", " +
                                                  std::to_string(ann.anchor.end_char) + ") on cell " +
                                                  std::to_string(ann.cell_display) + " of length " +
                                                  std::to_string(length));
  }
}

/// Returns the store with `ann` appended. An empty id is replaced by the next
/// free "ann-N". The notebook cells are only read.
inline AnnotationStore add_annotation(AnnotationStore store, Annotation ann, std::span<const Cell> cells) {
  validate_annotation(ann, cells);
  auto taken = [&](const std::string& id) {
    return std::any_of(store.annotations.begin(), store.annotations.end(),
                       [&](const Annotation& a) { return a.id == id; });
  };
  if (ann.id.empty()) {
    std::size_t n = store.annotations.size() + 1;
    while (taken("ann-" + std::to_string(n))) ++n;
    ann.id = "ann-" + std::to_string(n);
  } else if (taken(ann.id)) {
    throw Error(ErrorKind::DuplicateAnnotationId, ann.id);
  }
  ann.orphaned = false;
  store.annotations.push_back(std::move(ann));
  return store;
}

/// Filtered and sorted by (cell, start offset, creation time, id).
inline std::vector<Annotation> query(const AnnotationStore& store, std::optional<std::size_t> cell_display = {},
                                     std::optional<HighlightColor> color = {}) {
  std::vector<Annotation> out;
  for (const auto& a : store.annotations) {
    if (cell_display && a.cell_display != *cell_display) continue;
    if (color && a.color != *color) continue;
    out.push_back(a);
  }
  std::sort(out.begin(), out.end(), [](const Annotation& a, const Annotation& b) {
    return std::tie(a.cell_display, a.anchor.start_char, a.created_at, a.id) <
           std::tie(b.cell_display, b.anchor.start_char, b.created_at, b.id);
  });
  return out;
}

inline nlohmann::ordered_json annotation_json(const Annotation& a) {
  nlohmann::ordered_json j;
  j["id"] = a.id;
  j["cell_display"] = a.cell_display;
  j["anchor"] = {{"start_char", a.anchor.start_char}, {"end_char", a.anchor.end_char}};
  j["color"] = std::string(to_string(a.color));
  j["comment"] = a.comment;
  j["author"] = a.author;
  j["created_at"] = text::format_iso8601(a.created_at);
  return j;
}

/// Parses one annotation object; `kind` is the error raised on bad shape.
inline Annotation annotation_from_json(const nlohmann::json& j, ErrorKind kind = ErrorKind::MalformedStoreFile) {
  auto fail = [&](const std::string& what) { return Error(kind, "annotation: " + what); };
  if (!j.is_object()) throw fail("not an object");
  Annotation a;
  try {
    a.id = j.value("id", "");
    a.cell_display = j.at("cell_display").get<std::size_t>();
    a.anchor.start_char = j.at("anchor").at("start_char").get<std::size_t>();
    a.anchor.end_char = j.at("anchor").at("end_char").get<std::size_t>();
    const auto color = color_from_string(j.at("color").get<std::string>());
    if (!color) throw fail("unknown color " + j.at("color").dump());
    a.color = *color;
    a.comment = j.value("comment", "");
    a.author = j.value("author", "");
    const auto ts = text::parse_iso8601(j.at("created_at").get<std::string>());
    if (!ts) throw fail("created_at is not ISO-8601 UTC");
    a.created_at = *ts;
  } catch (const nlohmann::json::exception& e) {
    throw fail(e.what());
  }
  return a;
}

/// Sidecar format: a JSON array of annotation objects, in store order.
inline std::string save_store(const AnnotationStore& store) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& a : store.annotations) arr.push_back(annotation_json(a));
  return arr.dump(2) + "\n";
}

/// With `cells` and `validate`, a bad anchor or unknown cell is an error; with
/// `cells` and no validation, such annotations load marked orphaned.
inline AnnotationStore load_store(std::string_view bytes, std::string notebook_id = {},
                                  std::optional<std::span<const Cell>> cells = std::nullopt, bool validate = true) {
  const auto doc = nlohmann::json::parse(bytes, nullptr, false);
  if (doc.is_discarded() || !doc.is_array()) throw Error(ErrorKind::MalformedStoreFile, "expected a JSON array");
  AnnotationStore store;
  store.notebook_id = std::move(notebook_id);
  for (const auto& j : doc) {
    Annotation a = annotation_from_json(j);
    if (a.id.empty()) throw Error(ErrorKind::MalformedStoreFile, "annotation without id");
    for (const auto& other : store.annotations) {
      if (other.id == a.id) throw Error(ErrorKind::MalformedStoreFile, "duplicate id " + a.id);
    }
    if (cells) {
      if (validate) {
        validate_annotation(a, *cells);
      } else {
        try {
          validate_annotation(a, *cells);
        } catch (const Error&) {
          a.orphaned = true;
        }
      }
    }
    store.annotations.push_back(std::move(a));
  }
  return store;
}

}  // namespace nbbook
