#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "nbbook/category.hpp"
#include "nbbook/error.hpp"

namespace nbbook {

/// Mapping from qualified function names to category codes, plus a fallback
/// table keyed by the trailing method name for receivers of unknown type.
struct Catalog {
  std::map<std::string, CategoryCode, std::less<>> functions;
  std::map<std::string, CategoryCode, std::less<>> fallback_names;
  std::string version;

  std::size_t size() const noexcept { return functions.size() + fallback_names.size(); }
  bool operator==(const Catalog&) const = default;
};

namespace detail {

inline void read_code_table(const nlohmann::json& doc, const char* key,
                            std::map<std::string, CategoryCode, std::less<>>& into) {
  const auto it = doc.find(key);
  if (it == doc.end() || !it->is_object()) {
    throw Error(ErrorKind::MalformedConfig, std::string("catalog key `") + key + "` missing or not an object");
  }
  for (const auto& [name, value] : it->items()) {
    if (!value.is_string()) {
      throw Error(ErrorKind::MalformedConfig, std::string(key) + "." + name + " is not a string");
    }
    const auto code = CategoryCode::parse(value.get_ref<const std::string&>());
    if (!code) {
      throw Error(ErrorKind::InvalidCategoryCode,
                  std::string(key) + "." + name + " = \"" + value.get<std::string>() + "\"");
    }
    into.insert_or_assign(name, *code);
  }
}

}  // namespace detail

inline Catalog load_catalog(std::string_view config) {
  const auto doc = nlohmann::json::parse(config, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw Error(ErrorKind::MalformedConfig, "catalog is not a JSON object");
  const auto version = doc.find("version");
  if (version == doc.end() || !version->is_string()) {
    throw Error(ErrorKind::MalformedConfig, "catalog key `version` missing or not a string");
  }
  Catalog cat;
  cat.version = version->get<std::string>();
  detail::read_code_table(doc, "functions", cat.functions);
  detail::read_code_table(doc, "fallback_names", cat.fallback_names);
  return cat;
}

inline std::string serialize_catalog(const Catalog& cat) {
  nlohmann::ordered_json doc;
  doc["version"] = cat.version;
  doc["functions"] = nlohmann::ordered_json::object();
  for (const auto& [name, code] : cat.functions) doc["functions"][name] = code.str();
  doc["fallback_names"] = nlohmann::ordered_json::object();
  for (const auto& [name, code] : cat.fallback_names) doc["fallback_names"][name] = code.str();
  return doc.dump(2) + "\n";
}

inline std::string_view trailing_segment(std::string_view qualified_name) noexcept {
  const auto dot = qualified_name.rfind('.');
  return dot == std::string_view::npos ? qualified_name : qualified_name.substr(dot + 1);
}

/// Exact qualified name first, then the trailing dotted segment against the
/// fallback table. Case-sensitive.
inline std::optional<CategoryCode> lookup(const Catalog& cat, std::string_view qualified_name) {
  if (auto it = cat.functions.find(qualified_name); it != cat.functions.end()) return it->second;
  if (auto it = cat.fallback_names.find(trailing_segment(qualified_name)); it != cat.fallback_names.end()) {
    return it->second;
  }
  return std::nullopt;
}

/// User entries shadow base entries; the user's version wins when set.
inline Catalog merge_extension(const Catalog& base, const Catalog& user) {
  Catalog merged = base;
  for (const auto& [name, code] : user.functions) merged.functions.insert_or_assign(name, code);
  for (const auto& [name, code] : user.fallback_names) merged.fallback_names.insert_or_assign(name, code);
  if (!user.version.empty()) merged.version = user.version;
  return merged;
}

}  // namespace nbbook
