#pragma once

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nbbook {

enum class CategoryGroup { L, PP, ST, V, S, ML };

inline constexpr std::array<CategoryGroup, 6> kAllGroups = {CategoryGroup::L,  CategoryGroup::PP,
                                                           CategoryGroup::ST, CategoryGroup::V,
                                                           CategoryGroup::S,  CategoryGroup::ML};

constexpr std::string_view group_prefix(CategoryGroup g) noexcept {
  switch (g) {
    case CategoryGroup::L: return "L";
    case CategoryGroup::PP: return "PP";
    case CategoryGroup::ST: return "ST";
    case CategoryGroup::V: return "V";
    case CategoryGroup::S: return "S";
    case CategoryGroup::ML: return "ML";
  }
  return "";
}

/// Display name of a group, used as the title of fallback sections.
constexpr std::string_view group_name(CategoryGroup g) noexcept {
  switch (g) {
    case CategoryGroup::L: return "Load";
    case CategoryGroup::PP: return "Pre-Processing";
    case CategoryGroup::ST: return "Statistics";
    case CategoryGroup::V: return "Visualization";
    case CategoryGroup::S: return "Domain Specific";
    case CategoryGroup::ML: return "Machine Learning";
  }
  return "";
}

/// Inclusive index range of valid codes per group. There is no "Other" group.
constexpr std::pair<int, int> group_index_range(CategoryGroup g) noexcept {
  switch (g) {
    case CategoryGroup::L: return {1, 4};
    case CategoryGroup::PP: return {0, 5};
    case CategoryGroup::ST: return {1, 5};
    case CategoryGroup::V: return {1, 5};
    case CategoryGroup::S: return {1, 5};
    case CategoryGroup::ML: return {1, 8};
  }
  return {1, 0};
}

/// A functional category such as L2 (Fetch/Load) or ML4 (Verify). Only the
/// 33 valid codes can be constructed through `parse`/`make`.
class CategoryCode {
 public:
  static std::optional<CategoryCode> make(CategoryGroup group, int index) noexcept {
    const auto [lo, hi] = group_index_range(group);
    if (index < lo || index > hi) return std::nullopt;
    return CategoryCode(group, index);
  }

  static std::optional<CategoryCode> parse(std::string_view s) noexcept {
    for (CategoryGroup g : kAllGroups) {
      const auto prefix = group_prefix(g);
      if (s.size() != prefix.size() + 1 || !s.starts_with(prefix)) continue;
      const char digit = s.back();
      if (digit < '0' || digit > '9') return std::nullopt;
      return make(g, digit - '0');
    }
    return std::nullopt;
  }

  CategoryGroup group() const noexcept { return group_; }
  int index() const noexcept { return index_; }

  std::string str() const { return std::string(group_prefix(group_)) + static_cast<char>('0' + index_); }

  bool operator==(const CategoryCode&) const = default;
  auto operator<=>(const CategoryCode&) const = default;

 private:
  CategoryCode(CategoryGroup g, int i) noexcept : group_(g), index_(i) {}

  CategoryGroup group_ = CategoryGroup::L;
  int index_ = 1;
};

inline std::vector<CategoryCode> all_category_codes() {
  std::vector<CategoryCode> out;
  for (CategoryGroup g : kAllGroups) {
    const auto [lo, hi] = group_index_range(g);
    for (int i = lo; i <= hi; ++i) out.push_back(*CategoryCode::make(g, i));
  }
  return out;
}

inline std::string_view code_description(CategoryCode code) noexcept {
  static constexpr std::string_view kL[] = {"", "Import/Generate", "Fetch/Load", "Parsing", "Export"};
  static constexpr std::string_view kPP[] = {"String Operations", "Tidying Data",     "Transforming Data",
                                             "Formatting Data",   "Summary",          "Data Inspection"};
  static constexpr std::string_view kST[] = {"", "Summary", "Measure", "Plot", "Statistical Test", "Model"};
  static constexpr std::string_view kV[] = {"",           "Distribution",         "Relational",
                                            "Comparative", "Modify Visualization", "ML Visualization"};
  static constexpr std::string_view kS[] = {"",           "NLP Operations",           "Querying",
                                            "Math/Science", "Domain Specific Functions", "Image Processing"};
  static constexpr std::string_view kML[] = {"",           "Prep",     "Train",  "Test",   "Verify",
                                             "Clustering", "Featuring", "Tuning", "Special"};
  const auto i = static_cast<std::size_t>(code.index());
  switch (code.group()) {
    case CategoryGroup::L: return kL[i];
    case CategoryGroup::PP: return kPP[i];
    case CategoryGroup::ST: return kST[i];
    case CategoryGroup::V: return kV[i];
    case CategoryGroup::S: return kS[i];
    case CategoryGroup::ML: return kML[i];
  }
  return "";
}

}  // namespace nbbook
