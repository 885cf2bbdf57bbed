#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

#include "nbbook/notebook.hpp"
#include "nbbook/scanner.hpp"
#include "nbbook/text.hpp"

namespace nbbook {

/// Local alias -> canonical module/function, applied to the leading segment
/// of a dotted name.
struct AliasMap {
  std::map<std::string, std::string, std::less<>> entries;

  std::string apply(std::string_view name) const {
    const auto dot = name.find('.');
    const std::string_view head = name.substr(0, dot);
    const auto it = entries.find(head);
    if (it == entries.end()) return std::string(name);
    std::string out = it->second;
    if (dot != std::string_view::npos) out.append(name.substr(dot));
    return out;
  }

  bool operator==(const AliasMap&) const = default;
};

enum class CallOrigin { Direct, Spliced };

struct CallEvent {
  std::string qualified_name;
  std::size_t cell_index = 0;
  std::size_t line_index = 0;
  std::size_t nesting_depth = 0;
  std::size_t seq = 0;
  CallOrigin origin = CallOrigin::Direct;

  bool operator==(const CallEvent&) const = default;
};

/// Locally defined function name -> calls made by its body, in body order.
struct DefinitionTable {
  std::map<std::string, std::vector<CallEvent>, std::less<>> entries;

  bool operator==(const DefinitionTable&) const = default;
};

/// Adds the aliases introduced by one normalized import statement:
/// `import X`, `import X as Y`, `from X import Y`, `from X import Y as Z`
/// (comma lists allowed). Anything else is ignored.
inline void add_import_aliases(AliasMap& map, std::string_view statement) {
  const auto words = text::split_ws(statement);
  if (words.empty()) return;

  auto for_each_clause = [](std::string_view list, auto&& fn) {
    std::size_t start = 0;
    while (start <= list.size()) {
      std::size_t end = list.find(',', start);
      if (end == std::string_view::npos) end = list.size();
      const auto parts = text::split_ws(list.substr(start, end - start));
      if (parts.size() == 1) fn(parts[0], std::string_view{});
      else if (parts.size() == 3 && parts[1] == "as") fn(parts[0], std::string_view(parts[2]));
      start = end + 1;
    }
  };

  if (words[0] == "import") {
    const std::size_t at = statement.find("import") + 6;
    for_each_clause(statement.substr(at), [&](const std::string& module, std::string_view alias) {
      if (!alias.empty()) {
        map.entries.insert_or_assign(std::string(alias), module);
      } else {
        const std::string root = module.substr(0, module.find('.'));
        map.entries.insert_or_assign(root, root);
      }
    });
    return;
  }
  if (words[0] == "from" && words.size() >= 4 && words[2] == "import") {
    std::string module = words[1];
    module.erase(0, module.find_first_not_of('.'));
    const std::size_t at = statement.find(" import ") + 8;
    for_each_clause(statement.substr(at), [&](const std::string& name, std::string_view alias) {
      if (name == "*") return;
      const std::string canonical = module.empty() ? name : module + "." + name;
      map.entries.insert_or_assign(alias.empty() ? name : std::string(alias), canonical);
    });
  }
}

inline AliasMap resolve_aliases(const Notebook& nb) {
  std::vector<std::tuple<std::size_t, std::size_t, std::string>> imports;
  for (const auto& cell : nb.cells) {
    if (cell.kind != CellKind::Code) continue;
    const auto scanned = scan::scan_python(cell.source);
    auto take = [&](const std::vector<scan::ScanItem>& items) {
      for (const auto& item : items) {
        if (const auto* imp = std::get_if<scan::ScannedImport>(&item)) {
          imports.emplace_back(cell.index, imp->line, imp->statement);
        }
      }
    };
    take(scanned.items);
    for (const auto& def : scanned.defs) take(def.body);
  }
  std::stable_sort(imports.begin(), imports.end(), [](const auto& a, const auto& b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });
  AliasMap map;
  for (const auto& [cell, line, stmt] : imports) add_import_aliases(map, stmt);
  return map;
}

/// Records the body calls of every top-level `def`. Bodies are extracted
/// without expansion, so splicing never recurses and self-references stay as
/// plain calls.
inline DefinitionTable collect_definitions(const Notebook& nb, const AliasMap& aliases) {
  DefinitionTable table;
  for (const auto& cell : nb.cells) {
    if (cell.kind != CellKind::Code) continue;
    for (const auto& def : scan::scan_python(cell.source).defs) {
      std::vector<CallEvent> body;
      for (const auto& item : def.body) {
        if (const auto* call = std::get_if<scan::ScannedCall>(&item)) {
          body.push_back(CallEvent{aliases.apply(call->name), cell.index, call->line, call->depth, body.size(),
                                   CallOrigin::Direct});
        }
      }
      table.entries.insert_or_assign(def.name, std::move(body));
    }
  }
  return table;
}

/// One element of a cell's extraction stream: a call or an import statement.
struct StreamItem {
  bool is_import = false;
  CallEvent call;             // valid when !is_import
  std::size_t import_line = 0;  // valid when is_import
};

inline std::vector<StreamItem> extract_stream(const Cell& cell, const AliasMap& aliases, const DefinitionTable& defs) {
  std::vector<StreamItem> out;
  if (cell.kind != CellKind::Code) return out;
  std::size_t seq = 0;
  for (const auto& item : scan::scan_python(cell.source).items) {
    if (const auto* imp = std::get_if<scan::ScannedImport>(&item)) {
      out.push_back(StreamItem{true, {}, imp->line});
      continue;
    }
    const auto& call = std::get<scan::ScannedCall>(item);
    if (call.name.find('.') == std::string::npos) {
      if (auto it = defs.entries.find(call.name); it != defs.entries.end()) {
        for (const auto& body_event : it->second) {
          out.push_back(StreamItem{false,
                                   CallEvent{body_event.qualified_name, cell.index, call.line,
                                             call.depth + body_event.nesting_depth, seq++, CallOrigin::Spliced},
                                   0});
        }
        continue;
      }
    }
    out.push_back(StreamItem{
        false, CallEvent{aliases.apply(call.name), cell.index, call.line, call.depth, seq++, CallOrigin::Direct}, 0});
  }
  return out;
}

inline std::vector<CallEvent> extract_calls(const Cell& cell, const AliasMap& aliases, const DefinitionTable& defs) {
  std::vector<CallEvent> events;
  for (auto& item : extract_stream(cell, aliases, defs)) {
    if (!item.is_import) events.push_back(std::move(item.call));
  }
  return events;
}

}  // namespace nbbook
