#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace chainflow::evalkit {

struct OutlineRecord {
  std::string category;
  /// 0 for top-level categories.
  int depth = 0;
  /// Leaf lines directly under the category.
  std::vector<std::string> items;
};

struct OutlineParse {
  std::vector<OutlineRecord> records;
  /// Leaf lines with no parent that read as items rather than prose.
  std::vector<std::string> orphans;
  /// Lines that are neither categories nor items, verbatim but trimmed.
  std::vector<std::string> leftovers;
  /// Indent unit inferred from space-only indentation (tabs count one level each).
  int indent_unit = 0;

  /// Record items then orphans, in input order of appearance.
  std::vector<std::string> all_items() const;
  std::size_t category_count() const noexcept { return records.size(); }
  nlohmann::json to_json() const;
};

/// Tolerant outline reader. Bullets "-", "*", "+", "•", "1." and "1)" and
/// markdown "#" headings are recognized; a line with children is a category.
/// Every non-blank line lands in exactly one of records, orphans or leftovers.
OutlineParse parse_outline(std::string_view text);

}  // namespace chainflow::evalkit
