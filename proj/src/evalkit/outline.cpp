#include "chainflow/evalkit/outline.hpp"

#include <cctype>
#include <numeric>

#include "chainflow/text.hpp"

namespace chainflow::evalkit {

namespace {

struct Line {
  std::string label;
  std::string raw;
  int tabs = 0;
  int spaces = 0;
  int heading = -1;
  bool bulleted = false;
  int level = 0;
  int parent = -1;
  std::vector<std::size_t> children;
};

std::string_view strip_bullet(std::string_view s, bool& bulleted) {
  static constexpr std::string_view kDot = "\xE2\x80\xA2";
  bulleted = false;
  if (s.starts_with(kDot)) {
    bulleted = true;
    return text::trim_view(s.substr(kDot.size()));
  }
  if (s.size() >= 2 && (s[0] == '-' || s[0] == '*' || s[0] == '+') && text::is_space(s[1])) {
    bulleted = true;
    return text::trim_view(s.substr(1));
  }
  std::size_t d = 0;
  while (d < s.size() && std::isdigit(static_cast<unsigned char>(s[d])) != 0) ++d;
  if (d > 0 && d + 1 < s.size() && (s[d] == '.' || s[d] == ')') && text::is_space(s[d + 1])) {
    bulleted = true;
    return text::trim_view(s.substr(d + 1));
  }
  return s;
}

std::string clean_label(std::string_view s) {
  s = text::trim_view(s);
  if (s.size() >= 4 && s.starts_with("**") && s.ends_with("**")) s = text::trim_view(s.substr(2, s.size() - 4));
  if (s.ends_with(':')) s = text::trim_view(s.substr(0, s.size() - 1));
  if (s.size() >= 4 && s.starts_with("**") && s.ends_with("**")) s = text::trim_view(s.substr(2, s.size() - 4));
  return std::string(s);
}

bool reads_as_prose(const Line& line) {
  const auto t = text::trim_view(line.raw);
  return t.ends_with('.') || t.ends_with(':') || t.ends_with('!') || t.ends_with('?') || text::word_count(t) > 6;
}

}  // namespace

std::vector<std::string> OutlineParse::all_items() const {
  std::vector<std::string> out;
  for (const auto& r : records) out.insert(out.end(), r.items.begin(), r.items.end());
  out.insert(out.end(), orphans.begin(), orphans.end());
  return out;
}

nlohmann::json OutlineParse::to_json() const {
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : records) recs.push_back({{"category", r.category}, {"depth", r.depth}, {"items", r.items}});
  return {{"records", recs}, {"orphans", orphans}, {"leftovers", leftovers}, {"indent_unit", indent_unit}};
}

OutlineParse parse_outline(std::string_view input) {
  std::vector<Line> lines;
  for (const auto& raw : text::split_lines(input)) {
    if (text::trim_view(raw).empty()) continue;
    Line line;
    std::size_t i = 0;
    for (; i < raw.size() && text::is_space(raw[i]); ++i) {
      if (raw[i] == '\t') {
        ++line.tabs;
      } else {
        ++line.spaces;
      }
    }
    std::string_view content = text::trim_view(std::string_view(raw).substr(i));
    line.raw = std::string(content);
    std::size_t hashes = 0;
    while (hashes < content.size() && content[hashes] == '#') ++hashes;
    if (hashes > 0 && hashes < content.size() && text::is_space(content[hashes])) {
      line.heading = static_cast<int>(hashes) - 1;
      content = text::trim_view(content.substr(hashes));
    } else {
      content = strip_bullet(content, line.bulleted);
    }
    line.label = clean_label(content);
    lines.push_back(std::move(line));
  }

  OutlineParse out;
  int unit = 0;
  for (const auto& l : lines) {
    if (l.heading < 0 && l.spaces > 0) unit = std::gcd(unit, l.spaces);
  }
  out.indent_unit = unit;
  if (unit == 0) unit = 1;

  int base = 0;
  std::vector<std::size_t> stack;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    auto& l = lines[k];
    if (l.heading >= 0) {
      l.level = l.heading;
      base = l.heading + 1;
    } else {
      l.level = base + l.tabs + l.spaces / unit;
    }
    while (!stack.empty() && lines[stack.back()].level >= l.level) stack.pop_back();
    if (!stack.empty()) {
      l.parent = static_cast<int>(stack.back());
      lines[stack.back()].children.push_back(k);
    }
    stack.push_back(k);
  }

  for (std::size_t k = 0; k < lines.size(); ++k) {
    const auto& l = lines[k];
    if (!l.children.empty()) {
      int depth = 0;
      for (int p = l.parent; p >= 0; p = lines[static_cast<std::size_t>(p)].parent) ++depth;
      OutlineRecord rec{l.label, depth, {}};
      for (auto c : l.children) {
        if (lines[c].children.empty() && !lines[c].label.empty()) rec.items.push_back(lines[c].label);
      }
      out.records.push_back(std::move(rec));
    } else if (l.parent < 0) {
      if (l.heading >= 0 || l.label.empty() || (!l.bulleted && reads_as_prose(l))) {
        out.leftovers.push_back(l.raw);
      } else {
        out.orphans.push_back(l.label);
      }
    } else if (l.label.empty()) {
      out.leftovers.push_back(l.raw);
    }
  }
  return out;
}

}  // namespace chainflow::evalkit
