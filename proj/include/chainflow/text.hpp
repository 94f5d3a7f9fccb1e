#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace chainflow::text {

inline bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string_view trim_view(std::string_view s) noexcept;
std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

/// Collapses every whitespace run to one space and trims both ends.
std::string normalize_space(std::string_view s);

/// Identity form used for label matching: trimmed, whitespace-normalized, lowercased.
std::string fold(std::string_view s);

/// Maximal whitespace-delimited tokens.
std::vector<std::string_view> split_words(std::string_view s);
std::size_t word_count(std::string_view s) noexcept;

std::vector<std::string> split_lines(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace chainflow::text
