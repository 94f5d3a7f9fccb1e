#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace chainflow::engine {

/// Index with the most ballots over `option_count` numbered options; ties go to
/// the lowest index. Throws Error EmptyBallots, EmptyOptions or BallotOutOfRange.
std::size_t plurality_vote(std::size_t option_count, std::span<const std::size_t> ballots);

template <class T>
std::size_t plurality_vote(const std::vector<T>& options, const std::vector<std::size_t>& ballots) {
  return plurality_vote(options.size(), std::span<const std::size_t>(ballots));
}

/// "1. first\n2. second" for numbered-option prompts.
std::string number_options(const std::vector<std::string>& options);

/// First integer in `text`, converted to a 0-based index; nullopt unless it
/// lies in [1, option_count].
std::optional<std::size_t> parse_option_number(std::string_view text, std::size_t option_count);

/// First word of `text` matching `positive` or `negative` (case-insensitive):
/// true for positive, false for negative, nullopt when neither appears.
std::optional<bool> parse_verdict(std::string_view text, std::string_view positive, std::string_view negative);

}  // namespace chainflow::engine
