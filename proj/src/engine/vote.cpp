#include "chainflow/engine/vote.hpp"

#include <cctype>
#include <string>

#include "chainflow/error.hpp"
#include "chainflow/text.hpp"

namespace chainflow::engine {

std::size_t plurality_vote(std::size_t option_count, std::span<const std::size_t> ballots) {
  if (option_count == 0) throw Error("EmptyOptions", "no options to vote on");
  if (ballots.empty()) throw Error("EmptyBallots", "no ballots cast");
  std::vector<std::size_t> tally(option_count, 0);
  for (std::size_t b : ballots) {
    if (b >= option_count) {
      throw Error("BallotOutOfRange",
                  "ballot " + std::to_string(b) + " outside " + std::to_string(option_count) + " options");
    }
    ++tally[b];
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < option_count; ++i) {
    if (tally[i] > tally[best]) best = i;
  }
  return best;
}


std::string number_options(const std::vector<std::string>& options) {
  std::string out;
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (i) out.push_back('\n');
    out += std::to_string(i + 1) + ". " + options[i];
  }
  return out;
}

std::optional<std::size_t> parse_option_number(std::string_view text, std::size_t option_count) {
  std::size_t i = 0;
  while (i < text.size() && !std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
  if (i == text.size()) return std::nullopt;
  std::size_t value = 0;
  for (; i < text.size() && std::isdigit(static_cast<unsigned char>(text[i])); ++i) {
    value = value * 10 + static_cast<std::size_t>(text[i] - '0');
    if (value > option_count) return std::nullopt;
  }
  if (value < 1) return std::nullopt;
  return value - 1;
}

std::optional<bool> parse_verdict(std::string_view text, std::string_view positive, std::string_view negative) {
  const auto pos = text::to_lower(positive);
  const auto neg = text::to_lower(negative);
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && !std::isalpha(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && std::isalpha(static_cast<unsigned char>(text[i]))) ++i;
    if (i == start) break;
    const auto word = text::to_lower(text.substr(start, i - start));
    if (word == pos) return true;
    if (word == neg) return false;
  }
  return std::nullopt;
}

}  // namespace chainflow::engine
