#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "chainflow/engine/engine.hpp"

namespace chainflow::validators {

/// Stable rule identifiers recorded in bundle provenance.
namespace rule {
inline constexpr std::string_view kCategoryName = "cat-name";
inline constexpr std::string_view kPhraseExists = "phrase-exists";
inline constexpr std::string_view kShorter = "shorter";
inline constexpr std::string_view kQuotes = "quotes";
inline constexpr std::string_view kLengthRatio = "len-ratio";
inline constexpr std::string_view kVerifyVote = "verify-vote";
inline constexpr std::string_view kSuggestionOverlap = "sugg-overlap";
inline constexpr std::string_view kSuggestionImplemented = "sugg-implemented";
inline constexpr std::string_view kSuggestionWording = "sugg-wording";
}  // namespace rule

struct ValidationOutcome {
  bool accepted = true;
  std::string rule_id;
  /// Non-empty whenever accepted is false.
  std::string detail;

  static ValidationOutcome accept(std::string_view rule_id) { return {true, std::string(rule_id), {}}; }
  static ValidationOutcome reject(std::string_view rule_id, std::string detail) {
    return {false, std::string(rule_id), std::move(detail)};
  }
  explicit operator bool() const noexcept { return accepted; }
};

/// Rejects names containing the standalone words "and"/"or" (case-insensitive)
/// or any comma or slash. Throws Error("EmptyName") for blank names.
ValidationOutcome category_name_ok(std::string_view name);

/// Accepted iff `phrase` is a non-empty, byte-exact substring of `haystack`.
ValidationOutcome phrase_exists(std::string_view haystack, std::string_view phrase);

/// Accepted iff the replacement has strictly fewer words. Empty replacement is a deletion.
ValidationOutcome replacement_shorter(std::string_view original, std::string_view replacement);

bool quotes_balanced(std::string_view text) noexcept;

/// Maximal double-quoted substrings (marks included) in order of appearance.
/// Throws Error("UnbalancedQuotes") on an odd number of '"' marks.
std::vector<std::string> quoted_segments(std::string_view text);

/// Accepted iff the multisets of quoted substrings match. Throws
/// Error("UnbalancedQuotes") when `before` is unbalanced; an unbalanced
/// `after` is a rejection.
ValidationOutcome quotes_preserved(std::string_view before, std::string_view after);

inline constexpr double kDefaultLengthCap = 1.5;

/// Accepted iff words(edited) <= cap * words(original), inclusive.
/// Throws Error("EmptyOriginal") or Error("InvalidCap").
ValidationOutcome length_ratio_ok(std::string_view original, std::string_view edited,
                                  double cap = kDefaultLengthCap);

enum class Ballot { Keep, Reject };

/// Majority filter: rejected unless strictly more than half the ballots keep.
/// Depends only on the ballot counts.
ValidationOutcome tally_votes(std::span<const Ballot> ballots);

/// Issues `voters` redundant evaluate calls of `template_id` with `vars`
/// (answer protocol: KEEP / REJECT) and tallies them. Malformed answers are
/// retried by the engine.
ValidationOutcome vote_validate(engine::Engine& engine, std::string_view node_id, std::string_view template_id,
                                nlohmann::json vars, int voters);

/// Generic suggestions every story revision run treats as already used.
inline const std::array<std::string, 2> kBannedSeeds = {"Generic recommendation to introduce conflict.",
                                                        "Generic recommendation to add detail."};

/// `prior` with any missing banned seed prepended.
std::vector<std::string> with_banned_seeds(std::vector<std::string> prior);

/// Runs the overlap, already-implemented and wording checks in order, one
/// single-voter evaluate call each (answer protocol: PASS / FAIL), stopping at
/// the first failure. A candidate whose folded text equals a prior suggestion
/// fails the overlap rule without a call.
ValidationOutcome suggestion_checks(engine::Engine& engine, std::string_view candidate,
                                    const std::vector<std::string>& prior, std::string_view story);

}  // namespace chainflow::validators
