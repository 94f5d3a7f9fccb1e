#include "chainflow/validators/validators.hpp"

#include <algorithm>
#include <cctype>

#include "chainflow/engine/vote.hpp"
#include "chainflow/template_ids.hpp"
#include "chainflow/text.hpp"

namespace chainflow::validators {
namespace {

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool has_standalone_word(std::string_view haystack, std::string_view word) {
  for (std::size_t pos = haystack.find(word); pos != std::string_view::npos; pos = haystack.find(word, pos + 1)) {
    const bool left = pos == 0 || !is_word_char(haystack[pos - 1]);
    const std::size_t end = pos + word.size();
    const bool right = end == haystack.size() || !is_word_char(haystack[end]);
    if (left && right) return true;
  }
  return false;
}

std::string words_str(std::size_t n) { return std::to_string(n) + (n == 1 ? " word" : " words"); }

}  // namespace

ValidationOutcome category_name_ok(std::string_view name) {
  const auto trimmed = text::trim_view(name);
  if (trimmed.empty()) throw Error("EmptyName", "category name is blank");
  const auto lower = text::to_lower(trimmed);
  if (lower.find(',') != std::string::npos) return ValidationOutcome::reject(rule::kCategoryName, "contains a comma");
  if (lower.find('/') != std::string::npos) return ValidationOutcome::reject(rule::kCategoryName, "contains a slash");
  for (std::string_view w : {"and", "or"}) {
    if (has_standalone_word(lower, w)) {
      return ValidationOutcome::reject(rule::kCategoryName, "contains the word '" + std::string(w) + "'");
    }
  }
  return ValidationOutcome::accept(rule::kCategoryName);
}

ValidationOutcome phrase_exists(std::string_view haystack, std::string_view phrase) {
  if (phrase.empty()) return ValidationOutcome::reject(rule::kPhraseExists, "phrase is empty");
  if (haystack.find(phrase) == std::string_view::npos) {
    return ValidationOutcome::reject(rule::kPhraseExists, "phrase does not occur verbatim in the text");
  }
  return ValidationOutcome::accept(rule::kPhraseExists);
}

ValidationOutcome replacement_shorter(std::string_view original, std::string_view replacement) {
  const auto before = text::word_count(original);
  const auto after = text::word_count(replacement);
  if (after < before) return ValidationOutcome::accept(rule::kShorter);
  return ValidationOutcome::reject(rule::kShorter,
                                   "replacement has " + words_str(after) + ", original " + words_str(before));
}

bool quotes_balanced(std::string_view text) noexcept { return std::count(text.begin(), text.end(), '"') % 2 == 0; }

std::vector<std::string> quoted_segments(std::string_view text) {
  if (!quotes_balanced(text)) throw Error("UnbalancedQuotes", "odd number of double-quote marks");
  std::vector<std::string> out;
  std::size_t pos = text.find('"');
  while (pos != std::string_view::npos) {
    const std::size_t close = text.find('"', pos + 1);
    out.emplace_back(text.substr(pos, close - pos + 1));
    pos = text.find('"', close + 1);
  }
  return out;
}

ValidationOutcome quotes_preserved(std::string_view before, std::string_view after) {
  auto a = quoted_segments(before);
  if (!quotes_balanced(after)) return ValidationOutcome::reject(rule::kQuotes, "edited text has unbalanced quotes");
  auto b = quoted_segments(after);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a == b) return ValidationOutcome::accept(rule::kQuotes);
  return ValidationOutcome::reject(rule::kQuotes, "quoted text was altered, removed or added");
}

ValidationOutcome length_ratio_ok(std::string_view original, std::string_view edited, double cap) {
  if (!(cap > 0.0)) throw Error("InvalidCap", "length cap must be positive");
  const auto base = text::word_count(original);
  if (base == 0) throw Error("EmptyOriginal", "original text has no words");
  const auto n = text::word_count(edited);
  if (static_cast<double>(n) <= cap * static_cast<double>(base)) return ValidationOutcome::accept(rule::kLengthRatio);
  return ValidationOutcome::reject(rule::kLengthRatio, "edited text has " + words_str(n) + ", cap is " +
                                                           std::to_string(cap) + " x " + words_str(base));
}

ValidationOutcome tally_votes(std::span<const Ballot> ballots) {
  const auto keep = static_cast<std::size_t>(std::count(ballots.begin(), ballots.end(), Ballot::Keep));
  const auto reject = ballots.size() - keep;
  if (!ballots.empty() && keep * 2 > ballots.size()) return ValidationOutcome::accept(rule::kVerifyVote);
  return ValidationOutcome::reject(rule::kVerifyVote,
                                   std::to_string(keep) + " keep / " + std::to_string(reject) + " reject");
}

ValidationOutcome vote_validate(engine::Engine& engine, std::string_view node_id, std::string_view template_id,
                                nlohmann::json vars, int voters) {
  if (voters < 1) throw Error("InvalidVoters", "vote_validate needs at least one voter");
  auto check = [](std::string_view t) -> std::optional<std::string> {
    if (engine::parse_verdict(t, "keep", "reject")) return std::nullopt;
    return "expected KEEP or REJECT";
  };
  std::vector<engine::Task> tasks{engine::Task{std::move(vars), voters, {}}};
  auto answers = engine.fan_out(node_id, template_id, std::move(tasks), check).front();
  std::vector<Ballot> ballots;
  for (const auto& a : answers) {
    ballots.push_back(*engine::parse_verdict(a, "keep", "reject") ? Ballot::Keep : Ballot::Reject);
  }
  return tally_votes(ballots);
}

std::vector<std::string> with_banned_seeds(std::vector<std::string> prior) {
  std::vector<std::string> missing;
  for (const auto& seed : kBannedSeeds) {
    if (std::find(prior.begin(), prior.end(), seed) == prior.end()) missing.push_back(seed);
  }
  prior.insert(prior.begin(), missing.begin(), missing.end());
  return prior;
}

ValidationOutcome suggestion_checks(engine::Engine& engine, std::string_view candidate,
                                    const std::vector<std::string>& prior_in, std::string_view story) {
  const auto prior = with_banned_seeds(prior_in);
  const auto folded = text::fold(candidate);
  for (const auto& p : prior) {
    if (text::fold(p) == folded) {
      return ValidationOutcome::reject(rule::kSuggestionOverlap, "repeats an earlier suggestion: " + p);
    }
  }

  auto check = [](std::string_view t) -> std::optional<std::string> {
    if (engine::parse_verdict(t, "pass", "fail")) return std::nullopt;
    return "expected PASS or FAIL";
  };
  struct Step {
    std::string_view template_id;
    std::string_view rule_id;
    std::string_view failure;
  };
  const Step steps[] = {
      {tmpl::kMnCheckOverlap, rule::kSuggestionOverlap, "overlaps an earlier suggestion"},
      {tmpl::kMnCheckImplemented, rule::kSuggestionImplemented, "already implemented in the story"},
      {tmpl::kMnCheckWording, rule::kSuggestionWording, "not worded as a suggestion"},
  };
  const nlohmann::json vars = {{"candidate", candidate}, {"prior", prior}, {"story", story}};
  for (const auto& step : steps) {
    const auto answer = engine.call(step.template_id, step.template_id, vars, check);
    if (!*engine::parse_verdict(answer, "pass", "fail")) {
      return ValidationOutcome::reject(step.rule_id, std::string(step.failure));
    }
  }
  return ValidationOutcome::accept(rule::kSuggestionWording);
}

}  // namespace chainflow::validators
