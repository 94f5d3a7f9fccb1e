#pragma once

#include <string_view>

// Template ids shared by the chains, the reference registry and the scripted
// fallback generators.
namespace chainflow::tmpl {

inline constexpr std::string_view kCascadeGenerate = "cascade.generate";
inline constexpr std::string_view kCascadeSelect = "cascade.select";
inline constexpr std::string_view kCascadeMember = "cascade.member";

inline constexpr std::string_view kSoylentFind = "soylent.find";
inline constexpr std::string_view kSoylentEdit = "soylent.fix.edit";
inline constexpr std::string_view kSoylentMerge = "soylent.fix.merge";
inline constexpr std::string_view kSoylentDelete = "soylent.fix.delete";
inline constexpr std::string_view kSoylentVerify = "soylent.verify";

inline constexpr std::string_view kMnInit = "mn.init";
inline constexpr std::string_view kMnSummarize = "mn.summarize";
inline constexpr std::string_view kMnSuggest = "mn.suggest";
inline constexpr std::string_view kMnCheckOverlap = "mn.check.overlap";
inline constexpr std::string_view kMnCheckImplemented = "mn.check.implemented";
inline constexpr std::string_view kMnCheckWording = "mn.check.wording";
inline constexpr std::string_view kMnSuggestVote = "mn.suggest.vote";
inline constexpr std::string_view kMnEdit = "mn.edit";
inline constexpr std::string_view kMnEditVote = "mn.edit.vote";

inline constexpr std::string_view kBaselineTaxonomyZeroShot = "baseline.taxonomy.zero-shot";
inline constexpr std::string_view kBaselineTaxonomyTarget = "baseline.taxonomy.zero-shot-target";
inline constexpr std::string_view kBaselineShortenZeroShot = "baseline.shorten.zero-shot";
inline constexpr std::string_view kBaselineShortenTarget = "baseline.shorten.zero-shot-target";
inline constexpr std::string_view kBaselineShortenFfv = "baseline.shorten.zero-shot-ffv";
inline constexpr std::string_view kBaselineStoryZeroShot = "baseline.story.zero-shot";
inline constexpr std::string_view kBaselineStoryCombo = "baseline.story.zero-shot-combo";

/// Line separating scenes in story responses.
inline constexpr std::string_view kSceneDelimiter = "=== SCENE BREAK ===";

}  // namespace chainflow::tmpl
