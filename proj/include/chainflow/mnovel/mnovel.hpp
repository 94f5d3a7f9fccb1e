#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "chainflow/engine/engine.hpp"
#include "chainflow/engine/graph.hpp"

namespace chainflow::mnovel {

struct MnConfig {
  int scene_count = 4;
  int rounds = 5;
  int suggestion_replicates = 3;
  int edit_replicates = 3;
  /// Voters for choosing among surviving suggestions or scene edits.
  int vote_voters = 3;
  double length_cap = 1.5;
  std::vector<std::string> banned_seeds;
  /// Build variant(m) from variant(m without its highest bit) instead of
  /// replaying every suggestion from the initial story.
  bool share_prefixes = true;

  MnConfig();
  void check() const;
  nlohmann::json to_json() const;
  static MnConfig from_json(const nlohmann::json& j);
};

struct Story {
  std::vector<std::string> scenes;
  /// Applied suggestion ids, in order.
  std::vector<std::string> provenance;

  bool operator==(const Story&) const = default;
  nlohmann::json to_json() const;
  static Story from_json(const nlohmann::json& j);
};

/// Scenes joined by delimiter lines, the form used in prompts.
std::string story_text(const Story& story);

/// Splits a response on delimiter lines. nullopt unless exactly `scene_count`
/// non-empty scenes result; blank leading or trailing segments are ignored.
std::optional<std::vector<std::string>> parse_scenes(std::string_view response, int scene_count);

enum class SuggestionStatus { Accepted, Rejected, Unimplemented };

std::string_view to_string(SuggestionStatus status) noexcept;

struct SuggestionRecord {
  std::string id;
  int round_index = 0;
  std::string text;
  SuggestionStatus status = SuggestionStatus::Rejected;
  /// Failing rule when rejected.
  std::string rule_id;
};

/// Per-scene record of the last revision step that produced a variant.
struct SceneEdit {
  std::size_t base_words = 0;
  std::size_t words = 0;
  bool edited = false;
};

struct Revision {
  Story story;
  std::vector<SceneEdit> scenes;
};

struct StoryVariant {
  std::uint32_t mask = 0;
  /// Mask of the story this one was revised from; -1 for mask 0.
  long long parent = -1;
  Story story;
  std::vector<SceneEdit> trail;
};

struct StoryBundle {
  std::string prompt;
  MnConfig config;
  Story initial;
  /// Every candidate of every round.
  std::vector<SuggestionRecord> suggestions;
  /// Accepted suggestions in round order; bit i of a mask selects accepted[i].
  std::vector<SuggestionRecord> accepted;
  /// Indexed by mask.
  std::vector<StoryVariant> variants;
  nlohmann::json provenance = nlohmann::json::object();
};

void check_bundle(const StoryBundle& bundle);
nlohmann::json to_json(const StoryBundle& bundle);
StoryBundle story_bundle_from_json(const nlohmann::json& j);

Story init_story(std::string_view prompt, const MnConfig& config, engine::Engine& engine);

std::string summarize(const Story& story, engine::Engine& engine);

struct ReflectResult {
  std::vector<SuggestionRecord> candidates;
  std::optional<SuggestionRecord> accepted;
};

/// Generates candidates, runs the suggestion checks on each, and votes among
/// survivors. `prior` is extended with the banned seeds.
ReflectResult reflect_round(const Story& story, std::string_view summary, const std::vector<std::string>& prior,
                            int round_index, const MnConfig& config, engine::Engine& engine);

/// Edits each scene in order. Edits longer than length_cap times the scene are
/// dropped; with none left the scene is kept. The suggestion id is appended to
/// provenance either way. Summarizes `story` unless `summary` is given.
Revision revise_with(const Story& story, const SuggestionRecord& suggestion, const MnConfig& config,
                     engine::Engine& engine, std::optional<std::string> summary = std::nullopt);

/// All 2^k combinations of `accepted`. `known` may supply revisions already
/// computed from the prefix-sharing parent; it is ignored when prefixes are
/// not shared.
std::vector<StoryVariant> build_variant_matrix(const Story& initial, const std::vector<SuggestionRecord>& accepted,
                                               const MnConfig& config, engine::Engine& engine,
                                               const std::map<std::uint32_t, Revision>& known = {});

/// Throws Error("MaskOutOfRange").
const Story& get_variant(const StoryBundle& bundle, std::uint64_t mask);

engine::WorkflowGraph mnovel_graph(const MnConfig& config);

StoryBundle run_mnovel(std::string_view prompt, const MnConfig& config, engine::Engine& engine);

}  // namespace chainflow::mnovel
