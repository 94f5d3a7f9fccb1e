#include "chainflow/mnovel/mnovel.hpp"

#include <bit>
#include <set>

#include "chainflow/engine/vote.hpp"
#include "chainflow/error.hpp"
#include "chainflow/template_ids.hpp"
#include "chainflow/text.hpp"
#include "chainflow/validators/validators.hpp"

namespace chainflow::mnovel {

namespace {

constexpr int kMaxAccepted = 16;

[[noreturn]] void violation(std::string path, std::string detail) {
  throw SchemaViolation(std::move(path), std::move(detail));
}

engine::FormatCheck nonempty_check() {
  return [](std::string_view out) -> std::optional<std::string> {
    if (text::trim_view(out).empty()) return "empty response";
    return std::nullopt;
  };
}

engine::FormatCheck option_check(std::size_t n) {
  return [n](std::string_view out) -> std::optional<std::string> {
    if (!engine::parse_option_number(out, n)) return "expected an option number";
    return std::nullopt;
  };
}

/// Plurality over `options` with `voters` numbered-option ballots.
std::size_t vote(engine::Engine& engine, std::string_view node_id, std::string_view template_id, nlohmann::json vars,
                 const std::vector<std::string>& options, int voters) {
  vars["options"] = engine::number_options(options);
  vars["option_count"] = options.size();
  std::vector<engine::Task> tasks{{std::move(vars), voters, option_check(options.size())}};
  const auto answers = engine.fan_out(node_id, template_id, std::move(tasks));
  std::vector<std::size_t> ballots;
  for (const auto& a : answers.front()) ballots.push_back(*engine::parse_option_number(a, options.size()));
  return engine::plurality_vote(options, ballots);
}

std::vector<std::string> set_bit_ids(std::uint32_t mask, const std::vector<SuggestionRecord>& accepted) {
  std::vector<std::string> out;
  for (std::size_t b = 0; b < accepted.size(); ++b) {
    if (mask & (1u << b)) out.push_back(accepted[b].id);
  }
  return out;
}

SuggestionStatus parse_status(std::string_view s) {
  for (auto st : {SuggestionStatus::Accepted, SuggestionStatus::Rejected, SuggestionStatus::Unimplemented}) {
    if (to_string(st) == s) return st;
  }
  throw SchemaViolation("status", "unknown suggestion status '" + std::string(s) + "'");
}

nlohmann::json record_json(const SuggestionRecord& r) {
  nlohmann::json j = {{"id", r.id}, {"round", r.round_index}, {"text", r.text}, {"status", to_string(r.status)}};
  if (!r.rule_id.empty()) j["rule_id"] = r.rule_id;
  return j;
}

SuggestionRecord record_from_json(const nlohmann::json& j) {
  return {j.at("id").get<std::string>(), j.at("round").get<int>(), j.at("text").get<std::string>(),
          parse_status(j.at("status").get<std::string>()), j.value("rule_id", std::string{})};
}

}  // namespace

MnConfig::MnConfig() : banned_seeds(validators::kBannedSeeds.begin(), validators::kBannedSeeds.end()) {}

void MnConfig::check() const {
  if (scene_count < 1) throw Error("InvalidConfig", "scene_count must be at least 1");
  if (rounds < 0) throw Error("InvalidConfig", "rounds must not be negative");
  if (rounds > kMaxAccepted) throw Error("InvalidConfig", "rounds above " + std::to_string(kMaxAccepted));
  if (suggestion_replicates < 1 || edit_replicates < 1 || vote_voters < 1) {
    throw Error("InvalidConfig", "replicate counts must be at least 1");
  }
  if (!(length_cap > 0.0)) throw Error("InvalidConfig", "length_cap must be positive");
}

nlohmann::json MnConfig::to_json() const {
  return {{"scene_count", scene_count},
          {"rounds", rounds},
          {"suggestion_replicates", suggestion_replicates},
          {"edit_replicates", edit_replicates},
          {"vote_voters", vote_voters},
          {"length_cap", length_cap},
          {"banned_seeds", banned_seeds},
          {"share_prefixes", share_prefixes}};
}

MnConfig MnConfig::from_json(const nlohmann::json& j) {
  MnConfig c;
  c.scene_count = j.value("scene_count", c.scene_count);
  c.rounds = j.value("rounds", c.rounds);
  c.suggestion_replicates = j.value("suggestion_replicates", c.suggestion_replicates);
  c.edit_replicates = j.value("edit_replicates", c.edit_replicates);
  c.vote_voters = j.value("vote_voters", c.vote_voters);
  c.length_cap = j.value("length_cap", c.length_cap);
  c.banned_seeds = j.value("banned_seeds", c.banned_seeds);
  c.share_prefixes = j.value("share_prefixes", c.share_prefixes);
  c.check();
  return c;
}

nlohmann::json Story::to_json() const { return {{"scenes", scenes}, {"provenance", provenance}}; }

Story Story::from_json(const nlohmann::json& j) {
  return {j.at("scenes").get<std::vector<std::string>>(), j.value("provenance", std::vector<std::string>{})};
}

std::string story_text(const Story& story) {
  return text::join(story.scenes, "\n" + std::string(tmpl::kSceneDelimiter) + "\n");
}

std::optional<std::vector<std::string>> parse_scenes(std::string_view response, int scene_count) {
  std::vector<std::string> segments{""};
  for (const auto& line : text::split_lines(response)) {
    if (text::trim_view(line) == tmpl::kSceneDelimiter) {
      segments.emplace_back();
      continue;
    }
    auto& seg = segments.back();
    if (!seg.empty()) seg += '\n';
    seg += line;
  }
  for (auto& s : segments) s = text::trim(s);
  while (!segments.empty() && segments.back().empty()) segments.pop_back();
  if (!segments.empty() && segments.front().empty()) segments.erase(segments.begin());
  if (static_cast<int>(segments.size()) != scene_count) return std::nullopt;
  for (const auto& s : segments) {
    if (s.empty()) return std::nullopt;
  }
  return segments;
}

std::string_view to_string(SuggestionStatus status) noexcept {
  switch (status) {
    case SuggestionStatus::Accepted: return "accepted";
    case SuggestionStatus::Rejected: return "rejected";
    case SuggestionStatus::Unimplemented: return "unimplemented";
  }
  return "rejected";
}

Story init_story(std::string_view prompt, const MnConfig& config, engine::Engine& engine) {
  if (text::trim_view(prompt).empty()) throw Error("EmptyPrompt", "story prompt must be non-empty");
  const int n = config.scene_count;
  const auto check = [n](std::string_view out) -> std::optional<std::string> {
    if (!parse_scenes(out, n)) return "expected " + std::to_string(n) + " scenes";
    return std::nullopt;
  };
  const auto out = engine.call("init", tmpl::kMnInit,
                               {{"prompt", prompt}, {"scene_count", n}, {"delimiter", tmpl::kSceneDelimiter}}, check);
  return {*parse_scenes(out, n), {}};
}

std::string summarize(const Story& story, engine::Engine& engine) {
  return text::trim(engine.call("summarize", tmpl::kMnSummarize, {{"story", story_text(story)}}, nonempty_check()));
}

ReflectResult reflect_round(const Story& story, std::string_view summary, const std::vector<std::string>& prior_in,
                            int round_index, const MnConfig& config, engine::Engine& engine) {
  auto prior = prior_in;
  for (auto it = config.banned_seeds.rbegin(); it != config.banned_seeds.rend(); ++it) {
    if (std::find(prior.begin(), prior.end(), *it) == prior.end()) prior.insert(prior.begin(), *it);
  }
  std::vector<engine::Task> tasks{{{{"summary", summary}}, config.suggestion_replicates, {}}};
  const auto generated = engine.fan_out("suggest", tmpl::kMnSuggest, std::move(tasks), nonempty_check()).front();

  ReflectResult result;
  std::set<std::string> seen;
  std::vector<std::size_t> survivors;
  const auto text_of_story = story_text(story);
  const auto id = "s" + std::to_string(round_index + 1);
  for (std::size_t r = 0; r < generated.size(); ++r) {
    const auto candidate = text::trim(generated[r]);
    if (!seen.insert(text::fold(candidate)).second) continue;
    SuggestionRecord rec{id + "." + std::to_string(r + 1), round_index, candidate, SuggestionStatus::Rejected, {}};
    const auto outcome = validators::suggestion_checks(engine, candidate, prior, text_of_story);
    if (outcome) {
      rec.status = SuggestionStatus::Unimplemented;
      survivors.push_back(result.candidates.size());
    } else {
      rec.rule_id = outcome.rule_id;
    }
    result.candidates.push_back(std::move(rec));
  }
  if (survivors.empty()) return result;

  std::size_t winner = survivors.front();
  if (survivors.size() > 1) {
    std::vector<std::string> options;
    for (auto s : survivors) options.push_back(result.candidates[s].text);
    winner = survivors[vote(engine, "suggest.vote", tmpl::kMnSuggestVote, {{"summary", summary}}, options,
                            config.vote_voters)];
  }
  auto& chosen = result.candidates[winner];
  chosen.status = SuggestionStatus::Accepted;
  result.accepted = chosen;
  result.accepted->id = id;
  return result;
}

Revision revise_with(const Story& story, const SuggestionRecord& suggestion, const MnConfig& config,
                     engine::Engine& engine, std::optional<std::string> summary) {
  if (story.scenes.empty()) throw Error("InvalidStory", "story has no scenes");
  const std::string context = summary ? *summary : mnovel::summarize(story, engine);
  Revision rev{story, {}};
  for (std::size_t i = 0; i < story.scenes.size(); ++i) {
    const auto& scene = story.scenes[i];
    std::vector<engine::Task> tasks{
        {{{"summary", context}, {"suggestion", suggestion.text}, {"scene", scene}}, config.edit_replicates, {}}};
    const auto edits = engine.fan_out("edit", tmpl::kMnEdit, std::move(tasks), nonempty_check()).front();
    std::vector<std::string> survivors;
    for (const auto& e : edits) {
      auto edited = text::trim(e);
      if (edited.find(tmpl::kSceneDelimiter) != std::string::npos) continue;
      if (!validators::length_ratio_ok(scene, edited, config.length_cap)) continue;
      if (std::find(survivors.begin(), survivors.end(), edited) == survivors.end()) survivors.push_back(std::move(edited));
    }
    SceneEdit trail{text::word_count(scene), text::word_count(scene), false};
    if (!survivors.empty()) {
      std::size_t pick = 0;
      if (survivors.size() > 1) {
        pick = vote(engine, "edit.vote", tmpl::kMnEditVote, {{"suggestion", suggestion.text}}, survivors,
                    config.vote_voters);
      }
      rev.story.scenes[i] = survivors[pick];
      trail.words = text::word_count(survivors[pick]);
      trail.edited = true;
    }
    rev.scenes.push_back(trail);
  }
  rev.story.provenance.push_back(suggestion.id);
  return rev;
}

std::vector<StoryVariant> build_variant_matrix(const Story& initial, const std::vector<SuggestionRecord>& accepted,
                                               const MnConfig& config, engine::Engine& engine,
                                               const std::map<std::uint32_t, Revision>& known) {
  if (static_cast<int>(accepted.size()) > std::max(config.rounds, 0) ||
      static_cast<int>(accepted.size()) > kMaxAccepted) {
    throw Error("TooManySuggestions", "more accepted suggestions than rounds");
  }
  const std::uint32_t total = 1u << accepted.size();
  std::vector<StoryVariant> variants(total);
  variants[0].story = initial;
  for (const auto& s : initial.scenes) variants[0].trail.push_back({text::word_count(s), text::word_count(s), false});

  for (std::uint32_t m = 1; m < total; ++m) {
    const int high = std::bit_width(m) - 1;
    const std::uint32_t parent = m & ~(1u << high);
    auto& v = variants[m];
    v.mask = m;
    v.parent = parent;
    if (config.share_prefixes) {
      const auto it = known.find(m);
      Revision rev = it != known.end() ? it->second : revise_with(variants[parent].story, accepted[high], config, engine);
      v.story = std::move(rev.story);
      v.trail = std::move(rev.scenes);
      continue;
    }
    Story current = initial;
    for (int b = 0; b <= high; ++b) {
      if (!(m & (1u << b))) continue;
      auto rev = revise_with(current, accepted[static_cast<std::size_t>(b)], config, engine);
      current = std::move(rev.story);
      v.trail = std::move(rev.scenes);
    }
    v.story = std::move(current);
  }
  return variants;
}

const Story& get_variant(const StoryBundle& bundle, std::uint64_t mask) {
  if (mask >= bundle.variants.size()) {
    throw Error("MaskOutOfRange", "mask " + std::to_string(mask) + " outside [0, " +
                                      std::to_string(bundle.variants.size()) + ")");
  }
  return bundle.variants[mask].story;
}

void check_bundle(const StoryBundle& b) {
  const auto k = b.accepted.size();
  if (k > static_cast<std::size_t>(kMaxAccepted)) violation("accepted", "too many accepted suggestions");
  if (b.variants.size() != (std::size_t{1} << k)) violation("variants", "expected 2^k variants");
  if (static_cast<int>(b.initial.scenes.size()) != b.config.scene_count) violation("initial.scenes", "wrong scene count");
  for (std::size_t m = 0; m < b.variants.size(); ++m) {
    const auto path = "variants[" + std::to_string(m) + "]";
    const auto& v = b.variants[m];
    if (v.mask != m) violation(path + ".mask", "mask does not match position");
    if (v.story.scenes.size() != b.initial.scenes.size()) violation(path + ".story.scenes", "wrong scene count");
    for (std::size_t s = 0; s < v.story.scenes.size(); ++s) {
      if (text::trim_view(v.story.scenes[s]).empty()) {
        violation(path + ".story.scenes[" + std::to_string(s) + "]", "empty scene");
      }
    }
    if (v.story.provenance != set_bit_ids(static_cast<std::uint32_t>(m), b.accepted)) {
      violation(path + ".story.provenance", "does not match the mask");
    }
    if (v.trail.size() != v.story.scenes.size()) violation(path + ".trail", "one entry per scene");
    for (std::size_t s = 0; s < v.trail.size(); ++s) {
      const auto& t = v.trail[s];
      const auto tpath = path + ".trail[" + std::to_string(s) + "]";
      if (t.words != text::word_count(v.story.scenes[s])) violation(tpath, "word count does not match the scene");
      if (static_cast<double>(t.words) > b.config.length_cap * static_cast<double>(t.base_words)) {
        violation(tpath, "edit exceeds the length cap");
      }
    }
  }
  if (!b.variants.empty() && b.variants[0].story != b.initial) violation("variants[0]", "mask 0 must be the initial story");
}

nlohmann::json to_json(const StoryBundle& b) {
  nlohmann::json suggestions = nlohmann::json::array();
  for (const auto& s : b.suggestions) suggestions.push_back(record_json(s));
  nlohmann::json accepted = nlohmann::json::array();
  for (const auto& s : b.accepted) accepted.push_back(record_json(s));
  nlohmann::json variants = nlohmann::json::array();
  for (const auto& v : b.variants) {
    nlohmann::json trail = nlohmann::json::array();
    for (const auto& t : v.trail) trail.push_back({{"base_words", t.base_words}, {"words", t.words}, {"edited", t.edited}});
    variants.push_back({{"mask", v.mask}, {"parent", v.parent}, {"story", v.story.to_json()}, {"trail", trail}});
  }
  return {{"kind", "story"},
          {"schema_version", 1},
          {"prompt", b.prompt},
          {"config", b.config.to_json()},
          {"initial", b.initial.to_json()},
          {"suggestions", suggestions},
          {"accepted", accepted},
          {"variants", variants},
          {"provenance", b.provenance}};
}

StoryBundle story_bundle_from_json(const nlohmann::json& j) {
  if (!j.is_object()) violation("$", "expected an object");
  if (j.value("kind", std::string{}) != "story") violation("kind", "expected \"story\"");
  if (j.value("schema_version", 0) != 1) violation("schema_version", "unsupported version");
  StoryBundle b;
  try {
    b.prompt = j.at("prompt").get<std::string>();
    b.config = MnConfig::from_json(j.value("config", nlohmann::json::object()));
    b.initial = Story::from_json(j.at("initial"));
    for (const auto& s : j.value("suggestions", nlohmann::json::array())) b.suggestions.push_back(record_from_json(s));
    for (const auto& s : j.at("accepted")) b.accepted.push_back(record_from_json(s));
    for (const auto& v : j.at("variants")) {
      StoryVariant var;
      var.mask = v.at("mask").get<std::uint32_t>();
      var.parent = v.value("parent", -1LL);
      var.story = Story::from_json(v.at("story"));
      for (const auto& t : v.at("trail")) {
        var.trail.push_back({t.at("base_words").get<std::size_t>(), t.at("words").get<std::size_t>(),
                             t.at("edited").get<bool>()});
      }
      b.variants.push_back(std::move(var));
    }
  } catch (const nlohmann::json::exception& e) {
    violation("$", e.what());
  } catch (const SchemaViolation&) {
    throw;
  } catch (const Error& e) {
    violation("config", e.detail());
  }
  b.provenance = j.value("provenance", nlohmann::json::object());
  check_bundle(b);
  return b;
}

engine::WorkflowGraph mnovel_graph(const MnConfig& config) {
  using engine::ArchitectureTag;
  using engine::SubtaskKind;
  const auto redundant = [](int n) { return n > 1 ? ArchitectureTag::RedundantParallel : ArchitectureTag::Sequential; };
  engine::WorkflowGraph g;
  g.nodes = {
      {"init", SubtaskKind::Generate, std::string(tmpl::kMnInit), 1, ArchitectureTag::Sequential, false},
      {"summarize", SubtaskKind::Generate, std::string(tmpl::kMnSummarize), 1, ArchitectureTag::Sequential, false},
      {"suggest", SubtaskKind::Generate, std::string(tmpl::kMnSuggest), config.suggestion_replicates,
       redundant(config.suggestion_replicates), true},
      {std::string(tmpl::kMnCheckOverlap), SubtaskKind::Evaluate, std::string(tmpl::kMnCheckOverlap), 1,
       ArchitectureTag::Sequential, false},
      {std::string(tmpl::kMnCheckImplemented), SubtaskKind::Evaluate, std::string(tmpl::kMnCheckImplemented), 1,
       ArchitectureTag::Sequential, false},
      {std::string(tmpl::kMnCheckWording), SubtaskKind::Evaluate, std::string(tmpl::kMnCheckWording), 1,
       ArchitectureTag::Sequential, false},
      {"suggest.vote", SubtaskKind::Evaluate, std::string(tmpl::kMnSuggestVote), config.vote_voters,
       redundant(config.vote_voters), false},
      {"edit", SubtaskKind::Improve, std::string(tmpl::kMnEdit), config.edit_replicates,
       config.edit_replicates > 1 ? ArchitectureTag::RedundantIterative : ArchitectureTag::Dynamic, true},
      {"edit.vote", SubtaskKind::Evaluate, std::string(tmpl::kMnEditVote), config.vote_voters,
       redundant(config.vote_voters), false},
  };
  g.edges = {{"init", "summarize"},
             {"summarize", "suggest"},
             {"suggest", std::string(tmpl::kMnCheckOverlap)},
             {std::string(tmpl::kMnCheckOverlap), std::string(tmpl::kMnCheckImplemented)},
             {std::string(tmpl::kMnCheckImplemented), std::string(tmpl::kMnCheckWording)},
             {std::string(tmpl::kMnCheckWording), "suggest.vote"},
             {"suggest.vote", "edit"},
             {"edit", "edit.vote"}};
  g.entry = "init";
  g.exit = "edit.vote";
  return g;
}

StoryBundle run_mnovel(std::string_view prompt, const MnConfig& config, engine::Engine& engine) {
  config.check();
  engine::check_templates(mnovel_graph(config), engine.templates());
  StoryBundle bundle;
  bundle.prompt = std::string(prompt);
  bundle.config = config;
  bundle.initial = init_story(prompt, config, engine);

  Story current = bundle.initial;
  std::vector<std::string> prior;
  std::map<std::uint32_t, Revision> known;
  nlohmann::json rounds = nlohmann::json::array();
  for (int r = 0; r < config.rounds; ++r) {
    const auto summary = summarize(current, engine);
    auto reflected = reflect_round(current, summary, prior, r, config, engine);
    bundle.suggestions.insert(bundle.suggestions.end(), reflected.candidates.begin(), reflected.candidates.end());
    rounds.push_back({{"round", r}, {"summary", summary}, {"accepted", reflected.accepted.has_value()}});
    if (!reflected.accepted) continue;
    prior.push_back(reflected.accepted->text);
    bundle.accepted.push_back(*reflected.accepted);
    auto rev = revise_with(current, *reflected.accepted, config, engine, summary);
    current = rev.story;
    known.emplace((1u << bundle.accepted.size()) - 1, std::move(rev));
  }
  bundle.variants = build_variant_matrix(bundle.initial, bundle.accepted, config, engine, known);
  bundle.provenance = {{"rounds", rounds}};
  check_bundle(bundle);
  return bundle;
}

}  // namespace chainflow::mnovel
