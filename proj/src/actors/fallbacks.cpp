#include <array>
#include <set>
#include <sstream>

#include "chainflow/actors/scripted.hpp"
#include "chainflow/engine/vote.hpp"
#include "chainflow/template_ids.hpp"
#include "chainflow/text.hpp"

// Seeded stand-ins for every reference template. Each output follows the
// consuming step's answer protocol; a small share of outputs is deliberately
// invalid so that validators and retries get exercised.

namespace chainflow::actors {

namespace {

constexpr std::array<std::string_view, 12> kCategories{
    "animals", "vehicles", "furniture",   "food",        "tools",     "plants",
    "places",  "clothing", "instruments", "electronics", "sports gear", "household items"};

constexpr std::array<std::string_view, 20> kSuggestions{
    "Give the main character a clear reason to leave home.",
    "Introduce a rival who wants the same thing as the hero.",
    "Add a moment where the plan fails and the hero must improvise.",
    "Show the setting through the senses of the main character.",
    "Let a minor character reveal an unexpected secret.",
    "Raise the stakes by adding a deadline.",
    "End the story with a quiet moment of reflection.",
    "Make the weather play a role in the turning point.",
    "Give the hero a small flaw that matters later.",
    "Open with action instead of description.",
    "Add a line of dialogue that shows the hero's humor.",
    "Plant an object early that becomes important at the end.",
    "Let the hero ask a stranger for help.",
    "Show what the hero loses by succeeding.",
    "Describe the city in the sky through a child's eyes.",
    "Have the hero write a letter home.",
    "Add a storm that forces a detour.",
    "Make the ending more hopeful.",
    "Give the antagonist a sympathetic motive.",
    "Cut the opening scene down to its strongest image."};

constexpr std::array<std::string_view, 16> kSubjects{"The girl", "Her brother", "The old pilot", "A stranger",
                                                     "The mayor", "The crowd",   "The balloon",   "A gull",
                                                     "The wind",  "Her mother",  "The captain",   "A child",
                                                     "The guard", "The baker",   "The clock",     "The storm"};
constexpr std::array<std::string_view, 16> kVerbs{"watched", "followed", "carried", "lifted", "called", "found",
                                                  "crossed", "opened",   "climbed", "greeted", "missed", "heard",
                                                  "fixed",   "painted",  "pulled",  "guarded"};
constexpr std::array<std::string_view, 16> kObjects{
    "the silver rope",   "a folded map",      "the quiet harbor",  "the cloud gate",   "a basket of apples",
    "the long bridge",   "the bright lantern", "a broken compass",  "the market square", "the tower bell",
    "an empty bench",    "the narrow stairs",  "a stack of letters", "the garden wall",  "the last train",
    "the painted door"};
constexpr std::array<std::string_view, 8> kTails{"before dawn",     "with great care", "in the cold wind",
                                                 "without a word",  "for a long time", "near the edge",
                                                 "as the sun rose", "once again"};

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

template <class Rng>
std::size_t pick(Rng& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

template <class Rng>
bool chance(Rng& rng, double p) {
  return static_cast<double>(rng() % 10000) < p * 10000.0;
}

std::string var(const ActorRequest& r, const char* name) {
  const auto it = r.vars.find(name);
  if (it == r.vars.end()) return {};
  if (it->is_string()) return it->get<std::string>();
  if (it->is_array()) {
    std::vector<std::string> parts;
    for (const auto& e : *it) parts.push_back(e.is_string() ? e.get<std::string>() : e.dump());
    return text::join(parts, "\n");
  }
  return it->dump();
}

std::size_t option_count(const ActorRequest& r) {
  const auto it = r.vars.find("option_count");
  if (it != r.vars.end() && it->is_number_integer()) return std::max<std::size_t>(1, it->get<std::size_t>());
  return 1;
}

template <class Rng>
std::string sentence(Rng& rng) {
  std::string s(kSubjects[pick(rng, kSubjects.size())]);
  s += ' ';
  s += kVerbs[pick(rng, kVerbs.size())];
  s += ' ';
  s += kObjects[pick(rng, kObjects.size())];
  if (chance(rng, 0.5)) {
    s += ' ';
    s += kTails[pick(rng, kTails.size())];
  }
  return s + ".";
}

std::string primary_category(std::string_view item) { return std::string(kCategories[fnv1a(text::fold(item)) % kCategories.size()]); }

std::string generate_category(const ActorRequest& r, std::mt19937_64& rng) {
  const auto item = var(r, "item");
  if (chance(rng, 0.1)) {
    return std::string(kCategories[pick(rng, kCategories.size())]) + " and " +
           std::string(kCategories[pick(rng, kCategories.size())]);
  }
  if (chance(rng, 0.6)) return primary_category(item);
  return std::string(kCategories[pick(rng, kCategories.size())]);
}

std::string membership(const ActorRequest& r, std::mt19937_64& rng) {
  const auto item = var(r, "item");
  const auto category = var(r, "category");
  if (text::fold(category) == primary_category(item)) return chance(rng, 0.95) ? "YES" : "NO";
  return chance(rng, 0.15) ? "YES" : "NO";
}

std::string numbered_choice(const ActorRequest& r, std::mt19937_64& rng) {
  return std::to_string(pick(rng, option_count(r)) + 1);
}

std::string find_phrases(const ActorRequest& r, std::mt19937_64& rng) {
  const auto chunk = var(r, "chunk");
  const auto words = text::split_words(chunk);
  if (words.empty()) return "nothing";
  // Candidate regions depend on the chunk only, so replicates tend to agree.
  std::mt19937_64 shared(fnv1a(chunk));
  std::vector<std::pair<std::size_t, std::size_t>> regions;
  const std::size_t count = 2 + pick(shared, 3);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t len = 1 + pick(shared, std::min<std::size_t>(4, words.size()));
    const std::size_t start = pick(shared, words.size() - std::min(len, words.size()) + 1);
    regions.emplace_back(start, std::min(words.size(), start + len));
  }
  std::vector<std::string> lines;
  for (const auto& [a, b] : regions) {
    if (!chance(rng, 0.6)) continue;
    const auto* first = words[a].data();
    const auto* last = words[b - 1].data() + words[b - 1].size();
    lines.emplace_back(first, static_cast<std::size_t>(last - first));
  }
  if (chance(rng, 0.1)) lines.emplace_back("a phrase that is not in the passage");
  if (lines.empty()) lines.emplace_back(words[pick(rng, words.size())]);
  return text::join(lines, "\n");
}

template <class Rng>
std::string drop_words(std::string_view passage, Rng& rng, double share) {
  const auto words = text::split_words(passage);
  std::vector<std::string> kept;
  for (const auto& w : words) {
    if (w.find('"') == std::string_view::npos && chance(rng, share)) continue;
    kept.emplace_back(w);
  }
  if (kept.size() == words.size() && !kept.empty()) kept.erase(kept.begin() + static_cast<long>(pick(rng, kept.size())));
  return text::join(kept, " ");
}

std::string fix_edit(const ActorRequest& r, std::mt19937_64& rng) {
  const auto phrase = var(r, "phrase");
  if (chance(rng, 0.1)) return phrase + " indeed";
  auto out = drop_words(phrase, rng, 0.3);
  return out.empty() ? std::string("so") : out;
}

std::string fix_merge(const ActorRequest& r, std::mt19937_64& rng) {
  auto out = drop_words(var(r, "passage"), rng, 0.25);
  return out.empty() ? std::string("It ended.") : out;
}

std::string fix_delete(const ActorRequest&, std::mt19937_64& rng) { return chance(rng, 0.5) ? "DELETE" : "KEEP"; }

std::string verify(const ActorRequest&, std::mt19937_64& rng) { return chance(rng, 0.75) ? "KEEP" : "REJECT"; }

std::string story_init(const ActorRequest& r, std::mt19937_64& rng) {
  int scenes = 4;
  if (const auto it = r.vars.find("scene_count"); it != r.vars.end() && it->is_number_integer()) scenes = it->get<int>();
  std::vector<std::string> out;
  for (int s = 0; s < scenes; ++s) {
    std::vector<std::string> sentences;
    const std::size_t n = 3 + pick(rng, 3);
    for (std::size_t k = 0; k < n; ++k) sentences.push_back(sentence(rng));
    out.push_back(text::join(sentences, " "));
  }
  return text::join(out, "\n" + std::string(tmpl::kSceneDelimiter) + "\n");
}

std::string story_summary(const ActorRequest& r, std::mt19937_64&) {
  std::vector<std::string> parts;
  for (const auto& line : text::split_lines(var(r, "story"))) {
    const auto t = text::trim_view(line);
    if (t.empty() || t == tmpl::kSceneDelimiter) continue;
    const auto first = t.find('.');
    const auto last = t.rfind(". ");
    parts.emplace_back(t.substr(0, first == t.npos ? t.size() : first + 1));
    if (last != t.npos && last != first) parts.emplace_back(t.substr(last + 2));
  }
  return parts.empty() ? std::string("A short story.") : text::join(parts, " ");
}

std::string suggest(const ActorRequest&, std::mt19937_64& rng) {
  if (chance(rng, 0.1)) return "Generic recommendation to add detail.";
  return std::string(kSuggestions[pick(rng, kSuggestions.size())]);
}

std::string pass_fail(const ActorRequest&, std::mt19937_64& rng) { return chance(rng, 0.85) ? "PASS" : "FAIL"; }

std::string edit_scene(const ActorRequest& r, std::mt19937_64& rng) {
  const auto scene = var(r, "scene");
  if (chance(rng, 0.15)) return scene + " " + scene;
  std::string added = sentence(rng);
  return scene + " " + added;
}

std::string taxonomy_outline(const ActorRequest& r, std::mt19937_64& rng) {
  std::vector<std::string> items;
  if (const auto it = r.vars.find("items"); it != r.vars.end() && it->is_array()) {
    for (const auto& e : *it) items.push_back(e.get<std::string>());
  }
  std::map<std::string, std::vector<std::string>> groups;
  for (const auto& item : items) {
    if (chance(rng, 0.05)) continue;
    groups[primary_category(item)].push_back(item);
  }
  if (chance(rng, 0.3)) groups[std::string(kCategories[pick(rng, kCategories.size())])].push_back("mystery object");
  std::ostringstream out;
  out << "Here is a taxonomy of the items:\n";
  for (const auto& [cat, members] : groups) {
    out << "- " << cat << "\n";
    for (const auto& m : members) out << "  - " << m << "\n";
  }
  return out.str();
}

std::string shorten_text(const ActorRequest& r, std::mt19937_64& rng) {
  const auto original = var(r, "text");
  return drop_words(original, rng, 0.35);
}

std::string shorten_ffv(const ActorRequest& r, std::mt19937_64& rng) {
  return "Find: wordy phrases.\nFix: shorter rewrites.\nVerify: kept the grammatical ones.\nFINAL\n" +
         shorten_text(r, rng);
}

std::string story_zero_shot(const ActorRequest& r, std::mt19937_64& rng) {
  ActorRequest scenes = r;
  scenes.vars["scene_count"] = 4;
  return story_init(scenes, rng);
}

std::string story_combo(const ActorRequest&, std::mt19937_64& rng) {
  std::vector<std::string> versions;
  const std::size_t n = 2 + pick(rng, 6);
  for (std::size_t v = 0; v < n; ++v) {
    versions.push_back("VERSION: " + std::to_string(v + 1) + "\n" + sentence(rng) + " " + sentence(rng));
  }
  return text::join(versions, "\n" + std::string(tmpl::kSceneDelimiter) + "\n");
}

}  // namespace

void install_default_generators(ScriptBook& book) {
  using namespace chainflow::tmpl;
  book.set_generator(std::string(kCascadeGenerate), generate_category);
  book.set_generator(std::string(kCascadeSelect), numbered_choice);
  book.set_generator(std::string(kCascadeMember), membership);
  book.set_generator(std::string(kSoylentFind), find_phrases);
  book.set_generator(std::string(kSoylentEdit), fix_edit);
  book.set_generator(std::string(kSoylentMerge), fix_merge);
  book.set_generator(std::string(kSoylentDelete), fix_delete);
  book.set_generator(std::string(kSoylentVerify), verify);
  book.set_generator(std::string(kMnInit), story_init);
  book.set_generator(std::string(kMnSummarize), story_summary);
  book.set_generator(std::string(kMnSuggest), suggest);
  book.set_generator(std::string(kMnCheckOverlap), pass_fail);
  book.set_generator(std::string(kMnCheckImplemented), pass_fail);
  book.set_generator(std::string(kMnCheckWording), pass_fail);
  book.set_generator(std::string(kMnSuggestVote), numbered_choice);
  book.set_generator(std::string(kMnEdit), edit_scene);
  book.set_generator(std::string(kMnEditVote), numbered_choice);
  book.set_generator(std::string(kBaselineTaxonomyZeroShot), taxonomy_outline);
  book.set_generator(std::string(kBaselineTaxonomyTarget), taxonomy_outline);
  book.set_generator(std::string(kBaselineShortenZeroShot), shorten_text);
  book.set_generator(std::string(kBaselineShortenTarget), shorten_text);
  book.set_generator(std::string(kBaselineShortenFfv), shorten_ffv);
  book.set_generator(std::string(kBaselineStoryZeroShot), story_zero_shot);
  book.set_generator(std::string(kBaselineStoryCombo), story_combo);
  book.set_generator("echo", [](const ActorRequest& r, std::mt19937_64&) { return r.rendered_prompt; });
}

}  // namespace chainflow::actors
