#include "chainflow/actors/templates.hpp"

#include "chainflow/error.hpp"
#include "chainflow/template_ids.hpp"
#include "chainflow/text.hpp"

namespace chainflow::actors {
namespace {

const nlohmann::json* lookup(const nlohmann::json& vars, std::string_view path) {
  const nlohmann::json* cur = &vars;
  while (!path.empty()) {
    auto dot = path.find('.');
    auto key = path.substr(0, dot);
    if (!cur->is_object()) return nullptr;
    auto it = cur->find(std::string(key));
    if (it == cur->end()) return nullptr;
    cur = &*it;
    path = dot == std::string_view::npos ? std::string_view{} : path.substr(dot + 1);
  }
  return cur;
}

std::string stringify(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out.push_back('\n');
      out += stringify(v[i]);
    }
    return out;
  }
  return v.dump();
}

}  // namespace

std::string render_template(std::string_view tmpl, const nlohmann::json& vars) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    auto open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      break;
    }
    auto close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      break;
    }
    out.append(tmpl.substr(pos, open - pos));
    auto name = text::trim_view(tmpl.substr(open + 2, close - open - 2));
    const auto* value = lookup(vars, name);
    if (value == nullptr) throw Error("MissingTemplateVar", "no value for '" + std::string(name) + "'");
    out += stringify(*value);
    pos = close + 2;
  }
  return out;
}

void TemplateRegistry::add(std::string id, std::vector<std::string> variants) {
  if (variants.empty()) throw Error("InvalidTemplate", "template '" + id + "' has no variants");
  templates_[std::move(id)] = std::move(variants);
}

bool TemplateRegistry::contains(std::string_view id) const noexcept { return templates_.find(id) != templates_.end(); }

std::size_t TemplateRegistry::variant_count(std::string_view id) const noexcept {
  auto it = templates_.find(id);
  return it == templates_.end() ? 0 : it->second.size();
}

std::vector<std::string> TemplateRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& [id, _] : templates_) out.push_back(id);
  return out;
}

std::string TemplateRegistry::render(std::string_view id, int replicate, const nlohmann::json& vars) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) throw Error("UnknownTemplate", "template '" + std::string(id) + "' not registered");
  const auto& variants = it->second;
  return render_template(variants[static_cast<std::size_t>(replicate) % variants.size()], vars);
}

void TemplateRegistry::merge(const TemplateRegistry& other) {
  for (const auto& [id, variants] : other.templates_) templates_[id] = variants;
}

nlohmann::json TemplateRegistry::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [id, variants] : templates_) j[id] = variants;
  return {{"version", 1}, {"templates", j}};
}

TemplateRegistry TemplateRegistry::from_json(const nlohmann::json& j) {
  TemplateRegistry reg;
  try {
    for (const auto& [id, variants] : j.at("templates").items()) {
      if (variants.is_string()) {
        reg.add(id, {variants.get<std::string>()});
      } else {
        reg.add(id, variants.get<std::vector<std::string>>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("InvalidTemplate", e.what());
  }
  return reg;
}

TemplateRegistry TemplateRegistry::defaults() {
  using namespace chainflow::tmpl;
  TemplateRegistry r;

  r.add(std::string(kCascadeGenerate),
        {"Suggest one category that the item \"{{item}}\" belongs to. Reply with the category name only.",
         "What kind of thing is \"{{item}}\"? Give a short, specific category label and nothing else.",
         "Name a group that would contain \"{{item}}\" along with similar items. Answer with the group "
         "name only.",
         "If you were sorting a list that includes \"{{item}}\", what heading would you file it under? "
         "Reply with the heading only."});
  r.add(std::string(kCascadeSelect),
        {"Which of these categories best describes \"{{item}}\"?\n{{options}}\nReply with the number of the "
         "best option (1-{{option_count}})."});
  r.add(std::string(kCascadeMember),
        {"Does the item \"{{item}}\" belong in the category \"{{category}}\"? Answer YES or NO."});

  r.add(std::string(kSoylentFind),
        {"Here is a passage:\n\n{{chunk}}\n\nCopy, word for word, up to three phrases from the passage that "
         "could be shortened or removed without losing meaning. One phrase per line, nothing else.",
         "Find wordy or redundant phrases in the text below. Quote each phrase exactly as it appears, one "
         "per line.\n\n{{chunk}}",
         "Read this text and list the exact phrases that are unnecessary or could be said more briefly. "
         "Output only the phrases, one per line, copied verbatim.\n\n{{chunk}}"});
  r.add(std::string(kSoylentEdit),
        {"Passage:\n{{chunk}}\n\nRewrite the phrase \"{{phrase}}\" so that it uses fewer words and still "
         "fits the passage. Reply with the rewritten phrase only."});
  r.add(std::string(kSoylentMerge),
        {"Passage:\n{{chunk}}\n\nMerge the following sentences into a single shorter sentence with the same "
         "meaning. Keep any quoted text exactly as it is. Reply with the merged sentence only.\n\n{{passage}}"});
  r.add(std::string(kSoylentDelete),
        {"Passage:\n{{chunk}}\n\nCan the phrase \"{{phrase}}\" be deleted entirely without hurting grammar or "
         "meaning? Answer DELETE or KEEP."});
  r.add(std::string(kSoylentVerify),
        {"Original passage:\n{{before}}\n\nEdited passage:\n{{after}}\n\nThe edit replaced \"{{original}}\" "
         "with \"{{edited}}\". Is the edited passage grammatical, with the same meaning? Answer KEEP if so, "
         "REJECT otherwise."});

  r.add(std::string(kMnInit),
        {"Write a short story in exactly {{scene_count}} scenes based on this prompt:\n\n{{prompt}}\n\nSeparate "
         "consecutive scenes with a line containing only {{delimiter}}. Do not number the scenes."});
  r.add(std::string(kMnSummarize), {"Summarize this story in a few sentences:\n\n{{story}}"});
  r.add(std::string(kMnSuggest),
        {"Story summary:\n{{summary}}\n\nSuggest one specific change that would improve the story. Phrase it "
         "as a suggestion to the author in one sentence.",
         "Here is what happens in a story:\n{{summary}}\n\nWhat is one concrete revision that would make this "
         "story more engaging? Reply with a single-sentence suggestion.",
         "As an editor reading this summary:\n{{summary}}\n\nGive the writer one actionable suggestion for the "
         "next draft, in one sentence."});
  r.add(std::string(kMnCheckOverlap),
        {"Earlier suggestions:\n{{prior}}\n\nNew suggestion: {{candidate}}\n\nDoes the new suggestion overlap "
         "with any earlier suggestion? Answer FAIL if it overlaps, PASS if it is distinct."});
  r.add(std::string(kMnCheckImplemented),
        {"Story:\n{{story}}\n\nSuggestion: {{candidate}}\n\nHas this suggestion already been implemented in "
         "the story? Answer FAIL if it has, PASS if not."});
  r.add(std::string(kMnCheckWording),
        {"Text: {{candidate}}\n\nIs this text worded as a suggestion to an author, rather than as new story "
         "text? Answer PASS if it is a suggestion, FAIL otherwise."});
  r.add(std::string(kMnSuggestVote),
        {"Story summary:\n{{summary}}\n\nWhich suggestion would improve the story most?\n{{options}}\nReply with "
         "the number of the best option (1-{{option_count}})."});
  r.add(std::string(kMnEdit),
        {"Story summary:\n{{summary}}\n\nSuggestion: {{suggestion}}\n\nRevise the scene below to carry out the "
         "suggestion where it fits. Reply with the revised scene only.\n\n{{scene}}",
         "Apply this change to the scene if relevant: {{suggestion}}\nContext: {{summary}}\n\nScene:\n{{scene}}"
         "\n\nReturn only the edited scene text.",
         "You are revising one scene of a story ({{summary}}). Incorporate the suggestion \"{{suggestion}}\" "
         "and keep the scene about the same length. Scene:\n{{scene}}\n\nRevised scene:"});
  r.add(std::string(kMnEditVote),
        {"Suggestion: {{suggestion}}\n\nWhich revised scene carries out the suggestion best?\n{{options}}\n"
         "Reply with the number of the best option (1-{{option_count}})."});

  r.add(std::string(kBaselineTaxonomyZeroShot),
        {"Organize the following items into a taxonomy. Output an indented outline of categories with the "
         "items under them.\n\n{{items}}"});
  r.add(std::string(kBaselineTaxonomyTarget),
        {"Organize the following items into a taxonomy with exactly {{target}} categories. Output an indented "
         "outline of categories with the items under them.\n\n{{items}}"});
  r.add(std::string(kBaselineShortenZeroShot), {"Shorten the following text:\n\n{{text}}"});
  r.add(std::string(kBaselineShortenTarget),
        {"Shorten the following text to {{target}} words:\n\n{{text}}"});
  r.add(std::string(kBaselineShortenFfv),
        {"Shorten the following text in three steps. Find: list phrases that could be shortened. Fix: "
         "propose a shorter rewrite for each. Verify: keep only rewrites that are grammatical and preserve "
         "meaning. Then output the final shortened text after a line reading FINAL.\n\n{{text}}"});
  r.add(std::string(kBaselineStoryZeroShot),
        {"Story prompt: {{prompt}}\n\nGenerate five suggestions for a story based on this prompt, then write one "
         "story that incorporates all five suggestions."});
  r.add(std::string(kBaselineStoryCombo),
        {"Story prompt: {{prompt}}\n\nGenerate five suggestions for a story based on this prompt, then write "
         "different versions of the story based on combinations of those suggestions. Start each version with "
         "a line of the form 'VERSION: <suggestion numbers>' and separate versions with a line containing only "
         "{{delimiter}}."});
  return r;
}

}  // namespace chainflow::actors
