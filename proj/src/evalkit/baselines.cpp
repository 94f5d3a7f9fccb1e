#include "chainflow/evalkit/baselines.hpp"

#include <set>

#include "chainflow/error.hpp"
#include "chainflow/evalkit/metrics.hpp"
#include "chainflow/evalkit/outline.hpp"
#include "chainflow/template_ids.hpp"
#include "chainflow/text.hpp"

namespace chainflow::evalkit {

namespace {

std::string_view shortened_text(BaselineKind kind, std::string_view output) {
  if (kind != BaselineKind::ZeroShotFfv) return output;
  // Everything after the last "FINAL" marker line, when present.
  std::size_t pos = 0;
  std::optional<std::size_t> after;
  while (pos <= output.size()) {
    const auto nl = output.find('\n', pos);
    const auto line = text::trim_view(output.substr(pos, nl == std::string_view::npos ? output.npos : nl - pos));
    if (text::to_lower(line).starts_with("final")) {
      auto rest = line.substr(5);
      if (rest.starts_with(':')) rest.remove_prefix(1);
      const auto tail_start = nl == std::string_view::npos ? output.size() : nl + 1;
      after = text::trim_view(rest).empty() ? tail_start : static_cast<std::size_t>(rest.data() - output.data());
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return after ? output.substr(*after) : output;
}

std::optional<double> target_of(const nlohmann::json& inputs) {
  if (const auto it = inputs.find("target"); it != inputs.end() && it->is_number()) return it->get<double>();
  return std::nullopt;
}

}  // namespace

std::string_view to_string(TaskKind kind) noexcept {
  switch (kind) {
    case TaskKind::Taxonomy: return "taxonomy";
    case TaskKind::Shorten: return "shorten";
    case TaskKind::Story: return "story";
  }
  return "taxonomy";
}

std::string_view to_string(BaselineKind kind) noexcept {
  switch (kind) {
    case BaselineKind::ZeroShot: return "zero-shot";
    case BaselineKind::ZeroShotTarget: return "zero-shot-target";
    case BaselineKind::ZeroShotFfv: return "zero-shot-ffv";
    case BaselineKind::ZeroShotCombo: return "zero-shot-combo";
  }
  return "zero-shot";
}

TaskKind parse_task_kind(std::string_view s) {
  for (auto k : {TaskKind::Taxonomy, TaskKind::Shorten, TaskKind::Story}) {
    if (to_string(k) == s) return k;
  }
  throw Error("InvalidTask", "unknown task '" + std::string(s) + "'");
}

BaselineKind parse_baseline_kind(std::string_view s) {
  for (auto k : {BaselineKind::ZeroShot, BaselineKind::ZeroShotTarget, BaselineKind::ZeroShotFfv,
                 BaselineKind::ZeroShotCombo}) {
    if (to_string(k) == s) return k;
  }
  throw Error("InvalidBaseline", "unknown baseline '" + std::string(s) + "'");
}

std::string_view baseline_template(TaskKind task, BaselineKind kind) {
  using namespace chainflow::tmpl;
  switch (task) {
    case TaskKind::Taxonomy:
      if (kind == BaselineKind::ZeroShot) return kBaselineTaxonomyZeroShot;
      if (kind == BaselineKind::ZeroShotTarget) return kBaselineTaxonomyTarget;
      break;
    case TaskKind::Shorten:
      if (kind == BaselineKind::ZeroShot) return kBaselineShortenZeroShot;
      if (kind == BaselineKind::ZeroShotTarget) return kBaselineShortenTarget;
      if (kind == BaselineKind::ZeroShotFfv) return kBaselineShortenFfv;
      break;
    case TaskKind::Story:
      if (kind == BaselineKind::ZeroShot) return kBaselineStoryZeroShot;
      if (kind == BaselineKind::ZeroShotCombo) return kBaselineStoryCombo;
      break;
  }
  throw Error("InvalidPairing",
              std::string(to_string(kind)) + " is not a baseline for the " + std::string(to_string(task)) + " task");
}

BaselineRun run_baseline(TaskKind task, BaselineKind kind, const nlohmann::json& inputs, actors::Actor& actor,
                         const actors::TemplateRegistry& templates, engine::EngineOptions options) {
  const auto template_id = baseline_template(task, kind);
  const auto require = [&](const char* field) {
    if (!inputs.contains(field)) throw Error("MissingInput", std::string("baseline input needs '") + field + "'");
  };
  nlohmann::json vars = nlohmann::json::object();
  switch (task) {
    case TaskKind::Taxonomy:
      require("items");
      vars["items"] = inputs["items"];
      break;
    case TaskKind::Shorten:
      require("text");
      vars["text"] = inputs["text"];
      break;
    case TaskKind::Story:
      require("prompt");
      vars["prompt"] = inputs["prompt"];
      vars["delimiter"] = tmpl::kSceneDelimiter;
      break;
  }
  if (kind == BaselineKind::ZeroShotTarget) {
    require("target");
    vars["target"] = inputs["target"];
  }
  options.max_attempts = 1;
  engine::Engine engine(actor, templates, options);
  BaselineRun run;
  run.text = engine.call("baseline", template_id, std::move(vars));
  run.ledger = engine.ledger();
  return run;
}

nlohmann::json score_baseline(TaskKind task, BaselineKind kind, const nlohmann::json& inputs,
                              std::string_view output) {
  baseline_template(task, kind);
  nlohmann::json report = {{"task", to_string(task)}, {"baseline", to_string(kind)}};
  const auto target = target_of(inputs);
  switch (task) {
    case TaskKind::Taxonomy: {
      const auto parsed = parse_outline(output);
      const auto input_items = inputs.value("items", std::vector<std::string>{});
      const auto diff = item_diff(input_items, parsed.all_items());
      report["category_count"] = parsed.category_count();
      report["hallucinated"] = diff.hallucinated;
      report["forgotten"] = diff.forgotten;
      report["leftover_lines"] = parsed.leftovers.size();
      report["outline"] = parsed.to_json();
      if (target) report["percent_error"] = percent_error(static_cast<double>(parsed.category_count()), *target);
      break;
    }
    case TaskKind::Shorten: {
      const auto words = text::word_count(shortened_text(kind, output));
      report["words"] = words;
      if (inputs.contains("text")) report["original_words"] = text::word_count(inputs["text"].get<std::string>());
      if (target) report["percent_error"] = percent_error(static_cast<double>(words), *target);
      break;
    }
    case TaskKind::Story: {
      std::set<std::string> distinct;
      std::string current;
      const auto flush = [&] {
        const auto t = text::trim(current);
        if (!t.empty()) distinct.insert(t);
        current.clear();
      };
      for (const auto& line : text::split_lines(output)) {
        if (text::trim_view(line) == tmpl::kSceneDelimiter) {
          flush();
        } else {
          current += line;
          current += '\n';
        }
      }
      flush();
      report["variants"] = distinct.size();
      report["words"] = text::word_count(output);
      break;
    }
  }
  return report;
}

}  // namespace chainflow::evalkit
