#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "chainflow/actors/actor.hpp"
#include "chainflow/actors/templates.hpp"
#include "chainflow/engine/engine.hpp"
#include "chainflow/engine/ledger.hpp"

namespace chainflow::evalkit {

enum class TaskKind { Taxonomy, Shorten, Story };
enum class BaselineKind { ZeroShot, ZeroShotTarget, ZeroShotFfv, ZeroShotCombo };

std::string_view to_string(TaskKind kind) noexcept;
std::string_view to_string(BaselineKind kind) noexcept;
/// "taxonomy" / "shorten" / "story". Throws Error("InvalidTask").
TaskKind parse_task_kind(std::string_view s);
/// "zero-shot", "zero-shot-target", "zero-shot-ffv", "zero-shot-combo". Throws Error("InvalidBaseline").
BaselineKind parse_baseline_kind(std::string_view s);

/// Template id for a task/baseline pairing. Throws Error("InvalidPairing").
std::string_view baseline_template(TaskKind task, BaselineKind kind);

struct BaselineRun {
  std::string text;
  engine::RunLedger ledger;
};

/// Exactly one actor call, never retried. Inputs by task:
/// taxonomy {"items": [...], "target"?}, shorten {"text", "target"?}, story {"prompt"}.
/// Targets are required for ZeroShotTarget. Throws Error("MissingInput").
BaselineRun run_baseline(TaskKind task, BaselineKind kind, const nlohmann::json& inputs, actors::Actor& actor,
                         const actors::TemplateRegistry& templates, engine::EngineOptions options = {});

/// Task-specific scoring of a baseline output: outline parse and item diff
/// for taxonomies, word counts for shortening, distinct versions for stories.
/// percent_error is included whenever the inputs carry a target.
nlohmann::json score_baseline(TaskKind task, BaselineKind kind, const nlohmann::json& inputs, std::string_view output);

}  // namespace chainflow::evalkit
