#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chainflow/actors/actor.hpp"
#include "chainflow/actors/templates.hpp"
#include "chainflow/engine/graph.hpp"
#include "chainflow/engine/ledger.hpp"

namespace chainflow::engine {

struct EngineOptions {
  /// Maximum concurrent actor invocations.
  std::size_t parallelism = 4;
  /// Attempts per (node, instance, replicate) before ActorFailure.
  int max_attempts = 3;
  /// Base delay before retrying a retryable actor error; doubles per attempt.
  std::chrono::milliseconds backoff{0};
  actors::SamplingParams sampling;
};

/// Checks a response against the step's output protocol. Returns a reason when
/// malformed; a malformed response is retried like an actor failure.
using FormatCheck = std::function<std::optional<std::string>(std::string_view)>;

/// One actor invocation as scheduled by the engine. `vars` is the structured
/// record rendered into the prompt at the actor boundary.
struct Call {
  std::string node_id;
  std::string template_id;
  nlohmann::json vars = nlohmann::json::object();
  int instance = 0;
  int replicate = 0;
  FormatCheck check;
};

/// Fan-out unit: one record sent to `replicates` replicate calls.
struct Task {
  nlohmann::json vars = nlohmann::json::object();
  int replicates = 1;
  /// Overrides the fan-out's shared check for this task when set.
  FormatCheck check;
};

/// Raised once a call exhausts its attempts; carries the ledger as of the
/// failure. Code "FormatFailure" when the last attempt was malformed output,
/// otherwise "ActorFailure".
class ActorFailure : public Error {
 public:
  ActorFailure(std::string code, std::string node_id, int replicate, std::string detail, RunLedger partial)
      : Error(std::move(code), std::move(detail)),
        node_id_(std::move(node_id)),
        replicate_(replicate),
        partial_(std::move(partial)) {}

  const std::string& node_id() const noexcept { return node_id_; }
  int replicate() const noexcept { return replicate_; }
  const RunLedger& partial_ledger() const noexcept { return partial_; }

 private:
  std::string node_id_;
  int replicate_;
  RunLedger partial_;
};

/// Runs actor calls with bounded parallelism and records each attempt in a
/// RunLedger. Results are positionally ordered, so outputs do not depend on
/// the parallelism level or completion order.
///
/// Instance ordinals come from per-node counters advanced at submission time;
/// callers that submit from one orchestration thread get a deterministic
/// ledger.
class Engine {
 public:
  Engine(actors::Actor& actor, const actors::TemplateRegistry& templates, EngineOptions options = {});

  std::vector<std::string> run_batch(std::vector<Call> calls);

  /// result[t][r] is replicate r of task t.
  std::vector<std::vector<std::string>> fan_out(std::string_view node_id, std::string_view template_id,
                                                std::vector<Task> tasks, const FormatCheck& check = {});

  std::string call(std::string_view node_id, std::string_view template_id, nlohmann::json vars,
                   const FormatCheck& check = {});

  /// Reserves `count` consecutive instance ordinals for `node_id`.
  int reserve_instances(std::string_view node_id, int count);

  RunLedger ledger() const;
  const EngineOptions& options() const noexcept { return options_; }
  const actors::TemplateRegistry& templates() const noexcept { return templates_; }
  actors::Actor& actor() noexcept { return actor_; }

 private:
  struct Outcome;
  Outcome run_one(const Call& call);

  actors::Actor& actor_;
  const actors::TemplateRegistry& templates_;
  EngineOptions options_;
  mutable std::mutex mutex_;
  RunLedger ledger_;
  std::map<std::string, int, std::less<>> next_instance_;
};

/// Checks that every node's template exists and that nodes using prompt
/// variants have at least replicate_count variants. Throws GraphError.
void check_templates(const WorkflowGraph& graph, const actors::TemplateRegistry& templates);

struct ExecutionResult {
  /// node id -> one output per replicate.
  std::map<std::string, std::vector<std::string>> outputs;
  RunLedger ledger;
};

/// Executes a static graph. Each node receives the record
/// {"input": inputs, "node_id": id, "producers": {producer_id: output}} where
/// output is a string, or an array when the producer has several replicates.
/// Nodes of the same dependency level run concurrently.
ExecutionResult execute(const WorkflowGraph& graph, actors::Actor& actor, const actors::TemplateRegistry& templates,
                        const nlohmann::json& inputs, EngineOptions options = {});

}  // namespace chainflow::engine
