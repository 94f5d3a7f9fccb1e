#include "chainflow/engine/engine.hpp"

#include <atomic>
#include <exception>
#include <thread>

namespace chainflow::engine {

struct Engine::Outcome {
  std::string text;
  std::exception_ptr error;
};

Engine::Engine(actors::Actor& actor, const actors::TemplateRegistry& templates, EngineOptions options)
    : actor_(actor), templates_(templates), options_(std::move(options)) {
  if (options_.parallelism == 0) options_.parallelism = 1;
  if (options_.max_attempts < 1) options_.max_attempts = 1;
}

int Engine::reserve_instances(std::string_view node_id, int count) {
  std::lock_guard lock(mutex_);
  auto it = next_instance_.find(node_id);
  if (it == next_instance_.end()) it = next_instance_.emplace(std::string(node_id), 0).first;
  const int first = it->second;
  it->second += count;
  return first;
}

RunLedger Engine::ledger() const {
  std::lock_guard lock(mutex_);
  return ledger_;
}

Engine::Outcome Engine::run_one(const Call& call) {
  actors::ActorRequest request;
  request.template_id = call.template_id;
  request.vars = call.vars;
  request.params = options_.sampling;
  request.replicate_index = call.replicate;

  std::string last_code;
  std::string last_detail;
  for (int attempt = 0; attempt < options_.max_attempts; ++attempt) {
    LedgerEntry entry;
    entry.node_id = call.node_id;
    entry.instance = call.instance;
    entry.replicate_index = call.replicate;
    entry.attempt = attempt;
    entry.retry = attempt > 0;
    entry.template_id = call.template_id;
    entry.actor_name = actor_.name();
    entry.started_at = std::chrono::system_clock::now();
    const auto start = std::chrono::steady_clock::now();

    bool retryable = false;
    std::chrono::milliseconds wait{0};
    try {
      request.attempt = attempt;
      request.rendered_prompt = templates_.render(call.template_id, call.replicate, call.vars);
      entry.input_digest = actors::cache_key(request);
      auto response = actor_.invoke(request);
      entry.cache_hit = response.cache_hit;
      std::optional<std::string> malformed;
      if (call.check) malformed = call.check(response.text);
      entry.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (!malformed) {
        std::lock_guard lock(mutex_);
        ledger_.append(std::move(entry));
        return {std::move(response.text), nullptr};
      }
      entry.status = "format-error";
      entry.detail = *malformed;
      last_code = "FormatFailure";
      last_detail = *malformed;
      retryable = true;
    } catch (const actors::ActorError& e) {
      entry.status = "actor-error";
      entry.detail = e.what();
      last_code = "ActorFailure";
      last_detail = e.what();
      retryable = e.retryable();
      wait = std::max(e.retry_after(), options_.backoff * (1 << attempt));
    } catch (const Error& e) {
      // Rendering and request errors are deterministic; retrying cannot help.
      entry.status = "actor-error";
      entry.detail = e.what();
      last_code = "ActorFailure";
      last_detail = e.what();
    }
    entry.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    {
      std::lock_guard lock(mutex_);
      ledger_.append(std::move(entry));
    }
    if (!retryable) break;
    if (wait.count() > 0 && attempt + 1 < options_.max_attempts) std::this_thread::sleep_for(wait);
  }
  const std::string detail = "node '" + call.node_id + "' instance " + std::to_string(call.instance) +
                             " replicate " + std::to_string(call.replicate) + ": " + last_detail;
  return {{}, std::make_exception_ptr(ActorFailure(last_code, call.node_id, call.replicate, detail, ledger()))};
}

std::vector<std::string> Engine::run_batch(std::vector<Call> calls) {
  std::vector<Outcome> outcomes(calls.size());
  const std::size_t workers = std::min(options_.parallelism, calls.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < calls.size(); ++i) outcomes[i] = run_one(calls[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < calls.size(); i = next++) outcomes[i] = run_one(calls[i]);
      });
    }
  }
  std::vector<std::string> texts;
  texts.reserve(outcomes.size());
  for (auto& o : outcomes) {
    if (o.error) std::rethrow_exception(o.error);
    texts.push_back(std::move(o.text));
  }
  return texts;
}

std::vector<std::vector<std::string>> Engine::fan_out(std::string_view node_id, std::string_view template_id,
                                                      std::vector<Task> tasks, const FormatCheck& check) {
  const int first = reserve_instances(node_id, static_cast<int>(tasks.size()));
  std::vector<Call> calls;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    for (int r = 0; r < tasks[t].replicates; ++r) {
      calls.push_back(Call{std::string(node_id), std::string(template_id), tasks[t].vars,
                           first + static_cast<int>(t), r, tasks[t].check ? tasks[t].check : check});
    }
  }
  auto flat = run_batch(std::move(calls));
  std::vector<std::vector<std::string>> out(tasks.size());
  std::size_t k = 0;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    for (int r = 0; r < tasks[t].replicates; ++r) out[t].push_back(std::move(flat[k++]));
  }
  return out;
}

std::string Engine::call(std::string_view node_id, std::string_view template_id, nlohmann::json vars,
                         const FormatCheck& check) {
  std::vector<Task> tasks{Task{std::move(vars), 1, {}}};
  return std::move(fan_out(node_id, template_id, std::move(tasks), check).front().front());
}

void check_templates(const WorkflowGraph& graph, const actors::TemplateRegistry& templates) {
  for (const auto& n : graph.nodes) {
    if (!templates.contains(n.template_id)) {
      throw GraphError("UnknownTemplate", n.id, "template '" + n.template_id + "' is not registered");
    }
    if (n.prompt_variants && templates.variant_count(n.template_id) < static_cast<std::size_t>(n.replicate_count)) {
      throw GraphError("InsufficientVariants", n.id,
                       "node '" + n.id + "' needs " + std::to_string(n.replicate_count) + " prompt variants, '" +
                           n.template_id + "' has " + std::to_string(templates.variant_count(n.template_id)));
    }
  }
}

ExecutionResult execute(const WorkflowGraph& graph, actors::Actor& actor, const actors::TemplateRegistry& templates,
                        const nlohmann::json& inputs, EngineOptions options) {
  validate_graph(graph);
  check_templates(graph, templates);
  Engine engine(actor, templates, std::move(options));
  ExecutionResult result;

  for (const auto& level : dependency_levels(graph)) {
    std::vector<Call> calls;
    for (const auto& id : level) {
      const auto* node = graph.find(id);
      nlohmann::json producers = nlohmann::json::object();
      for (const auto& p : graph.producers_of(id)) {
        const auto& out = result.outputs.at(p);
        producers[p] = out.size() == 1 ? nlohmann::json(out.front()) : nlohmann::json(out);
      }
      nlohmann::json vars = {{"input", inputs}, {"node_id", id}, {"producers", producers}};
      for (int r = 0; r < node->replicate_count; ++r) {
        calls.push_back(Call{id, node->template_id, vars, 0, r, {}});
      }
    }
    auto texts = engine.run_batch(calls);
    for (std::size_t i = 0; i < calls.size(); ++i) result.outputs[calls[i].node_id].push_back(std::move(texts[i]));
  }
  result.ledger = engine.ledger();
  return result;
}

}  // namespace chainflow::engine
