#include "chainflow/actors/scripted.hpp"

#include <chrono>

namespace chainflow::actors {
namespace {

std::uint64_t rng_seed(const std::string& key, std::uint64_t seed) {
  // First 16 hex digits of the key, mixed with the global seed.
  std::uint64_t k = std::stoull(key.substr(0, 16), nullptr, 16);
  std::uint64_t z = k ^ (seed + 0x9e3779b97f4a7c15ULL + (k << 6) + (k >> 2));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

void ScriptBook::set(std::string key, std::string text) { entries_[std::move(key)] = std::move(text); }

void ScriptBook::on(std::string template_id, Handler handler) {
  handlers_.emplace_back(std::move(template_id), std::move(handler));
}

void ScriptBook::add_rule(ScriptRule rule) { rules_.push_back(std::move(rule)); }

void ScriptBook::set_generator(std::string template_id, Generator generator) {
  generators_[std::move(template_id)] = std::move(generator);
}

std::optional<std::string> ScriptBook::lookup(const ActorRequest& request) const {
  const std::string key = cache_key(request);
  if (auto it = entries_.find(key); it != entries_.end()) return it->second;

  for (const auto& [tid, handler] : handlers_) {
    if (tid != request.template_id) continue;
    if (auto text = handler(request)) return text;
  }
  for (const auto& rule : rules_) {
    if (rule.template_id != request.template_id) continue;
    if (rule.replicate_index && *rule.replicate_index != request.replicate_index) continue;
    if (rule.prompt_contains && request.rendered_prompt.find(*rule.prompt_contains) == std::string::npos) continue;
    return rule.text;
  }
  if (!fallback_) return std::nullopt;
  auto gen = generators_.find(request.template_id);
  if (gen == generators_.end()) return std::nullopt;
  std::mt19937_64 rng(rng_seed(key, seed_));
  return gen->second(request, rng);
}

ScriptBook ScriptBook::from_json(const nlohmann::json& j) {
  try {
    ScriptBook book(j.value("seed", std::uint64_t{0}), j.value("fallback", true));
    if (auto it = j.find("entries"); it != j.end()) {
      for (const auto& [key, text] : it->items()) book.set(key, text.get<std::string>());
    }
    if (auto it = j.find("rules"); it != j.end()) {
      for (const auto& r : *it) {
        ScriptRule rule;
        rule.template_id = r.at("template_id").get<std::string>();
        if (r.contains("replicate_index")) rule.replicate_index = r["replicate_index"].get<int>();
        if (r.contains("prompt_contains")) rule.prompt_contains = r["prompt_contains"].get<std::string>();
        rule.text = r.at("text").get<std::string>();
        book.add_rule(std::move(rule));
      }
    }
    return book;
  } catch (const nlohmann::json::exception& e) {
    throw Error("InvalidScriptBook", e.what());
  }
}

ActorResponse ScriptedActor::invoke(const ActorRequest& request) {
  check_request(request);
  const auto start = std::chrono::steady_clock::now();
  auto text = book_.lookup(request);
  if (!text) {
    throw ActorError("MissingScript", "no scripted response for template '" + request.template_id + "'", false);
  }
  ActorResponse response;
  response.text = std::move(*text);
  response.latency_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return response;
}

}  // namespace chainflow::actors
