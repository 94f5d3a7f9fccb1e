#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "chainflow/actors/actor.hpp"

namespace chainflow::actors {

/// Seed-driven response generator for one template id. Must produce text that
/// the consuming chain step accepts.
using Generator = std::function<std::string(const ActorRequest&, std::mt19937_64&)>;

/// Deterministic per-request responder; nullopt defers to the next source.
using Handler = std::function<std::optional<std::string>(const ActorRequest&)>;

/// Authored rule matched on template id and optional replicate / prompt substring.
struct ScriptRule {
  std::string template_id;
  std::optional<int> replicate_index;
  std::optional<std::string> prompt_contains;
  std::string text;
};

/// Responses for the scripted actor. Lookup order: exact cache-key entries,
/// handlers, authored rules, then (when enabled) the per-template fallback
/// generator seeded from (cache_key, seed). Every lookup is pure.
class ScriptBook {
 public:
  explicit ScriptBook(std::uint64_t seed = 0, bool fallback = true) : seed_(seed), fallback_(fallback) {}

  void set(std::string key, std::string text);
  void on(std::string template_id, Handler handler);
  void add_rule(ScriptRule rule);
  void set_generator(std::string template_id, Generator generator);

  std::optional<std::string> lookup(const ActorRequest& request) const;

  std::uint64_t seed() const noexcept { return seed_; }
  bool fallback_enabled() const noexcept { return fallback_; }
  void set_fallback(bool enabled) noexcept { fallback_ = enabled; }

  /// {"seed": n, "fallback": bool, "entries": {key: text}, "rules": [...]}.
  /// Fallback generators are not serialized; install them after loading.
  static ScriptBook from_json(const nlohmann::json& j);

 private:
  std::uint64_t seed_;
  bool fallback_;
  std::map<std::string, std::string, std::less<>> entries_;
  std::vector<std::pair<std::string, Handler>> handlers_;
  std::vector<ScriptRule> rules_;
  std::map<std::string, Generator, std::less<>> generators_;
};

/// Offline actor answering from a ScriptBook. Throws MissingScript when no
/// source answers.
class ScriptedActor final : public Actor {
 public:
  explicit ScriptedActor(ScriptBook book) : book_(std::move(book)) {}

  ActorResponse invoke(const ActorRequest& request) override;
  std::string name() const override { return "scripted"; }

  ScriptBook& book() noexcept { return book_; }

 private:
  ScriptBook book_;
};

/// Installs schema-valid generators for every reference template id, so all
/// chains and baselines run offline from a seed.
void install_default_generators(ScriptBook& book);

}  // namespace chainflow::actors
