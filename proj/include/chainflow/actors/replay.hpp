#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>

#include "chainflow/actors/actor.hpp"

namespace chainflow::actors {

/// Disk-backed record/replay wrapper.
///
/// Layout under the cache directory (stable across versions):
///
///     index.json              {"version": 1, "entries": {"<key>": "records/<key>.json"}}
///     records/<key>.json      {"key", "template_id", "replicate_index", "attempt",
///                              "prompt", "text", "latency", "token_counts"}
///
/// Records are append-only and written via temp-file + rename before the
/// index is rewritten; on open, records missing from the index are re-adopted.
/// With no inner actor the cache replays only and a miss throws ReplayMiss.
class ReplayCache final : public Actor {
 public:
  ReplayCache(std::filesystem::path dir, std::shared_ptr<Actor> inner);

  ActorResponse invoke(const ActorRequest& request) override;
  std::string name() const override;

  std::size_t size() const;
  std::size_t hits() const noexcept { return hits_.load(); }
  std::size_t misses() const noexcept { return misses_.load(); }

 private:
  std::optional<ActorResponse> read(const std::string& key) const;
  void write(const std::string& key, const ActorRequest& request, const ActorResponse& response);
  std::mutex& key_mutex(const std::string& key);

  std::filesystem::path dir_;
  std::shared_ptr<Actor> inner_;
  mutable std::shared_mutex index_mutex_;
  std::map<std::string, std::string, std::less<>> index_;
  std::mutex key_mutexes_guard_;
  std::map<std::string, std::unique_ptr<std::mutex>, std::less<>> key_mutexes_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
};

}  // namespace chainflow::actors
