#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "chainflow/error.hpp"

namespace chainflow::actors {

/// Sampling parameters sent with every request. Temperature 1.0 is the usual
/// provider default.
struct SamplingParams {
  double temperature = 1.0;
  int max_output_tokens = 1024;
  std::optional<std::int64_t> seed;
};

struct ActorRequest {
  std::string template_id;
  std::string rendered_prompt;
  SamplingParams params;
  int replicate_index = 0;
  /// Retry ordinal. Zero for first attempts; non-zero attempts get their own cache key.
  int attempt = 0;
  /// Structured record the prompt was rendered from. Not part of the cache key
  /// (the rendered prompt already is); scripted actors read it.
  nlohmann::json vars = nlohmann::json::object();
};

/// Throws Error("InvalidRequest") when the request invariants do not hold.
void check_request(const ActorRequest& request);

/// SHA-256 over (template_id, rendered_prompt, params, replicate_index[, attempt]).
std::string cache_key(const ActorRequest& request);

struct TokenCounts {
  int prompt = 0;
  int completion = 0;
};

struct ActorResponse {
  std::string text;
  double latency_seconds = 0.0;
  std::optional<TokenCounts> token_counts;
  bool cache_hit = false;
};

/// Failure raised from Actor::invoke. Codes: Transport, RateLimited (both
/// retryable), MalformedResponse, MissingScript, NetworkRefused, ReplayMiss.
class ActorError : public Error {
 public:
  ActorError(std::string code, std::string detail, bool retryable,
             std::chrono::milliseconds retry_after = std::chrono::milliseconds{0})
      : Error(std::move(code), std::move(detail)), retryable_(retryable), retry_after_(retry_after) {}

  bool retryable() const noexcept { return retryable_; }
  std::chrono::milliseconds retry_after() const noexcept { return retry_after_; }

 private:
  bool retryable_;
  std::chrono::milliseconds retry_after_;
};

/// Executor of a subtask. Implementations must be safe for concurrent invoke().
class Actor {
 public:
  virtual ~Actor() = default;
  virtual ActorResponse invoke(const ActorRequest& request) = 0;
  virtual std::string name() const = 0;
};

/// Refuses every call. Installed wherever a code path must stay offline.
class RefusingActor final : public Actor {
 public:
  ActorResponse invoke(const ActorRequest& request) override;
  std::string name() const override { return "refusing"; }
  std::size_t attempts() const noexcept { return attempts_.load(); }

 private:
  std::atomic<std::size_t> attempts_{0};
};

}  // namespace chainflow::actors
