#pragma once

#include <chrono>
#include <condition_variable>
#include <mutex>
#include <string>

#include "chainflow/actors/actor.hpp"

namespace chainflow::actors {

struct HttpConfig {
  /// Full chat-completions URL, e.g. "https://host/v1/chat/completions".
  std::string endpoint;
  std::string model;
  std::string api_key;
  std::chrono::seconds timeout{60};
  std::size_t max_concurrency = 4;
};

/// Reads endpoint/model/timeout/concurrency from `j` and the API key from the
/// environment variable CHAINFLOW_API_KEY.
HttpConfig http_config_from_json(const nlohmann::json& j);

/// Chat-completion actor. Sends {"model", "messages": [{"role": "user",
/// "content": prompt}], "temperature", "max_tokens"[, "seed"]} and reads
/// choices[0].message.content.
///
/// 429 -> RateLimited (honours Retry-After), 5xx and connection errors ->
/// Transport, other non-2xx or unparseable bodies -> MalformedResponse.
class HttpActor final : public Actor {
 public:
  explicit HttpActor(HttpConfig config);

  ActorResponse invoke(const ActorRequest& request) override;
  std::string name() const override { return "http:" + config_.model; }

 private:
  HttpConfig config_;
  std::string origin_;
  std::string path_;
  std::mutex slots_mutex_;
  std::condition_variable slots_cv_;
  std::size_t in_flight_ = 0;
};

}  // namespace chainflow::actors
