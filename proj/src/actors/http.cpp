#include "chainflow/actors/http.hpp"

#include <cstdlib>

#include <httplib.h>

namespace chainflow::actors {
namespace {

// Splits "scheme://host[:port]/path" into origin and path.
std::pair<std::string, std::string> split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error("InvalidConfig", "endpoint must include a scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpConfig http_config_from_json(const nlohmann::json& j) {
  HttpConfig c;
  c.endpoint = j.value("endpoint", std::string());
  c.model = j.value("model", std::string());
  c.timeout = std::chrono::seconds(j.value("timeout_seconds", 60));
  c.max_concurrency = j.value("max_concurrency", std::size_t{4});
  if (const char* key = std::getenv("CHAINFLOW_API_KEY")) c.api_key = key;
  return c;
}

HttpActor::HttpActor(HttpConfig config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) throw Error("InvalidConfig", "http actor needs an endpoint URL");
  if (config_.model.empty()) throw Error("InvalidConfig", "http actor needs a model name");
  if (config_.max_concurrency == 0) config_.max_concurrency = 1;
  std::tie(origin_, path_) = split_url(config_.endpoint);
}

ActorResponse HttpActor::invoke(const ActorRequest& request) {
  check_request(request);
  {
    std::unique_lock lock(slots_mutex_);
    slots_cv_.wait(lock, [&] { return in_flight_ < config_.max_concurrency; });
    ++in_flight_;
  }
  struct SlotRelease {
    HttpActor* self;
    ~SlotRelease() {
      {
        std::lock_guard lock(self->slots_mutex_);
        --self->in_flight_;
      }
      self->slots_cv_.notify_one();
    }
  } release{this};

  nlohmann::json body = {{"model", config_.model},
                         {"messages", {{{"role", "user"}, {"content", request.rendered_prompt}}}},
                         {"temperature", request.params.temperature},
                         {"max_tokens", request.params.max_output_tokens}};
  if (request.params.seed) body["seed"] = *request.params.seed;

  httplib::Client client(origin_);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);
  httplib::Headers headers;
  if (!config_.api_key.empty()) headers.emplace("Authorization", "Bearer " + config_.api_key);

  const auto start = std::chrono::steady_clock::now();
  auto result = client.Post(path_, headers, body.dump(), "application/json");
  const double latency = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!result) throw ActorError("Transport", "request failed: " + httplib::to_string(result.error()), true);
  const int status = result->status;
  if (status == 429) {
    std::chrono::milliseconds retry_after{0};
    if (result->has_header("Retry-After")) {
      try {
        retry_after = std::chrono::seconds(std::stoi(result->get_header_value("Retry-After")));
      } catch (const std::exception&) {
      }
    }
    throw ActorError("RateLimited", "HTTP 429", true, retry_after);
  }
  if (status >= 500) throw ActorError("Transport", "HTTP " + std::to_string(status), true);
  if (status < 200 || status >= 300) {
    throw ActorError("MalformedResponse", "HTTP " + std::to_string(status) + ": " + result->body, false);
  }

  ActorResponse response;
  response.latency_seconds = latency;
  try {
    auto j = nlohmann::json::parse(result->body);
    response.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
    if (auto usage = j.find("usage"); usage != j.end() && usage->is_object()) {
      response.token_counts = TokenCounts{usage->value("prompt_tokens", 0), usage->value("completion_tokens", 0)};
    }
  } catch (const nlohmann::json::exception& e) {
    throw ActorError("MalformedResponse", std::string("unexpected response body: ") + e.what(), false);
  }
  return response;
}

}  // namespace chainflow::actors
