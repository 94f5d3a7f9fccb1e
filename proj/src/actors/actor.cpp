#include "chainflow/actors/actor.hpp"

#include "chainflow/digest.hpp"

namespace chainflow::actors {

void check_request(const ActorRequest& request) {
  if (request.rendered_prompt.empty()) throw Error("InvalidRequest", "rendered_prompt is empty");
  if (!(request.params.temperature >= 0.0 && request.params.temperature <= 2.0)) {
    throw Error("InvalidRequest", "temperature outside [0, 2]");
  }
  if (request.params.max_output_tokens <= 0) throw Error("InvalidRequest", "max_output_tokens must be positive");
  if (request.replicate_index < 0 || request.attempt < 0) {
    throw Error("InvalidRequest", "replicate_index and attempt must be non-negative");
  }
}

std::string cache_key(const ActorRequest& request) {
  nlohmann::json j = {{"template_id", request.template_id},
                      {"prompt", request.rendered_prompt},
                      {"temperature", request.params.temperature},
                      {"max_output_tokens", request.params.max_output_tokens},
                      {"seed", request.params.seed ? nlohmann::json(*request.params.seed) : nlohmann::json()},
                      {"replicate_index", request.replicate_index}};
  if (request.attempt != 0) j["attempt"] = request.attempt;
  return sha256_hex(j.dump());
}

ActorResponse RefusingActor::invoke(const ActorRequest& request) {
  ++attempts_;
  throw ActorError("NetworkRefused", "network call refused for template '" + request.template_id + "'", false);
}

}  // namespace chainflow::actors
