#include "chainflow/actors/replay.hpp"

#include <fstream>
#include <sstream>

namespace chainflow::actors {
namespace fs = std::filesystem;
namespace {

void atomic_write(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("CacheIO", "cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) throw Error("CacheIO", "short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::optional<nlohmann::json> read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

}  // namespace

ReplayCache::ReplayCache(fs::path dir, std::shared_ptr<Actor> inner) : dir_(std::move(dir)), inner_(std::move(inner)) {
  fs::create_directories(dir_ / "records");
  if (auto idx = read_json(dir_ / "index.json")) {
    const auto entries = idx->value("entries", nlohmann::json::object());
    for (const auto& [key, rel] : entries.items()) {
      index_[key] = rel.get<std::string>();
    }
  }
  for (const auto& entry : fs::directory_iterator(dir_ / "records")) {
    if (entry.path().extension() != ".json") continue;
    const auto key = entry.path().stem().string();
    if (!index_.contains(key)) index_[key] = "records/" + key + ".json";
  }
}

std::string ReplayCache::name() const { return inner_ ? "replay+" + inner_->name() : "replay"; }

std::size_t ReplayCache::size() const {
  std::shared_lock lock(index_mutex_);
  return index_.size();
}

std::mutex& ReplayCache::key_mutex(const std::string& key) {
  std::lock_guard lock(key_mutexes_guard_);
  auto& slot = key_mutexes_[key];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

std::optional<ActorResponse> ReplayCache::read(const std::string& key) const {
  std::string rel;
  {
    std::shared_lock lock(index_mutex_);
    auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    rel = it->second;
  }
  auto record = read_json(dir_ / rel);
  if (!record || !record->contains("text")) return std::nullopt;
  ActorResponse response;
  response.text = (*record)["text"].get<std::string>();
  response.cache_hit = true;
  if (auto tc = record->find("token_counts"); tc != record->end() && tc->is_object()) {
    response.token_counts = TokenCounts{tc->value("prompt", 0), tc->value("completion", 0)};
  }
  return response;
}

void ReplayCache::write(const std::string& key, const ActorRequest& request, const ActorResponse& response) {
  nlohmann::json record = {{"key", key},
                           {"template_id", request.template_id},
                           {"replicate_index", request.replicate_index},
                           {"attempt", request.attempt},
                           {"prompt", request.rendered_prompt},
                           {"text", response.text},
                           {"latency", response.latency_seconds}};
  if (response.token_counts) {
    record["token_counts"] = {{"prompt", response.token_counts->prompt},
                              {"completion", response.token_counts->completion}};
  }
  const std::string rel = "records/" + key + ".json";
  atomic_write(dir_ / rel, record.dump(2));

  std::unique_lock lock(index_mutex_);
  index_[key] = rel;
  nlohmann::json entries = nlohmann::json::object();
  for (const auto& [k, v] : index_) entries[k] = v;
  atomic_write(dir_ / "index.json", nlohmann::json{{"version", 1}, {"entries", entries}}.dump(2));
}

ActorResponse ReplayCache::invoke(const ActorRequest& request) {
  check_request(request);
  const std::string key = cache_key(request);
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

  if (auto hit = read(key)) {
    ++hits_;
    hit->latency_seconds = elapsed();
    return *hit;
  }
  std::lock_guard key_lock(key_mutex(key));
  if (auto hit = read(key)) {
    ++hits_;
    hit->latency_seconds = elapsed();
    return *hit;
  }
  ++misses_;
  if (!inner_) {
    throw ActorError("ReplayMiss", "no cached response for key " + key + " (template '" + request.template_id + "')",
                     false);
  }
  ActorResponse response = inner_->invoke(request);
  response.cache_hit = false;
  write(key, request, response);
  return response;
}

}  // namespace chainflow::actors
