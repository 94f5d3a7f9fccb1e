#pragma once

#include <cstdint>
#include <filesystem>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "chainflow/cascade/cascade.hpp"
#include "chainflow/mnovel/mnovel.hpp"
#include "chainflow/soylent/soylent.hpp"

namespace chainflow::service {

inline constexpr std::string_view kMediaType = "application/vnd.chainflow.v1+json";

enum class BundleKind { Taxonomy, Shorten, Story };

std::string_view to_string(BundleKind kind) noexcept;
/// Throws SchemaViolation("kind").
BundleKind parse_bundle_kind(std::string_view s);

/// Sorted keys, no whitespace; the bytes that are hashed and stored.
std::string canonical_dump(const nlohmann::json& payload);

/// Validates against the schema named by payload["kind"]. Throws SchemaViolation.
BundleKind validate_payload(const nlohmann::json& payload);

struct BundleRecord {
  std::string id;
  BundleKind kind = BundleKind::Taxonomy;
  std::string created_at;
  nlohmann::json manifest = nlohmann::json::object();
};

/// Directory store: <dir>/<id>/bundle.json holds the canonical payload,
/// <dir>/<id>/meta.json the record. Ids are SHA-256 of the canonical payload.
class BundleStore {
 public:
  explicit BundleStore(std::filesystem::path dir);

  /// Idempotent; the first manifest stored for an id wins.
  std::string store(const nlohmann::json& payload, const nlohmann::json& manifest = nlohmann::json::object());

  bool contains(std::string_view id) const;
  /// Throws Error("NotFound").
  BundleRecord record(std::string_view id) const;
  /// Stored canonical bytes. Throws Error("NotFound").
  std::string payload_bytes(std::string_view id) const;
  nlohmann::json payload(std::string_view id) const;
  /// Sorted by id.
  std::vector<BundleRecord> list() const;

  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path path_of(std::string_view id) const;

  std::filesystem::path dir_;
  mutable std::mutex write_mutex_;
};

using ParsedBundle = std::variant<cascade::TaxonomyBundle, soylent::ShorteningBundle, mnovel::StoryBundle>;

/// Derived views over a store. Parsed bundles are memoized in a small LRU;
/// every view is pure in (id, params) and makes no actor calls.
class BundleViews {
 public:
  explicit BundleViews(const BundleStore& store, std::size_t cache_capacity = 16);

  /// Throws Error NotFound, KindMismatch or ParamOutOfRange.
  nlohmann::json taxonomy(std::string_view id, double merge_threshold, int min_size) const;
  nlohmann::json shorten(std::string_view id, long long target_words) const;
  /// Throws Error MaskOutOfRange.
  nlohmann::json story(std::string_view id, std::uint64_t mask) const;

  std::shared_ptr<const ParsedBundle> parsed(std::string_view id) const;

 private:
  const BundleStore& store_;
  std::size_t capacity_;
  mutable std::mutex mutex_;
  mutable std::list<std::pair<std::string, std::shared_ptr<const ParsedBundle>>> lru_;
  mutable std::unordered_map<std::string, decltype(lru_)::iterator> index_;
};

/// HTTP surface:
///   GET  /bundles
///   GET  /bundles/{id}
///   GET  /bundles/{id}/taxonomy?merge=&minsize=
///   GET  /bundles/{id}/shorten?target=
///   GET  /bundles/{id}/story?mask=
///   POST /bundles
class BundleServer {
 public:
  explicit BundleServer(BundleStore& store, std::size_t cache_capacity = 16);
  ~BundleServer();
  BundleServer(const BundleServer&) = delete;
  BundleServer& operator=(const BundleServer&) = delete;

  /// Binds and serves until stop(); returns false when the port cannot be bound.
  bool listen(const std::string& host, int port);
  /// Binds an ephemeral port and returns it; pair with serve().
  int bind_any(const std::string& host);
  bool serve();
  void wait_until_ready() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace chainflow::service
