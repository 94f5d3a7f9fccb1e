#pragma once

#include <chrono>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace chainflow::engine {

struct LedgerEntry {
  std::string node_id;
  /// Deterministic fan-out ordinal within the node (item, pair, chunk, ...).
  int instance = 0;
  int replicate_index = 0;
  int attempt = 0;
  std::string template_id;
  std::string input_digest;
  std::chrono::system_clock::time_point started_at{};
  double duration_seconds = 0.0;
  std::string actor_name;
  bool cache_hit = false;
  /// attempt > 0
  bool retry = false;
  /// "ok", "actor-error" or "format-error"
  std::string status = "ok";
  std::string detail;
};

/// Record of every actor invocation of a run. Entries are kept sorted by
/// (node_id, instance, replicate_index, attempt) whatever order they arrive in.
class RunLedger {
 public:
  void append(LedgerEntry entry);
  void merge(const RunLedger& other);

  const std::vector<LedgerEntry>& entries() const noexcept { return entries_; }
  std::size_t call_count() const noexcept { return entries_.size(); }
  std::size_t retry_count() const noexcept;
  std::size_t cache_hit_count() const noexcept;
  /// First start to last finish across all entries.
  double wall_seconds() const noexcept;

  /// `with_timing = false` drops started_at/duration so runs can be compared byte-for-byte.
  nlohmann::json to_json(bool with_timing = true) const;
  std::string to_csv() const;
  static RunLedger from_json(const nlohmann::json& j);

 private:
  std::vector<LedgerEntry> entries_;
};

}  // namespace chainflow::engine
