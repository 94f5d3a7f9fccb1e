#include "chainflow/engine/ledger.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

#include "chainflow/error.hpp"

namespace chainflow::engine {
namespace {

auto sort_key(const LedgerEntry& e) {
  return std::tie(e.node_id, e.instance, e.replicate_index, e.attempt);
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::int64_t epoch_micros(std::chrono::system_clock::time_point t) {
  return std::chrono::duration_cast<std::chrono::microseconds>(t.time_since_epoch()).count();
}

}  // namespace

void RunLedger::append(LedgerEntry entry) {
  // Serialized timestamps carry microseconds; keep the same precision in memory.
  entry.started_at = std::chrono::time_point_cast<std::chrono::microseconds>(entry.started_at);
  auto pos = std::upper_bound(entries_.begin(), entries_.end(), entry,
                              [](const LedgerEntry& a, const LedgerEntry& b) { return sort_key(a) < sort_key(b); });
  entries_.insert(pos, std::move(entry));
}

void RunLedger::merge(const RunLedger& other) {
  for (const auto& e : other.entries_) append(e);
}

std::size_t RunLedger::retry_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(entries_.begin(), entries_.end(), [](const auto& e) { return e.retry; }));
}

std::size_t RunLedger::cache_hit_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [](const auto& e) { return e.cache_hit; }));
}

double RunLedger::wall_seconds() const noexcept {
  if (entries_.empty()) return 0.0;
  auto first = entries_.front().started_at;
  auto last = first;
  for (const auto& e : entries_) {
    first = std::min(first, e.started_at);
    auto end = e.started_at + std::chrono::duration_cast<std::chrono::system_clock::duration>(
                                  std::chrono::duration<double>(e.duration_seconds));
    last = std::max(last, end);
  }
  return std::chrono::duration<double>(last - first).count();
}

nlohmann::json RunLedger::to_json(bool with_timing) const {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : entries_) {
    nlohmann::json j = {{"node_id", e.node_id},
                        {"instance", e.instance},
                        {"replicate_index", e.replicate_index},
                        {"attempt", e.attempt},
                        {"template_id", e.template_id},
                        {"input_digest", e.input_digest},
                        {"actor_name", e.actor_name},
                        {"cache_hit", e.cache_hit},
                        {"retry", e.retry},
                        {"status", e.status},
                        {"detail", e.detail}};
    if (with_timing) {
      j["started_at_us"] = epoch_micros(e.started_at);
      j["duration"] = e.duration_seconds;
    }
    entries.push_back(std::move(j));
  }
  nlohmann::json totals = {{"call_count", call_count()}, {"retry_count", retry_count()}};
  if (with_timing) totals["wall_seconds"] = wall_seconds();
  return {{"entries", std::move(entries)}, {"totals", std::move(totals)}};
}

std::string RunLedger::to_csv() const {
  std::ostringstream out;
  out << "node_id,instance,replicate_index,attempt,template_id,input_digest,started_at_us,duration,"
         "actor_name,cache_hit,retry,status\n";
  for (const auto& e : entries_) {
    out << csv_field(e.node_id) << ',' << e.instance << ',' << e.replicate_index << ',' << e.attempt << ','
        << csv_field(e.template_id) << ',' << e.input_digest << ',' << epoch_micros(e.started_at) << ','
        << e.duration_seconds << ',' << csv_field(e.actor_name) << ',' << (e.cache_hit ? 1 : 0) << ','
        << (e.retry ? 1 : 0) << ',' << e.status << '\n';
  }
  return out.str();
}

RunLedger RunLedger::from_json(const nlohmann::json& j) {
  RunLedger ledger;
  try {
    for (const auto& item : j.at("entries")) {
      LedgerEntry e;
      e.node_id = item.at("node_id").get<std::string>();
      e.instance = item.value("instance", 0);
      e.replicate_index = item.value("replicate_index", 0);
      e.attempt = item.value("attempt", 0);
      e.template_id = item.value("template_id", std::string());
      e.input_digest = item.value("input_digest", std::string());
      e.actor_name = item.value("actor_name", std::string());
      e.cache_hit = item.value("cache_hit", false);
      e.retry = item.value("retry", false);
      e.status = item.value("status", std::string("ok"));
      e.detail = item.value("detail", std::string());
      e.started_at = std::chrono::system_clock::time_point(
          std::chrono::microseconds(item.value("started_at_us", std::int64_t{0})));
      e.duration_seconds = item.value("duration", 0.0);
      ledger.append(std::move(e));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw Error("InvalidLedgerDocument", ex.what());
  }
  return ledger;
}

}  // namespace chainflow::engine
