#include "chainflow/evalkit/metrics.hpp"

#include <iomanip>
#include <map>
#include <sstream>

#include "chainflow/error.hpp"
#include "chainflow/text.hpp"

namespace chainflow::evalkit {

double percent_error(double achieved, double target) {
  if (target == 0.0) throw Error("ZeroTarget", "percent error is undefined for a zero target");
  return 100.0 * (achieved - target) / target;
}

ItemDiff item_diff(const std::vector<std::string>& input, const std::vector<std::string>& output) {
  std::map<std::string, std::string> in;
  std::map<std::string, std::string> out;
  for (const auto& s : input) in.emplace(text::fold(s), text::trim(s));
  for (const auto& s : output) out.emplace(text::fold(s), text::trim(s));
  ItemDiff diff;
  for (const auto& [key, label] : out) {
    if (!in.contains(key)) diff.hallucinated.insert(label);
  }
  for (const auto& [key, label] : in) {
    if (!out.contains(key)) diff.forgotten.insert(label);
  }
  return diff;
}

CostReport cost_report(const engine::RunLedger& ledger) {
  CostReport report;
  std::map<std::string, NodeCost> nodes;
  for (const auto& e : ledger.entries()) {
    auto& n = nodes[e.node_id];
    ++n.calls;
    if (e.retry) ++n.retries;
    if (e.cache_hit) ++n.cache_hits;
    n.seconds += e.duration_seconds;
  }
  report.calls = ledger.call_count();
  report.retries = ledger.retry_count();
  report.cache_hits = ledger.cache_hit_count();
  report.wall_seconds = ledger.wall_seconds();
  report.per_node.assign(nodes.begin(), nodes.end());
  return report;
}

nlohmann::json CostReport::to_json() const {
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [node, c] : per_node) {
    per[node] = {{"calls", c.calls}, {"retries", c.retries}, {"cache_hits", c.cache_hits}, {"seconds", c.seconds}};
  }
  return {{"calls", calls},
          {"retries", retries},
          {"cache_hits", cache_hits},
          {"wall_seconds", wall_seconds},
          {"per_node", per}};
}

std::string CostReport::to_table() const {
  std::size_t width = 5;
  for (const auto& [node, _] : per_node) width = std::max(width, node.size());
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(width)) << "node" << "  " << std::right << std::setw(8) << "calls"
      << std::setw(8) << "retries" << std::setw(8) << "cached" << std::setw(12) << "seconds" << '\n';
  out << std::fixed << std::setprecision(3);
  for (const auto& [node, c] : per_node) {
    out << std::left << std::setw(static_cast<int>(width)) << node << "  " << std::right << std::setw(8) << c.calls
        << std::setw(8) << c.retries << std::setw(8) << c.cache_hits << std::setw(12) << c.seconds << '\n';
  }
  out << std::left << std::setw(static_cast<int>(width)) << "total" << "  " << std::right << std::setw(8) << calls
      << std::setw(8) << retries << std::setw(8) << cache_hits << std::setw(12) << wall_seconds << '\n';
  return out.str();
}

}  // namespace chainflow::evalkit
