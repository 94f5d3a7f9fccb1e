#pragma once

#include <set>
#include <string>
#include <vector>

#include "chainflow/engine/ledger.hpp"

namespace chainflow::evalkit {

/// Signed percentage 100 * (achieved - target) / target. Throws Error("ZeroTarget").
double percent_error(double achieved, double target);

/// Item identity diff after trim + case-fold. Labels are reported in their
/// input/output surface form.
struct ItemDiff {
  std::set<std::string> hallucinated;
  std::set<std::string> forgotten;
  bool empty() const noexcept { return hallucinated.empty() && forgotten.empty(); }
};

ItemDiff item_diff(const std::vector<std::string>& input, const std::vector<std::string>& output);

struct NodeCost {
  std::size_t calls = 0;
  std::size_t retries = 0;
  std::size_t cache_hits = 0;
  double seconds = 0.0;
};

struct CostReport {
  std::size_t calls = 0;
  std::size_t retries = 0;
  std::size_t cache_hits = 0;
  double wall_seconds = 0.0;
  std::vector<std::pair<std::string, NodeCost>> per_node;

  nlohmann::json to_json() const;
  std::string to_table() const;
};

CostReport cost_report(const engine::RunLedger& ledger);

}  // namespace chainflow::evalkit
