#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "chainflow/error.hpp"

namespace chainflow::engine {

/// Function a subtask performs in a chain.
enum class SubtaskKind { Generate, Evaluate, Improve, Focus, Partition, Merge };

/// Annotates graph regions for documentation and ledger grouping. Tags carry
/// no execution semantics; only edges order execution.
enum class ArchitectureTag { Sequential, Branching, RedundantParallel, RedundantIterative, Dynamic };

std::string_view to_string(SubtaskKind kind) noexcept;
std::string_view to_string(ArchitectureTag arch) noexcept;
SubtaskKind parse_subtask_kind(std::string_view s);
ArchitectureTag parse_architecture(std::string_view s);

struct SubtaskNode {
  std::string id;
  SubtaskKind kind = SubtaskKind::Generate;
  std::string template_id;
  int replicate_count = 1;
  ArchitectureTag arch = ArchitectureTag::Sequential;
  /// Replicates render distinct prompt variants (needs that many variants registered).
  bool prompt_variants = false;
};

struct Edge {
  std::string from;
  std::string to;
};

struct WorkflowGraph {
  std::vector<SubtaskNode> nodes;
  std::vector<Edge> edges;
  std::string entry;
  std::string exit;

  const SubtaskNode* find(std::string_view id) const noexcept;
  std::vector<std::string> producers_of(std::string_view id) const;
};

/// Raised by validate_graph. `element()` names the offending edge ("C->A") or node.
class GraphError : public Error {
 public:
  GraphError(std::string code, std::string element, std::string detail)
      : Error(std::move(code), std::move(detail)), element_(std::move(element)) {}
  const std::string& element() const noexcept { return element_; }

 private:
  std::string element_;
};

/// Throws GraphError with code CycleDetected, UnreachableNode, DuplicateNode,
/// UnknownNode or InvalidNode.
void validate_graph(const WorkflowGraph& graph);

/// Node ids grouped into dependency levels; every node in level i depends only
/// on nodes in levels < i. Within a level ids are sorted. Requires a valid graph.
std::vector<std::vector<std::string>> dependency_levels(const WorkflowGraph& graph);

nlohmann::json to_json(const WorkflowGraph& graph);
WorkflowGraph graph_from_json(const nlohmann::json& j);

}  // namespace chainflow::engine
