#include "chainflow/engine/graph.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>

namespace chainflow::engine {
namespace {

constexpr std::array<std::string_view, 6> kKindNames = {"generate", "evaluate", "improve",
                                                          "focus",    "partition", "merge"};
constexpr std::array<std::string_view, 5> kArchNames = {
    "sequential", "branching", "redundant-parallel", "redundant-iterative", "dynamic"};

using Adjacency = std::map<std::string, std::vector<std::string>, std::less<>>;

Adjacency adjacency(const WorkflowGraph& g, bool reverse) {
  Adjacency adj;
  for (const auto& n : g.nodes) adj[n.id];
  for (const auto& e : g.edges) {
    if (reverse) {
      adj[e.to].push_back(e.from);
    } else {
      adj[e.from].push_back(e.to);
    }
  }
  return adj;
}

std::set<std::string, std::less<>> reach(const Adjacency& adj, const std::string& start) {
  std::set<std::string, std::less<>> seen{start};
  std::vector<std::string> stack{start};
  while (!stack.empty()) {
    auto cur = stack.back();
    stack.pop_back();
    auto it = adj.find(cur);
    if (it == adj.end()) continue;
    for (const auto& next : it->second) {
      if (seen.insert(next).second) stack.push_back(next);
    }
  }
  return seen;
}

// Iterative three-colour DFS; returns the back edge closing the first cycle found.
std::optional<Edge> find_cycle(const WorkflowGraph& g, const Adjacency& adj) {
  enum class Colour { White, Grey, Black };
  std::map<std::string, Colour, std::less<>> colour;
  for (const auto& n : g.nodes) colour[n.id] = Colour::White;

  for (const auto& root : g.nodes) {
    if (colour[root.id] != Colour::White) continue;
    std::vector<std::pair<std::string, std::size_t>> stack{{root.id, 0}};
    colour[root.id] = Colour::Grey;
    while (!stack.empty()) {
      auto& [node, next_child] = stack.back();
      const auto& children = adj.find(node)->second;
      if (next_child == children.size()) {
        colour[node] = Colour::Black;
        stack.pop_back();
        continue;
      }
      const std::string child = children[next_child++];
      if (colour[child] == Colour::Grey) return Edge{node, child};
      if (colour[child] == Colour::White) {
        colour[child] = Colour::Grey;
        stack.emplace_back(child, 0);
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(SubtaskKind kind) noexcept { return kKindNames[static_cast<std::size_t>(kind)]; }
std::string_view to_string(ArchitectureTag arch) noexcept { return kArchNames[static_cast<std::size_t>(arch)]; }

SubtaskKind parse_subtask_kind(std::string_view s) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == s) return static_cast<SubtaskKind>(i);
  }
  throw Error("InvalidNode", "unknown subtask kind '" + std::string(s) + "'");
}

ArchitectureTag parse_architecture(std::string_view s) {
  for (std::size_t i = 0; i < kArchNames.size(); ++i) {
    if (kArchNames[i] == s) return static_cast<ArchitectureTag>(i);
  }
  throw Error("InvalidNode", "unknown architecture tag '" + std::string(s) + "'");
}

const SubtaskNode* WorkflowGraph::find(std::string_view id) const noexcept {
  auto it = std::find_if(nodes.begin(), nodes.end(), [&](const SubtaskNode& n) { return n.id == id; });
  return it == nodes.end() ? nullptr : &*it;
}

std::vector<std::string> WorkflowGraph::producers_of(std::string_view id) const {
  std::vector<std::string> out;
  for (const auto& e : edges) {
    if (e.to == id) out.push_back(e.from);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void validate_graph(const WorkflowGraph& g) {
  std::set<std::string, std::less<>> ids;
  for (const auto& n : g.nodes) {
    if (n.id.empty()) throw GraphError("InvalidNode", "", "node with empty id");
    if (!ids.insert(n.id).second) throw GraphError("DuplicateNode", n.id, "node id '" + n.id + "' repeated");
    if (n.replicate_count < 1) {
      throw GraphError("InvalidNode", n.id, "replicate_count must be >= 1");
    }
    const bool redundant =
        n.arch == ArchitectureTag::RedundantParallel || n.arch == ArchitectureTag::RedundantIterative;
    if (n.replicate_count > 1 && !redundant) {
      throw GraphError("InvalidNode", n.id, "replicate_count > 1 requires a redundant architecture");
    }
  }
  for (const auto& e : g.edges) {
    for (const auto& end : {e.from, e.to}) {
      if (!ids.contains(end)) throw GraphError("UnknownNode", end, "edge references unknown node '" + end + "'");
    }
  }
  for (const auto& end : {g.entry, g.exit}) {
    if (!ids.contains(end)) throw GraphError("UnknownNode", end, "entry/exit '" + end + "' is not a node");
  }

  const auto fwd = adjacency(g, false);
  if (auto edge = find_cycle(g, fwd)) {
    const std::string name = edge->from + "->" + edge->to;
    throw GraphError("CycleDetected", name, "edge " + name + " closes a cycle");
  }

  const auto from_entry = reach(fwd, g.entry);
  const auto to_exit = reach(adjacency(g, true), g.exit);
  for (const auto& n : g.nodes) {
    if (!from_entry.contains(n.id)) {
      throw GraphError("UnreachableNode", n.id, "node '" + n.id + "' is not reachable from entry");
    }
    if (!to_exit.contains(n.id)) {
      throw GraphError("UnreachableNode", n.id, "exit is not reachable from node '" + n.id + "'");
    }
  }
}

std::vector<std::vector<std::string>> dependency_levels(const WorkflowGraph& g) {
  std::map<std::string, int, std::less<>> level;
  std::map<std::string, int, std::less<>> indegree;
  for (const auto& n : g.nodes) indegree[n.id] = 0;
  for (const auto& e : g.edges) ++indegree[e.to];
  const auto fwd = adjacency(g, false);

  std::vector<std::string> ready;
  for (const auto& [id, d] : indegree) {
    if (d == 0) {
      ready.push_back(id);
      level[id] = 0;
    }
  }
  std::vector<std::vector<std::string>> levels;
  while (!ready.empty()) {
    auto id = ready.back();
    ready.pop_back();
    const int lv = level[id];
    if (static_cast<int>(levels.size()) <= lv) levels.resize(lv + 1);
    levels[lv].push_back(id);
    for (const auto& next : fwd.find(id)->second) {
      level[next] = std::max(level[next], lv + 1);
      if (--indegree[next] == 0) ready.push_back(next);
    }
  }
  for (auto& l : levels) std::sort(l.begin(), l.end());
  return levels;
}

nlohmann::json to_json(const WorkflowGraph& g) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : g.nodes) {
    nodes.push_back({{"id", n.id},
                     {"kind", to_string(n.kind)},
                     {"template_id", n.template_id},
                     {"replicate_count", n.replicate_count},
                     {"arch", to_string(n.arch)},
                     {"prompt_variants", n.prompt_variants}});
  }
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : g.edges) edges.push_back({e.from, e.to});
  return {{"nodes", nodes}, {"edges", edges}, {"entry", g.entry}, {"exit", g.exit}};
}

WorkflowGraph graph_from_json(const nlohmann::json& j) {
  WorkflowGraph g;
  try {
    for (const auto& n : j.at("nodes")) {
      SubtaskNode node;
      node.id = n.at("id").get<std::string>();
      node.kind = parse_subtask_kind(n.at("kind").get<std::string>());
      node.template_id = n.at("template_id").get<std::string>();
      node.replicate_count = n.value("replicate_count", 1);
      node.arch = parse_architecture(n.value("arch", std::string("sequential")));
      node.prompt_variants = n.value("prompt_variants", false);
      g.nodes.push_back(std::move(node));
    }
    for (const auto& e : j.at("edges")) {
      g.edges.push_back({e.at(0).get<std::string>(), e.at(1).get<std::string>()});
    }
    g.entry = j.at("entry").get<std::string>();
    g.exit = j.at("exit").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error("InvalidGraphDocument", e.what());
  }
  return g;
}

}  // namespace chainflow::engine
