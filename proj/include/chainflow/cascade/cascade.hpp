#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "chainflow/engine/engine.hpp"
#include "chainflow/engine/graph.hpp"

namespace chainflow::cascade {

struct CascadeConfig {
  int subset_size = 32;
  int generations_per_item = 3;
  int selection_voters = 3;
  int membership_voters = 1;
  std::string similarity_provider = "trigram";

  void check() const;
  nlohmann::json to_json() const;
  static CascadeConfig from_json(const nlohmann::json& j);
};

/// Everything the taxonomy builder needs; produced once per chain run.
struct TaxonomyBundle {
  std::vector<std::string> items;
  std::vector<std::string> categories;
  /// membership[item][category]
  std::vector<std::vector<bool>> membership;
  /// sims[a][b], symmetric with unit diagonal.
  std::vector<std::vector<double>> sims;
  /// Source item and batch per category, ledger instance per membership cell,
  /// and non-fatal diagnostics such as batches with no valid candidate.
  nlohmann::json provenance = nlohmann::json::object();

  /// Item indices confirmed for `category`, ascending.
  std::vector<std::size_t> members_of(std::size_t category) const;
};

/// Throws SchemaViolation naming the first offending field.
void check_bundle(const TaxonomyBundle& bundle);
nlohmann::json to_json(const TaxonomyBundle& bundle);
/// Parses and validates.
TaxonomyBundle taxonomy_bundle_from_json(const nlohmann::json& j);

struct TaxonomyParams {
  double merge_threshold = 0.75;
  int min_category_size = 2;
  double nest_coefficient = 0.8;

  /// Throws Error("ParamOutOfRange").
  void check() const;
};

struct CategoryNode {
  std::string label;
  /// Indices into Taxonomy::items, ascending.
  std::vector<std::size_t> items;
  /// Index of the parent category, or -1 for root.
  int parent = -1;
};

/// Flat parent-pointer tree. Categories are listed in merge order.
struct Taxonomy {
  std::vector<std::string> items;
  std::vector<CategoryNode> categories;
  std::vector<std::size_t> uncategorized;

  std::size_t category_count() const noexcept { return categories.size(); }
  std::vector<std::size_t> children_of(int parent) const;
  /// Labels of every item appearing anywhere in the tree, one per item.
  std::vector<std::string> covered_items() const;
  /// Nested JSON: root -> children..., then an uncategorized node.
  nlohmann::json to_json() const;
};

using SimilarityFn = std::function<double(std::string_view, std::string_view)>;

/// Cosine of character-trigram counts over the lowercased, space-normalized
/// label padded as "^label$". Throws Error("EmptyLabel").
double name_similarity(std::string_view a, std::string_view b);

/// "trigram" is the only built-in provider. Throws Error("UnknownSimilarityProvider").
SimilarityFn similarity_provider(std::string_view id);

std::vector<std::vector<double>> similarity_matrix(std::span<const std::string> labels, const SimilarityFn& sim);

struct MergedCategory {
  std::string label;
  std::vector<std::size_t> items;
  /// Original category indices, ascending.
  std::vector<std::size_t> members;
};

/// Connected components of the graph with an edge wherever sims >= threshold.
/// Components are ordered by their smallest original index.
std::vector<MergedCategory> merge_components(std::span<const std::string> labels,
                                             const std::vector<std::vector<std::size_t>>& item_sets,
                                             const std::vector<std::vector<double>>& sims, double threshold);

Taxonomy build_taxonomy(const TaxonomyBundle& bundle, const TaxonomyParams& params);

/// Surviving category count for (threshold, min_size) without building the tree.
std::size_t category_count(const TaxonomyBundle& bundle, double threshold, int min_size);

struct SweepResult {
  TaxonomyParams params;
  std::size_t count = 0;
  double percent_error = 0.0;
};

/// Merge thresholds worth trying: distinct pairwise similarities plus 0 and 1, ascending.
std::vector<double> threshold_grid(const TaxonomyBundle& bundle);

/// Grid search for the params whose category count is closest to `target`.
/// Ties prefer the smaller count, then the larger threshold, then the smaller
/// minimum size. Throws Error("EmptyBundle") or Error("InvalidTarget").
SweepResult sweep_targets(const TaxonomyBundle& bundle, int target);

/// The chain's static shape, for template checks and documentation.
engine::WorkflowGraph cascade_graph(const CascadeConfig& config);

/// Runs generate / select / membership over fixed-order batches of items.
TaxonomyBundle run_cascade(std::span<const std::string> items, const CascadeConfig& config, engine::Engine& engine);

/// Cleans one generated category name: first line, trimmed, outer quotes and
/// a trailing period removed.
std::string clean_category_name(std::string_view raw);

}  // namespace chainflow::cascade
