#include "chainflow/cascade/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <unordered_set>

#include "chainflow/engine/vote.hpp"
#include "chainflow/error.hpp"
#include "chainflow/template_ids.hpp"
#include "chainflow/text.hpp"
#include "chainflow/validators/validators.hpp"

namespace chainflow::cascade {

namespace {

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }

  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }

  std::vector<std::size_t> parent;
};

std::vector<std::size_t> set_union(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::size_t intersection_size(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

std::vector<std::vector<std::size_t>> item_sets_of(const TaxonomyBundle& bundle) {
  std::vector<std::vector<std::size_t>> sets(bundle.categories.size());
  for (std::size_t c = 0; c < sets.size(); ++c) sets[c] = bundle.members_of(c);
  return sets;
}

/// Merged component sizes only; the hot path of the sweep.
std::vector<std::size_t> component_sizes(const std::vector<std::vector<std::size_t>>& item_sets,
                                         const std::vector<std::vector<double>>& sims, double threshold) {
  const std::size_t n = item_sets.size();
  DisjointSets ds(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (sims[a][b] >= threshold) ds.unite(a, b);
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t c = 0; c < n; ++c) {
    auto& g = groups[ds.find(c)];
    g = set_union(g, item_sets[c]);
  }
  std::vector<std::size_t> sizes;
  for (const auto& [_, items] : groups) sizes.push_back(items.size());
  return sizes;
}

[[noreturn]] void violation(std::string path, std::string detail) {
  throw SchemaViolation(std::move(path), std::move(detail));
}

std::string at(std::string_view field, std::size_t i) { return std::string(field) + "[" + std::to_string(i) + "]"; }

std::string at(std::string_view field, std::size_t i, std::size_t j) { return at(field, i) + "[" + std::to_string(j) + "]"; }

std::map<std::string, std::size_t> trigram_counts(std::string_view label) {
  const std::string padded = "^" + text::fold(label) + "$";
  std::map<std::string, std::size_t> counts;
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) ++counts[padded.substr(i, 3)];
  return counts;
}

}  // namespace

void CascadeConfig::check() const {
  if (subset_size < 1) throw Error("InvalidConfig", "subset_size must be at least 1");
  if (generations_per_item < 1) throw Error("InvalidConfig", "generations_per_item must be at least 1");
  if (selection_voters < 1) throw Error("InvalidConfig", "selection_voters must be at least 1");
  if (membership_voters < 1) throw Error("InvalidConfig", "membership_voters must be at least 1");
  cascade::similarity_provider(similarity_provider);
}

nlohmann::json CascadeConfig::to_json() const {
  return {{"subset_size", subset_size},
          {"generations_per_item", generations_per_item},
          {"selection_voters", selection_voters},
          {"membership_voters", membership_voters},
          {"similarity_provider", similarity_provider}};
}

CascadeConfig CascadeConfig::from_json(const nlohmann::json& j) {
  CascadeConfig c;
  c.subset_size = j.value("subset_size", c.subset_size);
  c.generations_per_item = j.value("generations_per_item", c.generations_per_item);
  c.selection_voters = j.value("selection_voters", c.selection_voters);
  c.membership_voters = j.value("membership_voters", c.membership_voters);
  c.similarity_provider = j.value("similarity_provider", c.similarity_provider);
  c.check();
  return c;
}

std::vector<std::size_t> TaxonomyBundle::members_of(std::size_t category) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < membership.size(); ++i) {
    if (membership[i][category]) out.push_back(i);
  }
  return out;
}

void check_bundle(const TaxonomyBundle& b) {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < b.items.size(); ++i) {
    if (text::trim_view(b.items[i]).empty()) violation(at("items", i), "blank item");
    if (!seen.insert(b.items[i]).second) violation(at("items", i), "duplicate item '" + b.items[i] + "'");
  }
  seen.clear();
  for (std::size_t c = 0; c < b.categories.size(); ++c) {
    const auto& label = b.categories[c];
    if (text::trim_view(label).empty()) violation(at("categories", c), "blank category");
    if (!seen.insert(label).second) violation(at("categories", c), "duplicate category '" + label + "'");
    if (const auto ok = validators::category_name_ok(label); !ok) violation(at("categories", c), ok.detail);
  }
  if (b.membership.size() != b.items.size()) violation("membership", "expected one row per item");
  for (std::size_t i = 0; i < b.membership.size(); ++i) {
    if (b.membership[i].size() != b.categories.size()) violation(at("membership", i), "expected one cell per category");
  }
  if (b.sims.size() != b.categories.size()) violation("sims", "expected one row per category");
  for (std::size_t a = 0; a < b.sims.size(); ++a) {
    if (b.sims[a].size() != b.categories.size()) violation(at("sims", a), "expected one cell per category");
    for (std::size_t c = 0; c < b.sims[a].size(); ++c) {
      const double v = b.sims[a][c];
      if (!(v >= 0.0 && v <= 1.0)) violation(at("sims", a, c), "similarity outside [0,1]");
      if (a == c && v != 1.0) violation(at("sims", a, c), "diagonal must be 1");
      if (c < a && b.sims[c][a] != v) violation(at("sims", a, c), "matrix is not symmetric");
    }
  }
}

nlohmann::json to_json(const TaxonomyBundle& b) {
  nlohmann::json membership = nlohmann::json::array();
  for (const auto& row : b.membership) {
    nlohmann::json r = nlohmann::json::array();
    for (bool v : row) r.push_back(v ? 1 : 0);
    membership.push_back(std::move(r));
  }
  return {{"kind", "taxonomy"},
          {"schema_version", 1},
          {"items", b.items},
          {"categories", b.categories},
          {"membership", membership},
          {"sims", b.sims},
          {"provenance", b.provenance}};
}

TaxonomyBundle taxonomy_bundle_from_json(const nlohmann::json& j) {
  if (!j.is_object()) violation("$", "expected an object");
  if (j.value("kind", std::string{}) != "taxonomy") violation("kind", "expected \"taxonomy\"");
  if (j.value("schema_version", 0) != 1) violation("schema_version", "unsupported version");
  TaxonomyBundle b;
  const auto strings = [&](const char* field) {
    if (!j.contains(field) || !j[field].is_array()) violation(field, "expected an array");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j[field].size(); ++i) {
      if (!j[field][i].is_string()) violation(at(field, i), "expected a string");
      out.push_back(j[field][i].get<std::string>());
    }
    return out;
  };
  b.items = strings("items");
  b.categories = strings("categories");
  if (!j.contains("membership") || !j["membership"].is_array()) violation("membership", "expected an array");
  for (std::size_t i = 0; i < j["membership"].size(); ++i) {
    const auto& row = j["membership"][i];
    if (!row.is_array()) violation(at("membership", i), "expected an array");
    std::vector<bool> r;
    for (std::size_t c = 0; c < row.size(); ++c) {
      const auto& cell = row[c];
      if (cell.is_boolean()) {
        r.push_back(cell.get<bool>());
      } else if (cell.is_number_integer() && (cell.get<int>() == 0 || cell.get<int>() == 1)) {
        r.push_back(cell.get<int>() == 1);
      } else {
        violation(at("membership", i, c), "expected 0 or 1");
      }
    }
    b.membership.push_back(std::move(r));
  }
  if (!j.contains("sims") || !j["sims"].is_array()) violation("sims", "expected an array");
  for (std::size_t a = 0; a < j["sims"].size(); ++a) {
    const auto& row = j["sims"][a];
    if (!row.is_array()) violation(at("sims", a), "expected an array");
    std::vector<double> r;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (!row[c].is_number()) violation(at("sims", a, c), "expected a number");
      r.push_back(row[c].get<double>());
    }
    b.sims.push_back(std::move(r));
  }
  b.provenance = j.value("provenance", nlohmann::json::object());
  check_bundle(b);
  return b;
}

void TaxonomyParams::check() const {
  if (!(merge_threshold >= 0.0 && merge_threshold <= 1.0)) {
    throw Error("ParamOutOfRange", "merge threshold must lie in [0,1]");
  }
  if (min_category_size < 1) throw Error("ParamOutOfRange", "minimum category size must be at least 1");
  if (!(nest_coefficient > 0.0 && nest_coefficient <= 1.0)) {
    throw Error("ParamOutOfRange", "nest coefficient must lie in (0,1]");
  }
}

std::vector<std::size_t> Taxonomy::children_of(int parent) const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < categories.size(); ++c) {
    if (categories[c].parent == parent) out.push_back(c);
  }
  return out;
}

std::vector<std::string> Taxonomy::covered_items() const {
  std::set<std::size_t> all(uncategorized.begin(), uncategorized.end());
  for (const auto& c : categories) all.insert(c.items.begin(), c.items.end());
  std::vector<std::string> out;
  for (auto i : all) out.push_back(items[i]);
  return out;
}

nlohmann::json Taxonomy::to_json() const {
  const auto labels = [&](const std::vector<std::size_t>& idx) {
    nlohmann::json out = nlohmann::json::array();
    for (auto i : idx) out.push_back(items[i]);
    return out;
  };
  std::function<nlohmann::json(std::size_t)> node = [&](std::size_t c) {
    nlohmann::json children = nlohmann::json::array();
    for (auto k : children_of(static_cast<int>(c))) children.push_back(node(k));
    return nlohmann::json{{"label", categories[c].label}, {"items", labels(categories[c].items)}, {"children", children}};
  };
  nlohmann::json children = nlohmann::json::array();
  for (auto k : children_of(-1)) children.push_back(node(k));
  children.push_back({{"label", "uncategorized"}, {"uncategorized", true}, {"items", labels(uncategorized)}});
  return {{"category_count", category_count()}, {"root", {{"label", "root"}, {"children", children}}}};
}

double name_similarity(std::string_view a, std::string_view b) {
  if (text::trim_view(a).empty() || text::trim_view(b).empty()) throw Error("EmptyLabel", "labels must be non-empty");
  const auto ca = trigram_counts(a);
  const auto cb = trigram_counts(b);
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (const auto& [g, n] : ca) {
    na += static_cast<double>(n * n);
    if (const auto it = cb.find(g); it != cb.end()) dot += static_cast<double>(n * it->second);
  }
  for (const auto& [g, n] : cb) nb += static_cast<double>(n * n);
  if (ca == cb) return 1.0;
  return std::clamp(dot / std::sqrt(na * nb), 0.0, 1.0);
}

SimilarityFn similarity_provider(std::string_view id) {
  if (id == "trigram") return name_similarity;
  throw Error("UnknownSimilarityProvider", "no similarity provider named '" + std::string(id) + "'");
}

std::vector<std::vector<double>> similarity_matrix(std::span<const std::string> labels, const SimilarityFn& sim) {
  const std::size_t n = labels.size();
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 1.0));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) m[a][b] = m[b][a] = sim(labels[a], labels[b]);
  }
  return m;
}

std::vector<MergedCategory> merge_components(std::span<const std::string> labels,
                                             const std::vector<std::vector<std::size_t>>& item_sets,
                                             const std::vector<std::vector<double>>& sims, double threshold) {
  const std::size_t n = labels.size();
  DisjointSets ds(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (sims[a][b] >= threshold) ds.unite(a, b);
    }
  }
  // Roots are the smallest index of each component, so map order is output order.
  std::map<std::size_t, MergedCategory> groups;
  for (std::size_t c = 0; c < n; ++c) {
    auto& g = groups[ds.find(c)];
    g.members.push_back(c);
    g.items = set_union(g.items, item_sets[c]);
  }
  std::vector<MergedCategory> out;
  for (auto& [_, g] : groups) {
    std::size_t best = g.members.front();
    for (auto c : g.members) {
      const auto size = item_sets[c].size();
      if (size > item_sets[best].size() || (size == item_sets[best].size() && labels[c] < labels[best])) best = c;
    }
    g.label = labels[best];
    out.push_back(std::move(g));
  }
  return out;
}

Taxonomy build_taxonomy(const TaxonomyBundle& bundle, const TaxonomyParams& params) {
  params.check();
  Taxonomy tax;
  tax.items = bundle.items;
  const auto merged = merge_components(bundle.categories, item_sets_of(bundle), bundle.sims, params.merge_threshold);
  for (const auto& m : merged) {
    if (m.items.size() >= static_cast<std::size_t>(params.min_category_size)) {
      tax.categories.push_back(CategoryNode{m.label, m.items, -1});
    }
  }
  auto& cats = tax.categories;
  for (std::size_t b = 0; b < cats.size(); ++b) {
    const double size_b = static_cast<double>(cats[b].items.size());
    int parent = -1;
    for (std::size_t a = 0; a < cats.size(); ++a) {
      if (a == b || cats[a].items.size() <= cats[b].items.size()) continue;
      const double containment = static_cast<double>(intersection_size(cats[b].items, cats[a].items)) / size_b;
      if (containment < params.nest_coefficient) continue;
      if (parent < 0) {
        parent = static_cast<int>(a);
        continue;
      }
      const auto& p = cats[static_cast<std::size_t>(parent)];
      if (cats[a].items.size() < p.items.size() || (cats[a].items.size() == p.items.size() && cats[a].label < p.label)) {
        parent = static_cast<int>(a);
      }
    }
    cats[b].parent = parent;
  }
  std::vector<bool> covered(bundle.items.size(), false);
  for (const auto& c : cats) {
    for (auto i : c.items) covered[i] = true;
  }
  for (std::size_t i = 0; i < covered.size(); ++i) {
    if (!covered[i]) tax.uncategorized.push_back(i);
  }
  return tax;
}

std::size_t category_count(const TaxonomyBundle& bundle, double threshold, int min_size) {
  TaxonomyParams{threshold, min_size, 0.8}.check();
  const auto sizes = component_sizes(item_sets_of(bundle), bundle.sims, threshold);
  return static_cast<std::size_t>(std::count_if(sizes.begin(), sizes.end(), [&](std::size_t s) {
    return s >= static_cast<std::size_t>(min_size);
  }));
}

std::vector<double> threshold_grid(const TaxonomyBundle& bundle) {
  std::set<double> grid{0.0, 1.0};
  for (std::size_t a = 0; a < bundle.sims.size(); ++a) {
    for (std::size_t b = a + 1; b < bundle.sims.size(); ++b) grid.insert(bundle.sims[a][b]);
  }
  return {grid.begin(), grid.end()};
}

SweepResult sweep_targets(const TaxonomyBundle& bundle, int target) {
  if (target < 1) throw Error("InvalidTarget", "target must be at least 1");
  if (bundle.items.empty() || bundle.categories.empty()) throw Error("EmptyBundle", "bundle has no items or categories");
  const auto sets = item_sets_of(bundle);
  std::set<std::size_t> all;
  for (const auto& s : sets) all.insert(s.begin(), s.end());
  const std::size_t max_size = std::max<std::size_t>(all.size(), 1);

  const auto grid = threshold_grid(bundle);
  bool found = false;
  SweepResult best;
  std::size_t best_gap = 0;
  // Larger thresholds first so the first of equally good points wins the tie.
  for (auto it = grid.rbegin(); it != grid.rend(); ++it) {
    const auto sizes = component_sizes(sets, bundle.sims, *it);
    for (std::size_t s = 1; s <= max_size; ++s) {
      const auto count = static_cast<std::size_t>(
          std::count_if(sizes.begin(), sizes.end(), [&](std::size_t n) { return n >= s; }));
      const auto t = static_cast<std::size_t>(target);
      const std::size_t gap = count > t ? count - t : t - count;
      if (!found || gap < best_gap || (gap == best_gap && count < best.count)) {
        found = true;
        best_gap = gap;
        best.count = count;
        best.params.merge_threshold = *it;
        best.params.min_category_size = static_cast<int>(s);
      }
    }
  }
  best.percent_error = 100.0 * (static_cast<double>(best.count) - target) / target;
  return best;
}

engine::WorkflowGraph cascade_graph(const CascadeConfig& config) {
  using engine::ArchitectureTag;
  using engine::SubtaskKind;
  const auto arch = [](int replicates, ArchitectureTag single) {
    return replicates > 1 ? ArchitectureTag::RedundantParallel : single;
  };
  engine::WorkflowGraph g;
  g.nodes = {
      {"generate", SubtaskKind::Generate, std::string(tmpl::kCascadeGenerate), config.generations_per_item,
       arch(config.generations_per_item, ArchitectureTag::Sequential), true},
      {"select", SubtaskKind::Evaluate, std::string(tmpl::kCascadeSelect), config.selection_voters,
       arch(config.selection_voters, ArchitectureTag::Sequential), false},
      {"member", SubtaskKind::Evaluate, std::string(tmpl::kCascadeMember), config.membership_voters,
       arch(config.membership_voters, ArchitectureTag::Dynamic), false},
  };
  g.edges = {{"generate", "select"}, {"select", "member"}};
  g.entry = "generate";
  g.exit = "member";
  return g;
}

std::string clean_category_name(std::string_view raw) {
  std::string name;
  for (const auto& line : text::split_lines(raw)) {
    name = text::normalize_space(line);
    if (!name.empty()) break;
  }
  while (name.size() >= 2 && (name.front() == '"' || name.front() == '\'') && name.back() == name.front()) {
    name = text::trim(std::string_view(name).substr(1, name.size() - 2));
  }
  while (!name.empty() && name.back() == '.') name.pop_back();
  return text::trim(name);
}

TaxonomyBundle run_cascade(std::span<const std::string> raw_items, const CascadeConfig& config, engine::Engine& engine) {
  config.check();
  engine::check_templates(cascade_graph(config), engine.templates());
  std::vector<std::string> items;
  std::set<std::string> seen;
  for (const auto& raw : raw_items) {
    auto item = text::trim(raw);
    if (item.empty()) throw Error("InvalidItems", "items must be non-empty");
    if (!seen.insert(item).second) throw Error("InvalidItems", "duplicate item '" + item + "'");
    items.push_back(std::move(item));
  }
  if (items.empty()) throw Error("InvalidItems", "no items");

  const auto nonempty = [](std::string_view out) -> std::optional<std::string> {
    if (text::trim_view(out).empty()) return "empty response";
    return std::nullopt;
  };
  const auto yes_no = [](std::string_view out) -> std::optional<std::string> {
    if (!engine::parse_verdict(out, "YES", "NO")) return "expected YES or NO";
    return std::nullopt;
  };

  TaxonomyBundle bundle;
  bundle.items = items;
  bundle.membership.assign(items.size(), {});
  std::set<std::string> folded;
  nlohmann::json sources = nlohmann::json::array();
  nlohmann::json empty_batches = nlohmann::json::array();
  std::vector<std::vector<int>> cell_instance(items.size());

  const auto batch_size = static_cast<std::size_t>(config.subset_size);
  for (std::size_t start = 0, batch = 0; start < items.size(); start += batch_size, ++batch) {
    const std::size_t end = std::min(items.size(), start + batch_size);

    std::vector<engine::Task> gen_tasks;
    for (std::size_t i = start; i < end; ++i) {
      gen_tasks.push_back({{{"item", items[i]}}, config.generations_per_item, {}});
    }
    const auto generated = engine.fan_out("generate", tmpl::kCascadeGenerate, std::move(gen_tasks), nonempty);

    std::vector<std::vector<std::string>> candidates(end - start);
    bool any_valid = false;
    for (std::size_t k = 0; k < generated.size(); ++k) {
      std::set<std::string> local;
      for (const auto& raw : generated[k]) {
        const auto name = clean_category_name(raw);
        if (name.empty() || !validators::category_name_ok(name)) continue;
        if (local.insert(text::fold(name)).second) candidates[k].push_back(name);
      }
      any_valid = any_valid || !candidates[k].empty();
    }
    if (!any_valid) {
      empty_batches.push_back({{"batch", batch}, {"code", "EmptyCandidateSet"}});
      continue;
    }

    std::vector<engine::Task> vote_tasks;
    std::vector<std::size_t> voted;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      if (candidates[k].size() < 2) continue;
      const std::size_t n = candidates[k].size();
      engine::FormatCheck check = [n](std::string_view out) -> std::optional<std::string> {
        if (!engine::parse_option_number(out, n)) return "expected an option number";
        return std::nullopt;
      };
      vote_tasks.push_back({{{"item", items[start + k]},
                             {"options", engine::number_options(candidates[k])},
                             {"option_count", n}},
                            config.selection_voters,
                            std::move(check)});
      voted.push_back(k);
    }
    const auto votes = engine.fan_out("select", tmpl::kCascadeSelect, std::move(vote_tasks));

    std::vector<std::string> chosen(candidates.size());
    for (std::size_t k = 0; k < candidates.size(); ++k) {
      if (candidates[k].size() == 1) chosen[k] = candidates[k].front();
    }
    for (std::size_t v = 0; v < voted.size(); ++v) {
      const auto k = voted[v];
      std::vector<std::size_t> ballots;
      for (const auto& out : votes[v]) ballots.push_back(*engine::parse_option_number(out, candidates[k].size()));
      chosen[k] = candidates[k][engine::plurality_vote(candidates[k], ballots)];
    }

    const std::size_t first_new = bundle.categories.size();
    for (std::size_t k = 0; k < chosen.size(); ++k) {
      if (chosen[k].empty() || !folded.insert(text::fold(chosen[k])).second) continue;
      bundle.categories.push_back(chosen[k]);
      sources.push_back({{"label", chosen[k]}, {"source_item", items[start + k]}, {"batch", batch}});
    }

    std::vector<engine::Task> member_tasks;
    for (std::size_t i = 0; i < items.size(); ++i) {
      for (std::size_t c = first_new; c < bundle.categories.size(); ++c) {
        member_tasks.push_back({{{"item", items[i]}, {"category", bundle.categories[c]}}, config.membership_voters, {}});
      }
    }
    const int first_instance = engine.reserve_instances("member", 0);
    const auto answers = engine.fan_out("member", tmpl::kCascadeMember, std::move(member_tasks), yes_no);
    std::size_t t = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
      for (std::size_t c = first_new; c < bundle.categories.size(); ++c, ++t) {
        int yes = 0;
        for (const auto& a : answers[t]) yes += *engine::parse_verdict(a, "YES", "NO") ? 1 : 0;
        bundle.membership[i].push_back(2 * yes > config.membership_voters);
        cell_instance[i].push_back(first_instance + static_cast<int>(t));
      }
    }
  }

  bundle.sims = similarity_matrix(bundle.categories, similarity_provider(config.similarity_provider));
  bundle.provenance = {{"config", config.to_json()},
                       {"categories", sources},
                       {"membership_node", "member"},
                       {"membership_instances", cell_instance},
                       {"diagnostics", empty_batches}};
  return bundle;
}

}  // namespace chainflow::cascade
