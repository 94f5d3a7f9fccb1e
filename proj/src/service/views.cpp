#include "chainflow/error.hpp"
#include "chainflow/evalkit/metrics.hpp"
#include "chainflow/service/service.hpp"

namespace chainflow::service {

namespace {

template <class T>
const T& as(const ParsedBundle& b, BundleKind want) {
  if (const auto* p = std::get_if<T>(&b)) return *p;
  throw Error("KindMismatch", "bundle is not a " + std::string(to_string(want)) + " bundle");
}

}  // namespace

BundleViews::BundleViews(const BundleStore& store, std::size_t cache_capacity)
    : store_(store), capacity_(std::max<std::size_t>(cache_capacity, 1)) {}

std::shared_ptr<const ParsedBundle> BundleViews::parsed(std::string_view id) const {
  const std::string key(id);
  {
    std::lock_guard lock(mutex_);
    if (const auto it = index_.find(key); it != index_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      return it->second->second;
    }
  }
  const auto kind = store_.record(id).kind;
  const auto payload = store_.payload(id);
  std::shared_ptr<const ParsedBundle> bundle;
  switch (kind) {
    case BundleKind::Taxonomy:
      bundle = std::make_shared<const ParsedBundle>(cascade::taxonomy_bundle_from_json(payload));
      break;
    case BundleKind::Shorten:
      bundle = std::make_shared<const ParsedBundle>(soylent::shortening_bundle_from_json(payload));
      break;
    case BundleKind::Story:
      bundle = std::make_shared<const ParsedBundle>(mnovel::story_bundle_from_json(payload));
      break;
  }
  std::lock_guard lock(mutex_);
  if (const auto it = index_.find(key); it != index_.end()) return it->second->second;
  lru_.emplace_front(key, bundle);
  index_[key] = lru_.begin();
  while (lru_.size() > capacity_) {
    index_.erase(lru_.back().first);
    lru_.pop_back();
  }
  return bundle;
}

nlohmann::json BundleViews::taxonomy(std::string_view id, double merge_threshold, int min_size) const {
  const cascade::TaxonomyParams params{merge_threshold, min_size, 0.8};
  params.check();
  const auto bundle = parsed(id);
  const auto& b = as<cascade::TaxonomyBundle>(*bundle, BundleKind::Taxonomy);
  const auto tax = cascade::build_taxonomy(b, params);
  return {{"bundle_id", id},
          {"params", {{"merge", params.merge_threshold}, {"minsize", params.min_category_size},
                      {"nest", params.nest_coefficient}}},
          {"category_count", tax.category_count()},
          {"taxonomy", tax.to_json()}};
}

nlohmann::json BundleViews::shorten(std::string_view id, long long target_words) const {
  if (target_words < 0) throw Error("ParamOutOfRange", "target must not be negative");
  const auto bundle = parsed(id);
  const auto& b = as<soylent::ShorteningBundle>(*bundle, BundleKind::Shorten);
  const auto pick = soylent::select_length(b, target_words);
  std::vector<soylent::AppliedEdit> applied;
  const auto text = soylent::apply_selection(b, pick.choice, &applied);
  nlohmann::json diff = nlohmann::json::array();
  for (const auto& e : applied) {
    diff.push_back({{"span", e.span_index},
                    {"kind", soylent::to_string(e.kind)},
                    {"original", {e.original.start, e.original.end}},
                    {"output", {e.output.start, e.output.end}}});
  }
  nlohmann::json out = {{"bundle_id", id},
                        {"target", target_words},
                        {"achieved", pick.achieved},
                        {"original_words", b.original_words},
                        {"variant_count", soylent::variant_count(b)},
                        {"choice", pick.choice},
                        {"text", text},
                        {"diff", diff}};
  if (target_words > 0) {
    out["percent_error"] =
        evalkit::percent_error(static_cast<double>(pick.achieved), static_cast<double>(target_words));
  }
  return out;
}

nlohmann::json BundleViews::story(std::string_view id, std::uint64_t mask) const {
  const auto bundle = parsed(id);
  const auto& b = as<mnovel::StoryBundle>(*bundle, BundleKind::Story);
  const auto& variant = mnovel::get_variant(b, mask);
  nlohmann::json suggestions = nlohmann::json::array();
  for (std::size_t bit = 0; bit < b.accepted.size(); ++bit) {
    const auto& s = b.accepted[bit];
    suggestions.push_back({{"bit", bit},
                           {"id", s.id},
                           {"round", s.round_index},
                           {"text", s.text},
                           {"status", mnovel::to_string(s.status)},
                           {"selected", ((mask >> bit) & 1u) != 0}});
  }
  return {{"bundle_id", id},
          {"mask", mask},
          {"variant_count", b.variants.size()},
          {"story", variant.to_json()},
          {"suggestions", suggestions}};
}

}  // namespace chainflow::service
