#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace chainflow::actors {

/// Substitutes `{{name}}` / `{{a.b}}` placeholders from `vars`. Strings are
/// inserted verbatim, arrays one element per line, other values as JSON.
/// Throws Error("MissingTemplateVar") for absent keys.
std::string render_template(std::string_view tmpl, const nlohmann::json& vars);

/// Prompt templates keyed by id; each id holds one or more wording variants.
/// Replicate r renders variant r mod N, which gives parallel generations
/// different prompts.
class TemplateRegistry {
 public:
  void add(std::string id, std::vector<std::string> variants);
  bool contains(std::string_view id) const noexcept;
  std::size_t variant_count(std::string_view id) const noexcept;
  std::vector<std::string> ids() const;

  std::string render(std::string_view id, int replicate, const nlohmann::json& vars) const;

  /// Entries of `other` replace same-id entries here.
  void merge(const TemplateRegistry& other);

  nlohmann::json to_json() const;
  static TemplateRegistry from_json(const nlohmann::json& j);

  /// Reference wordings for every chain step and baseline.
  static TemplateRegistry defaults();

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> templates_;
};

}  // namespace chainflow::actors
