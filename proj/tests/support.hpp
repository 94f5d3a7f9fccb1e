#pragma once

#include <algorithm>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "chainflow/actors/scripted.hpp"
#include "chainflow/actors/templates.hpp"
#include "chainflow/cascade/cascade.hpp"
#include "chainflow/engine/engine.hpp"
#include "chainflow/soylent/soylent.hpp"
#include "chainflow/text.hpp"

namespace chainflow::testing {

namespace fs = std::filesystem;

/// Unique scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = fs::temp_directory_path() / ("chainflow-test-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const noexcept { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

/// Scripted actor over the reference templates, optionally with the seeded
/// fallback generators installed.
struct Rig {
  actors::TemplateRegistry templates = actors::TemplateRegistry::defaults();
  std::shared_ptr<actors::ScriptedActor> actor;

  explicit Rig(std::uint64_t seed = 1, bool fallback = true) {
    actors::ScriptBook book(seed, fallback);
    if (fallback) actors::install_default_generators(book);
    actor = std::make_shared<actors::ScriptedActor>(std::move(book));
  }

  actors::ScriptBook& book() { return actor->book(); }

  std::unique_ptr<engine::Engine> engine(engine::EngineOptions options = {}) {
    return std::make_unique<engine::Engine>(*actor, templates, options);
  }
};

inline std::vector<std::string> numbered(const std::string& stem, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(stem + " " + std::to_string(i + 1));
  return out;
}

/// Random valid taxonomy bundle; similarities come from a small value set so
/// thresholds collide.
inline cascade::TaxonomyBundle random_taxonomy_bundle(std::mt19937_64& rng, std::size_t items, std::size_t cats) {
  static constexpr double kLevels[] = {0.0, 0.2, 0.4, 0.5, 0.7, 0.75, 0.8, 0.9};
  cascade::TaxonomyBundle b;
  b.items = numbered("item", items);
  b.categories = numbered("group", cats);
  std::bernoulli_distribution member(0.3);
  std::uniform_int_distribution<std::size_t> level(0, std::size(kLevels) - 1);
  b.membership.assign(items, std::vector<bool>(cats, false));
  for (auto& row : b.membership) {
    for (std::size_t c = 0; c < cats; ++c) row[c] = member(rng);
  }
  b.sims.assign(cats, std::vector<double>(cats, 1.0));
  for (std::size_t a = 0; a < cats; ++a) {
    for (std::size_t c = a + 1; c < cats; ++c) b.sims[a][c] = b.sims[c][a] = kLevels[level(rng)];
  }
  return b;
}

/// 60 items in 20 disjoint categories of three. Neighbouring categories on a
/// chain have descending similarities, so each threshold step merges one more
/// pair and every count from 1 to 20 is reachable.
inline cascade::TaxonomyBundle ladder_bundle() {
  cascade::TaxonomyBundle b;
  b.items = numbered("scene", 60);
  b.categories = numbered("tier", 20);
  b.membership.assign(60, std::vector<bool>(20, false));
  for (std::size_t i = 0; i < 60; ++i) b.membership[i][i / 3] = true;
  b.sims.assign(20, std::vector<double>(20, 0.0));
  for (std::size_t c = 0; c < 20; ++c) b.sims[c][c] = 1.0;
  for (std::size_t c = 0; c + 1 < 20; ++c) b.sims[c][c + 1] = b.sims[c + 1][c] = 0.95 - 0.04 * static_cast<double>(c);
  return b;
}

/// Random valid shortening bundle over one chunk. Spans are whole-word runs,
/// some holding a quoted phrase that every option keeps verbatim. The product
/// of option counts stays at or below `max_variants`.
inline soylent::ShorteningBundle random_shortening_bundle(std::mt19937_64& rng, std::size_t max_spans,
                                                          std::uint64_t max_variants = 8192) {
  static const std::vector<std::string> kWords = {"river", "stone",  "quietly", "very", "lantern", "north",
                                                  "harbor", "simply", "copper", "really", "meadow", "bright",
                                                  "window", "slowly", "garden", "ancient"};
  std::uniform_int_distribution<std::size_t> word(0, kWords.size() - 1);
  std::uniform_int_distribution<int> filler_len(1, 5);
  std::uniform_int_distribution<int> span_len(1, 6);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution rare(0.2);
  std::uniform_int_distribution<std::size_t> span_count(0, max_spans);

  soylent::ShorteningBundle b;
  std::string& t = b.original;
  const auto add_words = [&](int n) {
    for (int i = 0; i < n; ++i) {
      if (!t.empty() && t.back() != '\n') t += ' ';
      t += kWords[word(rng)];
    }
  };
  struct Pending {
    std::size_t start, end;
    std::vector<std::string> tokens;
    bool quoted;
  };
  std::vector<Pending> pending;
  const auto n_spans = span_count(rng);
  for (std::size_t s = 0; s < n_spans; ++s) {
    add_words(filler_len(rng));
    if (rare(rng)) {
      t += " \"" + kWords[word(rng)] + " " + kWords[word(rng)] + "\"";
    }
    if (rare(rng)) {
      t += ".\n";
    } else if (rare(rng)) {
      t += ".";
    }
    Pending p{};
    t += (t.empty() || t.back() == '\n') ? "" : " ";
    p.start = t.size();
    const int len = span_len(rng);
    p.quoted = len >= 3 && rare(rng);
    const int quote_at = p.quoted ? std::uniform_int_distribution<int>(0, len - 2)(rng) : -1;
    for (int i = 0; i < len; ++i) {
      std::string tok = kWords[word(rng)];
      if (i == quote_at) {
        tok = "\"" + tok + " " + kWords[word(rng)] + "\"";
        ++i;
      }
      if (!p.tokens.empty()) t += ' ';
      t += tok;
      p.tokens.push_back(tok);
    }
    p.end = t.size();
    pending.push_back(std::move(p));
  }
  add_words(filler_len(rng));
  t += ".";

  b.original_words = text::word_count(t);
  b.chunks.push_back({{0, t.size()}, soylent::split_sentences(t)});

  std::uint64_t variants = 1;
  for (const auto& p : pending) {
    soylent::SpanOptions so;
    so.span = {0, p.start, p.end, 2};
    const auto original = t.substr(p.start, p.end - p.start);
    const auto orig_words = text::word_count(original);
    const int wanted = std::uniform_int_distribution<int>(0, 3)(rng);
    std::vector<std::string> seen;
    for (int k = 0; k < wanted && variants * (so.options.size() + 2) <= max_variants; ++k) {
      std::string repl;
      const bool quoted_token_only = p.quoted;
      if (!quoted_token_only && coin(rng)) {
        repl.clear();  // deletion
      } else {
        for (const auto& tok : p.tokens) {
          if (tok.front() == '"' || coin(rng)) {
            if (!repl.empty()) repl += ' ';
            repl += tok;
          }
        }
      }
      if (text::word_count(repl) >= orig_words) continue;
      if (std::find(seen.begin(), seen.end(), repl) != seen.end()) continue;
      seen.push_back(repl);
      soylent::EditOption o;
      o.kind = repl.empty() ? soylent::EditKind::Delete : soylent::EditKind::Edit;
      o.start = p.start;
      o.end = p.end;
      o.replacement = repl;
      o.word_delta = static_cast<int>(text::word_count(repl)) - static_cast<int>(orig_words);
      so.options.push_back(std::move(o));
    }
    soylent::EditOption keep;
    keep.kind = soylent::EditKind::Keep;
    keep.start = p.start;
    keep.end = p.end;
    keep.replacement = original;
    so.options.push_back(std::move(keep));
    variants *= so.options.size();
    b.spans.push_back(std::move(so));
  }
  soylent::check_bundle(b);
  return b;
}

/// Calls `fn` with every option-index vector of `b`, in lexicographic order.
inline void for_each_choice(const soylent::ShorteningBundle& b,
                            const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> choice(b.spans.size(), 0);
  while (true) {
    fn(choice);
    std::size_t i = choice.size();
    while (i > 0) {
      --i;
      if (++choice[i] < b.spans[i].options.size()) break;
      choice[i] = 0;
      if (i == 0) return;
    }
    if (choice.empty()) return;
  }
}

/// Closest total to `target`; ties by fewer non-keep picks, then the smaller vector.
struct EnumeratedBest {
  std::vector<std::size_t> choice;
  std::size_t words = 0;
};

inline EnumeratedBest enumerate_best(const soylent::ShorteningBundle& b, long long target) {
  EnumeratedBest best;
  bool found = false;
  long long best_gap = 0;
  std::size_t best_nk = 0;
  for_each_choice(b, [&](const std::vector<std::size_t>& c) {
    long long words = static_cast<long long>(b.original_words);
    std::size_t nk = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      words += b.spans[i].options[c[i]].word_delta;
      if (c[i] + 1 != b.spans[i].options.size()) ++nk;
    }
    const long long gap = words > target ? words - target : target - words;
    if (!found || gap < best_gap || (gap == best_gap && (nk < best_nk || (nk == best_nk && c < best.choice)))) {
      found = true;
      best_gap = gap;
      best_nk = nk;
      best.choice = c;
      best.words = static_cast<std::size_t>(words);
    }
  });
  return best;
}

}  // namespace chainflow::testing
