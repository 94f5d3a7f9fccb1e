// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "chainflow/actors/replay.hpp"
#include "chainflow/cascade/cascade.hpp"
#include "chainflow/evalkit/baselines.hpp"
#include "chainflow/evalkit/metrics.hpp"
#include "chainflow/mnovel/mnovel.hpp"
#include "chainflow/soylent/soylent.hpp"
#include "chainflow/template_ids.hpp"
#include "chainflow/validators/validators.hpp"
#include "support.hpp"

namespace ca = chainflow::actors;
namespace cc = chainflow::cascade;
namespace ce = chainflow::evalkit;
namespace cm = chainflow::mnovel;
namespace sy = chainflow::soylent;
namespace cv = chainflow::validators;
namespace text = chainflow::text;
using chainflow::testing::Rig;
using chainflow::testing::TempDir;
using Clock = std::chrono::steady_clock;

namespace {

/// Collects violations for one criterion; only the first few are kept verbatim.
struct Verdict {
  std::size_t checks = 0;
  std::size_t violations = 0;
  std::vector<std::string> samples;
  std::string note;

  void expect(bool ok, const std::function<std::string()>& what) {
    ++checks;
    if (ok) return;
    ++violations;
    if (samples.size() < 3) samples.push_back(what());
  }
};

bool report(std::string_view name, const Verdict& v, double seconds, double budget_seconds) {
  const bool in_time = budget_seconds <= 0 || seconds < budget_seconds;
  const bool pass = v.violations == 0 && in_time;
  std::ostringstream line;
  line << (pass ? "PASS " : "FAIL ") << name << ": " << v.checks << " checks, " << v.violations << " violations, "
       << std::fixed;
  line.precision(2);
  line << seconds << " s";
  if (budget_seconds > 0) line << " (limit " << budget_seconds << " s)";
  if (!v.note.empty()) line << ", " << v.note;
  std::cout << line.str() << '\n';
  for (const auto& s : v.samples) std::cout << "    " << s << '\n';
  return pass;
}

template <class Fn>
bool criterion(std::string_view name, double budget_seconds, Fn fn) {
  Verdict v;
  const auto start = Clock::now();
  try {
    fn(v);
  } catch (const std::exception& e) {
    ++v.violations;
    v.samples.push_back(std::string("uncaught: ") + e.what());
  }
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return report(name, v, seconds, budget_seconds);
}

std::string vec_str(const std::vector<std::size_t>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "]";
}

// ---- taxonomy ------------------------------------------------------------

std::vector<std::vector<std::size_t>> item_sets(const cc::TaxonomyBundle& b) {
  std::vector<std::vector<std::size_t>> sets;
  for (std::size_t c = 0; c < b.categories.size(); ++c) sets.push_back(b.members_of(c));
  return sets;
}

void collect_items(const nlohmann::json& node, std::multiset<std::string>& out) {
  if (node.contains("items")) {
    for (const auto& i : node["items"]) out.insert(i.get<std::string>());
  }
  if (node.contains("children")) {
    for (const auto& c : node["children"]) collect_items(c, out);
  }
}

std::size_t union_size(const cc::TaxonomyBundle& b) {
  std::set<std::size_t> all;
  for (const auto& s : item_sets(b)) all.insert(s.begin(), s.end());
  return all.size();
}

void item_conservation(Verdict& v) {
  std::mt19937_64 rng(20240101);
  std::uniform_int_distribution<std::size_t> size(10, 100);
  std::size_t grid_points = 0;
  for (int run = 0; run < 100; ++run) {
    Rig rig(static_cast<std::uint64_t>(run) + 1);
    auto engine = rig.engine();
    const auto items = chainflow::testing::numbered("thing", size(rng));
    cc::CascadeConfig config;
    config.subset_size = 16;
    const auto bundle = cc::run_cascade(items, config, *engine);
    const std::set<std::string> input(items.begin(), items.end());
    const auto max_s = std::max<std::size_t>(union_size(bundle), 1);
    for (double tau : cc::threshold_grid(bundle)) {
      for (std::size_t s = 1; s <= max_s + 1; ++s) {
        ++grid_points;
        const auto tax = cc::build_taxonomy(bundle, {tau, static_cast<int>(s), 0.8});
        std::multiset<std::string> placed;
        collect_items(tax.to_json()["root"], placed);
        const std::set<std::string> distinct(placed.begin(), placed.end());
        v.expect(distinct == input, [&] {
          return "run " + std::to_string(run) + " tau " + std::to_string(tau) + " s " + std::to_string(s) +
                 ": placed items differ from input";
        });
      }
    }
  }
  v.note = "100 runs, " + std::to_string(grid_points) + " grid points";
}

/// Components of the thresholded graph by repeated relaxation; independent of the union-find path.
std::set<std::set<std::size_t>> closure_components(const std::vector<std::vector<double>>& sims, double tau) {
  const auto n = sims.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) reach[a][b] = a == b || sims[a][b] >= tau;
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) reach[a][b] = reach[a][b] || (reach[a][k] && reach[k][b]);
    }
  }
  std::set<std::set<std::size_t>> out;
  for (std::size_t a = 0; a < n; ++a) {
    std::set<std::size_t> comp;
    for (std::size_t b = 0; b < n; ++b) {
      if (reach[a][b]) comp.insert(b);
    }
    out.insert(comp);
  }
  return out;
}

std::set<std::set<std::size_t>> merged_members(const cc::TaxonomyBundle& b, double tau) {
  std::set<std::set<std::size_t>> out;
  for (const auto& m : cc::merge_components(b.categories, item_sets(b), b.sims, tau)) {
    out.insert(std::set<std::size_t>(m.members.begin(), m.members.end()));
  }
  return out;
}

void merge_oracle(Verdict& v) {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> cats(1, 10);
  for (int t = 0; t < 500; ++t) {
    const auto b = chainflow::testing::random_taxonomy_bundle(rng, 12, cats(rng));
    for (double tau : cc::threshold_grid(b)) {
      v.expect(merged_members(b, tau) == closure_components(b.sims, tau),
               [&] { return "matrix " + std::to_string(t) + " tau " + std::to_string(tau); });
    }
  }
  v.note = "500 matrices";
}

/// Monotonicity properties that hold for any bundle: count never rises with
/// the size floor, the unfiltered count never falls as the threshold rises,
/// and merged groups only split as the threshold rises.
void check_monotone(const cc::TaxonomyBundle& b, Verdict& v, const std::string& tag) {
  const auto grid = cc::threshold_grid(b);
  const auto max_s = static_cast<int>(std::max<std::size_t>(union_size(b), 1));
  std::size_t prev_unfiltered = 0;
  std::set<std::set<std::size_t>> prev_groups;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double tau = grid[g];
    std::size_t prev = std::numeric_limits<std::size_t>::max();
    for (int s = 1; s <= max_s + 1; ++s) {
      const auto n = cc::category_count(b, tau, s);
      v.expect(n <= prev, [&] { return tag + ": count rose with s at tau " + std::to_string(tau); });
      prev = n;
    }
    const auto unfiltered = cc::category_count(b, tau, 1);
    v.expect(g == 0 || unfiltered >= prev_unfiltered,
             [&] { return tag + ": s=1 count fell as tau rose to " + std::to_string(tau); });
    prev_unfiltered = unfiltered;
    const auto groups = merged_members(b, tau);
    if (g > 0) {
      for (const auto& fine : groups) {
        const bool nested = std::any_of(prev_groups.begin(), prev_groups.end(), [&](const auto& coarse) {
          return std::includes(coarse.begin(), coarse.end(), fine.begin(), fine.end());
        });
        v.expect(nested, [&] { return tag + ": groups at tau " + std::to_string(tau) + " do not refine"; });
      }
    }
    prev_groups = groups;
  }
}

void controllability(Verdict& v) {
  const auto ladder = chainflow::testing::ladder_bundle();
  int exact = 0;
  for (int target = 2; target <= 20; ++target) {
    const auto r = cc::sweep_targets(ladder, target);
    if (r.percent_error == 0.0) ++exact;
    v.expect(cc::category_count(ladder, r.params.merge_threshold, r.params.min_category_size) == r.count,
             [&] { return "target " + std::to_string(target) + ": reported count does not rebuild"; });
  }
  v.expect(exact * 10 >= 19 * 9, [&] { return std::to_string(exact) + " of 19 targets exact"; });
  check_monotone(ladder, v, "ladder");
  std::mt19937_64 rng(5);
  for (int t = 0; t < 30; ++t) {
    check_monotone(chainflow::testing::random_taxonomy_bundle(rng, 30, 10), v, "random " + std::to_string(t));
  }
  v.note = std::to_string(exact) + "/19 targets exact";
}

// ---- shortening ----------------------------------------------------------

std::multiset<std::string> quote_multiset(std::string_view t) {
  const auto q = cv::quoted_segments(t);
  return {q.begin(), q.end()};
}

void shortening_oracle(Verdict& v) {
  std::mt19937_64 rng(4242);
  std::uint64_t enumerated_total = 0;
  for (int t = 0; t < 200; ++t) {
    const auto b = chainflow::testing::random_shortening_bundle(rng, 12);
    const auto tag = "bundle " + std::to_string(t);
    struct Row {
      std::vector<std::size_t> choice;
      long long words;
      std::size_t non_keep;
    };
    std::vector<Row> rows;
    const auto original_quotes = quote_multiset(b.original);
    chainflow::testing::for_each_choice(b, [&](const std::vector<std::size_t>& c) {
      const auto out = sy::apply_selection(b, c);
      std::size_t nk = 0;
      for (std::size_t i = 0; i < c.size(); ++i) nk += c[i] + 1 != b.spans[i].options.size() ? 1 : 0;
      rows.push_back({c, static_cast<long long>(text::word_count(out)), nk});
      v.expect(sy::selection_words(b, c) == text::word_count(out),
               [&] { return tag + " " + vec_str(c) + ": word count disagrees with the text"; });
      v.expect(cv::quotes_balanced(out) && quote_multiset(out) == original_quotes,
               [&] { return tag + " " + vec_str(c) + ": quotes changed"; });
    });
    enumerated_total += rows.size();
    v.expect(sy::variant_count(b) == rows.size(), [&] { return tag + ": variant count differs from enumeration"; });

    std::vector<std::size_t> all_keep;
    for (const auto& s : b.spans) all_keep.push_back(s.options.size() - 1);
    v.expect(sy::apply_selection(b, all_keep) == b.original, [&] { return tag + ": all-keep is not the input"; });

    const auto original = static_cast<long long>(b.original_words);
    for (long long target = 0; target <= original + 2; ++target) {
      const Row* best = nullptr;
      long long best_gap = 0;
      for (const auto& r : rows) {
        const long long gap = std::llabs(r.words - target);
        if (!best || gap < best_gap ||
            (gap == best_gap && (r.non_keep < best->non_keep || (r.non_keep == best->non_keep && r.choice < best->choice)))) {
          best = &r;
          best_gap = gap;
        }
      }
      const auto got = sy::select_length(b, target);
      v.expect(got.choice == best->choice && static_cast<long long>(got.achieved) == best->words, [&] {
        return tag + " target " + std::to_string(target) + ": got " + vec_str(got.choice) + " want " +
               vec_str(best->choice);
      });
    }
  }
  v.note = "200 bundles, " + std::to_string(enumerated_total) + " selections";
}

const std::vector<std::string>& passages() {
  static const std::vector<std::string> kPassages = {
      "The committee met on Tuesday in order to discuss the budget for the coming year. It was decided, after a "
      "long and very detailed debate, that spending would be reduced across the board. The chair said \"we must "
      "act now\" and everyone in the room agreed with that statement. Several members noted that the reductions "
      "would be painful but absolutely necessary at this point in time. A final vote is expected to take place "
      "at some point next week.",
      "Due to the fact that the weather was really quite bad, the picnic that we had planned was postponed until "
      "further notice. Many of the children were very disappointed. Their teacher told them \"there will be "
      "other sunny days\" and promised a new date. In the meantime, the class basically spent the afternoon "
      "indoors playing games and reading books.\n\nThe next morning the sun came out, and it was actually a "
      "lovely day for a walk in the park.",
      "It is important to note that the new library will be open to the public each and every day of the week. "
      "The building itself has been designed in such a way that it uses very little energy. Visitors can borrow "
      "books, attend talks, and generally make use of the many quiet spaces that are available for study."};
  return kPassages;
}

void shortening_shape(Verdict& v) {
  int bundles = 0;
  std::size_t spans = 0;
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    for (const auto& passage : passages()) {
      Rig rig(seed);
      auto engine = rig.engine();
      const auto b = sy::run_soylent(passage, {}, *engine);
      ++bundles;
      spans += b.spans.size();
      const auto tag = "seed " + std::to_string(seed) + " bundle " + std::to_string(bundles);
      const auto original = static_cast<long long>(b.original_words);
      std::size_t prev = 0;
      for (long long target = 0; target <= original + 20; ++target) {
        const auto pick = sy::select_length(b, target);
        v.expect(pick.achieved >= prev, [&] { return tag + ": achieved fell at target " + std::to_string(target); });
        prev = pick.achieved;
        if (target >= original) {
          bool all_keep = true;
          for (std::size_t i = 0; i < pick.choice.size(); ++i) {
            all_keep = all_keep && pick.choice[i] + 1 == b.spans[i].options.size();
          }
          v.expect(all_keep && pick.achieved == b.original_words,
                   [&] { return tag + ": target " + std::to_string(target) + " is not served by all-keep"; });
          v.expect(sy::apply_selection(b, pick.choice) == b.original,
                   [&] { return tag + ": all-keep text differs from input"; });
        }
        if (target == original) {
          v.expect(ce::percent_error(static_cast<double>(pick.achieved), static_cast<double>(target)) == 0.0,
                   [&] { return tag + ": nonzero error at the original length"; });
        }
      }
    }
  }
  v.expect(spans > 0, [] { return std::string("scripted bundles offered no edits"); });
  v.note = std::to_string(bundles) + " scripted bundles, " + std::to_string(spans) + " spans";
}

// ---- story ---------------------------------------------------------------

std::string hex_of(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

/// Scripted run accepting exactly `k` suggestions over five rounds.
cm::StoryBundle story_run(int k, std::uint64_t seed) {
  Rig rig(seed);
  auto& book = rig.book();
  const auto banned = static_cast<std::size_t>(cv::kBannedSeeds.size());
  book.on(std::string(chainflow::tmpl::kMnSuggest), [](const ca::ActorRequest& r) {
    return std::optional<std::string>("Suggestion " + hex_of(r.vars.at("summary").get<std::string>()) + "-" +
                                      std::to_string(r.replicate_index) + ".");
  });
  book.on(std::string(chainflow::tmpl::kMnCheckOverlap), [k, banned](const ca::ActorRequest& r) {
    const auto accepted_so_far = r.vars.at("prior").size() - banned;
    return std::optional<std::string>(static_cast<int>(accepted_so_far) >= k ? "FAIL" : "PASS");
  });
  for (auto id : {chainflow::tmpl::kMnCheckImplemented, chainflow::tmpl::kMnCheckWording}) {
    book.on(std::string(id), [](const ca::ActorRequest&) { return std::optional<std::string>("PASS"); });
  }
  auto engine = rig.engine();
  cm::MnConfig config;
  config.rounds = 5;
  return cm::run_mnovel("Malcolm finds himself alone in a runaway hot air balloon.", config, *engine);
}

void story_matrix(Verdict& v) {
  for (int k : {0, 1, 3, 5}) {
    for (std::uint64_t seed : {1u, 2u}) {
      const auto b = story_run(k, seed);
      const auto tag = "k=" + std::to_string(k) + " seed " + std::to_string(seed);
      v.expect(static_cast<int>(b.accepted.size()) == k, [&] {
        return tag + ": accepted " + std::to_string(b.accepted.size());
      });
      v.expect(b.variants.size() == (std::size_t{1} << k),
               [&] { return tag + ": " + std::to_string(b.variants.size()) + " variants"; });
      v.expect(cm::get_variant(b, 0) == b.initial, [&] { return tag + ": mask 0 is not the initial story"; });
      for (std::size_t m = 0; m < b.variants.size(); ++m) {
        const auto& var = b.variants[m];
        std::vector<std::string> want;
        for (std::size_t bit = 0; bit < b.accepted.size(); ++bit) {
          if ((m >> bit) & 1u) want.push_back("s" + std::to_string(b.accepted[bit].round_index + 1));
        }
        v.expect(var.story.provenance == want, [&] { return tag + " mask " + std::to_string(m) + ": provenance"; });
        v.expect(var.trail.size() == var.story.scenes.size(),
                 [&] { return tag + " mask " + std::to_string(m) + ": trail size"; });
        for (std::size_t i = 0; i < var.trail.size() && i < var.story.scenes.size(); ++i) {
          const auto& t = var.trail[i];
          const bool within = static_cast<double>(t.words) <= b.config.length_cap * static_cast<double>(t.base_words);
          v.expect(within && t.words == text::word_count(var.story.scenes[i]) && (t.edited || t.words == t.base_words),
                   [&] { return tag + " mask " + std::to_string(m) + " scene " + std::to_string(i) + ": length cap"; });
        }
      }
      if (k == 5) {
        // Five accepted suggestions give 32 combinations, the empty one included; there is no 33rd.
        v.expect(b.variants.size() == 32u, [&] { return tag + ": expected 32 variants"; });
      }
    }
  }
  v.note = "k in {0,1,3,5}, 32 variants at k=5";
}

// ---- baselines -----------------------------------------------------------

void baseline_cost(Verdict& v) {
  using TK = ce::TaskKind;
  using BK = ce::BaselineKind;
  const nlohmann::json inputs = {{"items", chainflow::testing::numbered("object", 12)},
                                 {"text", passages()[0]},
                                 {"prompt", "A city in the sky."},
                                 {"target", 5}};
  int pairings = 0;
  for (auto task : {TK::Taxonomy, TK::Shorten, TK::Story}) {
    for (auto kind : {BK::ZeroShot, BK::ZeroShotTarget, BK::ZeroShotFfv, BK::ZeroShotCombo}) {
      try {
        ce::baseline_template(task, kind);
      } catch (const chainflow::Error&) {
        continue;
      }
      for (std::uint64_t seed : {1u, 2u, 3u}) {
        Rig rig(seed);
        const auto run = ce::run_baseline(task, kind, inputs, *rig.actor, rig.templates, {.max_attempts = 3});
        v.expect(run.ledger.call_count() == 1, [&] {
          return std::string(ce::to_string(task)) + "/" + std::string(ce::to_string(kind)) + ": " +
                 std::to_string(run.ledger.call_count()) + " calls";
        });
      }
      ++pairings;
    }
  }
  v.note = std::to_string(pairings) + " pairings";
}

// ---- determinism ---------------------------------------------------------

using ChainFn = std::function<nlohmann::json(chainflow::engine::Engine&)>;

void determinism(Verdict& v) {
  const std::vector<std::pair<std::string, ChainFn>> chains = {
      {"cascade",
       [](chainflow::engine::Engine& e) {
         const auto items = chainflow::testing::numbered("gadget", 24);
         return cc::to_json(cc::run_cascade(items, {}, e));
       }},
      {"soylent", [](chainflow::engine::Engine& e) { return sy::to_json(sy::run_soylent(passages()[1], {}, e)); }},
      {"mnovel",
       [](chainflow::engine::Engine& e) {
         cm::MnConfig config;
         config.rounds = 3;
         return cm::to_json(cm::run_mnovel("A city in the sky.", config, e));
       }},
  };
  for (const auto& [name, run] : chains) {
    std::string reference;
    for (std::size_t p : {1u, 2u, 8u}) {
      const auto tag = name + " parallelism " + std::to_string(p);
      TempDir cache;
      Rig rig(31);
      std::string recorded;
      std::string recorded_ledger;
      {
        ca::ReplayCache recorder(cache.path(), rig.actor);
        chainflow::engine::Engine engine(recorder, rig.templates, {.parallelism = p});
        recorded = run(engine).dump();
        recorded_ledger = engine.ledger().to_json(false).dump();
      }
      auto refusing = std::make_shared<ca::RefusingActor>();
      ca::ReplayCache replay(cache.path(), refusing);
      chainflow::engine::Engine engine(replay, rig.templates, {.parallelism = p});
      const auto replayed = run(engine).dump();
      v.expect(replayed == recorded, [&] { return tag + ": warm replay differs"; });
      v.expect(refusing->attempts() == 0,
               [&] { return tag + ": " + std::to_string(refusing->attempts()) + " network calls"; });
      v.expect(engine.ledger().cache_hit_count() == engine.ledger().call_count(),
               [&] { return tag + ": replay ledger has misses"; });
      if (reference.empty()) reference = recorded;
      v.expect(recorded == reference, [&] { return tag + ": bundle differs from parallelism 1"; });
    }
  }
  v.note = "3 chains x parallelism {1,2,8}";
}

// ---- validators ----------------------------------------------------------

std::string repeat_words(int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s += (i ? " w" : "w") + std::to_string(i);
  return s;
}

void validator_rows(Verdict& v) {
  using B = cv::Ballot;
  const auto row = [&](const std::string& name, bool got, bool want) {
    v.expect(got == want, [&] { return name; });
  };
  row("plain category name", bool(cv::category_name_ok("kitchen items")), true);
  row("'and' in category name", bool(cv::category_name_ok("food and drink")), false);
  row("slash in category name", bool(cv::category_name_ok("indoor/outdoor")), false);
  row("'android' is not 'and'", bool(cv::category_name_ok("android")), true);
  row("'doors' is not 'or'", bool(cv::category_name_ok("doors")), true);
  row("uppercase OR", bool(cv::category_name_ok("cats OR dogs")), false);
  row("comma in category name", bool(cv::category_name_ok("tools, hardware")), false);
  row("phrase present", bool(cv::phrase_exists("the quick brown fox", "quick brown")), true);
  row("phrase whitespace differs", bool(cv::phrase_exists("the quick brown fox", "quick  brown")), false);
  row("empty haystack", bool(cv::phrase_exists("", "x")), false);
  row("shorter rewrite", bool(cv::replacement_shorter("in order to", "to")), true);
  row("longer rewrite", bool(cv::replacement_shorter("to", "in order to")), false);
  row("deletion is shorter", bool(cv::replacement_shorter("remove this", "")), true);
  row("same length rewrite", bool(cv::replacement_shorter("two words", "two items")), false);
  row("quote kept", bool(cv::quotes_preserved(R"(He said "no way" today.)", R"(He said "no way".)")), true);
  row("quote reworded", bool(cv::quotes_preserved(R"(He said "no way" today.)", R"(He said "nope".)")), false);
  row("quote added",
      bool(cv::quotes_preserved(R"(He said "no way" today.)", R"(He said "no way" and "extra".)")), false);
  row("151 of 100 words", bool(cv::length_ratio_ok(repeat_words(100), repeat_words(151), 1.5)), false);
  row("150 of 100 words, cap inclusive", bool(cv::length_ratio_ok(repeat_words(100), repeat_words(150), 1.5)), true);
  row("40 of 100 words", bool(cv::length_ratio_ok(repeat_words(100), repeat_words(40))), true);
  const std::vector<B> kkr{B::Keep, B::Keep, B::Reject};
  const std::vector<B> rk{B::Reject, B::Keep};
  const std::vector<B> k{B::Keep};
  row("keep keep reject", bool(cv::tally_votes(kkr)), true);
  row("reject keep", bool(cv::tally_votes(rk)), false);
  row("single keep", bool(cv::tally_votes(k)), true);

  bool threw = false;
  try {
    cv::category_name_ok("  ");
  } catch (const chainflow::Error& e) {
    threw = e.code() == "EmptyName";
  }
  row("blank category name throws", threw, true);

  const auto checks = [&](std::string overlap, std::string implemented, std::string wording,
                          const std::string& candidate, const std::vector<std::string>& prior) {
    ca::ScriptBook book(0, false);
    const auto answer = [](std::string t) { return [t](const ca::ActorRequest&) { return std::optional<std::string>(t); }; };
    book.on(std::string(chainflow::tmpl::kMnCheckOverlap), answer(overlap));
    book.on(std::string(chainflow::tmpl::kMnCheckImplemented), answer(implemented));
    book.on(std::string(chainflow::tmpl::kMnCheckWording), answer(wording));
    ca::ScriptedActor actor(std::move(book));
    const auto templates = ca::TemplateRegistry::defaults();
    chainflow::engine::Engine engine(actor, templates);
    return cv::suggestion_checks(engine, candidate, prior, "story");
  };
  row("all suggestion checks pass", bool(checks("PASS", "PASS", "PASS", "Give the cat a name.", {})), true);
  row("repeat of prior suggestion",
      bool(checks("FAIL", "PASS", "PASS", "Give the cat a name.", {"Give the cat a name."})), false);
  row("banned seed", bool(checks("PASS", "PASS", "PASS", std::string(cv::kBannedSeeds[1]), cv::with_banned_seeds({}))),
      false);
  row("already implemented", bool(checks("PASS", "FAIL", "PASS", "Add a storm.", {})), false);
  v.note = std::to_string(v.checks) + " rows";
}

}  // namespace

int main() {
  bool ok = true;
  ok &= criterion("item conservation", 30, item_conservation);
  ok &= criterion("taxonomy controllability", 10, controllability);
  ok &= criterion("merge oracle", 0, merge_oracle);
  ok &= criterion("shortening assembly oracle", 60, shortening_oracle);
  ok &= criterion("shortening controllability shape", 0, shortening_shape);
  ok &= criterion("story matrix", 0, story_matrix);
  ok &= criterion("baseline cost", 0, baseline_cost);
  ok &= criterion("determinism and replay", 0, determinism);
  ok &= criterion("validator suite", 0, validator_rows);
  std::cout << (ok ? "ALL PASS" : "SOME FAILED") << '\n';
  return ok ? 0 : 1;
}
