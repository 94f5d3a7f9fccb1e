#include <gtest/gtest.h>

#include <set>

#include "chainflow/soylent/soylent.hpp"
#include "chainflow/template_ids.hpp"
#include "chainflow/validators/validators.hpp"
#include "support.hpp"

namespace cs = chainflow::soylent;
namespace ca = chainflow::actors;
namespace text = chainflow::text;
using chainflow::Error;
using chainflow::SchemaViolation;
using chainflow::testing::Rig;

namespace {

std::vector<std::string> sentence_texts(std::string_view t) {
  std::vector<std::string> out;
  for (const auto& r : cs::split_sentences(t)) out.emplace_back(t.substr(r.start, r.size()));
  return out;
}

std::string sentences(int n) {
  std::string t;
  for (int i = 0; i < n; ++i) t += (i ? " " : "") + std::string("Sentence number ") + std::to_string(i) + " ends here.";
  return t;
}

}  // namespace

TEST(Sentences, TwoPlainSentences) {
  EXPECT_EQ(sentence_texts("It rained. She left."), (std::vector<std::string>{"It rained.", "She left."}));
}

TEST(Sentences, AbbreviationGuard) {
  EXPECT_EQ(sentence_texts("Dr. Smith arrived. It rained."),
            (std::vector<std::string>{"Dr. Smith arrived.", "It rained."}));
}

TEST(Sentences, EmptyText) { EXPECT_TRUE(cs::split_sentences("").empty()); }

TEST(Sentences, ClosersTerminatorRunsAndRemainder) {
  EXPECT_EQ(sentence_texts("Really?! Yes. (Fine.) Then \"go.\" And a tail"),
            (std::vector<std::string>{"Really?!", "Yes. (Fine.)", "Then \"go.\"", "And a tail"}));
  EXPECT_EQ(sentence_texts("Prices rose 3.5 percent. Good."),
            (std::vector<std::string>{"Prices rose 3.5 percent.", "Good."}));
  EXPECT_EQ(sentence_texts("  Padded.  \n"), std::vector<std::string>{"Padded."});
}

TEST(Chunks, TwentyThreeSentencesInTens) {
  const auto t = sentences(23);
  const auto chunks = cs::chunk(t, {});
  ASSERT_EQ(chunks.size(), 3u);
  EXPECT_EQ(chunks[0].sentences.size(), 10u);
  EXPECT_EQ(chunks[1].sentences.size(), 10u);
  EXPECT_EQ(chunks[2].sentences.size(), 3u);
  EXPECT_EQ(chunks[0].range.start, 0u);
  EXPECT_EQ(chunks[0].range.end, chunks[1].range.start);
  EXPECT_EQ(chunks[1].range.end, chunks[2].range.start);
  EXPECT_EQ(chunks[2].range.end, t.size());
}

TEST(Chunks, TenSentencesIsOneChunk) { EXPECT_EQ(cs::chunk(sentences(10), {}).size(), 1u); }

TEST(Chunks, NoSentencesNoChunks) {
  EXPECT_TRUE(cs::chunk("", {}).empty());
  Rig rig(1);
  auto engine = rig.engine();
  const auto b = cs::run_soylent("", {}, *engine);
  EXPECT_TRUE(b.chunks.empty());
  EXPECT_TRUE(b.spans.empty());
  EXPECT_EQ(cs::variant_count(b), 1u);
  EXPECT_EQ(engine->ledger().call_count(), 0u);
}

TEST(Phrases, ParseAndLocate) {
  const auto phrases = cs::parse_phrases("- really very\n* \"quite\"\n\n1. not present here\n");
  EXPECT_EQ(phrases, (std::vector<std::string>{"really very", "\"quite\"", "not present here"}));
  const std::string chunk = "It was really very quite good.";
  const auto located = cs::locate_phrases(chunk, 2, phrases);
  ASSERT_EQ(located.size(), 2u);
  EXPECT_EQ(located[0].range, (cs::Range{7, 18}));
  EXPECT_EQ(located[1].range, (cs::Range{19, 24}));
  EXPECT_EQ(located[1].replicate, 2);
}

namespace {
const std::string kSpanText = "Alpha beta gamma delta epsilon zeta eta theta iota kappa lambda mu.";
}

TEST(Resolve, OverlappingProposalsUnionAndSnap) {
  const std::vector<cs::Proposal> props{{0, {5, 20}}, {1, {15, 30}}};
  const auto spans = cs::resolve_spans(kSpanText, 0, props, 2);
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_LE(spans[0].start, 6u);
  EXPECT_GE(spans[0].end, 30u);
  EXPECT_TRUE(spans[0].start == 0 || kSpanText[spans[0].start - 1] == ' ');
  EXPECT_TRUE(spans[0].end == kSpanText.size() || kSpanText[spans[0].end] == ' ');
  EXPECT_EQ(spans[0].agreement, 2);
  EXPECT_EQ(kSpanText.substr(spans[0].start, spans[0].end - spans[0].start), "beta gamma delta epsilon");
}

TEST(Resolve, SingleReplicateDropped) {
  const std::vector<cs::Proposal> props{{0, {6, 16}}, {0, {11, 22}}};
  EXPECT_TRUE(cs::resolve_spans(kSpanText, 0, props, 2).empty());
}

TEST(Resolve, AgreementOneKeepsEveryProposalWithoutOverlaps) {
  const std::vector<cs::Proposal> props{{0, {6, 10}}, {1, {23, 30}}, {2, {46, 50}}};
  const auto spans = cs::resolve_spans(kSpanText, 0, props, 1);
  ASSERT_EQ(spans.size(), 3u);
  for (std::size_t i = 1; i < spans.size(); ++i) EXPECT_FALSE(spans[i - 1].range().overlaps(spans[i].range()));
}

TEST(Resolve, HigherAgreementWinsOverlap) {
  // Two groups that only meet after snapping: "gam" (one vote) and "ma delta" (two votes).
  const std::vector<cs::Proposal> props{{0, {11, 14}}, {1, {14, 22}}, {2, {15, 22}}};
  const auto spans = cs::resolve_spans(kSpanText, 0, props, 1);
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(spans[0].agreement, 2);
  EXPECT_EQ(spans[0].range(), (cs::Range{11, 22}));
}

TEST(QuoteSafe, Cases) {
  const std::string t = R"(He said "no way" today. Then left.)";
  const cs::Range quoted_and_after{8, 22};
  EXPECT_TRUE(cs::quote_safe(t, quoted_and_after, R"("no way")"));
  EXPECT_FALSE(cs::quote_safe(t, quoted_and_after, R"("nope")"));
  EXPECT_FALSE(cs::quote_safe(t, {12, 22}, "today"));
  EXPECT_FALSE(cs::quote_safe(t, {24, 28}, R"("x")"));
  EXPECT_TRUE(cs::quote_safe(t, {24, 28}, ""));
}

namespace {

struct FixRig {
  Rig rig{1, false};
  std::string text;
  std::vector<cs::Chunk> chunks;

  FixRig(std::string t, std::string edit, std::vector<std::string> verify_ballots) : text(std::move(t)) {
    chunks = cs::chunk(text, {});
    auto& book = rig.book();
    book.on(std::string(chainflow::tmpl::kSoylentEdit), [edit](const ca::ActorRequest&) {
      return std::optional<std::string>(edit);
    });
    book.on(std::string(chainflow::tmpl::kSoylentMerge), [](const ca::ActorRequest& r) {
      return std::optional<std::string>(r.vars.at("passage").get<std::string>() + " indeed");
    });
    book.on(std::string(chainflow::tmpl::kSoylentDelete), [](const ca::ActorRequest&) {
      return std::optional<std::string>("KEEP");
    });
    book.on(std::string(chainflow::tmpl::kSoylentVerify), [verify_ballots](const ca::ActorRequest& r) {
      return std::optional<std::string>(verify_ballots.at(static_cast<std::size_t>(r.replicate_index)));
    });
  }

  cs::Span span_of(std::string_view phrase) const {
    const auto at = text.find(phrase);
    return {0, at, at + phrase.size(), 2};
  }
};

std::size_t node_calls(const chainflow::engine::RunLedger& ledger, std::string_view node) {
  return static_cast<std::size_t>(std::count_if(ledger.entries().begin(), ledger.entries().end(),
                                                [&](const auto& e) { return e.node_id == node; }));
}

}  // namespace

TEST(Fix, LongerCandidateFilteredBeforeVoting) {
  FixRig f("We went in order to see it. It was fine.", "in the order so as to", {"KEEP", "KEEP", "KEEP"});
  auto engine = f.rig.engine();
  const auto options = cs::fix_span(f.text, f.chunks, f.span_of("in order to"), {}, *engine);
  ASSERT_EQ(options.size(), 1u);
  EXPECT_EQ(options[0].kind, cs::EditKind::Keep);
  EXPECT_EQ(node_calls(engine->ledger(), "verify"), 0u);
}

TEST(Fix, RewordedQuoteFiltered) {
  FixRig f(R"(He said "no way" today. Then left.)", R"("nope")", {"KEEP", "KEEP", "KEEP"});
  auto engine = f.rig.engine();
  const auto options = cs::fix_span(f.text, f.chunks, f.span_of(R"("no way" today)"), {}, *engine);
  ASSERT_EQ(options.size(), 1u);
  EXPECT_EQ(node_calls(engine->ledger(), "verify"), 0u);
}

TEST(Fix, PreservedQuoteSurvives) {
  FixRig f(R"(He said "no way" today. Then left.)", R"("no way")", {"KEEP", "KEEP", "KEEP"});
  auto engine = f.rig.engine();
  const auto options = cs::fix_span(f.text, f.chunks, f.span_of(R"("no way" today)"), {}, *engine);
  ASSERT_EQ(options.size(), 2u);
  EXPECT_EQ(options[0].replacement, R"("no way")");
  EXPECT_EQ(options[0].word_delta, -1);
}

TEST(Fix, MajorityVoteKeepsCandidate) {
  FixRig f("We went in order to see it. It was fine.", "to", {"KEEP", "KEEP", "REJECT"});
  auto engine = f.rig.engine();
  const auto options = cs::fix_span(f.text, f.chunks, f.span_of("in order to"), {}, *engine);
  ASSERT_EQ(options.size(), 2u);
  EXPECT_EQ(options[0].kind, cs::EditKind::Edit);
  EXPECT_EQ(options[0].replacement, "to");
  EXPECT_EQ(options[0].word_delta, -2);
  namespace rule = chainflow::validators::rule;
  EXPECT_EQ(options[0].trail, (std::vector<std::string>{std::string(rule::kPhraseExists), std::string(rule::kShorter),
                                                        std::string(rule::kQuotes), std::string(rule::kVerifyVote)}));
  EXPECT_EQ(options[1].kind, cs::EditKind::Keep);
  EXPECT_EQ(options[1].replacement, "in order to");
}

TEST(Fix, MinorityVoteDropsCandidate) {
  FixRig f("We went in order to see it. It was fine.", "to", {"KEEP", "REJECT", "REJECT"});
  auto engine = f.rig.engine();
  EXPECT_EQ(cs::fix_span(f.text, f.chunks, f.span_of("in order to"), {}, *engine).size(), 1u);
}

namespace {

/// Remainder of 50 words; S1 has 10 words with one 6-word option; S2 has 8
/// words with a 3-word option and a deletion.
cs::ShorteningBundle golden_bundle() {
  const auto words = [](const std::string& w, int n) {
    std::string s;
    for (int i = 0; i < n; ++i) s += (i ? " " : "") + w;
    return s;
  };
  cs::ShorteningBundle b;
  std::string& t = b.original;
  t = words("lead", 20) + " ";
  const auto s1 = t.size();
  t += words("one", 10);
  const auto e1 = t.size();
  t += " " + words("mid", 15) + " ";
  const auto s2 = t.size();
  t += words("two", 8);
  const auto e2 = t.size();
  t += " " + words("tail", 15) + ".";
  b.original_words = text::word_count(t);
  b.chunks.push_back({{0, t.size()}, cs::split_sentences(t)});
  const auto opt = [](cs::EditKind k, std::size_t s, std::size_t e, std::string r, int d) {
    cs::EditOption o;
    o.kind = k;
    o.start = s;
    o.end = e;
    o.replacement = std::move(r);
    o.word_delta = d;
    return o;
  };
  b.spans.push_back({{0, s1, e1, 2},
                     {opt(cs::EditKind::Edit, s1, e1, words("uno", 6), -4),
                      opt(cs::EditKind::Keep, s1, e1, t.substr(s1, e1 - s1), 0)}});
  b.spans.push_back({{0, s2, e2, 2},
                     {opt(cs::EditKind::Edit, s2, e2, words("dos", 3), -5), opt(cs::EditKind::Delete, s2, e2, "", -8),
                      opt(cs::EditKind::Keep, s2, e2, t.substr(s2, e2 - s2), 0)}});
  cs::check_bundle(b);
  return b;
}

}  // namespace

TEST(SelectLength, GoldenAchievableTotals) {
  const auto b = golden_bundle();
  ASSERT_EQ(b.original_words, 68u);
  std::set<std::size_t> totals;
  chainflow::testing::for_each_choice(b, [&](const auto& c) { totals.insert(cs::selection_words(b, c)); });
  EXPECT_EQ(totals, (std::set<std::size_t>{56, 59, 60, 63, 64, 68}));
  const auto pick = cs::select_length(b, 60);
  EXPECT_EQ(pick.achieved, 60u);
  EXPECT_EQ(pick.choice, (std::vector<std::size_t>{1, 1}));
  EXPECT_EQ(text::word_count(cs::apply_selection(b, pick.choice)), 60u);
}

TEST(SelectLength, TargetAtOrAboveOriginalKeepsEverything) {
  const auto b = golden_bundle();
  for (long long target : {68LL, 69LL, 500LL}) {
    const auto pick = cs::select_length(b, target);
    EXPECT_EQ(pick.choice, (std::vector<std::size_t>{1, 2}));
    EXPECT_EQ(pick.achieved, 68u);
  }
}

TEST(SelectLength, TargetZeroGivesShortest) {
  const auto pick = cs::select_length(golden_bundle(), 0);
  EXPECT_EQ(pick.achieved, 56u);
}

TEST(SelectLength, MatchesExhaustiveEnumeration) {
  std::mt19937_64 rng(314);
  for (int t = 0; t < 60; ++t) {
    const auto b = chainflow::testing::random_shortening_bundle(rng, 8, 2048);
    for (long long target = 0; target <= static_cast<long long>(b.original_words) + 3; target += 3) {
      const auto got = cs::select_length(b, target);
      const auto want = chainflow::testing::enumerate_best(b, target);
      ASSERT_EQ(got.choice, want.choice) << "bundle " << t << " target " << target;
      ASSERT_EQ(got.achieved, want.words);
    }
  }
}

TEST(SelectLength, MonotoneInTarget) {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 30; ++t) {
    const auto b = chainflow::testing::random_shortening_bundle(rng, 10);
    std::size_t last = 0;
    for (long long target = 0; target <= static_cast<long long>(b.original_words) + 5; ++target) {
      const auto got = cs::select_length(b, target).achieved;
      EXPECT_GE(got, last);
      last = got;
    }
  }
}

TEST(Assembly, RecountMatchesRealWordCount) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 40; ++t) {
    const auto b = chainflow::testing::random_shortening_bundle(rng, 6, 512);
    chainflow::testing::for_each_choice(b, [&](const auto& c) {
      ASSERT_EQ(text::word_count(cs::apply_selection(b, c)), cs::selection_words(b, c));
    });
  }
}

TEST(Assembly, AllKeepReproducesInput) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 40; ++t) {
    const auto b = chainflow::testing::random_shortening_bundle(rng, 12);
    std::vector<std::size_t> keep;
    for (const auto& s : b.spans) keep.push_back(s.options.size() - 1);
    EXPECT_EQ(cs::apply_selection(b, keep), b.original);
  }
}

TEST(Assembly, DeletionNormalizesTheSeam) {
  cs::ShorteningBundle b;
  b.original = "Keep this very word.";
  b.original_words = 4;
  b.chunks.push_back({{0, b.original.size()}, cs::split_sentences(b.original)});
  cs::EditOption del;
  del.kind = cs::EditKind::Delete;
  del.start = 10;
  del.end = 14;
  del.word_delta = -1;
  cs::EditOption keep;
  keep.start = 10;
  keep.end = 14;
  keep.replacement = "very";
  b.spans.push_back({{0, 10, 14, 2}, {del, keep}});
  cs::check_bundle(b);
  std::vector<cs::AppliedEdit> applied;
  const std::vector<std::size_t> choice{0};
  EXPECT_EQ(cs::apply_selection(b, choice, &applied), "Keep this word.");
  ASSERT_EQ(applied.size(), 1u);
  EXPECT_EQ(applied[0].original, (cs::Range{10, 14}));
  EXPECT_EQ(applied[0].kind, cs::EditKind::Delete);
  EXPECT_THROW(cs::apply_selection(b, std::vector<std::size_t>{2}), Error);
  EXPECT_THROW(cs::apply_selection(b, std::vector<std::size_t>{}), Error);
}

TEST(Assembly, DeletionBeforeLineBreakKeepsTheBreak) {
  cs::ShorteningBundle b;
  b.original = "First line extra\nSecond line.";
  b.original_words = 5;
  b.chunks.push_back({{0, b.original.size()}, cs::split_sentences(b.original)});
  cs::EditOption del;
  del.kind = cs::EditKind::Delete;
  del.start = 11;
  del.end = 16;
  del.word_delta = -1;
  cs::EditOption keep;
  keep.start = 11;
  keep.end = 16;
  keep.replacement = "extra";
  b.spans.push_back({{0, 11, 16, 2}, {del, keep}});
  EXPECT_EQ(cs::apply_selection(b, std::vector<std::size_t>{0}), "First line\nSecond line.");
}

TEST(Variants, ProductFormula) {
  auto b = golden_bundle();
  EXPECT_EQ(cs::variant_count(b), 6u);
  // Non-keep counts [2, 1, 3] give (2+1)(1+1)(3+1).
  cs::ShorteningBundle shaped;
  for (std::size_t n : {2u, 1u, 3u}) {
    cs::SpanOptions so;
    so.options.resize(n + 1);
    shaped.spans.push_back(so);
  }
  EXPECT_EQ(cs::variant_count(shaped), 24u);
  EXPECT_EQ(cs::variant_count(cs::ShorteningBundle{}), 1u);
}

TEST(Variants, MatchEnumeration) {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 40; ++t) {
    const auto b = chainflow::testing::random_shortening_bundle(rng, 12);
    std::uint64_t n = 0;
    chainflow::testing::for_each_choice(b, [&](const auto&) { ++n; });
    EXPECT_EQ(cs::variant_count(b), n);
  }
}

TEST(Bundle, JsonRoundTripAndViolations) {
  std::mt19937_64 rng(6);
  const auto b = chainflow::testing::random_shortening_bundle(rng, 6);
  const auto j = cs::to_json(b);
  EXPECT_EQ(j["kind"], "shorten");
  EXPECT_EQ(cs::to_json(cs::shortening_bundle_from_json(j)), j);

  auto bad = golden_bundle();
  bad.spans[0].options[0].word_delta = -3;
  EXPECT_THROW(cs::check_bundle(bad), SchemaViolation);
  bad = golden_bundle();
  std::swap(bad.spans[1].options[1], bad.spans[1].options[2]);
  EXPECT_THROW(cs::check_bundle(bad), SchemaViolation);
  bad = golden_bundle();
  bad.chunks[0].range.end -= 1;
  EXPECT_THROW(cs::check_bundle(bad), SchemaViolation);
}

TEST(RunSoylent, FallbackRunIsValidAndDeterministic) {
  std::string t;
  for (int i = 0; i < 25; ++i) {
    t += "The committee really did decide, after a very long and quite tiresome debate, to approve plan " +
         std::to_string(i) + ". ";
  }
  t += "She said \"we are done\" and left.";
  std::string first;
  for (int run = 0; run < 2; ++run) {
    Rig rig(9);
    auto engine = rig.engine({.parallelism = run == 0 ? 1u : 8u});
    const auto b = cs::run_soylent(t, {}, *engine);
    EXPECT_NO_THROW(cs::check_bundle(b));
    EXPECT_EQ(b.chunks.size(), 3u);
    EXPECT_FALSE(b.spans.empty());
    const auto dumped = cs::to_json(b).dump();
    if (run == 0) first = dumped;
    EXPECT_EQ(dumped, first);
    std::vector<std::size_t> keep;
    for (const auto& s : b.spans) keep.push_back(s.options.size() - 1);
    EXPECT_EQ(cs::apply_selection(b, keep), t);
    const auto shortest = cs::select_length(b, 0);
    const auto out = cs::apply_selection(b, shortest.choice);
    EXPECT_EQ(chainflow::validators::quoted_segments(out), chainflow::validators::quoted_segments(t));
  }
}

TEST(Config, Checks) {
  cs::SoylentConfig c;
  c.agreement_required = 4;
  EXPECT_THROW(c.check(), Error);
  c = {};
  c.chunk_sentences = 0;
  EXPECT_THROW(c.check(), Error);
  EXPECT_EQ(cs::SoylentConfig::from_json(cs::SoylentConfig{}.to_json()).to_json(), cs::SoylentConfig{}.to_json());
}
