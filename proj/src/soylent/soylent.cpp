#include "chainflow/soylent/soylent.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <limits>
#include <map>
#include <optional>
#include <set>

#include "chainflow/engine/vote.hpp"
#include "chainflow/error.hpp"
#include "chainflow/template_ids.hpp"
#include "chainflow/text.hpp"
#include "chainflow/validators/validators.hpp"

namespace chainflow::soylent {

namespace {

constexpr std::array<std::string_view, 8> kAbbreviations{"mr.", "mrs.", "dr.", "st.", "vs.", "e.g.", "i.e.", "etc."};

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_closer(char c) { return c == '"' || c == '\'' || c == ')'; }

bool abbreviation_before(std::string_view text, std::size_t dot) {
  std::size_t begin = dot;
  while (begin > 0 && !text::is_space(text[begin - 1])) --begin;
  const auto token = text::to_lower(text.substr(begin, dot + 1 - begin));
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), token) != kAbbreviations.end();
}

[[noreturn]] void violation(std::string path, std::string detail) {
  throw SchemaViolation(std::move(path), std::move(detail));
}

std::string at(std::string_view field, std::size_t i) { return std::string(field) + "[" + std::to_string(i) + "]"; }

struct QuoteRegion {
  Range range;
  bool closed = true;
};

std::vector<QuoteRegion> quote_regions(std::string_view text) {
  std::vector<std::size_t> marks;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '"') marks.push_back(i);
  }
  std::vector<QuoteRegion> out;
  for (std::size_t k = 0; k + 1 < marks.size(); k += 2) out.push_back({{marks[k], marks[k + 1] + 1}, true});
  if (marks.size() % 2 == 1) out.push_back({{marks.back(), text.size()}, false});
  return out;
}

int words_delta(std::string_view original, std::string_view replacement) {
  return static_cast<int>(text::word_count(replacement)) - static_cast<int>(text::word_count(original));
}

std::string splice(std::string_view text, Range r, std::string_view replacement) {
  std::string out(text.substr(0, r.start));
  out += replacement;
  out += text.substr(r.end);
  return out;
}

/// Index of the sentence containing `pos`, or of the next sentence when `pos`
/// falls between sentences.
std::size_t sentence_at(const std::vector<Range>& sentences, std::size_t pos) {
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (pos < sentences[i].end) return i;
  }
  return sentences.size() - 1;
}

std::optional<Range> merge_anchor(const Chunk& chunk, const Span& span) {
  const auto& s = chunk.sentences;
  if (s.size() < 2) return std::nullopt;
  std::size_t first = sentence_at(s, span.start);
  std::size_t last = std::max(first, sentence_at(s, span.end - 1));
  if (first == last) {
    if (last + 1 < s.size()) {
      ++last;
    } else {
      --first;
    }
  }
  return Range{std::min(s[first].start, span.start), std::max(s[last].end, span.end)};
}

engine::FormatCheck nonempty_check() {
  return [](std::string_view out) -> std::optional<std::string> {
    if (text::trim_view(out).empty()) return "empty response";
    return std::nullopt;
  };
}

engine::FormatCheck verdict_check(std::string_view pos, std::string_view neg) {
  return [p = std::string(pos), n = std::string(neg)](std::string_view out) -> std::optional<std::string> {
    if (!engine::parse_verdict(out, p, n)) return "expected " + p + " or " + n;
    return std::nullopt;
  };
}

struct Candidate {
  std::size_t span_index;
  EditOption option;
};

/// Find step for several chunks in one fan-out.
std::vector<std::vector<Span>> find_all(std::string_view text, const std::vector<Chunk>& chunks,
                                        std::span<const std::size_t> which, const SoylentConfig& config,
                                        engine::Engine& engine) {
  std::vector<engine::Task> tasks;
  for (auto c : which) {
    const auto& r = chunks[c].range;
    tasks.push_back({{{"chunk", std::string(text.substr(r.start, r.size()))}}, config.find_replicates, {}});
  }
  const auto responses = engine.fan_out("find", tmpl::kSoylentFind, std::move(tasks), nonempty_check());
  std::vector<std::vector<Span>> out;
  for (std::size_t k = 0; k < which.size(); ++k) {
    const auto& r = chunks[which[k]].range;
    const auto chunk_text = text.substr(r.start, r.size());
    std::vector<Proposal> proposals;
    for (std::size_t rep = 0; rep < responses[k].size(); ++rep) {
      auto found = locate_phrases(chunk_text, static_cast<int>(rep), parse_phrases(responses[k][rep]));
      proposals.insert(proposals.end(), found.begin(), found.end());
    }
    out.push_back(resolve_spans(chunk_text, which[k], proposals, config.agreement_required));
  }
  return out;
}

/// Fix and verify steps for every span of several chunks.
std::vector<std::vector<SpanOptions>> fix_all(std::string_view text, const std::vector<Chunk>& chunks,
                                              const std::vector<std::vector<Span>>& spans_by_chunk,
                                              const SoylentConfig& config, engine::Engine& engine) {
  struct Ref {
    std::size_t group;
    std::size_t span;
    Range anchor;  // chunk-relative
  };
  std::vector<Ref> edit_refs;
  std::vector<Ref> merge_refs;
  std::vector<engine::Task> edit_tasks;
  std::vector<engine::Task> merge_tasks;
  std::vector<engine::Task> delete_tasks;

  for (std::size_t g = 0; g < spans_by_chunk.size(); ++g) {
    const auto& spans = spans_by_chunk[g];
    if (spans.empty()) continue;
    const auto& chunk = chunks[spans.front().chunk_index];
    const auto chunk_text = text.substr(chunk.range.start, chunk.range.size());
    std::vector<Range> claimed;
    for (std::size_t i = 0; i < spans.size(); ++i) {
      const auto phrase = std::string(chunk_text.substr(spans[i].start, spans[i].end - spans[i].start));
      edit_refs.push_back({g, i, spans[i].range()});
      edit_tasks.push_back({{{"chunk", chunk_text}, {"phrase", phrase}}, config.edit_replicates, {}});
      delete_tasks.push_back({{{"chunk", chunk_text}, {"phrase", phrase}}, config.delete_replicates, {}});
      const auto anchor = merge_anchor(chunk, spans[i]);
      if (!anchor) continue;
      bool free = std::none_of(claimed.begin(), claimed.end(), [&](const Range& r) { return r.overlaps(*anchor); });
      for (std::size_t j = 0; j < spans.size() && free; ++j) {
        if (j != i && spans[j].range().overlaps(*anchor)) free = false;
      }
      if (!free) continue;
      claimed.push_back(*anchor);
      merge_refs.push_back({g, i, *anchor});
      merge_tasks.push_back({{{"chunk", chunk_text}, {"passage", chunk_text.substr(anchor->start, anchor->size())}},
                             config.merge_replicates,
                             {}});
    }
  }

  const auto edits = engine.fan_out("fix.edit", tmpl::kSoylentEdit, std::move(edit_tasks), nonempty_check());
  const auto merges = engine.fan_out("fix.merge", tmpl::kSoylentMerge, std::move(merge_tasks), nonempty_check());
  const auto deletes =
      engine.fan_out("fix.delete", tmpl::kSoylentDelete, std::move(delete_tasks), verdict_check("DELETE", "KEEP"));

  struct Pending {
    std::size_t group;
    std::size_t span;
    EditOption option;
  };
  std::vector<Pending> pending;

  const auto consider = [&](const Ref& ref, EditKind kind, std::string replacement) {
    const auto& span = spans_by_chunk[ref.group][ref.span];
    const auto& chunk = chunks[span.chunk_index];
    const auto chunk_text = text.substr(chunk.range.start, chunk.range.size());
    const auto original = chunk_text.substr(ref.anchor.start, ref.anchor.size());
    EditOption opt{kind, ref.anchor.start, ref.anchor.end, std::move(replacement), 0, {std::string(validators::rule::kPhraseExists)}};
    if (!validators::replacement_shorter(original, opt.replacement)) return;
    opt.trail.push_back(std::string(validators::rule::kShorter));
    const Range absolute{chunk.range.start + ref.anchor.start, chunk.range.start + ref.anchor.end};
    bool quotes_ok = quote_safe(text, absolute, opt.replacement);
    if (quotes_ok && validators::quotes_balanced(chunk_text)) {
      quotes_ok = validators::quotes_preserved(chunk_text, splice(chunk_text, ref.anchor, opt.replacement)).accepted;
    }
    if (!quotes_ok) return;
    opt.trail.push_back(std::string(validators::rule::kQuotes));
    opt.word_delta = words_delta(original, opt.replacement);
    for (const auto& p : pending) {
      if (p.group == ref.group && p.span == ref.span && p.option.start == opt.start && p.option.end == opt.end &&
          p.option.replacement == opt.replacement) {
        return;
      }
    }
    pending.push_back({ref.group, ref.span, std::move(opt)});
  };

  for (std::size_t t = 0; t < edit_refs.size(); ++t) {
    for (const auto& out : edits[t]) consider(edit_refs[t], EditKind::Edit, text::trim(out));
  }
  for (std::size_t t = 0; t < merge_refs.size(); ++t) {
    for (const auto& out : merges[t]) consider(merge_refs[t], EditKind::Merge, text::trim(out));
  }
  for (std::size_t t = 0; t < edit_refs.size(); ++t) {
    for (const auto& out : deletes[t]) {
      if (*engine::parse_verdict(out, "DELETE", "KEEP")) consider(edit_refs[t], EditKind::Delete, "");
    }
  }

  std::vector<engine::Task> verify_tasks;
  for (const auto& p : pending) {
    const auto& chunk = chunks[spans_by_chunk[p.group][p.span].chunk_index];
    const auto chunk_text = text.substr(chunk.range.start, chunk.range.size());
    const Range anchor{p.option.start, p.option.end};
    verify_tasks.push_back({{{"before", chunk_text},
                             {"after", splice(chunk_text, anchor, p.option.replacement)},
                             {"original", chunk_text.substr(anchor.start, anchor.size())},
                             {"edited", p.option.replacement}},
                            config.verify_voters,
                            {}});
  }
  const auto votes = engine.fan_out("verify", tmpl::kSoylentVerify, std::move(verify_tasks), verdict_check("KEEP", "REJECT"));

  std::vector<std::vector<SpanOptions>> out(spans_by_chunk.size());
  for (std::size_t g = 0; g < spans_by_chunk.size(); ++g) {
    for (const auto& s : spans_by_chunk[g]) out[g].push_back({s, {}});
  }
  for (std::size_t k = 0; k < pending.size(); ++k) {
    std::vector<validators::Ballot> ballots;
    for (const auto& v : votes[k]) {
      ballots.push_back(*engine::parse_verdict(v, "KEEP", "REJECT") ? validators::Ballot::Keep
                                                                     : validators::Ballot::Reject);
    }
    if (!validators::tally_votes(ballots)) continue;
    auto opt = pending[k].option;
    opt.trail.push_back(std::string(validators::rule::kVerifyVote));
    out[pending[k].group][pending[k].span].options.push_back(std::move(opt));
  }
  for (auto& group : out) {
    for (auto& so : group) {
      const auto& chunk = chunks[so.span.chunk_index];
      const auto original = text.substr(chunk.range.start + so.span.start, so.span.end - so.span.start);
      so.options.push_back({EditKind::Keep, so.span.start, so.span.end, std::string(original), 0, {}});
    }
  }
  return out;
}

}  // namespace

void SoylentConfig::check() const {
  const auto positive = [](int v, const char* name) {
    if (v < 1) throw Error("InvalidConfig", std::string(name) + " must be at least 1");
  };
  positive(chunk_sentences, "chunk_sentences");
  positive(find_replicates, "find_replicates");
  positive(agreement_required, "agreement_required");
  positive(verify_voters, "verify_voters");
  if (edit_replicates < 0 || merge_replicates < 0 || delete_replicates < 0) {
    throw Error("InvalidConfig", "fix replicate counts must not be negative");
  }
  if (agreement_required > find_replicates) {
    throw Error("InvalidConfig", "agreement_required exceeds find_replicates");
  }
}

nlohmann::json SoylentConfig::to_json() const {
  return {{"chunk_sentences", chunk_sentences},       {"find_replicates", find_replicates},
          {"agreement_required", agreement_required}, {"edit_replicates", edit_replicates},
          {"merge_replicates", merge_replicates},     {"delete_replicates", delete_replicates},
          {"verify_voters", verify_voters}};
}

SoylentConfig SoylentConfig::from_json(const nlohmann::json& j) {
  SoylentConfig c;
  c.chunk_sentences = j.value("chunk_sentences", c.chunk_sentences);
  c.find_replicates = j.value("find_replicates", c.find_replicates);
  c.agreement_required = j.value("agreement_required", c.agreement_required);
  c.edit_replicates = j.value("edit_replicates", c.edit_replicates);
  c.merge_replicates = j.value("merge_replicates", c.merge_replicates);
  c.delete_replicates = j.value("delete_replicates", c.delete_replicates);
  c.verify_voters = j.value("verify_voters", c.verify_voters);
  c.check();
  return c;
}

std::vector<Range> split_sentences(std::string_view text) {
  std::vector<Range> out;
  std::size_t start = 0;
  const auto skip_space = [&](std::size_t i) {
    while (i < text.size() && text::is_space(text[i])) ++i;
    return i;
  };
  start = skip_space(0);
  std::size_t i = start;
  while (i < text.size()) {
    if (!is_terminator(text[i])) {
      ++i;
      continue;
    }
    const std::size_t mark = i;
    std::size_t j = i + 1;
    while (j < text.size() && is_terminator(text[j])) ++j;
    while (j < text.size() && is_closer(text[j])) ++j;
    const std::size_t next = skip_space(j);
    const bool at_end = next == text.size();
    const bool boundary =
        at_end || (next > j && std::isupper(static_cast<unsigned char>(text[next])) != 0);
    if (boundary && !(text[mark] == '.' && j == mark + 1 && abbreviation_before(text, mark))) {
      out.push_back({start, j});
      start = next;
      i = next;
    } else {
      i = j;
    }
  }
  if (start < text.size()) {
    std::size_t end = text.size();
    while (end > start && text::is_space(text[end - 1])) --end;
    out.push_back({start, end});
  }
  return out;
}

std::vector<Chunk> chunk(std::string_view text, const SoylentConfig& config) {
  const auto sentences = split_sentences(text);
  const auto per = static_cast<std::size_t>(std::max(config.chunk_sentences, 1));
  std::vector<Chunk> out;
  for (std::size_t first = 0; first < sentences.size(); first += per) {
    Chunk c;
    c.range.start = out.empty() ? 0 : sentences[first].start;
    const std::size_t last = std::min(sentences.size(), first + per);
    c.range.end = last < sentences.size() ? sentences[last].start : text.size();
    for (std::size_t s = first; s < last; ++s) {
      c.sentences.push_back({sentences[s].start - c.range.start, sentences[s].end - c.range.start});
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<std::string> parse_phrases(std::string_view response) {
  std::vector<std::string> out;
  for (const auto& raw : text::split_lines(response)) {
    std::string_view line = text::trim_view(raw);
    if (!line.empty() && (line.front() == '-' || line.front() == '*' || line.front() == '+')) {
      line = text::trim_view(line.substr(1));
    } else {
      std::size_t d = 0;
      while (d < line.size() && std::isdigit(static_cast<unsigned char>(line[d])) != 0) ++d;
      if (d > 0 && d < line.size() && (line[d] == '.' || line[d] == ')') &&
          (d + 1 == line.size() || text::is_space(line[d + 1]))) {
        line = text::trim_view(line.substr(d + 1));
      }
    }
    if (!line.empty()) out.emplace_back(line);
  }
  return out;
}

std::vector<Proposal> locate_phrases(std::string_view chunk_text, int replicate,
                                     const std::vector<std::string>& phrases) {
  std::vector<Proposal> out;
  for (const auto& phrase : phrases) {
    std::string_view p = phrase;
    if (!validators::phrase_exists(chunk_text, p) && p.size() >= 2 && p.front() == '"' && p.back() == '"') {
      p = text::trim_view(p.substr(1, p.size() - 2));
    }
    if (!validators::phrase_exists(chunk_text, p)) continue;
    const auto pos = chunk_text.find(p);
    const Proposal prop{replicate, {pos, pos + p.size()}};
    const bool dup = std::any_of(out.begin(), out.end(), [&](const Proposal& o) { return o.range == prop.range; });
    if (!dup) out.push_back(prop);
  }
  return out;
}

std::vector<Span> resolve_spans(std::string_view chunk_text, std::size_t chunk_index,
                                std::span<const Proposal> proposals, int agreement_required) {
  std::vector<Proposal> sorted(proposals.begin(), proposals.end());
  std::sort(sorted.begin(), sorted.end(), [](const Proposal& a, const Proposal& b) {
    return std::tie(a.range.start, a.range.end, a.replicate) < std::tie(b.range.start, b.range.end, b.replicate);
  });
  std::vector<Span> survivors;
  for (std::size_t i = 0; i < sorted.size();) {
    Range group = sorted[i].range;
    std::set<int> replicates{sorted[i].replicate};
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j].range.start < group.end) {
      group.end = std::max(group.end, sorted[j].range.end);
      replicates.insert(sorted[j].replicate);
      ++j;
    }
    i = j;
    if (static_cast<int>(replicates.size()) < agreement_required) continue;
    while (group.start < group.end && text::is_space(chunk_text[group.start])) ++group.start;
    while (group.end > group.start && text::is_space(chunk_text[group.end - 1])) --group.end;
    if (group.start == group.end) continue;
    while (group.start > 0 && !text::is_space(chunk_text[group.start - 1])) --group.start;
    while (group.end < chunk_text.size() && !text::is_space(chunk_text[group.end])) ++group.end;
    survivors.push_back({chunk_index, group.start, group.end, static_cast<int>(replicates.size())});
  }
  std::vector<std::size_t> order(survivors.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (survivors[a].agreement != survivors[b].agreement) return survivors[a].agreement > survivors[b].agreement;
    return survivors[a].start < survivors[b].start;
  });
  std::vector<Span> kept;
  for (auto k : order) {
    const auto& s = survivors[k];
    const bool clash = std::any_of(kept.begin(), kept.end(), [&](const Span& o) { return o.range().overlaps(s.range()); });
    if (!clash) kept.push_back(s);
  }
  std::sort(kept.begin(), kept.end(), [](const Span& a, const Span& b) { return a.start < b.start; });
  return kept;
}

std::vector<Span> find_spans(std::string_view chunk_text, std::size_t chunk_index, const SoylentConfig& config,
                             engine::Engine& engine) {
  if (chunk_text.empty()) throw Error("EmptyChunk", "cannot search an empty chunk");
  const std::vector<Chunk> chunks(chunk_index + 1, Chunk{{0, chunk_text.size()}, {}});
  const std::array<std::size_t, 1> which{chunk_index};
  return find_all(chunk_text, chunks, which, config, engine).front();
}

std::string_view to_string(EditKind kind) noexcept {
  switch (kind) {
    case EditKind::Edit: return "edit";
    case EditKind::Merge: return "merge";
    case EditKind::Delete: return "delete";
    case EditKind::Keep: return "keep";
  }
  return "keep";
}

EditKind parse_edit_kind(std::string_view s) {
  for (auto k : {EditKind::Edit, EditKind::Merge, EditKind::Delete, EditKind::Keep}) {
    if (to_string(k) == s) return k;
  }
  throw Error("InvalidEditKind", "unknown edit kind '" + std::string(s) + "'");
}

bool quote_safe(std::string_view text, Range anchor, std::string_view replacement) {
  std::multiset<std::string> inside;
  for (const auto& q : quote_regions(text)) {
    if (!q.range.overlaps(anchor)) continue;
    if (!q.closed || q.range.start < anchor.start || q.range.end > anchor.end) return false;
    inside.insert(std::string(text.substr(q.range.start, q.range.size())));
  }
  if (!validators::quotes_balanced(replacement)) return false;
  const auto segs = validators::quoted_segments(replacement);
  return std::multiset<std::string>(segs.begin(), segs.end()) == inside;
}

std::vector<SpanOptions> fix_chunk(std::string_view text, const std::vector<Chunk>& chunks, std::size_t chunk_index,
                                   const std::vector<Span>& spans, const SoylentConfig& config,
                                   engine::Engine& engine) {
  if (chunk_index >= chunks.size()) throw Error("IndexOutOfRange", "no such chunk");
  for (const auto& s : spans) {
    if (s.chunk_index != chunk_index || s.start >= s.end || s.end > chunks[chunk_index].range.size()) {
      throw Error("InvalidSpan", "span outside the chunk");
    }
  }
  std::vector<std::vector<Span>> groups{spans};
  return fix_all(text, chunks, groups, config, engine).front();
}

std::vector<EditOption> fix_span(std::string_view text, const std::vector<Chunk>& chunks, const Span& span,
                                 const SoylentConfig& config, engine::Engine& engine) {
  return fix_chunk(text, chunks, span.chunk_index, {span}, config, engine).front().options;
}

void check_bundle(const ShorteningBundle& b) {
  if (b.original_words != text::word_count(b.original)) violation("original_words", "does not match the text");
  std::size_t pos = 0;
  for (std::size_t c = 0; c < b.chunks.size(); ++c) {
    const auto& r = b.chunks[c].range;
    if (r.start != pos || r.end < r.start || r.end > b.original.size()) violation(at("chunks", c), "chunks must tile the text");
    pos = r.end;
  }
  if (!b.chunks.empty() && pos != b.original.size()) violation("chunks", "chunks must tile the text");
  std::vector<std::pair<std::size_t, Range>> anchors;  // absolute, with span index
  for (std::size_t i = 0; i < b.spans.size(); ++i) {
    const auto path = at("spans", i);
    const auto& so = b.spans[i];
    if (so.span.chunk_index >= b.chunks.size()) violation(path + ".chunk", "no such chunk");
    const auto& cr = b.chunks[so.span.chunk_index].range;
    if (so.span.start >= so.span.end || so.span.end > cr.size()) violation(path, "span outside its chunk");
    if (so.options.empty() || so.options.back().kind != EditKind::Keep) violation(path + ".options", "keep must be last");
    for (std::size_t k = 0; k < so.options.size(); ++k) {
      const auto opath = path + ".options[" + std::to_string(k) + "]";
      const auto& o = so.options[k];
      if (o.start >= o.end || o.end > cr.size()) violation(opath, "anchor outside its chunk");
      if (o.start > so.span.start || o.end < so.span.end) violation(opath, "anchor must cover the span");
      const auto original = std::string_view(b.original).substr(cr.start + o.start, o.end - o.start);
      if (o.word_delta != words_delta(original, o.replacement)) violation(opath + ".word_delta", "does not match the texts");
      const bool keep = o.kind == EditKind::Keep;
      if (keep != (k + 1 == so.options.size())) violation(opath + ".kind", "exactly one keep option, last");
      if (keep && (o.replacement != original || o.start != so.span.start || o.end != so.span.end)) {
        violation(opath, "keep must reproduce the span");
      }
      if (!keep && o.word_delta >= 0) violation(opath + ".word_delta", "non-keep options must shorten");
      anchors.emplace_back(i, Range{cr.start + o.start, cr.start + o.end});
    }
  }
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    for (std::size_t c = a + 1; c < anchors.size(); ++c) {
      if (anchors[a].first != anchors[c].first && anchors[a].second.overlaps(anchors[c].second)) {
        violation(at("spans", anchors[c].first), "overlaps another span's options");
      }
    }
  }
}

nlohmann::json to_json(const ShorteningBundle& b) {
  nlohmann::json chunks = nlohmann::json::array();
  for (const auto& c : b.chunks) {
    nlohmann::json sentences = nlohmann::json::array();
    for (const auto& s : c.sentences) sentences.push_back({s.start, s.end});
    chunks.push_back({{"start", c.range.start}, {"end", c.range.end}, {"sentences", sentences}});
  }
  nlohmann::json spans = nlohmann::json::array();
  for (const auto& so : b.spans) {
    nlohmann::json options = nlohmann::json::array();
    for (const auto& o : so.options) {
      options.push_back({{"kind", to_string(o.kind)},
                         {"start", o.start},
                         {"end", o.end},
                         {"replacement", o.replacement},
                         {"word_delta", o.word_delta},
                         {"trail", o.trail}});
    }
    spans.push_back({{"chunk", so.span.chunk_index},
                     {"start", so.span.start},
                     {"end", so.span.end},
                     {"agreement", so.span.agreement},
                     {"options", options}});
  }
  return {{"kind", "shorten"},      {"schema_version", 1}, {"original", b.original},
          {"original_words", b.original_words}, {"chunks", chunks},    {"spans", spans},
          {"provenance", b.provenance}};
}

ShorteningBundle shortening_bundle_from_json(const nlohmann::json& j) {
  if (!j.is_object()) violation("$", "expected an object");
  if (j.value("kind", std::string{}) != "shorten") violation("kind", "expected \"shorten\"");
  if (j.value("schema_version", 0) != 1) violation("schema_version", "unsupported version");
  ShorteningBundle b;
  try {
    b.original = j.at("original").get<std::string>();
    b.original_words = j.at("original_words").get<std::size_t>();
    for (const auto& c : j.at("chunks")) {
      Chunk chunk{{c.at("start").get<std::size_t>(), c.at("end").get<std::size_t>()}, {}};
      for (const auto& s : c.value("sentences", nlohmann::json::array())) {
        chunk.sentences.push_back({s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()});
      }
      b.chunks.push_back(std::move(chunk));
    }
    for (const auto& s : j.at("spans")) {
      SpanOptions so;
      so.span = {s.at("chunk").get<std::size_t>(), s.at("start").get<std::size_t>(), s.at("end").get<std::size_t>(),
                 s.value("agreement", 0)};
      for (const auto& o : s.at("options")) {
        so.options.push_back({parse_edit_kind(o.at("kind").get<std::string>()), o.at("start").get<std::size_t>(),
                              o.at("end").get<std::size_t>(), o.at("replacement").get<std::string>(),
                              o.at("word_delta").get<int>(), o.value("trail", std::vector<std::string>{})});
      }
      b.spans.push_back(std::move(so));
    }
  } catch (const nlohmann::json::exception& e) {
    violation("$", e.what());
  }
  b.provenance = j.value("provenance", nlohmann::json::object());
  check_bundle(b);
  return b;
}

std::uint64_t variant_count(const ShorteningBundle& bundle) {
  std::uint64_t n = 1;
  for (const auto& so : bundle.spans) {
    const auto k = static_cast<std::uint64_t>(so.options.size());
    if (k != 0 && n > std::numeric_limits<std::uint64_t>::max() / k) return std::numeric_limits<std::uint64_t>::max();
    n *= k;
  }
  return n;
}

namespace {

void check_choice(const ShorteningBundle& bundle, std::span<const std::size_t> choice) {
  if (choice.size() != bundle.spans.size()) {
    throw Error("IndexOutOfRange", "choice has " + std::to_string(choice.size()) + " entries for " +
                                       std::to_string(bundle.spans.size()) + " spans");
  }
  for (std::size_t i = 0; i < choice.size(); ++i) {
    if (choice[i] >= bundle.spans[i].options.size()) {
      throw Error("IndexOutOfRange", "option " + std::to_string(choice[i]) + " out of range for span " +
                                         std::to_string(i));
    }
  }
}

}  // namespace

std::string apply_selection(const ShorteningBundle& bundle, std::span<const std::size_t> choice,
                            std::vector<AppliedEdit>* applied) {
  check_choice(bundle, choice);
  std::string out = bundle.original;
  std::vector<AppliedEdit> edits;
  // Keeps recorded output ranges (all to the right of `pos`) in step with the text.
  const auto edit = [&](std::size_t pos, std::size_t erase, std::string_view insert) {
    out.replace(pos, erase, insert);
    const auto shift = static_cast<long long>(insert.size()) - static_cast<long long>(erase);
    for (auto& e : edits) {
      if (e.output.start >= pos + erase) {
        e.output.start = static_cast<std::size_t>(static_cast<long long>(e.output.start) + shift);
        e.output.end = static_cast<std::size_t>(static_cast<long long>(e.output.end) + shift);
      } else if (e.output.start > pos) {
        e.output.start = e.output.end = pos;
      }
    }
  };
  for (std::size_t i = bundle.spans.size(); i-- > 0;) {
    const auto& so = bundle.spans[i];
    const auto& o = so.options[choice[i]];
    if (o.kind == EditKind::Keep) continue;
    const std::size_t base = bundle.chunks[so.span.chunk_index].range.start;
    const std::size_t s = base + o.start;
    edit(s, o.end - o.start, o.replacement);
    edits.push_back({i, o.kind, {s, base + o.end}, {s, s + o.replacement.size()}});
    if (!o.replacement.empty()) continue;
    std::size_t l = s;
    while (l > 0 && text::is_space(out[l - 1])) --l;
    std::size_t r = s;
    while (r < out.size() && text::is_space(out[r])) ++r;
    const std::string_view right(out.data() + s, r - s);
    if (r > s && (l == s || right.find('\n') == std::string_view::npos)) {
      edit(s, r - s, {});
    } else if (l < s) {
      edit(l, s - l, {});
      edits.back().output = {l, l};
    }
  }
  if (applied != nullptr) {
    std::reverse(edits.begin(), edits.end());
    *applied = std::move(edits);
  }
  return out;
}

std::size_t selection_words(const ShorteningBundle& bundle, std::span<const std::size_t> choice) {
  check_choice(bundle, choice);
  long long words = static_cast<long long>(bundle.original_words);
  for (std::size_t i = 0; i < choice.size(); ++i) words += bundle.spans[i].options[choice[i]].word_delta;
  return static_cast<std::size_t>(words);
}

LengthChoice select_length(const ShorteningBundle& bundle, long long target) {
  const std::size_t n = bundle.spans.size();
  constexpr int kInf = std::numeric_limits<int>::max() / 2;
  // reduction[i][k] words removed by option k of span i (keep removes 0).
  std::vector<std::vector<std::size_t>> reduction(n);
  std::size_t max_total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t most = 0;
    for (const auto& o : bundle.spans[i].options) {
      reduction[i].push_back(static_cast<std::size_t>(-o.word_delta));
      most = std::max(most, reduction[i].back());
    }
    max_total += most;
  }
  max_total = std::min(max_total, bundle.original_words);
  // fewest[i][w]: fewest non-keep picks among spans i.. removing exactly w words.
  std::vector<std::vector<int>> fewest(n + 1, std::vector<int>(max_total + 1, kInf));
  fewest[n][0] = 0;
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t w = 0; w <= max_total; ++w) {
      int best = kInf;
      for (std::size_t k = 0; k < reduction[i].size(); ++k) {
        const auto r = reduction[i][k];
        if (r > w || fewest[i + 1][w - r] >= kInf) continue;
        const int cost = fewest[i + 1][w - r] + (bundle.spans[i].options[k].kind == EditKind::Keep ? 0 : 1);
        best = std::min(best, cost);
      }
      fewest[i][w] = best;
    }
  }
  const auto build = [&](std::size_t w) {
    std::vector<std::size_t> choice;
    int budget = fewest[0][w];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < reduction[i].size(); ++k) {
        const auto r = reduction[i][k];
        const int pick = bundle.spans[i].options[k].kind == EditKind::Keep ? 0 : 1;
        if (r > w || fewest[i + 1][w - r] >= kInf || fewest[i + 1][w - r] + pick != budget) continue;
        choice.push_back(k);
        w -= r;
        budget -= pick;
        break;
      }
    }
    return choice;
  };
  const auto words = static_cast<long long>(bundle.original_words);
  std::optional<std::size_t> chosen;
  long long best_gap = 0;
  std::vector<std::size_t> best_choice;
  for (std::size_t w = 0; w <= max_total; ++w) {
    if (fewest[0][w] >= kInf) continue;
    const long long achieved = words - static_cast<long long>(w);
    const long long gap = achieved > target ? achieved - target : target - achieved;
    if (chosen && gap > best_gap) continue;
    if (chosen && gap == best_gap) {
      if (fewest[0][w] > fewest[0][*chosen]) continue;
      if (fewest[0][w] == fewest[0][*chosen]) {
        auto c = build(w);
        if (!(c < best_choice)) continue;
        best_choice = std::move(c);
        chosen = w;
        continue;
      }
    }
    chosen = w;
    best_gap = gap;
    best_choice = build(w);
  }
  return {best_choice, bundle.original_words - *chosen};
}

engine::WorkflowGraph soylent_graph(const SoylentConfig& config) {
  using engine::ArchitectureTag;
  using engine::SubtaskKind;
  const auto arch = [](int replicates) {
    return replicates > 1 ? ArchitectureTag::RedundantParallel : ArchitectureTag::Branching;
  };
  engine::WorkflowGraph g;
  g.nodes = {
      {"find", SubtaskKind::Focus, std::string(tmpl::kSoylentFind), config.find_replicates,
       config.find_replicates > 1 ? ArchitectureTag::RedundantParallel : ArchitectureTag::Sequential, true},
      {"fix.edit", SubtaskKind::Improve, std::string(tmpl::kSoylentEdit), std::max(config.edit_replicates, 1),
       arch(config.edit_replicates), false},
      {"fix.merge", SubtaskKind::Improve, std::string(tmpl::kSoylentMerge), std::max(config.merge_replicates, 1),
       arch(config.merge_replicates), false},
      {"fix.delete", SubtaskKind::Improve, std::string(tmpl::kSoylentDelete), std::max(config.delete_replicates, 1),
       arch(config.delete_replicates), false},
      {"verify", SubtaskKind::Evaluate, std::string(tmpl::kSoylentVerify), config.verify_voters,
       config.verify_voters > 1 ? ArchitectureTag::RedundantParallel : ArchitectureTag::Sequential, false},
  };
  g.edges = {{"find", "fix.edit"},   {"find", "fix.merge"},   {"find", "fix.delete"},
             {"fix.edit", "verify"}, {"fix.merge", "verify"}, {"fix.delete", "verify"}};
  g.entry = "find";
  g.exit = "verify";
  return g;
}

ShorteningBundle run_soylent(std::string_view text, const SoylentConfig& config, engine::Engine& engine) {
  config.check();
  engine::check_templates(soylent_graph(config), engine.templates());
  ShorteningBundle bundle;
  bundle.original = std::string(text);
  bundle.original_words = text::word_count(text);
  bundle.chunks = chunk(text, config);
  bundle.provenance = {{"config", config.to_json()}};
  if (bundle.chunks.empty()) return bundle;

  std::vector<std::size_t> all(bundle.chunks.size());
  for (std::size_t c = 0; c < all.size(); ++c) all[c] = c;
  const auto spans = find_all(text, bundle.chunks, all, config, engine);
  for (auto& group : fix_all(text, bundle.chunks, spans, config, engine)) {
    for (auto& so : group) bundle.spans.push_back(std::move(so));
  }
  check_bundle(bundle);
  return bundle;
}

}  // namespace chainflow::soylent
