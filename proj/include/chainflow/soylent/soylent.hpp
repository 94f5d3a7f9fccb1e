#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "chainflow/engine/engine.hpp"
#include "chainflow/engine/graph.hpp"

namespace chainflow::soylent {

struct SoylentConfig {
  int chunk_sentences = 10;
  int find_replicates = 3;
  int agreement_required = 2;
  int edit_replicates = 1;
  int merge_replicates = 1;
  int delete_replicates = 1;
  int verify_voters = 3;

  void check() const;
  nlohmann::json to_json() const;
  static SoylentConfig from_json(const nlohmann::json& j);
};

/// Half-open byte range.
struct Range {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - start; }
  bool overlaps(const Range& o) const noexcept { return start < o.end && o.start < end; }
  bool operator==(const Range&) const = default;
};

/// Sentences exclude surrounding whitespace.
std::vector<Range> split_sentences(std::string_view text);

struct Chunk {
  Range range;
  /// Sentence ranges relative to the chunk.
  std::vector<Range> sentences;
};

/// Groups of chunk_sentences sentences. Chunks tile the text exactly: the
/// first starts at 0, each ends where the next begins, the last ends at the end.
std::vector<Chunk> chunk(std::string_view text, const SoylentConfig& config);

struct Span {
  std::size_t chunk_index = 0;
  /// Offsets into the chunk.
  std::size_t start = 0;
  std::size_t end = 0;
  int agreement = 0;

  Range range() const noexcept { return {start, end}; }
};

/// One verbatim phrase located in the chunk by a find replicate.
struct Proposal {
  int replicate = 0;
  Range range;
};

/// Phrases from a find response, one per line, with list markers removed.
std::vector<std::string> parse_phrases(std::string_view response);

/// Locates each phrase (first occurrence); phrases not found verbatim are dropped.
std::vector<Proposal> locate_phrases(std::string_view chunk_text, int replicate,
                                     const std::vector<std::string>& phrases);

/// Groups overlapping proposals, keeps groups backed by at least `agreement_required`
/// distinct replicates, snaps each union outward to whitespace, then drops
/// overlaps preferring higher agreement and then the earlier start.
std::vector<Span> resolve_spans(std::string_view chunk_text, std::size_t chunk_index,
                                std::span<const Proposal> proposals, int agreement_required);

std::vector<Span> find_spans(std::string_view chunk_text, std::size_t chunk_index, const SoylentConfig& config,
                             engine::Engine& engine);

enum class EditKind { Edit, Merge, Delete, Keep };

std::string_view to_string(EditKind kind) noexcept;
EditKind parse_edit_kind(std::string_view s);

struct EditOption {
  EditKind kind = EditKind::Keep;
  /// Chunk offsets of the replaced text; merge options cover a sentence pair.
  std::size_t start = 0;
  std::size_t end = 0;
  std::string replacement;
  /// Replacement words minus replaced words; negative for every non-keep option.
  int word_delta = 0;
  /// Rule ids passed, in order.
  std::vector<std::string> trail;
};

struct SpanOptions {
  Span span;
  /// Non-keep options first, keep last.
  std::vector<EditOption> options;
};

/// Candidate edits for all spans of one chunk. `text` is the whole document and
/// `chunk_index` selects the chunk; quote safety is judged against the document.
std::vector<SpanOptions> fix_chunk(std::string_view text, const std::vector<Chunk>& chunks, std::size_t chunk_index,
                                   const std::vector<Span>& spans, const SoylentConfig& config,
                                   engine::Engine& engine);

/// Single-span convenience over fix_chunk.
std::vector<EditOption> fix_span(std::string_view text, const std::vector<Chunk>& chunks, const Span& span,
                                 const SoylentConfig& config, engine::Engine& engine);

/// True when replacing `anchor` of `text` by `replacement` leaves every
/// double-quoted segment of the document intact and in the same pairing.
bool quote_safe(std::string_view text, Range anchor, std::string_view replacement);

struct ShorteningBundle {
  std::string original;
  std::vector<Chunk> chunks;
  /// Ordered by chunk, then start.
  std::vector<SpanOptions> spans;
  std::size_t original_words = 0;
  nlohmann::json provenance = nlohmann::json::object();
};

void check_bundle(const ShorteningBundle& bundle);
nlohmann::json to_json(const ShorteningBundle& bundle);
ShorteningBundle shortening_bundle_from_json(const nlohmann::json& j);

/// Product of per-span option counts, saturating at UINT64_MAX.
std::uint64_t variant_count(const ShorteningBundle& bundle);

/// Where an applied (non-keep) option sits in the original and in the output.
struct AppliedEdit {
  std::size_t span_index = 0;
  EditKind kind = EditKind::Keep;
  Range original;
  Range output;
};

/// Splices the chosen options right to left. Empty replacements drop one side
/// of the seam whitespace, keeping line breaks. Throws Error("IndexOutOfRange").
std::string apply_selection(const ShorteningBundle& bundle, std::span<const std::size_t> choice,
                            std::vector<AppliedEdit>* applied = nullptr);

/// Word count of apply_selection without building the text.
std::size_t selection_words(const ShorteningBundle& bundle, std::span<const std::size_t> choice);

struct LengthChoice {
  std::vector<std::size_t> choice;
  std::size_t achieved = 0;
};

/// Closest achievable word count to `target`; ties prefer fewer non-keep
/// choices, then the lexicographically smallest option-index vector.
LengthChoice select_length(const ShorteningBundle& bundle, long long target);

engine::WorkflowGraph soylent_graph(const SoylentConfig& config);

ShorteningBundle run_soylent(std::string_view text, const SoylentConfig& config, engine::Engine& engine);

}  // namespace chainflow::soylent
