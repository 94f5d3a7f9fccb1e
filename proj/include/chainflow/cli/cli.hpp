#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chainflow/actors/actor.hpp"

namespace chainflow::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kChainFailure = 1;
inline constexpr int kUsage = 2;

/// Runs one command line (args exclude the program name). Errors are written
/// to `err` as a single JSON object.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "2..20", "100..500:50", "5,10,15" or "" (no targets). Throws Error("InvalidTargets").
std::vector<long long> parse_targets(std::string_view spec);

/// Reads newline-delimited labels, skipping blank lines and "#" comments.
std::vector<std::string> read_lines(const std::filesystem::path& path);

struct ActorSpec {
  std::string kind;  // "http", "script" or "replay"
  std::string arg;   // config path, book path or cache directory
};

/// "http[:config.json]", "script[:book.json]" or "replay:DIR". Throws Error("InvalidActorSpec").
ActorSpec parse_actor_spec(std::string_view spec);

/// Builds the actor; `cache` wraps it in a recording replay cache. Scripted
/// books with fallback generators need a seed from `seed` or the book itself.
std::shared_ptr<actors::Actor> make_actor(const ActorSpec& spec, std::optional<std::uint64_t> seed,
                                          const std::optional<std::filesystem::path>& cache);

}  // namespace chainflow::cli
