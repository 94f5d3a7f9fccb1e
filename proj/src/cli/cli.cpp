#include "chainflow/cli/cli.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "chainflow/actors/http.hpp"
#include "chainflow/actors/replay.hpp"
#include "chainflow/actors/scripted.hpp"
#include "chainflow/actors/templates.hpp"
#include "chainflow/cascade/cascade.hpp"
#include "chainflow/engine/engine.hpp"
#include "chainflow/error.hpp"
#include "chainflow/evalkit/baselines.hpp"
#include "chainflow/evalkit/metrics.hpp"
#include "chainflow/mnovel/mnovel.hpp"
#include "chainflow/service/service.hpp"
#include "chainflow/soylent/soylent.hpp"
#include "chainflow/text.hpp"

namespace chainflow::cli {

namespace fs = std::filesystem;

namespace {

class IoFailure : public Error {
 public:
  IoFailure(std::string path, std::string detail) : Error("IoError", path + ": " + detail), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

const std::set<std::string, std::less<>> kUsageCodes{
    "Usage",          "IoError",         "InvalidTargets", "InvalidActorSpec", "SeedRequired",
    "KindMismatch",   "InvalidPairing",  "InvalidTask",    "InvalidBaseline",  "SchemaViolation",
    "InvalidConfig",  "InvalidItems",    "MissingInput",   "InvalidJson",      "InvalidTemplate",
    "ParamOutOfRange", "MaskOutOfRange", "InvalidTarget",  "EmptyBundle",      "EmptyPrompt"};

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure(path.string(), "cannot read file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const fs::path& path) {
  try {
    return nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw IoFailure(path.string(), std::string("invalid JSON: ") + e.what());
  }
}

void write_text(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoFailure(path.string(), "cannot write file");
}

std::string pretty(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string fixed4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

/// Options shared by chain runs and baselines.
struct RunOptions {
  std::string actor = "script";
  std::optional<std::string> cache;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> templates;
  std::optional<std::string> config;
  std::size_t parallelism = 4;
  int max_attempts = 3;
  std::string out;
  std::optional<std::string> ledger;
  std::optional<std::string> manifest;
};

void add_run_options(CLI::App& cmd, RunOptions& o) {
  cmd.add_option("--actor", o.actor, "http[:config.json] | script[:book.json] | replay:DIR");
  cmd.add_option("--cache", o.cache, "record responses through a replay cache in DIR");
  cmd.add_option("--seed", o.seed, "seed for scripted fallback generators");
  cmd.add_option("--templates", o.templates, "template registry JSON merged over the reference templates");
  cmd.add_option("--config", o.config, "chain config JSON file");
  cmd.add_option("--parallelism", o.parallelism, "concurrent actor calls");
  cmd.add_option("--max-attempts", o.max_attempts, "attempts per call before failing");
  cmd.add_option("--ledger", o.ledger, "ledger output path (.json or .csv)");
  cmd.add_option("--manifest", o.manifest, "JSON manifest; its fields override flags");
}

template <class T>
void take(const nlohmann::json& m, const char* key, T& field) {
  if (m.contains(key)) field = m[key].get<T>();
}

template <class T>
void take(const nlohmann::json& m, const char* key, std::optional<T>& field) {
  if (m.contains(key)) field = m[key].get<T>();
}

actors::TemplateRegistry load_templates(const RunOptions& o) {
  auto reg = actors::TemplateRegistry::defaults();
  if (o.templates) reg.merge(actors::TemplateRegistry::from_json(read_json(*o.templates)));
  return reg;
}

nlohmann::json load_config(const RunOptions& o, const nlohmann::json& manifest) {
  if (manifest.contains("config") && manifest["config"].is_object()) return manifest["config"];
  if (o.config) return read_json(*o.config);
  return nlohmann::json::object();
}

engine::EngineOptions engine_options(const RunOptions& o) {
  engine::EngineOptions opts;
  opts.parallelism = std::max<std::size_t>(o.parallelism, 1);
  opts.max_attempts = std::max(o.max_attempts, 1);
  return opts;
}

std::shared_ptr<actors::Actor> actor_for(const RunOptions& o) {
  std::optional<fs::path> cache;
  if (o.cache) cache = *o.cache;
  return make_actor(parse_actor_spec(o.actor), o.seed, cache);
}

void write_ledger(const RunOptions& o, const engine::RunLedger& ledger) {
  if (!o.ledger) return;
  const fs::path p(*o.ledger);
  write_text(p, p.extension() == ".csv" ? ledger.to_csv() : pretty(ledger.to_json()));
}

nlohmann::json manifest_of(const RunOptions& o) {
  if (!o.manifest) return nlohmann::json::object();
  return read_json(*o.manifest);
}

void apply_manifest(RunOptions& o, const nlohmann::json& m) {
  take(m, "actor", o.actor);
  take(m, "cache", o.cache);
  take(m, "seed", o.seed);
  take(m, "templates", o.templates);
  if (m.contains("config") && m["config"].is_string()) o.config = m["config"].get<std::string>();
  take(m, "parallelism", o.parallelism);
  take(m, "max_attempts", o.max_attempts);
  take(m, "out", o.out);
  take(m, "ledger", o.ledger);
}

struct ChainInputs {
  std::string items;
  std::string text;
  std::string prompt;
  std::string prompt_file;
};

/// Runs one chain and returns (bundle JSON, ledger).
std::pair<nlohmann::json, engine::RunLedger> run_chain(const std::string& chain, const ChainInputs& in,
                                                       const RunOptions& o, const nlohmann::json& config) {
  const auto templates = load_templates(o);
  auto actor = actor_for(o);
  engine::Engine engine(*actor, templates, engine_options(o));
  nlohmann::json bundle;
  if (chain == "cascade") {
    if (in.items.empty()) throw Error("Usage", "run cascade needs --items");
    const auto items = read_lines(in.items);
    bundle = cascade::to_json(cascade::run_cascade(items, cascade::CascadeConfig::from_json(config), engine));
  } else if (chain == "soylent") {
    if (in.text.empty()) throw Error("Usage", "run soylent needs --text");
    bundle = soylent::to_json(soylent::run_soylent(read_text(in.text), soylent::SoylentConfig::from_json(config), engine));
  } else if (chain == "mnovel") {
    std::string prompt = in.prompt;
    if (prompt.empty() && !in.prompt_file.empty()) {
      const auto lines = read_lines(in.prompt_file);
      if (!lines.empty()) prompt = lines.front();
    }
    if (prompt.empty()) throw Error("Usage", "run mnovel needs --prompt or --prompt-file");
    bundle = mnovel::to_json(mnovel::run_mnovel(prompt, mnovel::MnConfig::from_json(config), engine));
  } else {
    throw Error("Usage", "unknown chain '" + chain + "'");
  }
  return {std::move(bundle), engine.ledger()};
}

std::string sweep_csv(const nlohmann::json& bundle, const std::vector<long long>& targets,
                      const std::optional<std::string>& expect) {
  const auto kind = bundle.value("kind", std::string{});
  if (expect && *expect != kind) throw Error("KindMismatch", "expected a " + *expect + " bundle, got " + kind);
  std::ostringstream csv;
  csv << "target,achieved,percent_error\n";
  if (kind == "taxonomy") {
    const auto b = cascade::taxonomy_bundle_from_json(bundle);
    for (auto t : targets) {
      if (t < 1) throw Error("InvalidTargets", "taxonomy targets must be at least 1");
      const auto r = cascade::sweep_targets(b, static_cast<int>(t));
      csv << t << ',' << r.count << ',' << fixed4(r.percent_error) << '\n';
    }
  } else if (kind == "shorten") {
    const auto b = soylent::shortening_bundle_from_json(bundle);
    for (auto t : targets) {
      if (t < 1) throw Error("InvalidTargets", "length targets must be at least 1");
      const auto r = soylent::select_length(b, t);
      csv << t << ',' << r.achieved << ','
          << fixed4(evalkit::percent_error(static_cast<double>(r.achieved), static_cast<double>(t))) << '\n';
    }
  } else {
    throw Error("KindMismatch", "sweeps need a taxonomy or shorten bundle, got '" + kind + "'");
  }
  return csv.str();
}

nlohmann::json baseline_inputs(evalkit::TaskKind task, const std::string& items, const std::string& text_path,
                               const std::string& prompt, std::optional<long long> target) {
  nlohmann::json in = nlohmann::json::object();
  switch (task) {
    case evalkit::TaskKind::Taxonomy:
      if (items.empty()) throw Error("Usage", "taxonomy baselines need --items");
      in["items"] = read_lines(items);
      break;
    case evalkit::TaskKind::Shorten:
      if (text_path.empty()) throw Error("Usage", "shorten baselines need --text");
      in["text"] = read_text(text_path);
      break;
    case evalkit::TaskKind::Story:
      if (prompt.empty()) throw Error("Usage", "story baselines need --prompt");
      in["prompt"] = prompt;
      break;
  }
  if (target) in["target"] = *target;
  return in;
}

nlohmann::json run_and_score(evalkit::TaskKind task, evalkit::BaselineKind kind, const nlohmann::json& inputs,
                             const RunOptions& o, std::string* raw) {
  const auto templates = load_templates(o);
  auto actor = actor_for(o);
  const auto run = evalkit::run_baseline(task, kind, inputs, *actor, templates, engine_options(o));
  auto report = evalkit::score_baseline(task, kind, inputs, run.text);
  report["calls"] = run.ledger.call_count();
  if (raw) *raw = run.text;
  return report;
}

std::vector<fs::path> export_bundle(const nlohmann::json& bundle, const fs::path& dir,
                                    const std::vector<long long>& targets) {
  std::vector<fs::path> written;
  const auto kind = bundle.value("kind", std::string{});
  fs::create_directories(dir);
  if (kind == "story") {
    const auto b = mnovel::story_bundle_from_json(bundle);
    for (const auto& v : b.variants) {
      char name[32];
      std::snprintf(name, sizeof name, "variant_%02u.txt", v.mask);
      write_text(dir / name, text::join(v.story.scenes, "\n\n") + "\n");
      written.push_back(dir / name);
    }
  } else if (kind == "shorten") {
    const auto b = soylent::shortening_bundle_from_json(bundle);
    auto ts = targets;
    if (ts.empty()) ts = {static_cast<long long>(b.original_words), 0};
    for (auto t : ts) {
      const auto pick = soylent::select_length(b, t);
      const auto name = "length_" + std::to_string(t) + ".txt";
      write_text(dir / name, soylent::apply_selection(b, pick.choice));
      written.push_back(dir / name);
    }
  } else if (kind == "taxonomy") {
    const auto b = cascade::taxonomy_bundle_from_json(bundle);
    const auto tax = cascade::build_taxonomy(b, {});
    std::ostringstream out;
    std::function<void(int, int)> emit = [&](int parent, int depth) {
      for (auto c : tax.children_of(parent)) {
        out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << "- " << tax.categories[c].label << '\n';
        emit(static_cast<int>(c), depth + 1);
        for (auto i : tax.categories[c].items) {
          out << std::string(static_cast<std::size_t>(depth + 1) * 2, ' ') << "- " << tax.items[i] << '\n';
        }
      }
    };
    emit(-1, 0);
    if (!tax.uncategorized.empty()) {
      out << "- uncategorized\n";
      for (auto i : tax.uncategorized) out << "  - " << tax.items[i] << '\n';
    }
    write_text(dir / "taxonomy.txt", out.str());
    written.push_back(dir / "taxonomy.txt");
  } else {
    throw Error("KindMismatch", "unknown bundle kind '" + kind + "'");
  }
  return written;
}

/// Batch runs driven by a manifest:
/// {"task", "inputs": [paths], "baselines": [kinds], "targets": [..], "chain": bool,
///  "seed", "actor", "cache", "config", "out_dir"}.
void run_experiment(const nlohmann::json& m, std::ostream& out) {
  RunOptions o;
  apply_manifest(o, m);
  const auto task = evalkit::parse_task_kind(m.at("task").get<std::string>());
  const fs::path out_dir = m.value("out_dir", std::string("experiment"));
  const auto targets = m.value("targets", std::vector<long long>{});
  const bool chain = m.value("chain", true);
  std::vector<std::string> inputs = m.value("inputs", std::vector<std::string>{});
  if (inputs.empty() && m.contains("dataset")) {
    const fs::path ds = m["dataset"].get<std::string>();
    if (fs::is_directory(ds)) {
      for (const auto& e : fs::directory_iterator(ds)) {
        if (e.path().extension() == ".txt") inputs.push_back(e.path().string());
      }
      std::sort(inputs.begin(), inputs.end());
    } else {
      inputs.push_back(ds.string());
    }
  }
  const auto min_words = m.value("min_words", task == evalkit::TaskKind::Shorten ? 500 : 0);
  const auto config = m.value("config", nlohmann::json::object());

  std::ostringstream csv;
  csv << "input,method,target,achieved,percent_error,calls\n";
  nlohmann::json report = nlohmann::json::array();
  for (const auto& input : inputs) {
    const auto name = fs::path(input).stem().string();
    std::vector<std::string> prompts;
    if (task == evalkit::TaskKind::Story) {
      prompts = read_lines(input);
    } else {
      prompts.push_back({});
    }
    for (std::size_t p = 0; p < prompts.size(); ++p) {
      const auto label = task == evalkit::TaskKind::Story ? name + "#" + std::to_string(p + 1) : name;
      if (task == evalkit::TaskKind::Shorten && text::word_count(read_text(input)) < static_cast<std::size_t>(min_words)) {
        report.push_back({{"input", label}, {"skipped", "fewer than min_words words"}});
        continue;
      }
      if (chain) {
        ChainInputs in;
        in.items = task == evalkit::TaskKind::Taxonomy ? input : "";
        in.text = task == evalkit::TaskKind::Shorten ? input : "";
        in.prompt = prompts[p];
        const std::string chain_name = task == evalkit::TaskKind::Taxonomy  ? "cascade"
                                       : task == evalkit::TaskKind::Shorten ? "soylent"
                                                                            : "mnovel";
        auto [bundle, ledger] = run_chain(chain_name, in, o, config);
        const auto bundle_path = out_dir / (label + "." + chain_name + ".json");
        write_text(bundle_path, pretty(bundle));
        const auto cost = evalkit::cost_report(ledger);
        report.push_back({{"input", label}, {"method", chain_name}, {"bundle", bundle_path.string()},
                          {"cost", cost.to_json()}});
        if (task == evalkit::TaskKind::Story) {
          csv << label << ',' << chain_name << ",," << bundle["variants"].size() << ",," << cost.calls << '\n';
        } else if (!targets.empty()) {
          std::istringstream rows(sweep_csv(bundle, targets, std::nullopt));
          std::string row;
          std::getline(rows, row);
          while (std::getline(rows, row)) csv << label << ',' << chain_name << ',' << row << ',' << cost.calls << '\n';
        }
      }
      for (const auto& kind_name : m.value("baselines", std::vector<std::string>{})) {
        const auto kind = evalkit::parse_baseline_kind(kind_name);
        std::vector<std::optional<long long>> ts{std::nullopt};
        if (kind == evalkit::BaselineKind::ZeroShotTarget) ts.assign(targets.begin(), targets.end());
        for (const auto& t : ts) {
          const auto in = baseline_inputs(task, task == evalkit::TaskKind::Taxonomy ? input : "",
                                          task == evalkit::TaskKind::Shorten ? input : "", prompts[p], t);
          auto r = run_and_score(task, kind, in, o, nullptr);
          r["input"] = label;
          csv << label << ',' << kind_name << ',' << (t ? std::to_string(*t) : "") << ',';
          if (task == evalkit::TaskKind::Taxonomy) csv << r["category_count"].get<std::size_t>();
          if (task == evalkit::TaskKind::Shorten) csv << r["words"].get<std::size_t>();
          if (task == evalkit::TaskKind::Story) csv << r["variants"].get<std::size_t>();
          csv << ',' << (r.contains("percent_error") ? fixed4(r["percent_error"].get<double>()) : "") << ','
              << r["calls"].get<std::size_t>() << '\n';
          r.erase("outline");
          report.push_back(std::move(r));
        }
      }
    }
  }
  write_text(out_dir / "results.csv", csv.str());
  write_text(out_dir / "report.json", pretty(report));
  out << (out_dir / "results.csv").string() << '\n';
}

int fail(std::ostream& err, const Error& e) {
  nlohmann::json body = {{"error", e.code()}, {"detail", e.detail()}};
  if (const auto* io = dynamic_cast<const IoFailure*>(&e)) body["path"] = io->path();
  if (const auto* sv = dynamic_cast<const SchemaViolation*>(&e)) body["path"] = sv->path();
  if (const auto* af = dynamic_cast<const engine::ActorFailure*>(&e)) {
    body["node_id"] = af->node_id();
    body["replicate"] = af->replicate();
    body["calls"] = af->partial_ledger().call_count();
  }
  if (const auto* ge = dynamic_cast<const engine::GraphError*>(&e)) body["element"] = ge->element();
  err << body.dump() << '\n';
  return kUsageCodes.contains(e.code()) ? kUsage : kChainFailure;
}

}  // namespace

std::vector<long long> parse_targets(std::string_view spec) {
  const auto number = [&](std::string_view s) {
    s = text::trim_view(s);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
      throw Error("InvalidTargets", "cannot read '" + std::string(s) + "' as an integer");
    }
    return v;
  };
  spec = text::trim_view(spec);
  std::vector<long long> out;
  if (spec.empty()) return out;
  if (const auto dots = spec.find(".."); dots != std::string_view::npos) {
    const auto rest = spec.substr(dots + 2);
    const auto colon = rest.find(':');
    const long long lo = number(spec.substr(0, dots));
    const long long hi = number(rest.substr(0, colon));
    const long long step = colon == std::string_view::npos ? 1 : number(rest.substr(colon + 1));
    if (step < 1) throw Error("InvalidTargets", "step must be positive");
    if (hi < lo) throw Error("InvalidTargets", "range end precedes its start");
    for (long long t = lo; t <= hi; t += step) out.push_back(t);
    return out;
  }
  std::size_t start = 0;
  while (start <= spec.size()) {
    const auto comma = spec.find(',', start);
    out.push_back(number(spec.substr(start, comma == std::string_view::npos ? spec.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::vector<std::string> out;
  for (const auto& line : text::split_lines(read_text(path))) {
    const auto t = text::trim(line);
    if (!t.empty() && !t.starts_with('#')) out.push_back(t);
  }
  return out;
}

ActorSpec parse_actor_spec(std::string_view spec) {
  const auto colon = spec.find(':');
  ActorSpec out{std::string(spec.substr(0, colon)),
                colon == std::string_view::npos ? std::string{} : std::string(spec.substr(colon + 1))};
  if (out.kind != "http" && out.kind != "script" && out.kind != "replay") {
    throw Error("InvalidActorSpec", "actor must be http[:config], script[:book] or replay:DIR, got '" +
                                        std::string(spec) + "'");
  }
  if (out.kind == "replay" && out.arg.empty()) throw Error("InvalidActorSpec", "replay needs a directory");
  return out;
}

std::shared_ptr<actors::Actor> make_actor(const ActorSpec& spec, std::optional<std::uint64_t> seed,
                                          const std::optional<fs::path>& cache) {
  std::shared_ptr<actors::Actor> actor;
  if (spec.kind == "replay") {
    if (!fs::is_directory(spec.arg)) throw IoFailure(spec.arg, "replay directory does not exist");
    return std::make_shared<actors::ReplayCache>(spec.arg, nullptr);
  }
  if (spec.kind == "script") {
    nlohmann::json book_json = nlohmann::json::object();
    if (!spec.arg.empty()) book_json = read_json(spec.arg);
    if (seed) book_json["seed"] = *seed;
    auto book = actors::ScriptBook::from_json(book_json);
    if (book.fallback_enabled()) {
      if (!book_json.contains("seed")) throw Error("SeedRequired", "scripted fallback generators need --seed");
      actors::install_default_generators(book);
    }
    actor = std::make_shared<actors::ScriptedActor>(std::move(book));
  } else {
    nlohmann::json config = nlohmann::json::object();
    if (!spec.arg.empty()) config = read_json(spec.arg);
    actor = std::make_shared<actors::HttpActor>(actors::http_config_from_json(config));
  }
  if (cache) return std::make_shared<actors::ReplayCache>(*cache, actor);
  return actor;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Prompt-chain runner, sweeps, baselines and the bundle service", "chainflow"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "run a chain and write its bundle");
  std::string chain;
  ChainInputs chain_in;
  RunOptions run_opts;
  run_cmd->add_option("chain", chain, "cascade | soylent | mnovel")->required();
  run_cmd->add_option("--items", chain_in.items, "newline-delimited item labels (cascade)");
  run_cmd->add_option("--text", chain_in.text, "text file to shorten (soylent)");
  run_cmd->add_option("--prompt", chain_in.prompt, "story prompt (mnovel)");
  run_cmd->add_option("--prompt-file", chain_in.prompt_file, "file whose first line is the story prompt");
  run_cmd->add_option("--out", run_opts.out, "bundle output path");
  add_run_options(*run_cmd, run_opts);

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "closest achievable output per target, as CSV");
  std::string sweep_bundle;
  std::string sweep_targets_spec;
  std::optional<std::string> sweep_kind;
  std::optional<std::string> sweep_out;
  sweep_cmd->add_option("--bundle", sweep_bundle, "bundle JSON")->required();
  sweep_cmd->add_option("--targets", sweep_targets_spec, "2..20 | 100..500:50 | 5,10,15");
  sweep_cmd->add_option("--kind", sweep_kind, "expected bundle kind");
  sweep_cmd->add_option("--out", sweep_out, "CSV path (default stdout)");

  // baseline
  auto* base_cmd = app.add_subcommand("baseline", "run one zero-shot baseline and score it");
  std::string base_task;
  std::string base_kind;
  std::string base_items;
  std::string base_text;
  std::string base_prompt;
  std::optional<long long> base_target;
  std::optional<std::string> base_raw;
  RunOptions base_opts;
  base_cmd->add_option("--task", base_task, "taxonomy | shorten | story")->required();
  base_cmd->add_option("--kind", base_kind, "zero-shot | zero-shot-target | zero-shot-ffv | zero-shot-combo")
      ->required();
  base_cmd->add_option("--items", base_items, "item labels (taxonomy)");
  base_cmd->add_option("--text", base_text, "text file (shorten)");
  base_cmd->add_option("--prompt", base_prompt, "story prompt (story)");
  base_cmd->add_option("--target", base_target, "target categories or words");
  base_cmd->add_option("--raw", base_raw, "write the raw model output here");
  base_cmd->add_option("--out", base_opts.out, "report JSON path (default stdout)");
  add_run_options(*base_cmd, base_opts);

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "serve a bundle store over HTTP");
  std::string serve_dir;
  std::string serve_host = "127.0.0.1";
  int serve_port = 8080;
  serve_cmd->add_option("--dir", serve_dir, "store directory")->required();
  serve_cmd->add_option("--host", serve_host, "bind address");
  serve_cmd->add_option("--port", serve_port, "port");

  // store
  auto* store_cmd = app.add_subcommand("store", "add bundle files to a store and print their ids");
  std::string store_dir;
  std::vector<std::string> store_files;
  store_cmd->add_option("--dir", store_dir, "store directory")->required();
  store_cmd->add_option("bundles", store_files, "bundle JSON files")->required();

  // export
  auto* export_cmd = app.add_subcommand("export", "write plain-text outputs of a bundle");
  std::string export_bundle_path;
  std::string export_dir;
  std::string export_targets;
  export_cmd->add_option("--bundle", export_bundle_path, "bundle JSON")->required();
  export_cmd->add_option("--out-dir", export_dir, "output directory")->required();
  export_cmd->add_option("--targets", export_targets, "length targets for shorten bundles");

  // experiment
  auto* exp_cmd = app.add_subcommand("experiment", "batch chain and baseline runs from a manifest");
  std::string exp_manifest;
  exp_cmd->add_option("--manifest", exp_manifest, "experiment manifest JSON")->required();

  // templates
  auto* tmpl_cmd = app.add_subcommand("templates", "show the reference prompt templates");
  bool tmpl_dump = false;
  tmpl_cmd->add_flag("--dump", tmpl_dump, "print the registry as JSON");

  // graph
  auto* graph_cmd = app.add_subcommand("graph", "print a chain's workflow graph");
  std::string graph_chain;
  graph_cmd->add_option("chain", graph_chain, "cascade | soylent | mnovel")->required();

  // report
  auto* report_cmd = app.add_subcommand("report", "cost report for a ledger file");
  std::string report_ledger;
  bool report_json = false;
  report_cmd->add_option("--ledger", report_ledger, "ledger JSON")->required();
  report_cmd->add_flag("--json", report_json, "machine-readable output");

  std::vector<const char*> argv{"chainflow"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << nlohmann::json{{"error", "Usage"}, {"detail", e.what()}}.dump() << '\n';
    return kUsage;
  }

  try {
    if (*run_cmd) {
      const auto manifest = manifest_of(run_opts);
      apply_manifest(run_opts, manifest);
      take(manifest, "items", chain_in.items);
      take(manifest, "text", chain_in.text);
      take(manifest, "prompt", chain_in.prompt);
      take(manifest, "prompt_file", chain_in.prompt_file);
      take(manifest, "chain", chain);
      if (run_opts.out.empty()) throw Error("Usage", "run needs --out");
      auto [bundle, ledger] = run_chain(chain, chain_in, run_opts, load_config(run_opts, manifest));
      write_text(run_opts.out, pretty(bundle));
      if (!run_opts.ledger) run_opts.ledger = run_opts.out + ".ledger.json";
      write_ledger(run_opts, ledger);
      out << evalkit::cost_report(ledger).to_table();
      return kOk;
    }
    if (*sweep_cmd) {
      const auto csv = sweep_csv(read_json(sweep_bundle), parse_targets(sweep_targets_spec), sweep_kind);
      if (sweep_out) {
        write_text(*sweep_out, csv);
      } else {
        out << csv;
      }
      return kOk;
    }
    if (*base_cmd) {
      const auto manifest = manifest_of(base_opts);
      apply_manifest(base_opts, manifest);
      const auto task = evalkit::parse_task_kind(base_task);
      const auto kind = evalkit::parse_baseline_kind(base_kind);
      evalkit::baseline_template(task, kind);
      const auto inputs = baseline_inputs(task, base_items, base_text, base_prompt, base_target);
      std::string raw;
      const auto report = run_and_score(task, kind, inputs, base_opts, &raw);
      if (base_raw) write_text(*base_raw, raw);
      if (base_opts.out.empty()) {
        out << pretty(report);
      } else {
        write_text(base_opts.out, pretty(report));
      }
      return kOk;
    }
    if (*serve_cmd) {
      service::BundleStore store(serve_dir);
      service::BundleServer server(store);
      err << "serving " << serve_dir << " on http://" << serve_host << ':' << serve_port << '\n';
      if (!server.listen(serve_host, serve_port)) {
        throw IoFailure(serve_host + ":" + std::to_string(serve_port), "cannot bind");
      }
      return kOk;
    }
    if (*store_cmd) {
      service::BundleStore store(store_dir);
      for (const auto& f : store_files) out << store.store(read_json(f), {{"source", f}}) << '\n';
      return kOk;
    }
    if (*export_cmd) {
      for (const auto& p : export_bundle(read_json(export_bundle_path), export_dir, parse_targets(export_targets))) {
        out << p.string() << '\n';
      }
      return kOk;
    }
    if (*exp_cmd) {
      run_experiment(read_json(exp_manifest), out);
      return kOk;
    }
    if (*tmpl_cmd) {
      const auto reg = actors::TemplateRegistry::defaults();
      if (tmpl_dump) {
        out << pretty(reg.to_json());
      } else {
        for (const auto& id : reg.ids()) out << id << " (" << reg.variant_count(id) << ")\n";
      }
      return kOk;
    }
    if (*graph_cmd) {
      engine::WorkflowGraph g;
      if (graph_chain == "cascade") {
        g = cascade::cascade_graph({});
      } else if (graph_chain == "soylent") {
        g = soylent::soylent_graph({});
      } else if (graph_chain == "mnovel") {
        g = mnovel::mnovel_graph({});
      } else {
        throw Error("Usage", "unknown chain '" + graph_chain + "'");
      }
      out << pretty(engine::to_json(g));
      return kOk;
    }
    if (*report_cmd) {
      const auto report = evalkit::cost_report(engine::RunLedger::from_json(read_json(report_ledger)));
      out << (report_json ? pretty(report.to_json()) : report.to_table());
      return kOk;
    }
  } catch (const Error& e) {
    return fail(err, e);
  } catch (const nlohmann::json::exception& e) {
    return fail(err, Error("InvalidJson", e.what()));
  } catch (const fs::filesystem_error& e) {
    return fail(err, IoFailure(e.path1().string(), e.what()));
  }
  return kUsage;
}

}  // namespace chainflow::cli
