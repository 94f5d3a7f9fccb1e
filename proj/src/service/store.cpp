#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "chainflow/digest.hpp"
#include "chainflow/error.hpp"
#include "chainflow/service/service.hpp"

namespace chainflow::service {

namespace fs = std::filesystem;

namespace {

bool valid_id(std::string_view id) {
  return id.size() == 64 && id.find_first_not_of("0123456789abcdef") == std::string_view::npos;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("IoError", "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, std::string_view bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("IoError", "cannot write " + p.string());
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string_view to_string(BundleKind kind) noexcept {
  switch (kind) {
    case BundleKind::Taxonomy: return "taxonomy";
    case BundleKind::Shorten: return "shorten";
    case BundleKind::Story: return "story";
  }
  return "taxonomy";
}

BundleKind parse_bundle_kind(std::string_view s) {
  for (auto k : {BundleKind::Taxonomy, BundleKind::Shorten, BundleKind::Story}) {
    if (to_string(k) == s) return k;
  }
  throw SchemaViolation("kind", "unknown bundle kind '" + std::string(s) + "'");
}

std::string canonical_dump(const nlohmann::json& payload) { return payload.dump(); }

BundleKind validate_payload(const nlohmann::json& payload) {
  if (!payload.is_object()) throw SchemaViolation("$", "expected an object");
  const auto it = payload.find("kind");
  if (it == payload.end() || !it->is_string()) throw SchemaViolation("kind", "missing bundle kind");
  const auto kind = parse_bundle_kind(it->get<std::string>());
  switch (kind) {
    case BundleKind::Taxonomy: cascade::taxonomy_bundle_from_json(payload); break;
    case BundleKind::Shorten: soylent::shortening_bundle_from_json(payload); break;
    case BundleKind::Story: mnovel::story_bundle_from_json(payload); break;
  }
  return kind;
}

BundleStore::BundleStore(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

fs::path BundleStore::path_of(std::string_view id) const {
  if (!valid_id(id)) throw Error("NotFound", "no bundle '" + std::string(id) + "'");
  return dir_ / std::string(id);
}

std::string BundleStore::store(const nlohmann::json& payload, const nlohmann::json& manifest) {
  const auto kind = validate_payload(payload);
  const auto bytes = canonical_dump(payload);
  const auto id = sha256_hex(bytes);
  std::lock_guard lock(write_mutex_);
  const auto final_dir = dir_ / id;
  if (fs::exists(final_dir / "meta.json")) return id;
  const auto tmp = dir_ / (".tmp-" + id + "-" + std::to_string(::getpid()));
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  write_file(tmp / "bundle.json", bytes);
  const nlohmann::json meta = {{"id", id}, {"kind", to_string(kind)}, {"created_at", utc_now()}, {"manifest", manifest}};
  write_file(tmp / "meta.json", meta.dump(2));
  std::error_code ec;
  fs::rename(tmp, final_dir, ec);
  if (ec) {
    fs::remove_all(tmp);
    if (!fs::exists(final_dir / "meta.json")) throw Error("IoError", "cannot store bundle: " + ec.message());
  }
  return id;
}

bool BundleStore::contains(std::string_view id) const {
  return valid_id(id) && fs::exists(dir_ / std::string(id) / "meta.json");
}

BundleRecord BundleStore::record(std::string_view id) const {
  const auto p = path_of(id) / "meta.json";
  if (!fs::exists(p)) throw Error("NotFound", "no bundle '" + std::string(id) + "'");
  const auto meta = nlohmann::json::parse(read_file(p));
  return {meta.at("id").get<std::string>(), parse_bundle_kind(meta.at("kind").get<std::string>()),
          meta.value("created_at", std::string{}), meta.value("manifest", nlohmann::json::object())};
}

std::string BundleStore::payload_bytes(std::string_view id) const {
  const auto p = path_of(id) / "bundle.json";
  if (!fs::exists(p)) throw Error("NotFound", "no bundle '" + std::string(id) + "'");
  return read_file(p);
}

nlohmann::json BundleStore::payload(std::string_view id) const { return nlohmann::json::parse(payload_bytes(id)); }

std::vector<BundleRecord> BundleStore::list() const {
  std::vector<BundleRecord> out;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    const auto name = entry.path().filename().string();
    if (entry.is_directory() && valid_id(name) && fs::exists(entry.path() / "meta.json")) out.push_back(record(name));
  }
  std::sort(out.begin(), out.end(), [](const BundleRecord& a, const BundleRecord& b) { return a.id < b.id; });
  return out;
}

}  // namespace chainflow::service
