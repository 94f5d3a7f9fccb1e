#include <gtest/gtest.h>

#include <httplib.h>

#include <random>
#include <thread>

#include "chainflow/evalkit/metrics.hpp"
#include "chainflow/service/service.hpp"
#include "support.hpp"

namespace cs = chainflow::service;
namespace cc = chainflow::cascade;
namespace sy = chainflow::soylent;
namespace cm = chainflow::mnovel;
using chainflow::Error;
using chainflow::testing::Rig;
using chainflow::testing::TempDir;

namespace {

std::string error_code(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return {};
}

nlohmann::json taxonomy_payload() { return cc::to_json(chainflow::testing::ladder_bundle()); }

nlohmann::json shorten_payload(std::uint64_t seed = 4) {
  std::mt19937_64 rng(seed);
  return sy::to_json(chainflow::testing::random_shortening_bundle(rng, 6));
}

nlohmann::json story_payload() {
  Rig rig(5);
  auto engine = rig.engine();
  cm::MnConfig config;
  config.rounds = 3;
  return cm::to_json(cm::run_mnovel("A city in the sky.", config, *engine));
}

}  // namespace

TEST(Store, IdempotentAndContentAddressed) {
  TempDir dir;
  cs::BundleStore store(dir.path());
  const auto payload = taxonomy_payload();
  const auto a = store.store(payload, {{"who", "first"}});
  const auto b = store.store(nlohmann::json::parse(payload.dump(2)), {{"who", "second"}});
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.size(), 64u);
  EXPECT_EQ(store.record(a).manifest["who"], "first");
  EXPECT_EQ(store.record(a).kind, cs::BundleKind::Taxonomy);
  EXPECT_EQ(store.list().size(), 1u);
  EXPECT_EQ(store.payload(a), payload);
  EXPECT_EQ(store.payload_bytes(a), cs::canonical_dump(payload));
  EXPECT_EQ(error_code([&] { store.record(std::string(64, '0')); }), "NotFound");
  EXPECT_EQ(error_code([&] { store.record("../etc"); }), "NotFound");
}

TEST(Store, RejectsSchemaViolationsWithPath) {
  TempDir dir;
  cs::BundleStore store(dir.path());
  auto bad = taxonomy_payload();
  bad["sims"][1][1] = 0.5;
  try {
    store.store(bad);
    FAIL();
  } catch (const chainflow::SchemaViolation& e) {
    EXPECT_EQ(e.path().rfind("sims", 0), 0u);
  }
  EXPECT_EQ(error_code([&] { store.store({{"kind", "poem"}}); }), "SchemaViolation");
  EXPECT_TRUE(store.list().empty());
}

TEST(Store, AcceptsMinimalPayloads) {
  TempDir dir;
  cs::BundleStore store(dir.path());
  const nlohmann::json tax = {{"kind", "taxonomy"}, {"schema_version", 1}, {"items", nlohmann::json::array()},
                              {"categories", nlohmann::json::array()}, {"membership", nlohmann::json::array()},
                              {"sims", nlohmann::json::array()}};
  EXPECT_EQ(cs::validate_payload(tax), cs::BundleKind::Taxonomy);
  EXPECT_NO_THROW(store.store(tax));
  EXPECT_NO_THROW(store.store(shorten_payload()));
  EXPECT_NO_THROW(store.store(story_payload()));
  EXPECT_EQ(store.list().size(), 3u);
}

TEST(Views, TaxonomyDefaultsAndRange) {
  TempDir dir;
  cs::BundleStore store(dir.path());
  const auto id = store.store(taxonomy_payload());
  cs::BundleViews views(store);
  const auto v = views.taxonomy(id, 0.75, 2);
  EXPECT_EQ(v["params"]["merge"], 0.75);
  EXPECT_EQ(v["params"]["minsize"], 2);
  EXPECT_EQ(v["category_count"], cc::build_taxonomy(chainflow::testing::ladder_bundle(), {}).category_count());
  EXPECT_EQ(views.taxonomy(id, 0.75, 2), v);
  EXPECT_EQ(error_code([&] { views.taxonomy(id, 1.1, 2); }), "ParamOutOfRange");
  EXPECT_EQ(error_code([&] { views.taxonomy(id, 0.5, 0); }), "ParamOutOfRange");
  EXPECT_EQ(error_code([&] { views.shorten(id, 10); }), "KindMismatch");
}

TEST(Views, ShortenEndpoints) {
  TempDir dir;
  cs::BundleStore store(dir.path());
  const auto payload = shorten_payload();
  const auto id = store.store(payload);
  const auto b = sy::shortening_bundle_from_json(payload);
  cs::BundleViews views(store, 1);
  const auto full = views.shorten(id, static_cast<long long>(b.original_words));
  EXPECT_EQ(full["text"], b.original);
  EXPECT_EQ(full["percent_error"], 0.0);
  EXPECT_TRUE(full["diff"].empty());
  const auto shortest = views.shorten(id, 0);
  EXPECT_EQ(shortest["achieved"], sy::select_length(b, 0).achieved);
  EXPECT_FALSE(shortest.contains("percent_error"));
  const long long mid = static_cast<long long>(b.original_words) - 3;
  const auto v = views.shorten(id, mid);
  EXPECT_DOUBLE_EQ(v["percent_error"].get<double>(),
                   chainflow::evalkit::percent_error(v["achieved"].get<double>(), static_cast<double>(mid)));
  EXPECT_EQ(views.shorten(id, mid), v);
  EXPECT_EQ(error_code([&] { views.shorten(id, -1); }), "ParamOutOfRange");
}

TEST(Views, StoryMasks) {
  TempDir dir;
  cs::BundleStore store(dir.path());
  const auto payload = story_payload();
  const auto id = store.store(payload);
  const auto b = cm::story_bundle_from_json(payload);
  cs::BundleViews views(store);
  const auto n = b.variants.size();
  EXPECT_EQ(views.story(id, 0)["story"], b.initial.to_json());
  for (std::uint64_t m = 0; m < n; ++m) {
    const auto v = views.story(id, m);
    EXPECT_EQ(v["story"], b.variants[m].story.to_json());
    EXPECT_EQ(v["variant_count"], n);
  }
  EXPECT_EQ(error_code([&] { views.story(id, n); }), "MaskOutOfRange");
  EXPECT_EQ(error_code([&] { views.taxonomy(id, 0.5, 1); }), "KindMismatch");
}

namespace {

struct LiveServer {
  TempDir dir;
  cs::BundleStore store{dir.path()};
  cs::BundleServer server{store};
  int port = 0;
  std::thread thread;

  LiveServer() {
    port = server.bind_any("127.0.0.1");
    thread = std::thread([this] { server.serve(); });
    server.wait_until_ready();
  }
  ~LiveServer() {
    server.stop();
    thread.join();
  }
  httplib::Client client() const { return httplib::Client("127.0.0.1", port); }
};

}  // namespace

TEST(Http, RoutesStatusesAndMediaType) {
  LiveServer live;
  ASSERT_GT(live.port, 0);
  auto cli = live.client();
  const std::string media(cs::kMediaType);

  auto res = cli.Post("/bundles", shorten_payload().dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 201);
  EXPECT_EQ(res->get_header_value("Content-Type"), media);
  const auto id = nlohmann::json::parse(res->body)["id"].get<std::string>();

  const nlohmann::json wrapped = {{"payload", taxonomy_payload()}, {"manifest", {{"note", "ladder"}}}};
  res = cli.Post("/bundles", wrapped.dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 201);
  const auto tax_id = nlohmann::json::parse(res->body)["id"].get<std::string>();
  EXPECT_EQ(nlohmann::json::parse(res->body)["manifest"]["note"], "ladder");

  res = cli.Get("/bundles");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(nlohmann::json::parse(res->body)["bundles"].size(), 2u);

  res = cli.Get("/bundles/" + id);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->body, live.store.payload_bytes(id));

  res = cli.Get("/bundles/" + id + "/shorten?target=5");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(nlohmann::json::parse(res->body)["target"], 5);

  res = cli.Get("/bundles/" + id + "/shorten");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  EXPECT_EQ(nlohmann::json::parse(res->body)["error"], "ParamOutOfRange");

  res = cli.Get("/bundles/" + tax_id + "/taxonomy");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  res = cli.Get("/bundles/" + tax_id + "/taxonomy?merge=1.1");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  res = cli.Get("/bundles/" + tax_id + "/story?mask=0");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 409);

  res = cli.Get("/bundles/" + std::string(64, 'a'));
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
  EXPECT_EQ(res->get_header_value("Content-Type"), media);

  auto bad = taxonomy_payload();
  bad["sims"][0][0] = 0.2;
  res = cli.Post("/bundles", bad.dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 422);
  EXPECT_TRUE(nlohmann::json::parse(res->body).contains("path"));

  res = cli.Post("/bundles", "{not json", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  EXPECT_EQ(nlohmann::json::parse(res->body)["error"], "InvalidJson");
}
