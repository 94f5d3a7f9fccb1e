#include <charconv>
#include <cstdlib>

#include <httplib.h>

#include "chainflow/error.hpp"
#include "chainflow/service/service.hpp"

namespace chainflow::service {

namespace {

const std::string kMedia(kMediaType);

int status_for(const std::string& code) {
  if (code == "NotFound") return 404;
  if (code == "KindMismatch") return 409;
  if (code == "SchemaViolation") return 422;
  return 400;
}

void send(httplib::Response& res, int status, const std::string& body) {
  res.status = status;
  res.set_content(body, kMedia);
}

void send_error(httplib::Response& res, const Error& e) {
  nlohmann::json body = {{"error", e.code()}, {"detail", e.detail()}};
  if (const auto* sv = dynamic_cast<const SchemaViolation*>(&e)) body["path"] = sv->path();
  send(res, status_for(e.code()), body.dump());
}

template <class Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_error(res, e);
    } catch (const nlohmann::json::exception& e) {
      send_error(res, Error("InvalidJson", e.what()));
    } catch (const std::exception& e) {
      send(res, 500, nlohmann::json{{"error", "Internal"}, {"detail", e.what()}}.dump());
    }
  };
}

std::optional<std::string> param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  return req.get_param_value(name);
}

double real_param(const httplib::Request& req, const char* name, double fallback) {
  const auto v = param(req, name);
  if (!v) return fallback;
  char* end = nullptr;
  const double d = std::strtod(v->c_str(), &end);
  if (v->empty() || end != v->c_str() + v->size()) {
    throw Error("ParamOutOfRange", std::string(name) + " must be a number");
  }
  return d;
}

template <class Int>
Int int_param(const httplib::Request& req, const char* name, std::optional<Int> fallback) {
  const auto v = param(req, name);
  if (!v) {
    if (fallback) return *fallback;
    throw Error("ParamOutOfRange", std::string(name) + " is required");
  }
  Int out{};
  const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc{} || ptr != v->data() + v->size()) {
    throw Error("ParamOutOfRange", std::string(name) + " must be an integer in range");
  }
  return out;
}

nlohmann::json record_json(const BundleRecord& r) {
  return {{"id", r.id}, {"kind", to_string(r.kind)}, {"created_at", r.created_at}, {"manifest", r.manifest}};
}

}  // namespace

struct BundleServer::Impl {
  Impl(BundleStore& s, std::size_t capacity) : store(s), views(s, capacity) {}

  BundleStore& store;
  BundleViews views;
  httplib::Server server;
};

BundleServer::BundleServer(BundleStore& store, std::size_t cache_capacity)
    : impl_(std::make_unique<Impl>(store, cache_capacity)) {
  auto& srv = impl_->server;
  auto* impl = impl_.get();
  const std::string id = "([0-9a-f]{64})";

  srv.Get("/bundles", guarded([impl](const httplib::Request&, httplib::Response& res) {
            nlohmann::json list = nlohmann::json::array();
            for (const auto& r : impl->store.list()) list.push_back(record_json(r));
            send(res, 200, nlohmann::json{{"bundles", list}}.dump());
          }));
  srv.Get("/bundles/" + id, guarded([impl](const httplib::Request& req, httplib::Response& res) {
            send(res, 200, impl->store.payload_bytes(req.matches[1].str()));
          }));
  srv.Get("/bundles/" + id + "/taxonomy", guarded([impl](const httplib::Request& req, httplib::Response& res) {
            const double merge = real_param(req, "merge", 0.75);
            const int minsize = int_param<int>(req, "minsize", 2);
            send(res, 200, impl->views.taxonomy(req.matches[1].str(), merge, minsize).dump());
          }));
  srv.Get("/bundles/" + id + "/shorten", guarded([impl](const httplib::Request& req, httplib::Response& res) {
            const auto target = int_param<long long>(req, "target", std::nullopt);
            send(res, 200, impl->views.shorten(req.matches[1].str(), target).dump());
          }));
  srv.Get("/bundles/" + id + "/story", guarded([impl](const httplib::Request& req, httplib::Response& res) {
            const auto mask = int_param<std::uint64_t>(req, "mask", std::uint64_t{0});
            send(res, 200, impl->views.story(req.matches[1].str(), mask).dump());
          }));
  srv.Post("/bundles", guarded([impl](const httplib::Request& req, httplib::Response& res) {
             const auto body = nlohmann::json::parse(req.body);
             nlohmann::json payload = body;
             nlohmann::json manifest = nlohmann::json::object();
             if (body.is_object() && !body.contains("kind") && body.contains("payload")) {
               payload = body["payload"];
               manifest = body.value("manifest", nlohmann::json::object());
             }
             const auto bundle_id = impl->store.store(payload, manifest);
             send(res, 201, record_json(impl->store.record(bundle_id)).dump());
           }));
  srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      res.set_content(nlohmann::json{{"error", res.status == 404 ? "NotFound" : "HttpError"},
                                     {"detail", "no such route"}}
                          .dump(),
                      kMedia);
    }
  });
}

BundleServer::~BundleServer() { stop(); }

bool BundleServer::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }

int BundleServer::bind_any(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool BundleServer::serve() { return impl_->server.listen_after_bind(); }

void BundleServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

void BundleServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace chainflow::service
