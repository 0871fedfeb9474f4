#include <charconv>
#include <condition_variable>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "heirag/error.hpp"
#include "heirag/gateway.hpp"

namespace heirag {

namespace {

void send(httplib::Response& res, const Response& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

template <typename T>
std::optional<T> parse_int(const std::string& text) {
  T v{};
  const auto* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || p != end) return std::nullopt;
  return v;
}

/// Parses the body as JSON; an empty body is null.
std::optional<nlohmann::json> body_json(const httplib::Request& req, httplib::Response& res) {
  if (req.body.empty()) return nlohmann::json();
  try {
    return nlohmann::json::parse(req.body);
  } catch (const nlohmann::json::parse_error& e) {
    send(res, error_response(400, "bad_request", std::string("malformed JSON: ") + e.what()));
    return std::nullopt;
  }
}

}  // namespace

struct HttpGateway::Impl {
  Service& service;
  httplib::Server server;
  int port = -1;
  std::thread worker;

  explicit Impl(Service& s) : service(s) {}
};

HttpGateway::HttpGateway(Service& service, std::optional<std::string> static_dir)
    : impl_(std::make_unique<Impl>(service)) {
  auto& srv = impl_->server;
  Service& svc = service;

  srv.Get("/health", [&svc](const httplib::Request&, httplib::Response& res) { send(res, svc.health()); });

  srv.Post("/users", [&svc](const httplib::Request& req, httplib::Response& res) {
    if (auto body = body_json(req, res)) send(res, svc.add_user(*body));
  });

  srv.Get(R"(/users/([^/]+)/hei)", [&svc](const httplib::Request& req, httplib::Response& res) {
    const auto seqn = parse_int<Seqn>(req.matches[1]);
    if (!seqn) return send(res, error_response(404, "unknown_user", "seqn must be an integer"));
    send(res, svc.user_hei(*seqn));
  });

  srv.Get(R"(/users/([^/]+)/recommendations)", [&svc](const httplib::Request& req, httplib::Response& res) {
    const auto seqn = parse_int<Seqn>(req.matches[1]);
    if (!seqn) return send(res, error_response(404, "unknown_user", "seqn must be an integer"));
    std::optional<std::size_t> k;
    if (req.has_param("k")) {
      k = parse_int<std::size_t>(req.get_param_value("k"));
      if (!k) return send(res, error_response(400, "bad_request", "k must be a positive integer"));
    }
    send(res, svc.recommend(*seqn, k));
  });

  srv.Post("/whatif", [&svc](const httplib::Request& req, httplib::Response& res) {
    if (auto body = body_json(req, res)) send(res, svc.whatif(*body));
  });

  srv.Get("/foods/search", [&svc](const httplib::Request& req, httplib::Response& res) {
    std::size_t k = 10;
    if (req.has_param("k")) {
      auto parsed = parse_int<std::size_t>(req.get_param_value("k"));
      if (!parsed) return send(res, error_response(400, "bad_request", "k must be a positive integer"));
      k = *parsed;
    }
    send(res, svc.search_foods(req.get_param_value("q"), k));
  });

  srv.Post("/evaluate", [&svc](const httplib::Request& req, httplib::Response& res) {
    if (auto body = body_json(req, res)) send(res, svc.evaluate(*body));
  });

  if (static_dir && !srv.set_mount_point("/app", *static_dir)) {
    throw ConfigError("cannot mount static directory " + *static_dir);
  }

  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      send(res, error_response(500, "internal", e.what()));
    } catch (...) {
      send(res, error_response(500, "internal", "unknown error"));
    }
  });

  srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      const Response r = error_response(res.status, res.status == 404 ? "not_found" : "http_error",
                                        "no such route");
      res.set_content(r.body.dump(), "application/json");
    }
  });
}

HttpGateway::~HttpGateway() { stop(); }

int HttpGateway::bind(const std::string& host, int port) {
  auto& srv = impl_->server;
  const int bound = port == 0 ? srv.bind_to_any_port(host) : (srv.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw TransportError("cannot bind " + host + ":" + std::to_string(port));
  impl_->port = bound;
  return bound;
}

void HttpGateway::listen() {
  if (impl_->port < 0) throw TransportError("listen() before bind()");
  impl_->server.listen_after_bind();
}

void HttpGateway::start() {
  if (impl_->port < 0) throw TransportError("start() before bind()");
  impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void HttpGateway::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

int HttpGateway::port() const noexcept { return impl_->port; }

}  // namespace heirag
