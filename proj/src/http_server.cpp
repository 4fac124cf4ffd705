#include "rvpipe/http_server.hpp"

#include <chrono>
#include <mutex>

#include <httplib.h>

namespace rvpipe {

using wire::json;

namespace {

std::mutex g_log_mu;

void send(httplib::Response& res, const Response& r) {
  res.status = r.status;
  res.set_content(r.body.dump(), "application/json");
}

// Empty bodies count as {}.
std::optional<json> body_json(const httplib::Request& req, httplib::Response& res) {
  if (req.body.empty()) return json::object();
  json j = json::parse(req.body, nullptr, false);
  if (j.is_discarded()) {
    send(res, error_response(400, "bad-json", "request body is not valid JSON"));
    return std::nullopt;
  }
  return j;
}

std::string param(const httplib::Request& req, const char* name) {
  return req.has_param(name) ? req.get_param_value(name) : std::string();
}

}  // namespace

HttpServer::HttpServer(SessionService& service, std::ostream* log)
    : service_(service), log_(log), server_(std::make_unique<httplib::Server>()) {
  server_->set_payload_max_length(service_.config().max_body);
  routes();
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::routes() {
  auto& s = *server_;
  auto post = [this](auto fn) {
    return [this, fn](const httplib::Request& req, httplib::Response& res) {
      if (auto body = body_json(req, res)) send(res, fn(req, *body));
    };
  };
  s.Post("/sessions", post([this](const httplib::Request&, const json& b) { return service_.create(b); }));
  s.Post(R"(/sessions/([^/]+)/step)",
         post([this](const httplib::Request& r, const json& b) { return service_.step(r.matches[1].str(), b); }));
  s.Post(R"(/sessions/([^/]+)/back)",
         post([this](const httplib::Request& r, const json& b) { return service_.back(r.matches[1].str(), b); }));
  s.Post(R"(/sessions/([^/]+)/input)",
         post([this](const httplib::Request& r, const json& b) { return service_.input(r.matches[1].str(), b); }));
  s.Post(R"(/sessions/([^/]+)/reset)",
         post([this](const httplib::Request& r, const json& b) { return service_.reset(r.matches[1].str(), b); }));
  s.Get(R"(/sessions/([^/]+)/state)", [this](const httplib::Request& r, httplib::Response& res) {
    send(res, service_.state(r.matches[1].str()));
  });
  s.Get(R"(/sessions/([^/]+)/memory)", [this](const httplib::Request& r, httplib::Response& res) {
    send(res, service_.memory(r.matches[1].str(), param(r, "segment"), param(r, "addr"), param(r, "len")));
  });
  s.Get(R"(/sessions/([^/]+)/diagram)", [this](const httplib::Request& r, httplib::Response& res) {
    send(res, service_.diagram(r.matches[1].str(), param(r, "mode")));
  });
  s.Delete(R"(/sessions/([^/]+))", [this](const httplib::Request& r, httplib::Response& res) {
    send(res, service_.close(r.matches[1].str()));
  });
  s.Get("/examples", [this](const httplib::Request&, httplib::Response& res) { send(res, service_.examples()); });
  s.Get("/catalog", [this](const httplib::Request&, httplib::Response& res) { send(res, service_.catalog()); });
  s.Get("/health", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"ok":true})", "application/json");
  });

  s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    if (res.status == 413) send(res, error_response(413, "too-large", "request body exceeds the size limit"));
    else if (res.status == 404) send(res, error_response(404, "not-found", "no such endpoint"));
    else send(res, error_response(res.status, "http-error", "request failed"));
  });
  s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    send(res, error_response(500, "internal", what));
  });
  s.set_logger([this](const httplib::Request& req, const httplib::Response& res) {
    if (!log_) return;
    const auto now = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::system_clock::now().time_since_epoch());
    json line{{"ts_ms", now.count()}, {"method", req.method}, {"path", req.path}, {"status", res.status},
              {"bytes_in", req.body.size()}, {"bytes_out", res.body.size()}};
    std::lock_guard lk(g_log_mu);
    *log_ << line.dump() << '\n' << std::flush;
  });
}

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

bool HttpServer::serve() { return server_->listen_after_bind(); }

void HttpServer::stop() {
  if (server_) server_->stop();
}

bool HttpServer::running() const { return server_->is_running(); }

}  // namespace rvpipe
