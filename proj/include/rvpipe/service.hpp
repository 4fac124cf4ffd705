#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>

#include "rvpipe/history.hpp"
#include "rvpipe/wire.hpp"

namespace rvpipe {

struct ServiceConfig {
  size_t max_sessions = 256;
  std::chrono::seconds ttl{30 * 60};
  std::optional<uint64_t> max_cycles_override;
  size_t max_body = 1 << 20;
};

/// Transport-independent result: an HTTP status code and a JSON body.
struct Response {
  int status = 200;
  wire::json body;
};

/// Error bodies look like {"error": {"code": "...", "message": "..."}}.
Response error_response(int status, std::string_view code, std::string_view message);

class SessionService {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;

  explicit SessionService(ServiceConfig config = {}, Clock clock = std::chrono::steady_clock::now);

  // POST /sessions {"source", "options": {"forwarding", "max_cycles"}, "input": [...]}
  Response create(const wire::json& body);
  // POST /sessions/{id}/step {"n"}
  Response step(std::string_view id, const wire::json& body);
  // POST /sessions/{id}/back {"n"}
  Response back(std::string_view id, const wire::json& body);
  // POST /sessions/{id}/input {"text"}
  Response input(std::string_view id, const wire::json& body);
  // POST /sessions/{id}/reset {"options": {...}}
  Response reset(std::string_view id, const wire::json& body);
  // GET /sessions/{id}/state
  Response state(std::string_view id);
  // GET /sessions/{id}/memory?segment=&addr=&len=
  Response memory(std::string_view id, std::string_view segment, std::string_view addr, std::string_view len);
  // GET /sessions/{id}/diagram?mode=full|squashed
  Response diagram(std::string_view id, std::string_view mode);
  // GET /examples
  Response examples() const;
  // GET /catalog
  Response catalog() const;
  // DELETE /sessions/{id}
  Response close(std::string_view id);

  size_t session_count() const;
  size_t expire_idle();
  const ServiceConfig& config() const { return config_; }

 private:
  struct Session {
    std::string id;
    std::shared_ptr<const ProgramImage> image;
    std::string source;
    SimOptions options;
    std::optional<HistoryLog> log;
    uint64_t high_water = 0;
    uint64_t revision = 0;  // bumped by every accepted mutation
    std::chrono::steady_clock::time_point touched;
    mutable std::shared_mutex mu;
  };

  std::shared_ptr<Session> find(std::string_view id);
  std::string new_id();
  std::optional<Response> parse_options(const wire::json& body, SimOptions& opts) const;
  wire::json payload(const Session& s, uint64_t prev_cycle) const;

  ServiceConfig config_;
  Clock clock_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>, std::less<>> sessions_;
  uint64_t id_counter_ = 0;
  uint64_t id_salt_;
};

}  // namespace rvpipe
