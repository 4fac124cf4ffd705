#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <ostream>
#include <string>

#include "rvpipe/service.hpp"

namespace httplib {
class Server;
}

namespace rvpipe {

/// HTTP/JSON front end for a SessionService. Writes one JSON line per
/// request to `log` (may be null).
class HttpServer {
 public:
  HttpServer(SessionService& service, std::ostream* log = nullptr);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Serves until stop(). Call after bind().
  bool serve();
  void stop();
  bool running() const;

 private:
  void routes();

  SessionService& service_;
  std::ostream* log_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace rvpipe
