#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>

#include "sdx/api/http.h"

namespace httplib {
class Server;
}

namespace sdx::api {

class HttpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thin wrapper over the embedded HTTP server: one catch-all handler plus
// optional static directories.
class HttpServer {
 public:
  using Handler = std::function<Response(const Request&)>;

  HttpServer();
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  void set_handler(Handler handler);
  // Serves files under dir at prefix; false when dir does not exist.
  bool mount_static(const std::string& prefix, const std::string& dir);

  // Binds (port 0 picks one) and serves on a background thread. Throws
  // HttpError when the address cannot be bound. Returns the bound port.
  int listen(const std::string& host, int port);
  void stop();
  bool listening() const { return listening_; }
  int port() const { return port_; }

 private:
  std::unique_ptr<httplib::Server> server_;
  Handler handler_;
  std::thread thread_;
  std::atomic<bool> listening_{false};
  int port_ = 0;
};

}  // namespace sdx::api
