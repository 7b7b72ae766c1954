#include "sdx/api/http_server.h"

#include <httplib.h>

#include <algorithm>
#include <cctype>

namespace sdx::api {

HttpServer::HttpServer() : server_(std::make_unique<httplib::Server>()) {
  auto route = [this](const httplib::Request& in, httplib::Response& out) {
    Request req;
    req.method = in.method;
    req.path = in.path;
    for (const auto& [k, v] : in.params) req.query.emplace(k, v);
    for (const auto& [k, v] : in.headers) {
      std::string name = k;
      std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
      req.headers.emplace(name, v);
    }
    req.body = in.body;
    Response res = handler_ ? handler_(req) : Response::error(404, "not found");
    out.status = res.status;
    for (const auto& [k, v] : res.headers) out.set_header(k, v);
    if (!res.content_type.empty()) out.set_content(res.body, res.content_type);
  };
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  server_->Get(".*", route);
  server_->Post(".*", route);
  server_->Put(".*", route);
  server_->Delete(".*", route);
  server_->Patch(".*", route);
  server_->Options(".*", route);
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::set_handler(Handler handler) { handler_ = std::move(handler); }

bool HttpServer::mount_static(const std::string& prefix, const std::string& dir) {
  return server_->set_mount_point(prefix, dir);
}

int HttpServer::listen(const std::string& host, int port) {
  if (listening_) throw HttpError("already listening");
  int bound = -1;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
  } else if (server_->bind_to_port(host, port)) {
    bound = port;
  }
  if (bound < 0) throw HttpError("cannot bind " + host + ":" + std::to_string(port));
  port_ = bound;
  listening_ = true;
  thread_ = std::thread([this] {
    server_->listen_after_bind();
    listening_ = false;
  });
  server_->wait_until_ready();
  return bound;
}

void HttpServer::stop() {
  if (thread_.joinable()) {
    server_->stop();
    thread_.join();
  }
  listening_ = false;
}

}  // namespace sdx::api
