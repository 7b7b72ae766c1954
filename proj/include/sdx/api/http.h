#pragma once

#include <map>
#include <string>

#include "json.hpp"

namespace sdx::api {

// Transport-neutral request and response, so the router can be driven
// directly in tests and wrapped by any HTTP server.
struct Request {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  // Lowercase names.
  std::map<std::string, std::string> headers;
  std::string body;

  std::string header(const std::string& name) const;
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
  std::map<std::string, std::string> headers;

  static Response json(int status, const nlohmann::json& body);
  static Response error(int status, const std::string& message);
  static Response empty(int status);
};

}  // namespace sdx::api
