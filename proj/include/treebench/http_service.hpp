#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "treebench/json_io.hpp"
#include "treebench/workbench.hpp"

namespace treebench::api {

inline constexpr const char* kApiPrefix = "/api/v1";

// Status code and JSON body for an HTTP response.
struct Response {
  int status = 200;
  Json body;
};

// Maps one request onto the workbench. Transport-free so that the routing
// and error mapping can be exercised without sockets.
//   GET  /api/v1/info
//   GET  /api/v1/sentences?offset=&limit=
//   GET  /api/v1/sentences/{id}
//   POST /api/v1/sentences/{id}/edit
//   POST /api/v1/sentences/{id}/check
//   POST /api/v1/sentences/{id}/base
//   POST /api/v1/sentences/{id}/accept-merge
//   GET  /api/v1/tagset
//   PUT  /api/v1/tagset
//   POST /api/v1/export
class Router {
 public:
  explicit Router(Workbench& wb) : wb_(wb) {}

  Response handle(const std::string& method, const std::string& path,
                  const std::map<std::string, std::string>& query, const std::string& body);

 private:
  Workbench& wb_;
};

// Status code for a library error kind (404, 409, 422, 423, 500, ...).
int status_for(const Error& e);
Json error_body(const Error& e);

Json to_json(const SentenceSummary& s);
Json to_json(const SentencePage& p);
Json to_json(const SentenceBundle& b);
Json to_json(const CommitResult& c);
EditCommand edit_command_from_json(const std::string& sentence_id, const Json& j);

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::optional<std::filesystem::path> static_dir;  // served at "/"
  // Relative export destinations resolve against this directory.
  std::filesystem::path export_dir = ".";
};

// HTTP front end over a Router; requests are handled concurrently.
class HttpService {
 public:
  HttpService(Workbench& wb, ServiceOptions options);
  ~HttpService();

  // Binds and returns the bound port. Throws Error("BindFailed").
  int bind();
  // Blocks until stop() is called.
  void serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace treebench::api
