#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "infodemic/api.h"
#include "infodemic/store.h"

namespace infodemic {

// Routes:
//   POST /api/v1/classify             submit
//   GET  /api/v1/classify/{key}       fetch, ?language=xx
//   GET  /api/v1/schema               questions and labels
//   GET  /api/v1/health               liveness and loaded model sets
//   GET  /api/v1/records              ?keyword&from&to&language&limit
//   GET  /api/v1/aggregates           ?keyword&from&to&language&question&task
//   GET  /ui/...                      static files, when a UI directory is set
class HttpServer {
 public:
  // `store` may be null; the analytics routes then answer 503.
  HttpServer(ClassificationService& service, const RecordStore* store,
             std::optional<std::filesystem::path> ui_dir = std::nullopt);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Returns the bound port (port 0 picks a free one). Throws
  // Error{kIoError} when the address cannot be bound.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void listen();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace infodemic
