#include "infodemic/http_server.h"

#include <atomic>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "infodemic/error.h"

namespace infodemic {
namespace {

constexpr std::size_t kDefaultRecordLimit = 100;

void reply(httplib::Response& res, int status, const nlohmann::ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply(httplib::Response& res, const ApiResponse& r) { reply(res, r.status, r.body); }

std::optional<std::string> param(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  return req.get_param_value(name);
}

// Throws Error{kUnknownLanguage} or Error{kInvalidDateRange}.
RecordFilter filter_from(const httplib::Request& req) {
  std::optional<Language> lang;
  if (auto l = param(req, "language"); l && !l->empty()) {
    lang = parse_language(*l);
    if (!lang) throw Error(ErrorCode::kUnknownLanguage, "unsupported language '" + *l + "'");
  }
  return make_filter(param(req, "keyword"), param(req, "from"), param(req, "to"), lang);
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidDateRange:
    case ErrorCode::kUnknownLanguage:
    case ErrorCode::kUnknownQuestion:
    case ErrorCode::kUnknownTask:
      return 400;
    default:
      return 500;
  }
}

}  // namespace

struct HttpServer::Impl {
  ClassificationService& service;
  const RecordStore* store;
  httplib::Server server;
  bool bound = false;
  std::atomic<bool> listened{false};

  Impl(ClassificationService& s, const RecordStore* st) : service(s), store(st) {}

  void routes(const std::optional<std::filesystem::path>& ui_dir);
};

void HttpServer::Impl::routes(const std::optional<std::filesystem::path>& ui_dir) {
  server.Post("/api/v1/classify", [this](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.submit(req.body));
  });

  server.Get(R"(/api/v1/classify/([0-9A-Za-z]+))",
             [this](const httplib::Request& req, httplib::Response& res) {
               reply(res, service.fetch(req.matches[1], param(req, "language")));
             });

  server.Get("/api/v1/schema", [](const httplib::Request&, httplib::Response& res) {
    res.status = 200;
    res.set_content(schema_json().dump(), "application/json");
  });

  server.Get("/api/v1/health", [this](const httplib::Request&, httplib::Response& res) {
    nlohmann::ordered_json models = nlohmann::ordered_json::array();
    for (auto lang : kAllLanguages) {
      for (auto task : kAllTasks) {
        if (service.models().has(lang, task)) {
          models.push_back({{"language", code(lang)}, {"task", code(task)}});
        }
      }
    }
    nlohmann::ordered_json body = {{"status", "ok"}, {"models", std::move(models)}};
    if (store) body["records"] = store->size();
    reply(res, 200, body);
  });

  server.Get("/api/v1/records", [this](const httplib::Request& req, httplib::Response& res) {
    if (!store) return reply(res, 503, error_body("StoreNotConfigured", "no record store"));
    try {
      auto filter = filter_from(req);
      std::size_t limit = kDefaultRecordLimit;
      if (auto l = param(req, "limit")) {
        try {
          limit = std::stoul(*l);
        } catch (const std::exception&) {
          return reply(res, 400, error_body("InvalidRequest", "limit must be a number"));
        }
      }
      auto records = store->query(filter);
      nlohmann::json list = nlohmann::json::array();
      for (std::size_t i = 0; i < records.size() && i < limit; ++i) {
        list.push_back(to_json(records[i]));
      }
      nlohmann::json body = {{"total", records.size()}, {"records", std::move(list)}};
      res.status = 200;
      res.set_content(body.dump(), "application/json");
    } catch (const Error& e) {
      reply(res, status_for(e.code()), error_body(to_string(e.code()), e.what()));
    }
  });

  server.Get("/api/v1/aggregates", [this](const httplib::Request& req, httplib::Response& res) {
    if (!store) return reply(res, 503, error_body("StoreNotConfigured", "no record store"));
    try {
      auto filter = filter_from(req);
      auto q = parse_question(param(req, "question").value_or("Q1"));
      auto task = parse_task(param(req, "task").value_or("binary"));
      nlohmann::ordered_json buckets = nlohmann::ordered_json::array();
      std::size_t total = 0;
      for (const auto& b : store->aggregate(filter, q, task)) {
        nlohmann::ordered_json counts = nlohmann::ordered_json::object();
        for (const auto& [label, c] : b.counts) counts[label] = c;
        total += b.total();
        buckets.push_back({{"date", format_day(b.day)}, {"counts", std::move(counts)},
                           {"total", b.total()}});
      }
      nlohmann::ordered_json labels = infodemic::labels(q, task);
      reply(res, 200, {{"question", code(q)},
                       {"task", code(task)},
                       {"labels", std::move(labels)},
                       {"total", total},
                       {"buckets", std::move(buckets)}});
    } catch (const Error& e) {
      reply(res, status_for(e.code()), error_body(to_string(e.code()), e.what()));
    }
  });

  // SO_REUSEADDR only: without SO_REUSEPORT a port already in use fails to
  // bind instead of being shared.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });

  if (ui_dir) {
    if (!server.set_mount_point("/ui", ui_dir->string())) {
      spdlog::warn("UI directory {} not mounted", ui_dir->string());
    }
  }

  server.set_exception_handler(
      [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string what = "internal error";
        try {
          std::rethrow_exception(ep);
        } catch (const std::exception& e) {
          what = e.what();
        } catch (...) {
        }
        spdlog::error("request failed: {}", what);
        reply(res, 500, error_body("Internal", what));
      });
}

HttpServer::HttpServer(ClassificationService& service, const RecordStore* store,
                       std::optional<std::filesystem::path> ui_dir)
    : impl_(std::make_unique<Impl>(service, store)) {
  impl_->routes(ui_dir);
}

HttpServer::~HttpServer() {
  // httplib only releases the socket from a running server, so a server that
  // was bound but never listened is started briefly to close it.
  if (impl_->bound && !impl_->listened) {
    std::thread t([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    impl_->server.stop();
    t.join();
  }
  stop();
}

int HttpServer::bind(const std::string& host, int port) {
  int bound = -1;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, port)) {
    bound = port;
  }
  if (bound <= 0) {
    throw Error(ErrorCode::kIoError, "cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->bound = true;
  return bound;
}

void HttpServer::listen() {
  if (!impl_->bound) throw Error(ErrorCode::kIoError, "listen before bind");
  impl_->listened = true;
  impl_->server.listen_after_bind();
}

void HttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

bool HttpServer::running() const { return impl_->server.is_running(); }

}  // namespace infodemic
