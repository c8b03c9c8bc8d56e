#include "infodemic/api.h"

#include <spdlog/spdlog.h>

#include <cstdio>
#include <random>

#include "infodemic/error.h"
#include "infodemic/textprep.h"

namespace infodemic {
namespace {

constexpr auto kPurgeInterval = std::chrono::minutes(1);

}  // namespace

std::string_view code(JobState state) {
  switch (state) {
    case JobState::kPending: return "pending";
    case JobState::kDone: return "done";
    case JobState::kFailed: return "failed";
  }
  return "unknown";
}

std::string random_key() {
  static std::mutex mutex;
  static std::random_device device;
  std::uint32_t words[4];
  {
    std::lock_guard lock(mutex);
    for (auto& w : words) w = device();
  }
  char buf[33];
  std::snprintf(buf, sizeof buf, "%08x%08x%08x%08x", words[0], words[1], words[2], words[3]);
  return buf;
}

nlohmann::ordered_json error_body(std::string_view code, std::string_view message) {
  return {{"error", code}, {"message", message}};
}

nlohmann::ordered_json prediction_json(const Prediction& p) {
  nlohmann::ordered_json labels = nlohmann::ordered_json::object();
  for (const auto& [label, prob] : p.label_dictionary) labels[label] = prob;
  return {{"question", code(p.question)},
          {"label", p.label},
          {"probability", p.probability},
          {"labels", std::move(labels)}};
}

// ---------------------------------------------------------------------------

JobStore::JobStore(std::chrono::seconds ttl, Clock clock)
    : ttl_(ttl), clock_(std::move(clock)), last_purge_(clock_()) {}

bool JobStore::expired(const Job& job, std::chrono::system_clock::time_point now) const {
  return now - job.submitted_at >= ttl_;
}

Job JobStore::create(std::string text, Language lang, Task task) {
  const auto now = clock_();
  Job job;
  job.text = std::move(text);
  job.language = lang;
  job.task = task;
  job.submitted_at = now;

  std::unique_lock lock(mutex_);
  if (now - last_purge_ >= kPurgeInterval) {
    std::erase_if(jobs_, [&](const auto& kv) { return expired(kv.second, now); });
    last_purge_ = now;
  }
  do {
    job.key = random_key();
  } while (jobs_.contains(job.key));
  jobs_.emplace(job.key, job);
  return job;
}

std::optional<Job> JobStore::get(const std::string& key) const {
  const auto now = clock_();
  std::shared_lock lock(mutex_);
  auto it = jobs_.find(key);
  if (it == jobs_.end() || expired(it->second, now)) return std::nullopt;
  return it->second;
}

void JobStore::complete(const std::string& key, std::vector<Prediction> result) {
  std::unique_lock lock(mutex_);
  auto it = jobs_.find(key);
  if (it == jobs_.end() || it->second.state != JobState::kPending) return;
  it->second.result = std::move(result);
  it->second.state = JobState::kDone;
}

void JobStore::fail(const std::string& key, std::string error) {
  std::unique_lock lock(mutex_);
  auto it = jobs_.find(key);
  if (it == jobs_.end() || it->second.state != JobState::kPending) return;
  it->second.error = std::move(error);
  it->second.state = JobState::kFailed;
}

std::size_t JobStore::purge_expired() {
  const auto now = clock_();
  std::unique_lock lock(mutex_);
  last_purge_ = now;
  return std::erase_if(jobs_, [&](const auto& kv) { return expired(kv.second, now); });
}

std::size_t JobStore::size() const {
  std::shared_lock lock(mutex_);
  return jobs_.size();
}

// ---------------------------------------------------------------------------

ClassificationService::ClassificationService(std::shared_ptr<const TextClassifier> models,
                                             ServiceOptions options)
    : models_(std::move(models)), jobs_(options.ttl, std::move(options.clock)) {
  const std::size_t n = std::max<std::size_t>(1, options.workers);
  workers_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) workers_.emplace_back([this] { worker_loop(); });
}

ClassificationService::~ClassificationService() {
  {
    std::lock_guard lock(queue_mutex_);
    stopping_ = true;
  }
  queue_cv_.notify_all();
  for (auto& t : workers_) t.join();
}

void ClassificationService::worker_loop() {
  for (;;) {
    std::string key;
    {
      std::unique_lock lock(queue_mutex_);
      queue_cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      key = std::move(queue_.front());
      queue_.pop_front();
    }
    auto job = jobs_.get(key);
    if (!job) continue;
    try {
      auto result = models_->classify(normalize(job->text), job->language, job->task);
      jobs_.complete(key, std::move(result));
    } catch (const std::exception& e) {
      spdlog::error("job {}: {}", key, e.what());
      jobs_.fail(key, e.what());
    }
  }
}

ApiResponse ClassificationService::submit(const std::string& body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception&) {
    return {400, error_body("InvalidRequest", "body is not valid JSON")};
  }
  if (!j.is_object()) return {400, error_body("InvalidRequest", "body must be an object")};
  auto field = [&](const char* name) -> std::optional<std::string> {
    auto it = j.find(name);
    if (it == j.end() || it->is_null()) return std::string();
    if (!it->is_string()) return std::nullopt;
    return it->get<std::string>();
  };
  auto text = field("text");
  auto language = field("language");
  auto task = field("task");
  if (!text || !language || !task) {
    return {400, error_body("InvalidRequest", "text, language and task must be strings")};
  }
  return submit(*text, *language, *task);
}

ApiResponse ClassificationService::submit(const std::string& text, const std::string& language,
                                          const std::string& task) {
  auto lang = parse_language(language);
  if (!lang) {
    return {400, error_body("UnsupportedLanguage", "language must be one of ar, bg, nl, en")};
  }
  Task t;
  try {
    t = parse_task(task);
  } catch (const Error&) {
    return {400, error_body("UnsupportedTask", "task must be binary or multiclass")};
  }
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
    return {400, error_body("EmptyText", "text is empty")};
  }
  if (!models_->has(*lang, t)) {
    return {503, error_body("ModelsNotLoaded", "no " + std::string(code(t)) + " models for " +
                                                   std::string(code(*lang)))};
  }

  Job job = jobs_.create(text, *lang, t);
  {
    std::lock_guard lock(queue_mutex_);
    queue_.push_back(job.key);
  }
  queue_cv_.notify_one();
  return {200, {{"key", job.key}, {"message", "success"}}};
}

ApiResponse ClassificationService::fetch(const std::string& key,
                                         const std::optional<std::string>& language) const {
  if (!language || language->empty()) {
    return {400, error_body("MissingLanguage", "the language parameter is required")};
  }
  auto job = jobs_.get(key);
  if (!job) return {404, error_body("UnknownKey", "no job with this key")};
  auto lang = parse_language(*language);
  if (!lang || *lang != job->language) {
    return {400, error_body("LanguageMismatch", "job was submitted for " +
                                                    std::string(code(job->language)))};
  }

  nlohmann::ordered_json body = {{"key", job->key},
                                 {"status", code(job->state)},
                                 {"language", code(job->language)},
                                 {"task", code(job->task)}};
  switch (job->state) {
    case JobState::kPending:
      return {202, std::move(body)};
    case JobState::kFailed:
      body["error"] = job->error;
      return {500, std::move(body)};
    case JobState::kDone: {
      nlohmann::ordered_json results = nlohmann::ordered_json::array();
      for (const auto& p : job->result) results.push_back(prediction_json(p));
      body["results"] = std::move(results);
      return {200, std::move(body)};
    }
  }
  return {500, error_body("Internal", "unknown job state")};
}

}  // namespace infodemic
