#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "infodemic/language.h"
#include "infodemic/models.h"
#include "infodemic/schema.h"
#include "infodemic/svm.h"

namespace infodemic {

using Clock = std::function<std::chrono::system_clock::time_point()>;

enum class JobState { kPending, kDone, kFailed };

std::string_view code(JobState state);

struct Job {
  std::string key;
  std::string text;
  Language language = Language::kEnglish;
  Task task = Task::kBinary;
  JobState state = JobState::kPending;
  std::vector<Prediction> result;  // seven entries iff state == kDone
  std::string error;               // set iff state == kFailed
  std::chrono::system_clock::time_point submitted_at;
};

// 32 lowercase hex digits from the OS entropy source.
std::string random_key();

// Synchronized job table with expiry. A job leaves the pending state at most
// once; later completions are ignored.
class JobStore {
 public:
  explicit JobStore(std::chrono::seconds ttl = std::chrono::hours(24),
                    Clock clock = std::chrono::system_clock::now);

  Job create(std::string text, Language lang, Task task);
  // nullopt for unknown or expired keys.
  std::optional<Job> get(const std::string& key) const;
  void complete(const std::string& key, std::vector<Prediction> result);
  void fail(const std::string& key, std::string error);
  std::size_t purge_expired();
  std::size_t size() const;

 private:
  bool expired(const Job& job, std::chrono::system_clock::time_point now) const;

  std::chrono::seconds ttl_;
  Clock clock_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::string, Job> jobs_;
  std::chrono::system_clock::time_point last_purge_;
};

struct ApiResponse {
  int status = 200;
  nlohmann::ordered_json body;
};

struct ServiceOptions {
  std::size_t workers = 4;
  std::chrono::seconds ttl = std::chrono::hours(24);
  Clock clock = std::chrono::system_clock::now;
};

// The submit/fetch contract. Submissions are classified on an internal
// worker pool. Jobs still queued at destruction are dropped.
class ClassificationService {
 public:
  ClassificationService(std::shared_ptr<const TextClassifier> models, ServiceOptions options = {});
  ~ClassificationService();

  ClassificationService(const ClassificationService&) = delete;
  ClassificationService& operator=(const ClassificationService&) = delete;

  // Body: {"text", "language", "task"}.
  ApiResponse submit(const std::string& body);
  ApiResponse submit(const std::string& text, const std::string& language,
                     const std::string& task);
  ApiResponse fetch(const std::string& key, const std::optional<std::string>& language) const;

  const TextClassifier& models() const { return *models_; }
  const JobStore& jobs() const { return jobs_; }

 private:
  void worker_loop();

  std::shared_ptr<const TextClassifier> models_;
  JobStore jobs_;
  std::mutex queue_mutex_;
  std::condition_variable queue_cv_;
  std::deque<std::string> queue_;
  bool stopping_ = false;
  std::vector<std::thread> workers_;
};

// {"error": code, "message": message}
nlohmann::ordered_json error_body(std::string_view code, std::string_view message);

nlohmann::ordered_json prediction_json(const Prediction& p);

}  // namespace infodemic
