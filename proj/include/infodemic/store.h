#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "infodemic/language.h"
#include "infodemic/schema.h"
#include "infodemic/timeutil.h"

namespace infodemic {

struct StoredPrediction {
  std::string label;
  double probability = 0.0;

  bool operator==(const StoredPrediction&) const = default;
};

// A classified tweet with predictions for every question in both task
// granularities.
struct ClassifiedRecord {
  std::string id;
  Language language = Language::kEnglish;
  Timestamp created_at{};
  std::string normalized;
  std::string raw_text;
  std::array<std::array<StoredPrediction, 7>, 2> predictions;  // [task][question]

  const StoredPrediction& prediction(QuestionId q, Task task) const {
    return predictions[static_cast<std::size_t>(task)][index_of(q)];
  }
  StoredPrediction& prediction(QuestionId q, Task task) {
    return predictions[static_cast<std::size_t>(task)][index_of(q)];
  }

  bool operator==(const ClassifiedRecord&) const = default;
};

nlohmann::json to_json(const ClassifiedRecord& r);
ClassifiedRecord record_from_json(const nlohmann::json& j);

// Inclusive time range plus optional keyword and language constraints.
struct RecordFilter {
  std::optional<std::string> keyword;
  Timestamp from = Timestamp::min();
  Timestamp to = Timestamp::max();
  std::optional<Language> language;
};

// Builds a filter from day strings (YYYY-MM-DD) or full timestamps; a bare
// `to` day covers that whole day. Throws Error{kInvalidDateRange} for
// unparseable values or from > to.
RecordFilter make_filter(std::optional<std::string> keyword,
                         const std::optional<std::string>& from,
                         const std::optional<std::string>& to,
                         std::optional<Language> language = std::nullopt);

struct DayBucket {
  Day day{};
  QuestionId question = QuestionId::kQ1;
  Task task = Task::kBinary;
  std::map<std::string, std::size_t> counts;

  std::size_t total() const;
  bool operator==(const DayBucket&) const = default;
};

// Storage backend seen by the pipeline and the HTTP layer.
class RecordStore {
 public:
  virtual ~RecordStore() = default;

  // Inserts or replaces (by id) a batch atomically with respect to readers.
  virtual void upsert(std::vector<ClassifiedRecord> batch) = 0;

  // Matching records ordered by created_at, then id. Keyword matching is an
  // exact token match after normalization; a multi-token keyword requires
  // every token. Throws Error{kInvalidDateRange} when from > to.
  virtual std::vector<ClassifiedRecord> query(const RecordFilter& filter) const = 0;

  // Per-UTC-day label counts of query(filter) for (question, task). Days
  // without matches are omitted.
  virtual std::vector<DayBucket> aggregate(const RecordFilter& filter, QuestionId q,
                                           Task task) const = 0;

  virtual std::size_t size() const = 0;
};

// File-backed store. Directory layout (format version 1):
//   store.json        format marker and version
//   records.jsonl     append-only log, one record per line; later lines with
//                     the same id supersede earlier ones
//   index.json        token -> record ids, with the log size it reflects
//   day_counts.json   per (language, day, question, task) label counts, with
//                     the log size it reflects
// The two snapshots are rewritten on every commit and rebuilt from the log
// when stale or missing.
class EmbeddedStore : public RecordStore {
 public:
  static constexpr int kFormatVersion = 1;

  // Creates the directory when absent. Throws Error{kIoError} /
  // Error{kFormatError}.
  static std::unique_ptr<EmbeddedStore> open(const std::filesystem::path& dir);

  void upsert(std::vector<ClassifiedRecord> batch) override;
  std::vector<ClassifiedRecord> query(const RecordFilter& filter) const override;
  std::vector<DayBucket> aggregate(const RecordFilter& filter, QuestionId q,
                                   Task task) const override;
  std::size_t size() const override;

  const std::filesystem::path& directory() const { return dir_; }

 private:
  using CountKey = std::tuple<Language, Day, QuestionId, Task>;

  explicit EmbeddedStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void load();
  void rebuild_derived();
  void index_record(std::size_t slot, int sign);
  void write_snapshots() const;
  std::vector<std::size_t> matching_slots(const RecordFilter& filter) const;

  std::filesystem::path dir_;
  mutable std::shared_mutex mutex_;
  std::vector<ClassifiedRecord> records_;
  std::unordered_map<std::string, std::size_t> slot_by_id_;
  std::unordered_map<std::string, std::set<std::size_t>> postings_;
  std::map<CountKey, std::map<std::string, std::size_t>> day_counts_;
  std::uintmax_t log_size_ = 0;
};

}  // namespace infodemic
