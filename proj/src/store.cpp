#include "infodemic/store.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <mutex>
#include <nlohmann/json.hpp>

#include "infodemic/error.h"
#include "infodemic/textprep.h"

namespace infodemic {
namespace fs = std::filesystem;
namespace {

constexpr const char* kStoreFormat = "infodemic-store";

void write_atomically(const fs::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
    out << content;
    if (!out) throw Error(ErrorCode::kIoError, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot replace " + path.string() + ": " + ec.message());
}

std::optional<nlohmann::json> read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

bool day_aligned_from(Timestamp t) {
  return t == Timestamp::min() || t == Timestamp{day_of(t)};
}

bool day_aligned_to(Timestamp t) {
  return t == Timestamp::max() || t + std::chrono::seconds{1} == Timestamp{day_of(t + std::chrono::seconds{1})};
}

void check_range(const RecordFilter& filter) {
  if (filter.from > filter.to) {
    throw Error(ErrorCode::kInvalidDateRange, "from is after to");
  }
}

}  // namespace

nlohmann::json to_json(const ClassifiedRecord& r) {
  nlohmann::json preds = nlohmann::json::object();
  for (auto task : kAllTasks) {
    nlohmann::json list = nlohmann::json::array();
    for (auto q : kAllQuestions) {
      const auto& p = r.prediction(q, task);
      list.push_back({{"question", code(q)}, {"label", p.label}, {"probability", p.probability}});
    }
    preds[std::string(code(task))] = std::move(list);
  }
  return {{"id", r.id},
          {"language", code(r.language)},
          {"created_at", format_timestamp(r.created_at)},
          {"normalized", r.normalized},
          {"text", r.raw_text},
          {"predictions", std::move(preds)}};
}

ClassifiedRecord record_from_json(const nlohmann::json& j) {
  ClassifiedRecord r;
  try {
    r.id = j.at("id").get<std::string>();
    auto lang = parse_language(j.at("language").get<std::string>());
    if (!lang) throw Error(ErrorCode::kFormatError, "record language");
    r.language = *lang;
    auto ts = parse_timestamp(j.at("created_at").get<std::string>());
    if (!ts) throw Error(ErrorCode::kFormatError, "record created_at");
    r.created_at = *ts;
    r.normalized = j.at("normalized").get<std::string>();
    r.raw_text = j.at("text").get<std::string>();
    for (auto task : kAllTasks) {
      const auto& list = j.at("predictions").at(std::string(code(task)));
      if (list.size() != 7) throw Error(ErrorCode::kFormatError, "record needs 7 predictions");
      for (const auto& p : list) {
        auto q = parse_question(p.at("question").get<std::string>());
        r.prediction(q, task) = {p.at("label").get<std::string>(),
                                 p.at("probability").get<double>()};
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("record: ") + e.what());
  }
  return r;
}

RecordFilter make_filter(std::optional<std::string> keyword,
                         const std::optional<std::string>& from,
                         const std::optional<std::string>& to,
                         std::optional<Language> language) {
  RecordFilter f;
  if (keyword && !keyword->empty()) f.keyword = std::move(keyword);
  f.language = language;
  if (from && !from->empty()) {
    auto ts = parse_timestamp(*from);
    if (!ts) throw Error(ErrorCode::kInvalidDateRange, "cannot parse from '" + *from + "'");
    f.from = *ts;
  }
  if (to && !to->empty()) {
    if (auto day = parse_day(*to)) {
      f.to = Timestamp{*day + std::chrono::days{1}} - std::chrono::seconds{1};
    } else if (auto ts = parse_timestamp(*to)) {
      f.to = *ts;
    } else {
      throw Error(ErrorCode::kInvalidDateRange, "cannot parse to '" + *to + "'");
    }
  }
  check_range(f);
  return f;
}

std::size_t DayBucket::total() const {
  std::size_t sum = 0;
  for (const auto& [_, c] : counts) sum += c;
  return sum;
}

// ---------------------------------------------------------------------------

std::unique_ptr<EmbeddedStore> EmbeddedStore::open(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create store " + dir.string() + ": " + ec.message());

  const auto marker = dir / "store.json";
  if (fs::exists(marker)) {
    auto j = read_json_file(marker);
    if (!j || j->value("format", "") != kStoreFormat) {
      throw Error(ErrorCode::kFormatError, dir.string() + " is not a record store");
    }
    if (j->value("version", 0) != kFormatVersion) {
      throw Error(ErrorCode::kFormatError, dir.string() + ": unsupported store version");
    }
  } else {
    nlohmann::json j = {{"format", kStoreFormat}, {"version", kFormatVersion}};
    write_atomically(marker, j.dump(1) + "\n");
  }

  std::unique_ptr<EmbeddedStore> store(new EmbeddedStore(dir));
  store->load();
  return store;
}

void EmbeddedStore::load() {
  const auto log = dir_ / "records.jsonl";
  if (fs::exists(log)) {
    std::ifstream in(log, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIoError, "cannot read " + log.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      ClassifiedRecord r;
      try {
        r = record_from_json(nlohmann::json::parse(line));
      } catch (const std::exception& e) {
        spdlog::warn("{}:{}: skipping unreadable record ({})", log.string(), line_no, e.what());
        continue;
      }
      auto [it, inserted] = slot_by_id_.try_emplace(r.id, records_.size());
      if (inserted) {
        records_.push_back(std::move(r));
      } else {
        records_[it->second] = std::move(r);
      }
    }
    log_size_ = fs::file_size(log);
  }

  // Derived structures: reuse the snapshots when they match the log.
  auto index = read_json_file(dir_ / "index.json");
  auto counts = read_json_file(dir_ / "day_counts.json");
  bool fresh = index && counts && index->value("log_size", std::uintmax_t{0}) == log_size_ &&
               counts->value("log_size", std::uintmax_t{0}) == log_size_;
  if (fresh) {
    try {
      for (const auto& [token, ids] : index->at("postings").items()) {
        auto& slots = postings_[token];
        for (const auto& id : ids) slots.insert(slot_by_id_.at(id.get<std::string>()));
      }
      for (const auto& b : counts->at("buckets")) {
        auto lang = parse_language(b.at("language").get<std::string>());
        auto day = parse_day(b.at("date").get<std::string>());
        if (!lang || !day) throw Error(ErrorCode::kFormatError, "bad bucket");
        auto& dst = day_counts_[{*lang, *day, parse_question(b.at("question").get<std::string>()),
                                 parse_task(b.at("task").get<std::string>())}];
        for (const auto& [label, c] : b.at("counts").items()) dst[label] = c.get<std::size_t>();
      }
    } catch (const std::exception& e) {
      spdlog::warn("{}: rebuilding derived indexes ({})", dir_.string(), e.what());
      fresh = false;
    }
  }
  if (!fresh) {
    rebuild_derived();
    write_snapshots();
  }
}

void EmbeddedStore::rebuild_derived() {
  postings_.clear();
  day_counts_.clear();
  for (std::size_t slot = 0; slot < records_.size(); ++slot) index_record(slot, +1);
}

void EmbeddedStore::index_record(std::size_t slot, int sign) {
  const auto& r = records_[slot];
  for (const auto& token : normalize(r.normalized).tokens) {
    if (sign > 0) {
      postings_[token].insert(slot);
    } else if (auto it = postings_.find(token); it != postings_.end()) {
      it->second.erase(slot);
      if (it->second.empty()) postings_.erase(it);
    }
  }
  const Day day = day_of(r.created_at);
  for (auto task : kAllTasks) {
    for (auto q : kAllQuestions) {
      const CountKey key{r.language, day, q, task};
      const auto& label = r.prediction(q, task).label;
      if (sign > 0) {
        ++day_counts_[key][label];
        continue;
      }
      auto it = day_counts_.find(key);
      if (it == day_counts_.end()) continue;
      auto lit = it->second.find(label);
      if (lit != it->second.end() && --lit->second == 0) it->second.erase(lit);
      if (it->second.empty()) day_counts_.erase(it);
    }
  }
}

void EmbeddedStore::write_snapshots() const {
  nlohmann::json postings = nlohmann::json::object();
  for (const auto& [token, slots] : postings_) {
    nlohmann::json ids = nlohmann::json::array();
    for (auto s : slots) ids.push_back(records_[s].id);
    postings[token] = std::move(ids);
  }
  nlohmann::json index = {{"log_size", log_size_}, {"postings", std::move(postings)}};
  write_atomically(dir_ / "index.json", index.dump() + "\n");

  nlohmann::json buckets = nlohmann::json::array();
  for (const auto& [key, counts] : day_counts_) {
    const auto& [lang, day, q, task] = key;
    buckets.push_back({{"language", code(lang)},
                       {"date", format_day(day)},
                       {"question", code(q)},
                       {"task", code(task)},
                       {"counts", counts}});
  }
  nlohmann::json sidecar = {{"log_size", log_size_}, {"buckets", std::move(buckets)}};
  write_atomically(dir_ / "day_counts.json", sidecar.dump() + "\n");
}

void EmbeddedStore::upsert(std::vector<ClassifiedRecord> batch) {
  if (batch.empty()) return;
  std::unique_lock lock(mutex_);
  const auto log = dir_ / "records.jsonl";
  {
    std::ofstream out(log, std::ios::binary | std::ios::app);
    if (!out) throw Error(ErrorCode::kIoError, "cannot append to " + log.string());
    for (const auto& r : batch) out << to_json(r).dump() << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::kIoError, "append failed for " + log.string());
  }
  for (auto& r : batch) {
    auto [it, inserted] = slot_by_id_.try_emplace(r.id, records_.size());
    if (inserted) {
      records_.push_back(std::move(r));
    } else {
      index_record(it->second, -1);
      records_[it->second] = std::move(r);
    }
    index_record(it->second, +1);
  }
  log_size_ = fs::file_size(log);
  write_snapshots();
}

std::vector<std::size_t> EmbeddedStore::matching_slots(const RecordFilter& filter) const {
  std::vector<std::size_t> candidates;
  if (filter.keyword) {
    auto tokens = normalize(*filter.keyword).tokens;
    if (tokens.empty()) return {};
    const std::set<std::size_t>* smallest = nullptr;
    for (const auto& t : tokens) {
      auto it = postings_.find(t);
      if (it == postings_.end()) return {};
      if (!smallest || it->second.size() < smallest->size()) smallest = &it->second;
    }
    for (auto slot : *smallest) {
      bool all = std::all_of(tokens.begin(), tokens.end(), [&](const std::string& t) {
        return postings_.at(t).contains(slot);
      });
      if (all) candidates.push_back(slot);
    }
  } else {
    candidates.resize(records_.size());
    for (std::size_t i = 0; i < records_.size(); ++i) candidates[i] = i;
  }

  std::erase_if(candidates, [&](std::size_t slot) {
    const auto& r = records_[slot];
    return r.created_at < filter.from || r.created_at > filter.to ||
           (filter.language && r.language != *filter.language);
  });
  std::sort(candidates.begin(), candidates.end(), [&](std::size_t a, std::size_t b) {
    const auto& ra = records_[a];
    const auto& rb = records_[b];
    return ra.created_at != rb.created_at ? ra.created_at < rb.created_at : ra.id < rb.id;
  });
  return candidates;
}

std::vector<ClassifiedRecord> EmbeddedStore::query(const RecordFilter& filter) const {
  check_range(filter);
  std::shared_lock lock(mutex_);
  std::vector<ClassifiedRecord> out;
  for (auto slot : matching_slots(filter)) out.push_back(records_[slot]);
  return out;
}

std::vector<DayBucket> EmbeddedStore::aggregate(const RecordFilter& filter, QuestionId q,
                                                Task task) const {
  check_range(filter);
  std::shared_lock lock(mutex_);
  std::map<Day, DayBucket> by_day;

  if (!filter.keyword && day_aligned_from(filter.from) && day_aligned_to(filter.to)) {
    // Whole days without a keyword: answer from the sidecar counts.
    for (const auto& [key, counts] : day_counts_) {
      const auto& [lang, day, kq, ktask] = key;
      if (kq != q || ktask != task) continue;
      if (filter.language && lang != *filter.language) continue;
      if (filter.from != Timestamp::min() && day < day_of(filter.from)) continue;
      if (filter.to != Timestamp::max() && day > day_of(filter.to)) continue;
      auto& bucket = by_day[day];
      bucket.day = day;
      bucket.question = q;
      bucket.task = task;
      for (const auto& [label, c] : counts) bucket.counts[label] += c;
    }
  } else {
    for (auto slot : matching_slots(filter)) {
      const auto& r = records_[slot];
      const Day day = day_of(r.created_at);
      auto& bucket = by_day[day];
      bucket.day = day;
      bucket.question = q;
      bucket.task = task;
      ++bucket.counts[r.prediction(q, task).label];
    }
  }

  std::vector<DayBucket> out;
  out.reserve(by_day.size());
  for (auto& [_, b] : by_day) out.push_back(std::move(b));
  return out;
}

std::size_t EmbeddedStore::size() const {
  std::shared_lock lock(mutex_);
  return records_.size();
}

}  // namespace infodemic
