#include "infodemic/pipeline.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <istream>

#include "infodemic/error.h"

namespace infodemic {

std::string to_string(const IngestSummary& s) {
  return "read=" + std::to_string(s.read) + " accepted=" + std::to_string(s.accepted) +
         " dropped_short=" + std::to_string(s.dropped_short) +
         " dropped_language=" + std::to_string(s.dropped_language) +
         " failed=" + std::to_string(s.failed);
}

std::string detection_text(const NormalizedText& text) {
  std::string out;
  for (const auto& t : text.tokens) {
    if (t == kUrlToken || t == kUserToken) continue;
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

IngestSummary ingest(std::istream& source, Language target, const TextClassifier& models,
                     std::span<const LanguageProfile> profiles, RecordStore& store,
                     const IngestOptions& options) {
  for (auto task : kAllTasks) {
    if (!models.has(target, task)) {
      throw Error(ErrorCode::kMissingModel, "no " + std::string(code(task)) + " models for " +
                                                std::string(code(target)));
    }
  }
  if (profiles.empty()) throw Error(ErrorCode::kNoProfiles, "no language profiles");

  IngestSummary summary;
  std::vector<ClassifiedRecord> batch;
  const std::size_t batch_size = std::max<std::size_t>(1, options.batch_size);

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++summary.read;
    try {
      RawRecord raw = parse_raw_record(line);
      std::string full = extract_full_text(raw);
      NormalizedText norm = normalize(full);
      if (token_count(norm) < options.min_tokens) {
        ++summary.dropped_short;
        continue;
      }
      Detection det = detect(detection_text(norm), profiles, options.detect_threshold);
      if (det.language != target) {
        ++summary.dropped_language;
        continue;
      }

      ClassifiedRecord rec;
      rec.id = raw.id;
      rec.language = target;
      rec.created_at = raw.created_at;
      rec.normalized = norm.normalized;
      rec.raw_text = std::move(full);
      for (auto task : kAllTasks) {
        auto preds = models.classify(norm, target, task);
        for (const auto& p : preds) rec.prediction(p.question, task) = {p.label, p.probability};
      }
      batch.push_back(std::move(rec));
      ++summary.accepted;
    } catch (const Error& e) {
      ++summary.failed;
      spdlog::warn("line {}: {}", line_no, e.what());
      continue;
    }
    if (batch.size() >= batch_size) {
      store.upsert(std::move(batch));
      batch.clear();
    }
  }
  if (!batch.empty()) store.upsert(std::move(batch));
  if (source.bad()) throw Error(ErrorCode::kSourceUnreadable, "read error in ingest source");
  spdlog::info("ingest {}: {}", code(target), to_string(summary));
  return summary;
}

IngestSummary ingest_file(const std::filesystem::path& path, Language target,
                          const TextClassifier& models,
                          std::span<const LanguageProfile> profiles, RecordStore& store,
                          const IngestOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in || std::filesystem::is_directory(path)) {
    throw Error(ErrorCode::kSourceUnreadable, "cannot read " + path.string());
  }
  return ingest(in, target, models, profiles, store, options);
}

}  // namespace infodemic
