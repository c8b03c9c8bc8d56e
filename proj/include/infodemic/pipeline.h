#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "infodemic/langid.h"
#include "infodemic/language.h"
#include "infodemic/models.h"
#include "infodemic/store.h"
#include "infodemic/textprep.h"

namespace infodemic {

inline constexpr std::size_t kMinTokens = 5;

struct IngestOptions {
  std::size_t batch_size = 256;
  std::size_t min_tokens = kMinTokens;
  double detect_threshold = kDefaultDetectThreshold;
};

struct IngestSummary {
  std::size_t read = 0;
  std::size_t accepted = 0;
  std::size_t dropped_short = 0;
  std::size_t dropped_language = 0;
  std::size_t failed = 0;

  bool operator==(const IngestSummary&) const = default;
};

std::string to_string(const IngestSummary& s);

// Normalized text with the URL/USER placeholders removed, as fed to language
// detection.
std::string detection_text(const NormalizedText& text);

// Reads line-delimited JSON records and stores the ones that pass the token
// and language filters, classified for both tasks. Bad lines are logged and
// counted as failed. Throws Error{kMissingModel} when either task's models
// are absent for `target`.
IngestSummary ingest(std::istream& source, Language target, const TextClassifier& models,
                     std::span<const LanguageProfile> profiles, RecordStore& store,
                     const IngestOptions& options = {});

// Throws Error{kSourceUnreadable} when the file cannot be opened.
IngestSummary ingest_file(const std::filesystem::path& path, Language target,
                          const TextClassifier& models,
                          std::span<const LanguageProfile> profiles, RecordStore& store,
                          const IngestOptions& options = {});

}  // namespace infodemic
