#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "infodemic/language.h"

namespace infodemic {

inline constexpr std::size_t kMaxNgramOrder = 3;
inline constexpr double kDefaultDetectThreshold = 0.6;
inline constexpr std::size_t kMinProfileCorpusChars = 100;

// Character n-gram (n = 1..3) log-probabilities for one language, with
// additive smoothing. Each order reserves one smoothing slot for unseen
// n-grams, so the stored probabilities of an order sum to less than 1.
struct LanguageProfile {
  Language language = Language::kEnglish;
  std::array<std::unordered_map<std::string, double>, kMaxNgramOrder> logprobs;
  std::array<double, kMaxNgramOrder> unseen_logprob{};
  std::size_t total_ngrams = 0;

  // `order` is 1-based.
  double logprob(std::string_view gram, std::size_t order) const;
};

// Case-folded letters only; every word is padded with one space on each side
// so n-grams can mark word boundaries. Orders 1..3.
std::vector<std::pair<std::string, std::size_t>> char_ngrams(std::string_view text);

// Throws Error{kInsufficientCorpus} when the corpus has fewer than
// kMinProfileCorpusChars characters.
LanguageProfile train_profile(Language lang, std::span<const std::string> corpus,
                              double smoothing = 0.5);

struct Detection {
  std::optional<Language> language;  // nullopt = none of the four
  double confidence = 0.0;
  bool by_script = false;
};

// Arabic-script (>= 80% of letters) text is ar and Cyrillic is bg without
// scoring. Otherwise each profile scores the summed n-gram log-likelihood;
// confidence is the softmax probability of the best profile minus that of the
// runner-up, and below `threshold` the result is none. Throws
// Error{kNoProfiles}.
Detection detect(std::string_view text, std::span<const LanguageProfile> profiles,
                 double threshold = kDefaultDetectThreshold);

// Summed log-likelihood per profile, in profile order (no script shortcut).
std::vector<double> ngram_scores(std::string_view text,
                                 std::span<const LanguageProfile> profiles);

// Plain-text profile files, one line per entry:
//   <lang>\t<n>\t<ngram>\t<logprob>
// The pseudo n-gram "<unseen>" carries the order's smoothing log-probability
// and "<total>" (n = 0) the training n-gram count.
void save_profile(const LanguageProfile& profile, const std::filesystem::path& path);
LanguageProfile load_profile(const std::filesystem::path& path);

// Seed corpora: <dir>/<code>.txt, one sentence per line.
std::vector<std::string> load_seed_corpus(const std::filesystem::path& dir, Language lang);
std::vector<LanguageProfile> train_seed_profiles(const std::filesystem::path& dir);

// Loads <dir>/<code>.profile for all four languages.
std::vector<LanguageProfile> load_profiles(const std::filesystem::path& dir);
void save_profiles(std::span<const LanguageProfile> profiles,
                   const std::filesystem::path& dir);

}  // namespace infodemic
