#include "infodemic/langid.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "infodemic/error.h"
#include "infodemic/unicode.h"

namespace infodemic {
namespace fs = std::filesystem;
namespace {

constexpr double kScriptShare = 0.8;
constexpr std::string_view kUnseen = "<unseen>";
constexpr std::string_view kTotal = "<total>";

std::vector<std::u32string> padded_words(std::string_view text) {
  std::vector<std::u32string> words;
  std::u32string current;
  auto flush = [&] {
    if (!current.empty()) words.push_back(U" " + current + U" ");
    current.clear();
  };
  for (char32_t cp : unicode::decode(text)) {
    if (unicode::is_letter(cp)) {
      current.push_back(unicode::fold_case(cp));
    } else {
      flush();
    }
  }
  flush();
  return words;
}

const LanguageProfile* find_profile(std::span<const LanguageProfile> profiles,
                                    Language lang) {
  for (const auto& p : profiles) {
    if (p.language == lang) return &p;
  }
  return nullptr;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double LanguageProfile::logprob(std::string_view gram, std::size_t order) const {
  const auto& table = logprobs.at(order - 1);
  auto it = table.find(std::string(gram));
  return it == table.end() ? unseen_logprob[order - 1] : it->second;
}

std::vector<std::pair<std::string, std::size_t>> char_ngrams(std::string_view text) {
  std::vector<std::pair<std::string, std::size_t>> grams;
  for (const auto& word : padded_words(text)) {
    for (std::size_t n = 1; n <= kMaxNgramOrder; ++n) {
      if (word.size() < n) break;
      for (std::size_t i = 0; i + n <= word.size(); ++i) {
        // A lone boundary space carries no information.
        if (n == 1 && word[i] == U' ') continue;
        grams.emplace_back(unicode::encode(std::u32string_view(word).substr(i, n)), n);
      }
    }
  }
  return grams;
}

LanguageProfile train_profile(Language lang, std::span<const std::string> corpus,
                              double smoothing) {
  std::size_t chars = 0;
  for (const auto& line : corpus) chars += unicode::decode(line).size();
  if (chars < kMinProfileCorpusChars) {
    throw Error(ErrorCode::kInsufficientCorpus,
                std::string(code(lang)) + " corpus has " + std::to_string(chars) +
                    " characters, need " + std::to_string(kMinProfileCorpusChars));
  }

  std::array<std::map<std::string, std::size_t>, kMaxNgramOrder> counts;
  std::array<std::size_t, kMaxNgramOrder> totals{};
  for (const auto& line : corpus) {
    for (auto& [gram, n] : char_ngrams(line)) {
      ++counts[n - 1][gram];
      ++totals[n - 1];
    }
  }

  LanguageProfile profile;
  profile.language = lang;
  for (std::size_t k = 0; k < kMaxNgramOrder; ++k) {
    const double denom = static_cast<double>(totals[k]) +
                         smoothing * static_cast<double>(counts[k].size() + 1);
    for (const auto& [gram, count] : counts[k]) {
      profile.logprobs[k][gram] =
          std::log((static_cast<double>(count) + smoothing) / denom);
    }
    profile.unseen_logprob[k] = std::log(smoothing / denom);
    profile.total_ngrams += totals[k];
  }
  return profile;
}

std::vector<double> ngram_scores(std::string_view text,
                                 std::span<const LanguageProfile> profiles) {
  const auto grams = char_ngrams(text);
  std::vector<double> scores;
  scores.reserve(profiles.size());
  for (const auto& p : profiles) {
    double s = 0.0;
    for (const auto& [gram, n] : grams) s += p.logprob(gram, n);
    scores.push_back(s);
  }
  return scores;
}

Detection detect(std::string_view text, std::span<const LanguageProfile> profiles,
                 double threshold) {
  if (profiles.empty()) throw Error(ErrorCode::kNoProfiles, "no language profiles loaded");

  std::size_t letters = 0, arabic = 0, cyrillic = 0;
  for (char32_t cp : unicode::decode(text)) {
    // Combining marks inherit their base's script; skip them in the tally.
    if (!unicode::is_letter(cp) || unicode::is_mark(cp)) continue;
    auto script = unicode::script_of(cp);
    ++letters;
    if (script == unicode::Script::kArabic) ++arabic;
    if (script == unicode::Script::kCyrillic) ++cyrillic;
  }
  if (letters == 0) return {};

  const double n = static_cast<double>(letters);
  if (static_cast<double>(arabic) / n >= kScriptShare &&
      find_profile(profiles, Language::kArabic)) {
    return {Language::kArabic, static_cast<double>(arabic) / n, true};
  }
  if (static_cast<double>(cyrillic) / n >= kScriptShare &&
      find_profile(profiles, Language::kBulgarian)) {
    return {Language::kBulgarian, static_cast<double>(cyrillic) / n, true};
  }

  const auto scores = ngram_scores(text, profiles);
  const double top = *std::max_element(scores.begin(), scores.end());
  std::vector<double> probs(scores.size());
  double z = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    probs[i] = std::exp(scores[i] - top);
    z += probs[i];
  }
  for (auto& p : probs) p /= z;

  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  double runner_up = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (i != best) runner_up = std::max(runner_up, probs[i]);
  }

  Detection d;
  d.confidence = std::clamp(probs[best] - runner_up, 0.0, 1.0);
  if (d.confidence >= threshold) d.language = profiles[best].language;
  return d;
}

void save_profile(const LanguageProfile& profile, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  const std::string lang(code(profile.language));
  out << lang << "\t0\t" << kTotal << '\t' << profile.total_ngrams << '\n';
  for (std::size_t k = 0; k < kMaxNgramOrder; ++k) {
    out << lang << '\t' << k + 1 << '\t' << kUnseen << '\t'
        << format_double(profile.unseen_logprob[k]) << '\n';
    std::map<std::string, double> sorted(profile.logprobs[k].begin(),
                                         profile.logprobs[k].end());
    for (const auto& [gram, lp] : sorted) {
      out << lang << '\t' << k + 1 << '\t' << gram << '\t' << format_double(lp) << '\n';
    }
  }
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

LanguageProfile load_profile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  LanguageProfile profile;
  std::optional<Language> lang;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::array<std::string_view, 4> f;
    std::string_view rest = line;
    for (std::size_t i = 0; i < 4; ++i) {
      auto tab = i < 3 ? rest.find('\t') : std::string_view::npos;
      if (i < 3 && tab == std::string_view::npos) {
        throw ParseError(ErrorCode::kFormatError, line_no, path.string() + ": expected 4 fields");
      }
      f[i] = rest.substr(0, tab);
      if (i < 3) rest.remove_prefix(tab + 1);
    }
    auto l = parse_language(f[0]);
    if (!l || (lang && *l != *lang)) {
      throw ParseError(ErrorCode::kFormatError, line_no, path.string() + ": bad language");
    }
    lang = l;
    std::size_t n = 0;
    std::from_chars(f[1].data(), f[1].data() + f[1].size(), n);
    if (n == 0 && f[2] == kTotal) {
      std::from_chars(f[3].data(), f[3].data() + f[3].size(), profile.total_ngrams);
      continue;
    }
    if (n < 1 || n > kMaxNgramOrder) {
      throw ParseError(ErrorCode::kFormatError, line_no, path.string() + ": bad order");
    }
    double value = std::strtod(std::string(f[3]).c_str(), nullptr);
    if (f[2] == kUnseen) {
      profile.unseen_logprob[n - 1] = value;
    } else {
      profile.logprobs[n - 1][std::string(f[2])] = value;
    }
  }
  if (!lang) throw Error(ErrorCode::kFormatError, path.string() + ": empty profile");
  profile.language = *lang;
  return profile;
}

std::vector<std::string> load_seed_corpus(const fs::path& dir, Language lang) {
  const auto path = dir / (std::string(code(lang)) + ".txt");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open seed corpus " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  }
  return lines;
}

std::vector<LanguageProfile> train_seed_profiles(const fs::path& dir) {
  std::vector<LanguageProfile> profiles;
  for (auto lang : kAllLanguages) {
    profiles.push_back(train_profile(lang, load_seed_corpus(dir, lang)));
  }
  return profiles;
}

std::vector<LanguageProfile> load_profiles(const fs::path& dir) {
  std::vector<LanguageProfile> profiles;
  for (auto lang : kAllLanguages) {
    profiles.push_back(load_profile(dir / (std::string(code(lang)) + ".profile")));
  }
  return profiles;
}

void save_profiles(std::span<const LanguageProfile> profiles, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string());
  for (const auto& p : profiles) {
    save_profile(p, dir / (std::string(code(p.language)) + ".profile"));
  }
}

}  // namespace infodemic
