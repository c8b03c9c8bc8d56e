#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace infodemic {

enum class Language { kArabic, kBulgarian, kDutch, kEnglish };

inline constexpr std::array<Language, 4> kAllLanguages = {
    Language::kArabic, Language::kBulgarian, Language::kDutch,
    Language::kEnglish};

// Two-letter code: ar, bg, nl, en.
std::string_view code(Language lang);

// Accepts the two-letter code, case-insensitively, optionally followed by a
// region subtag ("en-GB", "nl_BE").
std::optional<Language> parse_language(std::string_view tag);

}  // namespace infodemic
