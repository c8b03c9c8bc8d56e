#include "infodemic/language.h"

#include <cctype>
#include <string>

namespace infodemic {

std::string_view code(Language lang) {
  switch (lang) {
    case Language::kArabic: return "ar";
    case Language::kBulgarian: return "bg";
    case Language::kDutch: return "nl";
    case Language::kEnglish: return "en";
  }
  return "??";
}

std::optional<Language> parse_language(std::string_view tag) {
  auto cut = tag.find_first_of("-_");
  std::string primary(tag.substr(0, cut));
  for (auto& c : primary) {
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  for (auto lang : kAllLanguages) {
    if (primary == code(lang)) return lang;
  }
  return std::nullopt;
}

}  // namespace infodemic
