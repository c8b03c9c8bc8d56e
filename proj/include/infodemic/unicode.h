#pragma once

#include <string>
#include <string_view>
#include <vector>

// Thin UTF-8 helpers over ICU's character properties.
namespace infodemic::unicode {

// Decodes UTF-8; malformed sequences decode to U+FFFD.
std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view text);
void append_utf8(std::string& out, char32_t cp);

// Letters include combining marks so diacritics stay attached to words.
bool is_letter(char32_t cp);
bool is_mark(char32_t cp);
bool is_digit(char32_t cp);
bool is_space(char32_t cp);

// Simple (1:1) default case folding.
char32_t fold_case(char32_t cp);
std::string fold_case(std::string_view utf8);

enum class Script { kLatin, kArabic, kCyrillic, kOther };
Script script_of(char32_t cp);

// Splits on Unicode whitespace, dropping empty pieces.
std::vector<std::string> split_whitespace(std::string_view utf8);

}  // namespace infodemic::unicode
