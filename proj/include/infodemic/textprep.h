#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "infodemic/timeutil.h"

namespace infodemic {

inline constexpr std::string_view kUrlToken = "URL";
inline constexpr std::string_view kUserToken = "USER";

// A tweet-shaped input record as read from line-delimited JSON.
struct RawRecord {
  std::string id;
  std::string text;
  std::optional<std::string> extended_text;
  std::optional<std::string> declared_lang;
  Timestamp created_at{};
};

struct NormalizedText {
  std::string normalized;           // tokens joined by single spaces
  std::vector<std::string> tokens;  // never empty strings, never whitespace

  bool operator==(const NormalizedText&) const = default;
};

// Prefers the untruncated text. Throws Error{kEmptyRecord} when neither field
// carries any text.
std::string extract_full_text(const RawRecord& record);

// Applies, in order: URL -> URL, @mention -> USER, '#' removal, case folding,
// removal of anything that is not a letter, digit or whitespace, then
// whitespace tokenization. Sentinels are never folded or stripped, and a
// standalone "URL"/"USER" word in the input is kept as a sentinel so that
// normalizing already-normalized text is a no-op.
NormalizedText normalize(std::string_view text);

inline std::size_t token_count(const NormalizedText& text) {
  return text.tokens.size();
}

// Parses one JSON object line. Recognized fields: id (string or integer),
// text, extended_text (also full_text or extended_tweet.full_text), lang,
// created_at (ISO-8601). Throws Error{kInvalidRecord} on malformed input and
// Error{kEmptyRecord} when no text field is usable.
RawRecord parse_raw_record(std::string_view json_line);

}  // namespace infodemic
