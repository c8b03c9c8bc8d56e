#include "infodemic/textprep.h"

#include <nlohmann/json.hpp>

#include "infodemic/error.h"
#include "infodemic/unicode.h"

namespace infodemic {
namespace {

// A piece of partially-normalized text: either raw characters still subject
// to the remaining rules, or a finished sentinel.
struct Segment {
  std::u32string text;
  bool sentinel = false;
};

bool is_word_char(char32_t cp) {
  return unicode::is_letter(cp) || unicode::is_digit(cp) || cp == U'_';
}

char32_t ascii_lower(char32_t cp) {
  return (cp >= U'A' && cp <= U'Z') ? cp - U'A' + U'a' : cp;
}

bool starts_with_ci(const std::u32string& s, std::size_t pos,
                    std::u32string_view prefix) {
  if (pos + prefix.size() > s.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (ascii_lower(s[pos + i]) != prefix[i]) return false;
  }
  return true;
}

std::size_t url_length_at(const std::u32string& s, std::size_t pos) {
  bool at_boundary = pos == 0 || !is_word_char(s[pos - 1]);
  std::size_t prefix = 0;
  if (starts_with_ci(s, pos, U"https://")) {
    prefix = 8;
  } else if (starts_with_ci(s, pos, U"http://")) {
    prefix = 7;
  } else if (at_boundary && starts_with_ci(s, pos, U"www.")) {
    prefix = 4;
  } else {
    return 0;
  }
  std::size_t end = pos + prefix;
  while (end < s.size() && !unicode::is_space(s[end])) ++end;
  return end - pos;
}

std::size_t mention_length_at(const std::u32string& s, std::size_t pos) {
  if (s[pos] != U'@' && s[pos] != U'＠') return 0;
  if (pos > 0 && is_word_char(s[pos - 1])) return 0;
  std::size_t end = pos + 1;
  while (end < s.size() && is_word_char(s[end])) ++end;
  return end - pos == 1 ? 0 : end - pos;
}

// Splits `segments` by replacing every match of `match_length` with a
// sentinel segment.
template <typename Matcher>
std::vector<Segment> replace_spans(std::vector<Segment> segments,
                                   std::u32string_view sentinel,
                                   Matcher match_length) {
  std::vector<Segment> out;
  for (auto& seg : segments) {
    if (seg.sentinel) {
      out.push_back(std::move(seg));
      continue;
    }
    std::u32string pending;
    std::size_t i = 0;
    while (i < seg.text.size()) {
      std::size_t n = match_length(seg.text, i);
      if (n == 0) {
        pending.push_back(seg.text[i++]);
        continue;
      }
      if (!pending.empty()) out.push_back({std::move(pending), false});
      pending.clear();
      out.push_back({std::u32string(sentinel), true});
      i += n;
    }
    if (!pending.empty()) out.push_back({std::move(pending), false});
  }
  return out;
}

// Standalone sentinel words survive as sentinels; everything else is raw.
std::vector<Segment> initial_segments(const std::u32string& text) {
  std::vector<Segment> out;
  std::u32string pending;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t end = i;
    while (end < text.size() && !unicode::is_space(text[end])) ++end;
    std::u32string_view word(text.data() + i, end - i);
    if (word == U"URL" || word == U"USER") {
      if (!pending.empty()) out.push_back({std::move(pending), false});
      pending.clear();
      out.push_back({std::u32string(word), true});
    } else {
      pending.append(word);
    }
    // Copy the whitespace run.
    i = end;
    while (i < text.size() && unicode::is_space(text[i])) pending.push_back(text[i++]);
  }
  if (!pending.empty()) out.push_back({std::move(pending), false});
  return out;
}

std::string optional_string(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_string()) {
    throw Error(ErrorCode::kInvalidRecord,
                std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

}  // namespace

std::string extract_full_text(const RawRecord& record) {
  if (record.extended_text && !record.extended_text->empty()) {
    return *record.extended_text;
  }
  if (!record.text.empty()) return record.text;
  throw Error(ErrorCode::kEmptyRecord,
              "record '" + record.id + "' has no text");
}

NormalizedText normalize(std::string_view text) {
  auto segments = initial_segments(unicode::decode(text));
  segments = replace_spans(std::move(segments), U"URL", url_length_at);
  segments = replace_spans(std::move(segments), U"USER", mention_length_at);

  // Rules 3-5 on raw segments; sentinels pass through and are padded with
  // spaces so they always stand alone as tokens.
  std::string joined;
  for (const auto& seg : segments) {
    if (seg.sentinel) {
      joined.push_back(' ');
      joined += unicode::encode(seg.text);
      joined.push_back(' ');
      continue;
    }
    for (char32_t cp : seg.text) {
      if (cp == U'#' || cp == U'＃') continue;
      cp = unicode::fold_case(cp);
      if (unicode::is_space(cp)) {
        joined.push_back(' ');
      } else if (unicode::is_letter(cp) || unicode::is_digit(cp)) {
        unicode::append_utf8(joined, cp);
      }
    }
  }

  NormalizedText result;
  result.tokens = unicode::split_whitespace(joined);
  for (std::size_t i = 0; i < result.tokens.size(); ++i) {
    if (i) result.normalized.push_back(' ');
    result.normalized += result.tokens[i];
  }
  return result;
}

RawRecord parse_raw_record(std::string_view json_line) {
  nlohmann::json obj;
  try {
    obj = nlohmann::json::parse(json_line);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kInvalidRecord, e.what());
  }
  if (!obj.is_object()) {
    throw Error(ErrorCode::kInvalidRecord, "record is not a JSON object");
  }

  RawRecord record;
  auto id = obj.find("id_str") != obj.end() ? obj.find("id_str") : obj.find("id");
  if (id == obj.end() || id->is_null()) {
    throw Error(ErrorCode::kInvalidRecord, "missing id");
  }
  if (id->is_string()) {
    record.id = id->get<std::string>();
  } else if (id->is_number_integer()) {
    record.id = id->dump();
  } else {
    throw Error(ErrorCode::kInvalidRecord, "id must be a string or integer");
  }
  if (record.id.empty()) throw Error(ErrorCode::kInvalidRecord, "empty id");

  record.text = optional_string(obj, "text");
  std::string full = optional_string(obj, "extended_text");
  if (full.empty()) full = optional_string(obj, "full_text");
  if (full.empty()) {
    auto ext = obj.find("extended_tweet");
    if (ext != obj.end() && ext->is_object()) full = optional_string(*ext, "full_text");
  }
  if (!full.empty()) record.extended_text = std::move(full);

  std::string lang = optional_string(obj, "lang");
  if (!lang.empty()) record.declared_lang = std::move(lang);

  std::string created = optional_string(obj, "created_at");
  auto ts = parse_timestamp(created);
  if (!ts) {
    throw Error(ErrorCode::kInvalidRecord,
                "record '" + record.id + "' has unparseable created_at '" +
                    created + "'");
  }
  record.created_at = *ts;

  // Validates the text invariant up front.
  extract_full_text(record);
  return record;
}

}  // namespace infodemic
