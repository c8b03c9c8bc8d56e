#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace infodemic {

using Timestamp = std::chrono::sys_seconds;
using Day = std::chrono::sys_days;

// Accepts "YYYY-MM-DDTHH:MM:SS" with optional fractional seconds and a "Z" or
// "+HH:MM"/"-HH:MM" offset (no offset means UTC). A bare "YYYY-MM-DD" is
// midnight UTC.
std::optional<Timestamp> parse_timestamp(std::string_view text);

// Strict "YYYY-MM-DD".
std::optional<Day> parse_day(std::string_view text);

std::string format_timestamp(Timestamp ts);  // YYYY-MM-DDTHH:MM:SSZ
std::string format_day(Day day);              // YYYY-MM-DD

inline Day day_of(Timestamp ts) {
  return std::chrono::floor<std::chrono::days>(ts);
}

}  // namespace infodemic
