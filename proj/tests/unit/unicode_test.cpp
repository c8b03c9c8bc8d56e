#include <gtest/gtest.h>

#include "infodemic/timeutil.h"
#include "infodemic/unicode.h"

namespace infodemic {
namespace {

using namespace std::chrono;

TEST(Unicode, DecodeEncodeRoundTrip) {
  const std::string s = "Héllo мир مرحبا ✓";
  EXPECT_EQ(unicode::encode(unicode::decode(s)), s);
}

TEST(Unicode, MalformedBytesBecomeReplacementChar) {
  auto d = unicode::decode("a\xff" "b");
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d[1], U'�');
}

TEST(Unicode, Classification) {
  EXPECT_TRUE(unicode::is_letter(U'é'));
  EXPECT_TRUE(unicode::is_letter(U'ж'));
  EXPECT_TRUE(unicode::is_letter(U'ب'));
  EXPECT_TRUE(unicode::is_letter(U'َ'));  // fatha
  EXPECT_TRUE(unicode::is_mark(U'́'));
  EXPECT_FALSE(unicode::is_letter(U'5'));
  EXPECT_TRUE(unicode::is_digit(U'5'));
  EXPECT_TRUE(unicode::is_digit(U'٣'));
  EXPECT_TRUE(unicode::is_space(U' '));
  EXPECT_FALSE(unicode::is_letter(U'!'));
}

TEST(Unicode, FoldCase) {
  EXPECT_EQ(unicode::fold_case("ÄBC Ωмир"), "äbc ωмир");
  EXPECT_EQ(unicode::fold_case(U'Ж'), U'ж');
}

TEST(Unicode, Scripts) {
  EXPECT_EQ(unicode::script_of(U'a'), unicode::Script::kLatin);
  EXPECT_EQ(unicode::script_of(U'ж'), unicode::Script::kCyrillic);
  EXPECT_EQ(unicode::script_of(U'ب'), unicode::Script::kArabic);
  EXPECT_EQ(unicode::script_of(U'漢'), unicode::Script::kOther);
}

TEST(Unicode, SplitWhitespace) {
  auto parts = unicode::split_whitespace("  a\tb c \n");
  EXPECT_EQ(parts, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_TRUE(unicode::split_whitespace("   ").empty());
}

TEST(TimeUtil, ParsesTimestampForms) {
  auto base = sys_days{year{2020} / 3 / 15} + hours{10} + minutes{5} + seconds{7};
  EXPECT_EQ(parse_timestamp("2020-03-15T10:05:07Z"), base);
  EXPECT_EQ(parse_timestamp("2020-03-15T10:05:07"), base);
  EXPECT_EQ(parse_timestamp("2020-03-15T10:05:07.250Z"), base);
  EXPECT_EQ(parse_timestamp("2020-03-15T12:05:07+02:00"), base);
  EXPECT_EQ(parse_timestamp("2020-03-15T05:05:07-05:00"), base);
  EXPECT_EQ(parse_timestamp("2020-03-15"), sys_days{year{2020} / 3 / 15});
}

TEST(TimeUtil, RejectsBadTimestamps) {
  EXPECT_FALSE(parse_timestamp(""));
  EXPECT_FALSE(parse_timestamp("2020-02-30"));
  EXPECT_FALSE(parse_timestamp("2020-13-01T00:00:00Z"));
  EXPECT_FALSE(parse_timestamp("2020-03-15T25:00:00Z"));
  EXPECT_FALSE(parse_timestamp("yesterday"));
  EXPECT_FALSE(parse_day("2020-3-15"));
}

TEST(TimeUtil, FormatsAndBuckets) {
  auto ts = *parse_timestamp("2020-03-15T23:59:59Z");
  EXPECT_EQ(format_timestamp(ts), "2020-03-15T23:59:59Z");
  EXPECT_EQ(format_day(day_of(ts)), "2020-03-15");
  EXPECT_EQ(format_day(day_of(ts + seconds{1})), "2020-03-16");
  // Offsets move records across UTC days.
  EXPECT_EQ(format_day(day_of(*parse_timestamp("2020-03-16T01:00:00+02:00"))), "2020-03-15");
}

}  // namespace
}  // namespace infodemic
