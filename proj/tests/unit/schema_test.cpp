#include <gtest/gtest.h>

#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>

#include "infodemic/error.h"
#include "infodemic/schema.h"
#include "synthetic.h"

namespace infodemic {
namespace {

TEST(Schema, LabelCounts) {
  const std::size_t expected[] = {2, 5, 5, 5, 5, 8, 10};
  for (auto q : kAllQuestions) {
    EXPECT_EQ(labels(q, Task::kMulticlass).size(), expected[index_of(q)]) << code(q);
    EXPECT_EQ(labels(q, Task::kBinary), (std::vector<std::string>{"no", "yes"}));
    EXPECT_TRUE(question(q).binary_applicable);
  }
}

TEST(Schema, Examples) {
  auto q6 = labels(QuestionId::kQ6, Task::kMulticlass);
  EXPECT_EQ(q6.front(), "NO, not harmful");
  EXPECT_NE(std::find(q6.begin(), q6.end(), "YES, rumor, or conspiracy"), q6.end());
  auto q7 = labels(QuestionId::kQ7, Task::kMulticlass);
  EXPECT_NE(std::find(q7.begin(), q7.end(), "Yes, calls for action"), q7.end());
  EXPECT_EQ(labels(QuestionId::kQ5, Task::kMulticlass)[4], "Not sure");
}

TEST(Schema, ToBinaryMatchesGoldenFile) {
  std::ifstream in(testing::fixtures_dir() / "label_mapping.tsv");
  ASSERT_TRUE(in);
  std::string line;
  std::size_t rows = 0;
  std::map<std::string, std::size_t> per_question;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto t1 = line.find('\t'), t2 = line.rfind('\t');
    auto q = parse_question(line.substr(0, t1));
    auto fine = line.substr(t1 + 1, t2 - t1 - 1);
    auto bin = line.substr(t2 + 1);
    EXPECT_EQ(to_binary(q, fine), bin) << fine;
    auto fine_labels = labels(q, Task::kMulticlass);
    ASSERT_LT(per_question[std::string(code(q))], fine_labels.size());
    EXPECT_EQ(fine_labels[per_question[std::string(code(q))]++], fine);
    ++rows;
  }
  EXPECT_EQ(rows, 40u);
}

TEST(Schema, ToBinaryExamples) {
  EXPECT_EQ(to_binary(QuestionId::kQ2, "YES, probably contains false information"), "yes");
  EXPECT_EQ(to_binary(QuestionId::kQ5, "NO, too trivial to check"), "no");
  EXPECT_EQ(to_binary(QuestionId::kQ4, "Not sure"), "no");
  EXPECT_EQ(to_binary(QuestionId::kQ7, "not sure"), "no");
  EXPECT_EQ(to_binary(QuestionId::kQ1, "yes"), "yes");
}

TEST(Schema, ToBinaryUnknownLabel) {
  try {
    to_binary(QuestionId::kQ2, "maybe");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownLabel);
  }
}

TEST(Schema, Parsing) {
  EXPECT_EQ(parse_question("Q3"), QuestionId::kQ3);
  EXPECT_EQ(parse_question("q7"), QuestionId::kQ7);
  EXPECT_EQ(parse_question("1"), QuestionId::kQ1);
  EXPECT_EQ(parse_task("binary"), Task::kBinary);
  EXPECT_EQ(parse_task("multiclass"), Task::kMulticlass);
  for (std::string bad : {"Q0", "Q8", "", "question"}) {
    try {
      parse_question(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kUnknownQuestion);
    }
  }
  try {
    parse_task("ternary");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownTask);
  }
}

TEST(Schema, CanonicalLabel) {
  EXPECT_EQ(canonical_label(QuestionId::kQ6, Task::kMulticlass, "yes, panic"), "YES, panic");
  EXPECT_EQ(canonical_label(QuestionId::kQ6, Task::kMulticlass, "q6_yes_rumor_conspiracy"),
            "YES, rumor, or conspiracy");
  EXPECT_EQ(canonical_label(QuestionId::kQ2, Task::kBinary, "YES"), "yes");
  EXPECT_THROW(canonical_label(QuestionId::kQ2, Task::kMulticlass, "perhaps"), Error);
}

TEST(Schema, CodesAreUniqueAscii) {
  std::set<std::string_view> seen;
  for (auto q : kAllQuestions) {
    for (const auto& l : question(q).fine_labels) {
      EXPECT_TRUE(seen.insert(l.code).second) << l.code;
      for (char c : l.code) EXPECT_TRUE(std::isalnum(static_cast<unsigned char>(c)) || c == '_');
    }
  }
}

TEST(Schema, JsonExport) {
  auto j = schema_json();
  ASSERT_EQ(j["questions"].size(), 7u);
  EXPECT_EQ(j["questions"][5]["labels"]["multiclass"].size(), 8u);
  EXPECT_EQ(j["questions"][0]["id"], "Q1");
  EXPECT_EQ(j["questions"][1]["fine_labels"][3]["binary"], "yes");
}

}  // namespace
}  // namespace infodemic
