#include "infodemic/schema.h"

#include <algorithm>
#include <cctype>
#include <nlohmann/json.hpp>

#include "infodemic/error.h"

namespace infodemic {
namespace {

constexpr Label kQ1Labels[] = {
    {"yes", "q1_yes"},
    {"no", "q1_no"},
};

constexpr Label kQ2Labels[] = {
    {"NO, definitely contains no false information", "q2_no_definitely"},
    {"NO, probably contains no false information", "q2_no_probably"},
    {"Not sure", "q2_not_sure"},
    {"YES, probably contains false information", "q2_yes_probably"},
    {"YES, definitely contains false information", "q2_yes_definitely"},
};

constexpr Label kQ3Labels[] = {
    {"NO, definitely not of interest", "q3_no_definitely"},
    {"NO, probably not of interest", "q3_no_probably"},
    {"Not sure", "q3_not_sure"},
    {"YES, probably of interest", "q3_yes_probably"},
    {"YES, definitely of interest", "q3_yes_definitely"},
};

constexpr Label kQ4Labels[] = {
    {"NO, definitely not harmful", "q4_no_definitely"},
    {"NO, probably not harmful", "q4_no_probably"},
    {"Not sure", "q4_not_sure"},
    {"YES, probably harmful", "q4_yes_probably"},
    {"YES, definitely harmful", "q4_yes_definitely"},
};

// "Not sure" is listed last for this question.
constexpr Label kQ5Labels[] = {
    {"NO, no need to check", "q5_no_need"},
    {"NO, too trivial to check", "q5_no_trivial"},
    {"YES, not urgent", "q5_yes_not_urgent"},
    {"YES, very urgent", "q5_yes_very_urgent"},
    {"Not sure", "q5_not_sure"},
};

constexpr Label kQ6Labels[] = {
    {"NO, not harmful", "q6_no_not_harmful"},
    {"NO, joke or sarcasm", "q6_no_joke_sarcasm"},
    {"Not sure", "q6_not_sure"},
    {"YES, panic", "q6_yes_panic"},
    {"YES, xenophobic, racist, prejudices, or hate-speech", "q6_yes_xenophobic_racist_hate"},
    {"YES, bad cure", "q6_yes_bad_cure"},
    {"YES, rumor, or conspiracy", "q6_yes_rumor_conspiracy"},
    {"YES, other", "q6_yes_other"},
};

constexpr Label kQ7Labels[] = {
    {"No, not interesting", "q7_no_not_interesting"},
    {"not sure", "q7_not_sure"},
    {"Yes, asks question", "q7_yes_asks_question"},
    {"Yes, blame authorities", "q7_yes_blame_authorities"},
    {"Yes, calls for action", "q7_yes_calls_for_action"},
    {"Yes, classified as in harmful task", "q7_yes_harmful"},
    {"Yes, contains advice", "q7_yes_contains_advice"},
    {"Yes, discusses action taken", "q7_yes_action_taken"},
    {"Yes, discusses cure", "q7_yes_discusses_cure"},
    {"Yes, other", "q7_yes_other"},
};

const std::array<Question, 7> kQuestions = {{
    {QuestionId::kQ1, "Verifiable factual claim",
     "Does the tweet contain a verifiable factual claim?", kQ1Labels},
    {QuestionId::kQ2, "False information",
     "To what extent does the tweet appear to contain false information?",
     kQ2Labels},
    {QuestionId::kQ3, "Interest to the general public",
     "Will the tweet's claim have an impact on or be of interest to the "
     "general public?",
     kQ3Labels},
    {QuestionId::kQ4, "Harmfulness",
     "To what extent does the tweet appear to be harmful to society, "
     "person(s), company(s) or product(s)?",
     kQ4Labels},
    {QuestionId::kQ5, "Need for verification",
     "Do you think that a professional fact-checker should verify the claim "
     "in the tweet?",
     kQ5Labels},
    {QuestionId::kQ6, "Harmful to society",
     "Is the tweet harmful to society and why?", kQ6Labels},
    {QuestionId::kQ7, "Requires attention",
     "Do you think that this tweet should get the attention of policy makers "
     "of government entities?",
     kQ7Labels},
}};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

const Label* find_fine(QuestionId id, std::string_view text) {
  for (const auto& label : question(id).fine_labels) {
    if (label.text == text) return &label;
  }
  return nullptr;
}

}  // namespace

const Question& question(QuestionId id) { return kQuestions[index_of(id)]; }

std::size_t index_of(QuestionId id) { return static_cast<std::size_t>(id); }

std::string_view code(QuestionId id) {
  static constexpr std::string_view kCodes[] = {"Q1", "Q2", "Q3", "Q4",
                                                "Q5", "Q6", "Q7"};
  return kCodes[index_of(id)];
}

std::string_view code(Task task) {
  return task == Task::kBinary ? "binary" : "multiclass";
}

QuestionId parse_question(std::string_view text) {
  std::string_view digits = text;
  if (!digits.empty() && (digits.front() == 'Q' || digits.front() == 'q')) {
    digits.remove_prefix(1);
  }
  if (digits.size() == 1 && digits[0] >= '1' && digits[0] <= '7') {
    return kAllQuestions[static_cast<std::size_t>(digits[0] - '1')];
  }
  throw Error(ErrorCode::kUnknownQuestion, "'" + std::string(text) + "'");
}

Task parse_task(std::string_view text) {
  auto t = lower(text);
  if (t == "binary") return Task::kBinary;
  if (t == "multiclass") return Task::kMulticlass;
  throw Error(ErrorCode::kUnknownTask, "'" + std::string(text) + "'");
}

std::vector<std::string> labels(QuestionId id, Task task) {
  if (task == Task::kBinary) return {std::string(kNo), std::string(kYes)};
  std::vector<std::string> out;
  for (const auto& label : question(id).fine_labels) out.emplace_back(label.text);
  return out;
}

std::string_view to_binary(QuestionId id, std::string_view fine_label) {
  const Label* label = find_fine(id, fine_label);
  if (!label) {
    throw Error(ErrorCode::kUnknownLabel,
                std::string(code(id)) + " has no label '" +
                    std::string(fine_label) + "'");
  }
  // "Not sure" collapses to no along with every NO label.
  return lower(label->text).starts_with("yes") ? kYes : kNo;
}

std::string canonical_label(QuestionId id, Task task, std::string_view text) {
  auto candidates = labels(id, task);
  for (const auto& c : candidates) {
    if (c == text) return c;
  }
  if (task == Task::kMulticlass) {
    for (const auto& label : question(id).fine_labels) {
      if (label.code == text) return std::string(label.text);
    }
  }
  auto wanted = lower(text);
  for (const auto& c : candidates) {
    if (lower(c) == wanted) return c;
  }
  throw Error(ErrorCode::kUnknownLabel,
              std::string(code(id)) + "/" + std::string(code(task)) +
                  " has no label '" + std::string(text) + "'");
}

nlohmann::json schema_json() {
  nlohmann::json questions = nlohmann::json::array();
  for (const auto& q : kQuestions) {
    nlohmann::json fine = nlohmann::json::array();
    for (const auto& label : q.fine_labels) {
      fine.push_back({{"label", label.text},
                      {"code", label.code},
                      {"binary", to_binary(q.id, label.text)}});
    }
    questions.push_back({{"id", code(q.id)},
                         {"name", q.name},
                         {"prompt", q.prompt},
                         {"labels", {{"binary", labels(q.id, Task::kBinary)},
                                     {"multiclass", labels(q.id, Task::kMulticlass)}}},
                         {"fine_labels", std::move(fine)}});
  }
  return {{"schema_version", 1},
          {"tasks", {"binary", "multiclass"}},
          {"languages", {"ar", "bg", "nl", "en"}},
          {"questions", std::move(questions)}};
}

}  // namespace infodemic
