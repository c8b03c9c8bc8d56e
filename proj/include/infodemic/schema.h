#pragma once

#include <array>
#include <nlohmann/json_fwd.hpp>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace infodemic {

enum class QuestionId { kQ1, kQ2, kQ3, kQ4, kQ5, kQ6, kQ7 };
enum class Task { kBinary, kMulticlass };

inline constexpr std::array<QuestionId, 7> kAllQuestions = {
    QuestionId::kQ1, QuestionId::kQ2, QuestionId::kQ3, QuestionId::kQ4,
    QuestionId::kQ5, QuestionId::kQ6, QuestionId::kQ7};
inline constexpr std::array<Task, 2> kAllTasks = {Task::kBinary,
                                                  Task::kMulticlass};

inline constexpr std::string_view kYes = "yes";
inline constexpr std::string_view kNo = "no";

// A fine-grained label: verbatim annotation text plus a stable ASCII code.
struct Label {
  std::string_view text;
  std::string_view code;
};

struct Question {
  QuestionId id;
  std::string_view name;    // "Verifiable factual claim"
  std::string_view prompt;  // the annotation question
  std::span<const Label> fine_labels;
  bool binary_applicable = true;
};

const Question& question(QuestionId id);

std::size_t index_of(QuestionId id);         // 0..6
std::string_view code(QuestionId id);        // "Q1".."Q7"
std::string_view code(Task task);            // "binary" / "multiclass"

// Throw Error{kUnknownQuestion} / Error{kUnknownTask}.
QuestionId parse_question(std::string_view text);  // "Q3", "q3" or "3"
Task parse_task(std::string_view text);

// Canonical label order. Binary is always [no, yes]; multiclass follows the
// annotation guidelines verbatim.
std::vector<std::string> labels(QuestionId id, Task task);

// Collapses a fine-grained label. "YES..."/"Yes..."/"yes" map to yes;
// everything else ("NO...", "Not sure", "not sure") maps to no.
// Throws Error{kUnknownLabel} if `fine_label` is not in the question's set.
std::string_view to_binary(QuestionId id, std::string_view fine_label);

// Resolves user-supplied label text (verbatim, ASCII code, or a
// case-insensitive verbatim match) to the canonical label for (id, task).
// Throws Error{kUnknownLabel}.
std::string canonical_label(QuestionId id, Task task, std::string_view text);

// Machine-readable schema: questions, prompts, label lists and the binary
// mapping.
nlohmann::json schema_json();

}  // namespace infodemic
