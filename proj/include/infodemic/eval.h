#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>
#include <vector>

#include "infodemic/language.h"
#include "infodemic/metrics.h"
#include "infodemic/schema.h"
#include "infodemic/svm.h"

namespace infodemic {

inline constexpr std::uint64_t kDefaultSplitSeed = 20200401;

struct DatasetRow {
  std::string text;
  // Canonical fine-grained label per question; nullopt = not annotated.
  std::array<std::optional<std::string>, 7> labels;
};

struct LabeledDataset {
  Language language = Language::kEnglish;
  std::vector<DatasetRow> rows;

  // Rows annotated for `question`.
  std::size_t count(QuestionId question) const;
};

// Tab-separated rows: text, then one column per question Q1..Q7. An empty
// column means the row is not annotated for that question. Labels may be
// written verbatim, as ASCII codes, or case-insensitively. A first line whose
// first column is "text" is treated as a header. Throws ParseError with
// kParseError or kUnknownLabel; Error{kIoError} if the file cannot be opened.
LabeledDataset load_dataset(const std::filesystem::path& path, Language lang);
LabeledDataset parse_dataset(std::istream& in, Language lang);

enum class Split { kTrain, kDev, kTest };
std::string_view code(Split split);

struct SplitRatios {
  double train = 0.7;
  double dev = 0.1;
  double test = 0.2;
};

struct SplitAssignment {
  std::uint64_t seed = kDefaultSplitSeed;
  std::vector<Split> assignment;  // one per dataset row

  std::array<std::size_t, 3> sizes() const;
  nlohmann::json to_json() const;
  static SplitAssignment from_json(const nlohmann::json& j);
};

// Iterative stratification over each row's set of (question, fine label)
// pairs. Split sizes are fixed up front by largest-remainder rounding of the
// ratios, so every split lands within one row of its exact share. Rows are
// then visited rarest-label first and each goes to the split that most
// reduces the size-weighted chi-square gap between label counts and quotas
// over all of the row's labels; ties go to the split with more free
// capacity, then to a seeded random draw.
SplitAssignment stratified_split(const LabeledDataset& dataset,
                                 std::uint64_t seed = kDefaultSplitSeed,
                                 const SplitRatios& ratios = {});

// Normalized texts and task-space labels for the rows of `split` that are
// annotated for `question`.
LabeledTexts select(const LabeledDataset& dataset, const SplitAssignment& splits,
                    Split split, QuestionId question, Task task);

QuestionTrainingData training_data(const LabeledDataset& dataset,
                                   const SplitAssignment& splits,
                                   QuestionId question, Task task);

struct ReportRow {
  Task task = Task::kBinary;
  QuestionId question = QuestionId::kQ1;
  std::size_t n_classes = 0;
  std::size_t n_test = 0;
  std::optional<double> majority_f1;
  std::optional<double> svm_f1;
  std::string error;  // e.g. "MissingData" when the test split is empty
};

struct Report {
  Language language = Language::kEnglish;
  std::vector<ReportRow> rows;

  std::string to_text() const;
  nlohmann::json to_json() const;
};

// Questions reported per task: every question for binary, Q2..Q7 for
// multiclass (Q1 is already binary).
std::vector<QuestionId> reported_questions(Task task);

using ModelLookup = std::function<const QuestionModel*(QuestionId, Task)>;

// Majority baseline and SVM weighted-F1 on the test split for every reported
// (task, question). Throws Error{kMissingModel} when `models` has no entry
// for a reported pair.
Report report(const ModelLookup& models, const LabeledDataset& dataset,
              const SplitAssignment& splits);

}  // namespace infodemic
