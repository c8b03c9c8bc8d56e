#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "infodemic/features.h"
#include "infodemic/language.h"
#include "infodemic/metrics.h"
#include "infodemic/schema.h"

namespace infodemic {

// Score given to labels that never occur in the training split. After
// calibration their probability underflows to zero.
inline constexpr double kAbsentLabelScore = -1e6;

// w.x + b with a sigmoid on top: P(positive | s) = 1 / (1 + exp(-(a*s + b))).
struct LinearBinaryModel {
  std::vector<double> weights;
  double bias = 0.0;
  double c = 1.0;
  double platt_a = 1.0;
  double platt_b = 0.0;

  double decision_value(const SparseVector& x) const {
    return x.dot(weights) + bias;
  }
  double probability(double score) const;
};

struct SvmOptions {
  // Value of the constant feature appended to every instance; its weight is
  // the bias (and is regularized along with w).
  double bias_feature = 1.0;
  double tolerance = 1e-4;
  std::size_t max_epochs = 1000;
  std::uint64_t seed = 1;
};

// Everything the dual coordinate descent solver knows at exit.
struct DualSolution {
  LinearBinaryModel model;
  std::vector<double> alpha;  // one per instance, each in [0, C]
  std::size_t epochs = 0;
  double max_violation = 0.0;
  bool converged = false;
};

// L1-loss (hinge) L2-regularized linear SVM solved in the dual by coordinate
// descent over a seeded random permutation each epoch. Stops when the largest
// projected-gradient magnitude in an epoch drops below `tolerance`, or after
// `max_epochs`. Labels must be +1/-1. Throws Error{kSingleClass} when every
// label is equal, Error{kLengthMismatch} when sizes disagree or fewer than 2
// instances are given.
DualSolution solve_dual(std::span<const SparseVector> x, std::span<const int> y,
                        std::size_t dimension, double c,
                        const SvmOptions& options = {});

inline LinearBinaryModel train_binary(std::span<const SparseVector> x,
                                      std::span<const int> y,
                                      std::size_t dimension, double c,
                                      const SvmOptions& options = {}) {
  return solve_dual(x, y, dimension, c, options).model;
}

// 1/2 (|w|^2 + bias^2) + C * sum hinge(y_i (w.x_i + bias)): the quantity
// solve_dual minimizes.
double primal_objective(const LinearBinaryModel& model,
                        std::span<const SparseVector> x, std::span<const int> y,
                        double bias_feature = 1.0);

struct PlattParams {
  double a = 1.0;
  double b = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

// Fits sigmoid(a*s + b) to +1/-1 labels by Newton's method with backtracking
// on the log-loss, using smoothed targets (N+ + 1)/(N+ + 2) and 1/(N- + 2).
// At most 100 iterations. Throws Error{kSingleClass}.
PlattParams fit_platt(std::span<const double> scores, std::span<const int> y);

// Returns a copy of `model` with platt_a/platt_b fitted on its decision
// values over the dev set.
LinearBinaryModel calibrate(const LinearBinaryModel& model,
                            std::span<const SparseVector> x_dev,
                            std::span<const int> y_dev);

struct LabeledTexts {
  std::vector<NormalizedText> texts;
  std::vector<std::string> labels;  // canonical labels for the task
};

struct QuestionTrainingData {
  LabeledTexts train;
  LabeledTexts dev;
};

struct TrainOptions {
  std::vector<double> c_grid = {0.01, 0.1, 1.0, 10.0, 100.0};
  TfidfOptions tfidf;
  SvmOptions svm;
  bool parallel = true;
};

// One tf-idf space and one-vs-rest linear models for a (question, task). The
// binary task holds a single "yes"-vs-"no" classifier; the multiclass task
// one classifier per schema label.
struct QuestionModel {
  QuestionId question = QuestionId::kQ1;
  Task task = Task::kBinary;
  std::vector<std::string> labels;
  TfidfModel tfidf;
  std::vector<LinearBinaryModel> classifiers;
  std::vector<std::string> absent_labels;
  double c = 1.0;
  Metrics dev_metrics;
  // Dev weighted-F1 for every C tried, in grid order.
  std::vector<std::pair<double, double>> c_scores;
};

struct Prediction {
  QuestionId question = QuestionId::kQ1;
  std::string label;
  double probability = 0.0;
  // Every schema label with its probability, in schema order.
  std::vector<std::pair<std::string, double>> label_dictionary;
};

// Trains one model per C in the grid on the train split, keeps the C with
// the best dev weighted-F1 (earliest on ties), then calibrates every
// classifier on dev. Labels missing from train get a constant
// kAbsentLabelScore. Throws Error{kSingleClass} when train has fewer than two
// distinct labels.
QuestionModel train_question(QuestionId question, Task task,
                             const QuestionTrainingData& data,
                             const TrainOptions& options = {});

// Uncalibrated per-classifier decision values.
std::vector<double> decision_values(const QuestionModel& model,
                                    const SparseVector& x);

Prediction predict(const QuestionModel& model, const NormalizedText& text);
Prediction predict(const QuestionModel& model, std::string_view text);

// Model bundle: a directory holding manifest.json, tfidf.json and
// classifiers.json. Doubles round-trip exactly.
inline constexpr int kBundleSchemaVersion = 1;

std::filesystem::path bundle_path(const std::filesystem::path& model_dir,
                                  Language lang, QuestionId question, Task task);
void save_bundle(const QuestionModel& model, Language lang,
                 const std::filesystem::path& dir);
// Throws Error{kMissingModel} when the directory or manifest is absent and
// Error{kFormatError} on schema or content mismatch.
QuestionModel load_bundle(const std::filesystem::path& dir);

}  // namespace infodemic
