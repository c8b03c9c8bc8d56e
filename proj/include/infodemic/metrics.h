#pragma once

#include <nlohmann/json_fwd.hpp>
#include <span>
#include <string>
#include <vector>

namespace infodemic {

// Support-weighted averages of per-class scores, plus plain accuracy.
struct Metrics {
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  double accuracy = 0.0;
  std::size_t n = 0;
};

// Per-class precision/recall/F1 averaged with weights proportional to each
// class's count in `y_true`. Classes that appear only in `y_pred` get zero
// weight; a zero denominator makes that class's score 0.
// Throws Error{kLengthMismatch} when lengths differ or both are empty.
Metrics weighted_metrics(std::span<const std::string> y_true,
                         std::span<const std::string> y_pred);

// Most frequent label of `train_labels`; ties go to the earliest label in
// `label_order`, then lexicographic order for labels outside it.
// Throws Error{kMissingData} for an empty training set.
std::string majority_label(std::span<const std::string> train_labels,
                           std::span<const std::string> label_order);

// Predicts majority_label(train) for every row of `eval_true`.
Metrics majority_baseline(std::span<const std::string> train_labels,
                          std::span<const std::string> eval_true,
                          std::span<const std::string> label_order);

nlohmann::json to_json(const Metrics& m);

}  // namespace infodemic
