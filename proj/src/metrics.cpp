#include "infodemic/metrics.h"

#include <algorithm>
#include <map>
#include <nlohmann/json.hpp>

#include "infodemic/error.h"

namespace infodemic {

Metrics weighted_metrics(std::span<const std::string> y_true,
                         std::span<const std::string> y_pred) {
  if (y_true.size() != y_pred.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(y_true.size()) + " true vs " +
                    std::to_string(y_pred.size()) + " predicted labels");
  }
  if (y_true.empty()) throw Error(ErrorCode::kLengthMismatch, "no labels");

  struct Counts {
    std::size_t tp = 0, fp = 0, fn = 0;
  };
  std::map<std::string, Counts> per_class;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] == y_pred[i]) {
      ++per_class[y_true[i]].tp;
      ++correct;
    } else {
      ++per_class[y_true[i]].fn;
      ++per_class[y_pred[i]].fp;
    }
  }

  const double n = static_cast<double>(y_true.size());
  Metrics m;
  m.n = y_true.size();
  m.accuracy = static_cast<double>(correct) / n;
  for (const auto& [label, c] : per_class) {
    const std::size_t support = c.tp + c.fn;
    if (support == 0) continue;
    const double p = c.tp + c.fp ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
    const double r = static_cast<double>(c.tp) / static_cast<double>(support);
    const double f1 = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    const double w = static_cast<double>(support) / n;
    m.weighted_precision += w * p;
    m.weighted_recall += w * r;
    m.weighted_f1 += w * f1;
  }
  return m;
}

std::string majority_label(std::span<const std::string> train_labels,
                           std::span<const std::string> label_order) {
  if (train_labels.empty()) {
    throw Error(ErrorCode::kMissingData, "majority baseline needs training labels");
  }
  std::map<std::string, std::size_t> counts;
  for (const auto& l : train_labels) ++counts[l];

  auto rank = [&](const std::string& label) {
    auto it = std::find(label_order.begin(), label_order.end(), label);
    return static_cast<std::size_t>(it - label_order.begin());
  };
  const std::string* best = nullptr;
  std::size_t best_count = 0;
  for (const auto& [label, count] : counts) {
    if (!best || count > best_count ||
        (count == best_count && rank(label) < rank(*best))) {
      best = &label;
      best_count = count;
    }
  }
  return *best;
}

Metrics majority_baseline(std::span<const std::string> train_labels,
                          std::span<const std::string> eval_true,
                          std::span<const std::string> label_order) {
  std::vector<std::string> pred(eval_true.size(),
                                majority_label(train_labels, label_order));
  return weighted_metrics(eval_true, pred);
}

nlohmann::json to_json(const Metrics& m) {
  return {{"weighted_precision", m.weighted_precision},
          {"weighted_recall", m.weighted_recall},
          {"weighted_f1", m.weighted_f1},
          {"accuracy", m.accuracy},
          {"n", m.n}};
}

}  // namespace infodemic
