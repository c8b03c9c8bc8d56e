#include "infodemic/svm.h"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <random>
#include <set>

#include "infodemic/error.h"

namespace infodemic {
namespace {

double sigmoid(double f) {
  if (f >= 0.0) return 1.0 / (1.0 + std::exp(-f));
  double e = std::exp(f);
  return e / (1.0 + e);
}

// -[t log sigmoid(f) + (1 - t) log(1 - sigmoid(f))], overflow-free.
double log_loss_term(double f, double t) {
  return f >= 0.0 ? std::log1p(std::exp(-f)) + (1.0 - t) * f
                  : std::log1p(std::exp(f)) - t * f;
}

void check_binary_labels(std::span<const int> y) {
  bool pos = false, neg = false;
  for (int v : y) {
    if (v == 1) {
      pos = true;
    } else if (v == -1) {
      neg = true;
    } else {
      throw Error(ErrorCode::kFormatError, "binary labels must be +1 or -1");
    }
  }
  if (!pos || !neg) throw Error(ErrorCode::kSingleClass, "only one class present");
}

}  // namespace

double LinearBinaryModel::probability(double score) const {
  return sigmoid(platt_a * score + platt_b);
}

DualSolution solve_dual(std::span<const SparseVector> x, std::span<const int> y,
                        std::size_t dimension, double c,
                        const SvmOptions& options) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::kLengthMismatch,
                "need |X| == |y| >= 2, got " + std::to_string(x.size()) +
                    " and " + std::to_string(y.size()));
  }
  if (!(c > 0.0)) throw Error(ErrorCode::kFormatError, "C must be positive");
  check_binary_labels(y);

  const std::size_t n = x.size();
  const double bias_feature = options.bias_feature;
  DualSolution sol;
  sol.model.weights.assign(dimension, 0.0);
  sol.model.c = c;
  sol.alpha.assign(n, 0.0);
  auto& w = sol.model.weights;
  double& b = sol.model.bias;

  std::vector<double> qd(n);
  for (std::size_t i = 0; i < n; ++i) {
    qd[i] = x[i].squared_norm() + bias_feature * bias_feature;
  }

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(options.seed);

  for (sol.epochs = 0; sol.epochs < options.max_epochs;) {
    // Fisher-Yates with raw engine output keeps the permutation identical
    // across standard library implementations.
    for (std::size_t i = n - 1; i > 0; --i) {
      std::swap(order[i], order[rng() % (i + 1)]);
    }

    double max_pg = 0.0;
    for (std::size_t i : order) {
      const double yi = y[i];
      const double g = yi * (x[i].dot(w) + b * bias_feature) - 1.0;
      double& a = sol.alpha[i];

      double pg = g;
      if (a <= 0.0) {
        pg = std::min(g, 0.0);
      } else if (a >= c) {
        pg = std::max(g, 0.0);
      }
      max_pg = std::max(max_pg, std::abs(pg));
      if (std::abs(pg) <= 1e-12) continue;

      const double old = a;
      a = qd[i] > 0.0 ? std::clamp(a - g / qd[i], 0.0, c) : (g < 0.0 ? c : 0.0);
      const double delta = (a - old) * yi;
      if (delta == 0.0) continue;
      for (const auto& [index, value] : x[i].entries()) {
        if (index < dimension) w[index] += delta * value;
      }
      b += delta * bias_feature;
    }
    ++sol.epochs;
    sol.max_violation = max_pg;
    if (max_pg < options.tolerance) {
      sol.converged = true;
      break;
    }
  }
  // The solver tracks the bias as the weight of the constant feature.
  b *= bias_feature;
  return sol;
}

double primal_objective(const LinearBinaryModel& model,
                        std::span<const SparseVector> x, std::span<const int> y,
                        double bias_feature) {
  double reg = 0.0;
  for (double v : model.weights) reg += v * v;
  const double bias_weight = bias_feature != 0.0 ? model.bias / bias_feature : 0.0;
  reg += bias_weight * bias_weight;
  double loss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    loss += std::max(0.0, 1.0 - y[i] * model.decision_value(x[i]));
  }
  return 0.5 * reg + model.c * loss;
}

PlattParams fit_platt(std::span<const double> scores, std::span<const int> y) {
  if (scores.size() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch, "scores and labels differ in length");
  }
  check_binary_labels(y);

  const std::size_t n = scores.size();
  double n_pos = 0, n_neg = 0;
  for (int v : y) (v > 0 ? n_pos : n_neg) += 1.0;
  const double hi = (n_pos + 1.0) / (n_pos + 2.0);
  const double lo = 1.0 / (n_neg + 2.0);
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = y[i] > 0 ? hi : lo;

  constexpr int kMaxIter = 100;
  constexpr double kMinStep = 1e-10;
  constexpr double kRidge = 1e-12;
  constexpr double kEps = 1e-5;

  PlattParams p;
  p.a = 0.0;
  p.b = std::log((n_pos + 1.0) / (n_neg + 1.0));

  auto objective = [&](double a, double b) {
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i) f += log_loss_term(a * scores[i] + b, t[i]);
    return f;
  };
  double fval = objective(p.a, p.b);

  for (; p.iterations < kMaxIter; ++p.iterations) {
    double h11 = kRidge, h22 = kRidge, h21 = 0.0, g1 = 0.0, g2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = scores[i];
      const double prob = sigmoid(p.a * s + p.b);
      const double d2 = prob * (1.0 - prob);
      h11 += s * s * d2;
      h22 += d2;
      h21 += s * d2;
      const double d1 = prob - t[i];
      g1 += s * d1;
      g2 += d1;
    }
    if (std::abs(g1) < kEps && std::abs(g2) < kEps) {
      p.converged = true;
      break;
    }

    const double det = h11 * h22 - h21 * h21;
    const double da = -(h22 * g1 - h21 * g2) / det;
    const double db = -(-h21 * g1 + h11 * g2) / det;
    const double gd = g1 * da + g2 * db;

    double step = 1.0;
    while (step >= kMinStep) {
      const double na = p.a + step * da;
      const double nb = p.b + step * db;
      const double nf = objective(na, nb);
      if (nf < fval + 1e-4 * step * gd) {
        p.a = na;
        p.b = nb;
        fval = nf;
        break;
      }
      step /= 2.0;
    }
    if (step < kMinStep) break;  // line search failed
  }
  return p;
}

LinearBinaryModel calibrate(const LinearBinaryModel& model,
                            std::span<const SparseVector> x_dev,
                            std::span<const int> y_dev) {
  std::vector<double> scores;
  scores.reserve(x_dev.size());
  for (const auto& x : x_dev) scores.push_back(model.decision_value(x));
  auto params = fit_platt(scores, y_dev);
  LinearBinaryModel out = model;
  out.platt_a = params.a;
  out.platt_b = params.b;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct Encoded {
  std::vector<SparseVector> x;
  std::vector<std::string> labels;
};

Encoded encode(const TfidfModel& tfidf, const LabeledTexts& data) {
  Encoded out;
  out.x.reserve(data.texts.size());
  for (const auto& t : data.texts) out.x.push_back(tfidf.transform(t));
  out.labels = data.labels;
  return out;
}

// Positive label of each one-vs-rest problem.
std::vector<std::string> positive_labels(QuestionId question, Task task) {
  if (task == Task::kBinary) return {std::string(kYes)};
  return labels(question, task);
}

std::vector<int> one_vs_rest(std::span<const std::string> labels,
                             const std::string& positive) {
  std::vector<int> y;
  y.reserve(labels.size());
  for (const auto& l : labels) y.push_back(l == positive ? 1 : -1);
  return y;
}

LinearBinaryModel absent_classifier(std::size_t dimension, double c) {
  LinearBinaryModel m;
  m.weights.assign(dimension, 0.0);
  m.bias = kAbsentLabelScore;
  m.c = c;
  return m;
}

std::vector<LinearBinaryModel> train_all(const std::vector<std::string>& positives,
                                         const Encoded& train,
                                         std::size_t dimension, double c,
                                         const TrainOptions& options) {
  auto train_one = [&](const std::string& positive) {
    auto y = one_vs_rest(train.labels, positive);
    if (std::find(y.begin(), y.end(), 1) == y.end()) {
      return absent_classifier(dimension, c);
    }
    return train_binary(train.x, y, dimension, c, options.svm);
  };

  std::vector<LinearBinaryModel> out;
  if (options.parallel && positives.size() > 1) {
    std::vector<std::future<LinearBinaryModel>> jobs;
    for (const auto& p : positives) {
      jobs.push_back(std::async(std::launch::async, train_one, std::cref(p)));
    }
    for (auto& j : jobs) out.push_back(j.get());
  } else {
    for (const auto& p : positives) out.push_back(train_one(p));
  }
  return out;
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

// Label picked from raw scores, used for C selection.
std::string raw_label(const QuestionModel& model, const SparseVector& x) {
  auto scores = decision_values(model, x);
  if (model.task == Task::kBinary) {
    return std::string(scores[0] > 0.0 ? kYes : kNo);
  }
  return model.labels[argmax(scores)];
}

}  // namespace

QuestionModel train_question(QuestionId question, Task task,
                             const QuestionTrainingData& data,
                             const TrainOptions& options) {
  if (options.c_grid.empty()) throw Error(ErrorCode::kFormatError, "empty C grid");
  if (data.train.texts.size() != data.train.labels.size() ||
      data.dev.texts.size() != data.dev.labels.size()) {
    throw Error(ErrorCode::kLengthMismatch, "texts and labels differ in length");
  }
  std::set<std::string> distinct(data.train.labels.begin(), data.train.labels.end());
  if (distinct.size() < 2) {
    throw Error(ErrorCode::kSingleClass,
                std::string(code(question)) + "/" + std::string(code(task)) +
                    " training split has fewer than two labels");
  }

  QuestionModel model;
  model.question = question;
  model.task = task;
  model.labels = labels(question, task);
  for (const auto& l : distinct) {
    if (std::find(model.labels.begin(), model.labels.end(), l) == model.labels.end()) {
      throw Error(ErrorCode::kUnknownLabel, "'" + l + "' is not a " +
                                                std::string(code(task)) + " label of " +
                                                std::string(code(question)));
    }
  }
  for (const auto& l : model.labels) {
    if (task == Task::kMulticlass && !distinct.contains(l)) model.absent_labels.push_back(l);
  }

  model.tfidf = TfidfModel::fit(data.train.texts, options.tfidf);
  const auto dim = model.tfidf.dimension();
  const auto train = encode(model.tfidf, data.train);
  const auto dev = encode(model.tfidf, data.dev);
  const auto positives = positive_labels(question, task);

  double best_f1 = -1.0;
  for (double c : options.c_grid) {
    QuestionModel candidate = model;
    candidate.c = c;
    candidate.classifiers = train_all(positives, train, dim, c, options);
    double f1 = 0.0;
    if (!dev.x.empty()) {
      std::vector<std::string> pred;
      for (const auto& x : dev.x) pred.push_back(raw_label(candidate, x));
      f1 = weighted_metrics(dev.labels, pred).weighted_f1;
    }
    model.c_scores.emplace_back(c, f1);
    if (f1 > best_f1) {
      best_f1 = f1;
      model.c = c;
      model.classifiers = std::move(candidate.classifiers);
    }
  }

  // Dev calibration; a label whose dev slice is one-sided falls back to its
  // training scores, which always contain both classes.
  for (std::size_t k = 0; k < positives.size(); ++k) {
    auto& clf = model.classifiers[k];
    if (std::find(model.absent_labels.begin(), model.absent_labels.end(),
                  positives[k]) != model.absent_labels.end()) {
      continue;
    }
    auto y_dev = one_vs_rest(dev.labels, positives[k]);
    bool dev_ok = std::count(y_dev.begin(), y_dev.end(), 1) > 0 &&
                  std::count(y_dev.begin(), y_dev.end(), -1) > 0;
    if (dev_ok) {
      clf = calibrate(clf, dev.x, y_dev);
    } else {
      clf = calibrate(clf, train.x, one_vs_rest(train.labels, positives[k]));
    }
  }

  if (!dev.x.empty()) {
    std::vector<std::string> pred;
    for (const auto& t : data.dev.texts) pred.push_back(predict(model, t).label);
    model.dev_metrics = weighted_metrics(dev.labels, pred);
  }
  return model;
}

std::vector<double> decision_values(const QuestionModel& model,
                                    const SparseVector& x) {
  std::vector<double> scores;
  scores.reserve(model.classifiers.size());
  for (const auto& clf : model.classifiers) scores.push_back(clf.decision_value(x));
  return scores;
}

Prediction predict(const QuestionModel& model, const NormalizedText& text) {
  const auto x = model.tfidf.transform(text);
  const auto scores = decision_values(model, x);

  std::vector<double> probs;
  if (model.task == Task::kBinary) {
    const double yes = model.classifiers.at(0).probability(scores[0]);
    probs = {1.0 - yes, yes};  // labels are [no, yes]
  } else {
    for (std::size_t k = 0; k < scores.size(); ++k) {
      probs.push_back(model.classifiers[k].probability(scores[k]));
    }
  }
  double sum = 0.0;
  for (double p : probs) sum += p;
  if (sum > 0.0 && std::isfinite(sum)) {
    for (double& p : probs) p /= sum;
  } else {
    std::fill(probs.begin(), probs.end(), 1.0 / static_cast<double>(probs.size()));
  }

  Prediction out;
  out.question = model.question;
  const std::size_t best = argmax(probs);
  out.label = model.labels[best];
  out.probability = probs[best];
  for (std::size_t k = 0; k < probs.size(); ++k) {
    out.label_dictionary.emplace_back(model.labels[k], probs[k]);
  }
  return out;
}

Prediction predict(const QuestionModel& model, std::string_view text) {
  return predict(model, normalize(text));
}

}  // namespace infodemic
