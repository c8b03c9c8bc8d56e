#include "infodemic/eval.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <nlohmann/json.hpp>
#include <numeric>
#include <random>
#include <sstream>

#include "infodemic/error.h"

namespace infodemic {
namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string_view::npos ? tab : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

// Global index of each (question, fine label) pair.
std::size_t label_key(QuestionId q, const std::string& label) {
  std::size_t offset = 0;
  for (auto other : kAllQuestions) {
    const auto& fine = question(other).fine_labels;
    if (other == q) {
      for (std::size_t i = 0; i < fine.size(); ++i) {
        if (fine[i].text == label) return offset + i;
      }
      break;
    }
    offset += fine.size();
  }
  throw Error(ErrorCode::kUnknownLabel, label);
}

std::size_t total_label_keys() {
  std::size_t n = 0;
  for (auto q : kAllQuestions) n += question(q).fine_labels.size();
  return n;
}

}  // namespace

std::size_t LabeledDataset::count(QuestionId q) const {
  return static_cast<std::size_t>(std::count_if(
      rows.begin(), rows.end(),
      [&](const DatasetRow& r) { return r.labels[index_of(q)].has_value(); }));
}

LabeledDataset parse_dataset(std::istream& in, Language lang) {
  LabeledDataset ds;
  ds.language = lang;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (line_no == 1 && trim(fields[0]) == "text") continue;
    if (fields.size() != 8) {
      throw ParseError(ErrorCode::kParseError, line_no,
                       "expected 8 tab-separated columns, got " + std::to_string(fields.size()));
    }
    DatasetRow row;
    row.text = std::string(fields[0]);
    if (trim(row.text).empty()) {
      throw ParseError(ErrorCode::kParseError, line_no, "empty text");
    }
    for (auto q : kAllQuestions) {
      auto value = trim(fields[index_of(q) + 1]);
      if (value.empty()) continue;
      try {
        row.labels[index_of(q)] = canonical_label(q, Task::kMulticlass, value);
      } catch (const Error& e) {
        throw ParseError(ErrorCode::kUnknownLabel, line_no,
                         std::string(code(q)) + " label '" + std::string(value) + "'");
      }
    }
    ds.rows.push_back(std::move(row));
  }
  return ds;
}

LabeledDataset load_dataset(const std::filesystem::path& path, Language lang) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open dataset " + path.string());
  return parse_dataset(in, lang);
}

std::string_view code(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "?";
}

std::array<std::size_t, 3> SplitAssignment::sizes() const {
  std::array<std::size_t, 3> s{};
  for (auto a : assignment) ++s[static_cast<std::size_t>(a)];
  return s;
}

nlohmann::json SplitAssignment::to_json() const {
  std::vector<std::string_view> names;
  names.reserve(assignment.size());
  for (auto a : assignment) names.push_back(code(a));
  auto s = sizes();
  return {{"seed", seed},
          {"sizes", {{"train", s[0]}, {"dev", s[1]}, {"test", s[2]}}},
          {"assignment", names}};
}

SplitAssignment SplitAssignment::from_json(const nlohmann::json& j) {
  SplitAssignment out;
  try {
    out.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& name : j.at("assignment")) {
      auto s = name.get<std::string>();
      if (s == "train") out.assignment.push_back(Split::kTrain);
      else if (s == "dev") out.assignment.push_back(Split::kDev);
      else if (s == "test") out.assignment.push_back(Split::kTest);
      else throw Error(ErrorCode::kFormatError, "unknown split '" + s + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("split manifest: ") + e.what());
  }
  return out;
}

SplitAssignment stratified_split(const LabeledDataset& dataset, std::uint64_t seed,
                                 const SplitRatios& ratios) {
  const std::size_t n = dataset.rows.size();
  const std::array<double, 3> r = {ratios.train, ratios.dev, ratios.test};
  const double r_sum = r[0] + r[1] + r[2];

  // Integer split sizes by largest remainder.
  std::array<std::size_t, 3> capacity{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t j = 0; j < 3; ++j) {
    const double exact = static_cast<double>(n) * r[j] / r_sum;
    capacity[j] = static_cast<std::size_t>(std::floor(exact));
    remainder[j] = exact - static_cast<double>(capacity[j]);
    assigned += capacity[j];
  }
  while (assigned < n) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < 3; ++j) {
      if (remainder[j] > remainder[best]) best = j;
    }
    ++capacity[best];
    remainder[best] = -1.0;
    ++assigned;
  }

  const std::size_t n_keys = total_label_keys();
  std::vector<std::vector<std::size_t>> row_keys(n);
  std::vector<std::vector<std::size_t>> rows_with(n_keys);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto q : kAllQuestions) {
      const auto& label = dataset.rows[i].labels[index_of(q)];
      if (!label) continue;
      auto key = label_key(q, *label);
      row_keys[i].push_back(key);
      rows_with[key].push_back(i);
    }
  }

  std::mt19937_64 rng(seed);
  // Seeded visiting order of rows inside each label pool.
  std::vector<std::size_t> rank(n);
  {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng() % i]);
    for (std::size_t p = 0; p < n; ++p) rank[perm[p]] = p;
  }
  for (auto& pool : rows_with) {
    std::sort(pool.begin(), pool.end(),
              [&](std::size_t a, std::size_t b) { return rank[a] < rank[b]; });
  }

  std::vector<std::array<double, 3>> demand(n_keys);
  std::vector<std::size_t> remaining(n_keys);
  for (std::size_t k = 0; k < n_keys; ++k) {
    remaining[k] = rows_with[k].size();
    for (std::size_t j = 0; j < 3; ++j) {
      demand[k][j] = static_cast<double>(rows_with[k].size()) * r[j] / r_sum;
    }
  }

  SplitAssignment out;
  out.seed = seed;
  out.assignment.assign(n, Split::kTrain);
  std::vector<bool> done(n, false);

  // Each label contributes (count - quota)^2 / quota per split, weighted by
  // the square root of its size so one large label is not outvoted by many
  // tiny ones. Adding a row to split j changes that term by
  // (1 - 2 * demand) / quota.
  std::vector<double> label_weight(n_keys);
  for (std::size_t k = 0; k < n_keys; ++k) {
    label_weight[k] = std::sqrt(static_cast<double>(rows_with[k].size()));
  }
  auto gap_change = [&](std::size_t key, std::size_t j) {
    const double quota = static_cast<double>(rows_with[key].size()) * r[j] / r_sum;
    return quota > 0 ? (1.0 - 2.0 * demand[key][j]) / quota : 0.0;
  };

  // Places a row in the split where the summed gap over all of the row's
  // labels drops the most, so serving the rarest label does not starve
  // the row's other labels.
  auto place = [&](std::size_t row) {
    std::vector<std::size_t> ties;
    std::array<double, 3> score{};
    for (std::size_t j = 0; j < 3; ++j) {
      for (auto key : row_keys[row]) score[j] -= label_weight[key] * gap_change(key, j);
    }
    for (std::size_t j = 0; j < 3; ++j) {
      if (capacity[j] == 0) continue;
      if (ties.empty()) {
        ties.push_back(j);
        continue;
      }
      const std::size_t t = ties.front();
      if (score[j] > score[t] || (score[j] == score[t] && capacity[j] > capacity[t])) {
        ties.assign(1, j);
      } else if (score[j] == score[t] && capacity[j] == capacity[t]) {
        ties.push_back(j);
      }
    }
    const std::size_t j = ties.size() == 1 ? ties[0] : ties[rng() % ties.size()];
    out.assignment[row] = static_cast<Split>(j);
    done[row] = true;
    --capacity[j];
    for (auto key : row_keys[row]) {
      demand[key][j] -= 1.0;
      --remaining[key];
    }
  };

  while (true) {
    std::size_t rarest = n_keys;
    for (std::size_t k = 0; k < n_keys; ++k) {
      if (remaining[k] > 0 && (rarest == n_keys || remaining[k] < remaining[rarest])) {
        rarest = k;
      }
    }
    if (rarest == n_keys) break;
    for (auto row : rows_with[rarest]) {
      if (!done[row]) place(row);
    }
  }

  // Unannotated rows only fill remaining capacity.
  std::vector<std::size_t> leftovers;
  for (std::size_t i = 0; i < n; ++i) {
    if (!done[i]) leftovers.push_back(i);
  }
  std::sort(leftovers.begin(), leftovers.end(),
            [&](std::size_t a, std::size_t b) { return rank[a] < rank[b]; });
  for (auto row : leftovers) place(row);
  return out;
}

LabeledTexts select(const LabeledDataset& dataset, const SplitAssignment& splits,
                    Split split, QuestionId q, Task task) {
  if (splits.assignment.size() != dataset.rows.size()) {
    throw Error(ErrorCode::kLengthMismatch, "split assignment does not match dataset");
  }
  LabeledTexts out;
  for (std::size_t i = 0; i < dataset.rows.size(); ++i) {
    const auto& label = dataset.rows[i].labels[index_of(q)];
    if (!label || splits.assignment[i] != split) continue;
    out.texts.push_back(normalize(dataset.rows[i].text));
    out.labels.push_back(task == Task::kBinary ? std::string(to_binary(q, *label)) : *label);
  }
  return out;
}

QuestionTrainingData training_data(const LabeledDataset& dataset,
                                   const SplitAssignment& splits, QuestionId q,
                                   Task task) {
  return {select(dataset, splits, Split::kTrain, q, task),
          select(dataset, splits, Split::kDev, q, task)};
}

std::vector<QuestionId> reported_questions(Task task) {
  std::vector<QuestionId> out(kAllQuestions.begin(), kAllQuestions.end());
  if (task == Task::kMulticlass) out.erase(out.begin());
  return out;
}

Report report(const ModelLookup& models, const LabeledDataset& dataset,
              const SplitAssignment& splits) {
  Report rep;
  rep.language = dataset.language;
  for (auto task : kAllTasks) {
    for (auto q : reported_questions(task)) {
      const QuestionModel* model = models(q, task);
      if (!model) {
        throw Error(ErrorCode::kMissingModel, std::string(code(q)) + "/" +
                                                  std::string(code(task)));
      }
      ReportRow row;
      row.task = task;
      row.question = q;
      row.n_classes = labels(q, task).size();
      auto train = select(dataset, splits, Split::kTrain, q, task);
      auto test = select(dataset, splits, Split::kTest, q, task);
      row.n_test = test.labels.size();
      if (test.labels.empty() || train.labels.empty()) {
        row.error = std::string(to_string(ErrorCode::kMissingData));
        rep.rows.push_back(std::move(row));
        continue;
      }
      const auto order = labels(q, task);
      row.majority_f1 = majority_baseline(train.labels, test.labels, order).weighted_f1;
      std::vector<std::string> pred;
      pred.reserve(test.texts.size());
      for (const auto& t : test.texts) pred.push_back(predict(*model, t).label);
      row.svm_f1 = weighted_metrics(test.labels, pred).weighted_f1;
      rep.rows.push_back(std::move(row));
    }
  }
  return rep;
}

std::string Report::to_text() const {
  std::ostringstream out;
  out << "Weighted F1 (%) on the test split, language " << code(language) << "\n";
  auto cell = [](const std::optional<double>& v) {
    std::ostringstream s;
    if (v) s << std::fixed << std::setprecision(1) << *v * 100.0;
    else s << "-";
    return s.str();
  };
  for (auto task : kAllTasks) {
    out << "\n" << (task == Task::kBinary ? "Binary" : "Multiclass") << "\n";
    out << std::left << std::setw(40) << "Question" << std::right << std::setw(5) << "Cl."
        << std::setw(8) << "Maj" << std::setw(8) << "SVM" << std::setw(8) << "N" << "\n";
    for (const auto& row : rows) {
      if (row.task != task) continue;
      std::string name = std::string(code(row.question)) + ": " +
                         std::string(question(row.question).name);
      out << std::left << std::setw(40) << name << std::right << std::setw(5)
          << row.n_classes << std::setw(8) << cell(row.majority_f1) << std::setw(8)
          << cell(row.svm_f1) << std::setw(8) << row.n_test;
      if (!row.error.empty()) out << "  " << row.error;
      out << "\n";
    }
  }
  return out.str();
}

nlohmann::json Report::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json r = {{"task", code(row.task)},
                        {"question", code(row.question)},
                        {"classes", row.n_classes},
                        {"n_test", row.n_test},
                        {"majority_weighted_f1", nullptr},
                        {"svm_weighted_f1", nullptr}};
    if (row.majority_f1) r["majority_weighted_f1"] = *row.majority_f1;
    if (row.svm_f1) r["svm_weighted_f1"] = *row.svm_f1;
    if (!row.error.empty()) r["error"] = row.error;
    rows_json.push_back(std::move(r));
  }
  return {{"language", code(language)}, {"rows", std::move(rows_json)}};
}

}  // namespace infodemic
