#include "infodemic/features.h"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <set>

#include "infodemic/error.h"

namespace infodemic {

SparseVector::SparseVector(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  for (const auto& [index, weight] : entries) {
    if (!entries_.empty() && entries_.back().first == index) {
      entries_.back().second += weight;
    } else {
      entries_.emplace_back(index, weight);
    }
  }
  std::erase_if(entries_, [](const Entry& e) { return e.second == 0.0; });
}

double SparseVector::squared_norm() const {
  double sum = 0.0;
  for (const auto& [_, w] : entries_) sum += w * w;
  return sum;
}

double SparseVector::norm() const { return std::sqrt(squared_norm()); }

double SparseVector::dot(std::span<const double> dense) const {
  double sum = 0.0;
  for (const auto& [index, w] : entries_) {
    if (index < dense.size()) sum += w * dense[index];
  }
  return sum;
}

std::vector<std::string> word_ngrams(const NormalizedText& text,
                                     std::size_t min_order,
                                     std::size_t max_order) {
  std::vector<std::string> grams;
  const auto& tokens = text.tokens;
  for (std::size_t n = std::max<std::size_t>(min_order, 1); n <= max_order; ++n) {
    if (tokens.size() < n) break;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      std::string gram = tokens[i];
      for (std::size_t k = 1; k < n; ++k) {
        gram.push_back(' ');
        gram += tokens[i + k];
      }
      grams.push_back(std::move(gram));
    }
  }
  return grams;
}

TfidfModel TfidfModel::fit(std::span<const NormalizedText> corpus,
                           const TfidfOptions& options) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "cannot fit on no documents");

  std::map<std::string, std::size_t> df;
  for (const auto& doc : corpus) {
    auto grams = word_ngrams(doc, options.min_order, options.max_order);
    std::set<std::string> unique(grams.begin(), grams.end());
    for (const auto& g : unique) ++df[g];
  }

  TfidfModel model;
  model.options_ = options;
  model.n_documents_ = corpus.size();
  const double n = static_cast<double>(corpus.size());
  // std::map iteration gives a deterministic lexicographic index order.
  for (const auto& [term, count] : df) {
    if (count < options.min_df) continue;
    auto index = static_cast<std::uint32_t>(model.terms_.size());
    model.terms_.push_back(term);
    model.df_.push_back(count);
    model.idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
    model.index_.emplace(term, index);
  }
  return model;
}

std::optional<std::uint32_t> TfidfModel::index_of(const std::string& term) const {
  auto it = index_.find(term);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SparseVector TfidfModel::transform(const NormalizedText& text) const {
  std::map<std::uint32_t, double> counts;
  for (const auto& gram : word_ngrams(text, options_.min_order, options_.max_order)) {
    auto it = index_.find(gram);
    if (it != index_.end()) counts[it->second] += 1.0;
  }
  std::vector<SparseVector::Entry> entries;
  entries.reserve(counts.size());
  double sq = 0.0;
  for (const auto& [index, count] : counts) {
    double tf = options_.sublinear_tf ? 1.0 + std::log(count) : count;
    double w = tf * idf_[index];
    entries.emplace_back(index, w);
    sq += w * w;
  }
  if (sq > 0.0) {
    double inv = 1.0 / std::sqrt(sq);
    for (auto& e : entries) e.second *= inv;
  }
  return SparseVector(std::move(entries));
}

nlohmann::json TfidfModel::to_json() const {
  return {{"min_df", options_.min_df},
          {"min_order", options_.min_order},
          {"max_order", options_.max_order},
          {"sublinear_tf", options_.sublinear_tf},
          {"n_documents", n_documents_},
          {"terms", terms_},
          {"df", df_},
          {"idf", idf_}};
}

TfidfModel TfidfModel::from_json(const nlohmann::json& j) {
  TfidfModel model;
  try {
    model.options_.min_df = j.at("min_df").get<std::size_t>();
    model.options_.min_order = j.at("min_order").get<std::size_t>();
    model.options_.max_order = j.at("max_order").get<std::size_t>();
    model.options_.sublinear_tf = j.at("sublinear_tf").get<bool>();
    model.n_documents_ = j.at("n_documents").get<std::size_t>();
    model.terms_ = j.at("terms").get<std::vector<std::string>>();
    model.df_ = j.at("df").get<std::vector<std::size_t>>();
    model.idf_ = j.at("idf").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("tfidf model: ") + e.what());
  }
  if (model.df_.size() != model.terms_.size() || model.idf_.size() != model.terms_.size()) {
    throw Error(ErrorCode::kFormatError, "tfidf model: array lengths differ");
  }
  for (std::size_t i = 0; i < model.terms_.size(); ++i) {
    model.index_.emplace(model.terms_[i], static_cast<std::uint32_t>(i));
  }
  return model;
}

}  // namespace infodemic
