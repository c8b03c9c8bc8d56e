#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <nlohmann/json_fwd.hpp>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "infodemic/textprep.h"

namespace infodemic {

// Sorted (index, weight) pairs with no explicit zeros.
class SparseVector {
 public:
  using Entry = std::pair<std::uint32_t, double>;

  SparseVector() = default;
  // Entries may arrive unsorted; zero weights are dropped and duplicate
  // indices summed.
  explicit SparseVector(std::vector<Entry> entries);

  std::span<const Entry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  double norm() const;
  double dot(std::span<const double> dense) const;
  double squared_norm() const;

  bool operator==(const SparseVector&) const = default;

 private:
  std::vector<Entry> entries_;
};

struct TfidfOptions {
  std::size_t min_df = 2;
  std::size_t min_order = 1;
  std::size_t max_order = 2;
  bool sublinear_tf = false;
};

class TfidfModel {
 public:
  TfidfModel() = default;

  // Word n-grams of orders [min_order, max_order] kept when they occur in at
  // least min_df documents; idf(t) = ln((1 + N) / (1 + df(t))) + 1.
  // Throws Error{kEmptyCorpus} when `corpus` is empty.
  static TfidfModel fit(std::span<const NormalizedText> corpus,
                        const TfidfOptions& options = {});

  // Raw counts (or 1 + ln(count) with sublinear_tf) times idf, L2-normalized.
  // Out-of-vocabulary n-grams are ignored.
  SparseVector transform(const NormalizedText& text) const;

  std::size_t dimension() const { return terms_.size(); }
  std::size_t n_documents() const { return n_documents_; }
  const TfidfOptions& options() const { return options_; }

  // Terms in index order.
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<double>& idf() const { return idf_; }
  const std::vector<std::size_t>& document_frequency() const { return df_; }
  std::optional<std::uint32_t> index_of(const std::string& term) const;

  nlohmann::json to_json() const;
  static TfidfModel from_json(const nlohmann::json& j);

 private:
  TfidfOptions options_;
  std::size_t n_documents_ = 0;
  std::vector<std::string> terms_;
  std::vector<double> idf_;
  std::vector<std::size_t> df_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// Word n-grams of `text` joined by single spaces, in order of appearance.
std::vector<std::string> word_ngrams(const NormalizedText& text,
                                     std::size_t min_order,
                                     std::size_t max_order);

}  // namespace infodemic
