#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "infodemic/language.h"
#include "infodemic/schema.h"
#include "infodemic/svm.h"

namespace infodemic {

// The seven per-question models serving one (language, task).
using ModelSet = std::array<QuestionModel, 7>;

// Anything that can label a text across all seven questions.
class TextClassifier {
 public:
  virtual ~TextClassifier() = default;
  virtual bool has(Language lang, Task task) const = 0;
  // Predictions ordered Q1..Q7. Throws Error{kMissingModel}.
  virtual std::vector<Prediction> classify(const NormalizedText& text, Language lang,
                                           Task task) const = 0;
};

// Immutable after construction; safe to share across threads.
class ModelRegistry : public TextClassifier {
 public:
  ModelRegistry() = default;

  // Loads every complete (language, task) set found under `model_dir`
  // (layout of bundle_path). Incomplete sets are skipped.
  static ModelRegistry load(const std::filesystem::path& model_dir);

  void add(Language lang, Task task, ModelSet models);

  bool has(Language lang, Task task) const override;
  std::vector<Prediction> classify(const NormalizedText& text, Language lang,
                                   Task task) const override;

  const QuestionModel* find(Language lang, QuestionId q, Task task) const;
  bool empty() const { return sets_.empty(); }
  std::vector<std::pair<Language, Task>> available() const;

 private:
  std::map<std::pair<Language, Task>, std::shared_ptr<const ModelSet>> sets_;
};

}  // namespace infodemic
