#include "infodemic/models.h"

#include <spdlog/spdlog.h>

#include "infodemic/error.h"

namespace infodemic {

ModelRegistry ModelRegistry::load(const std::filesystem::path& model_dir) {
  ModelRegistry registry;
  for (auto lang : kAllLanguages) {
    for (auto task : kAllTasks) {
      bool complete = true;
      for (auto q : kAllQuestions) {
        if (!std::filesystem::exists(bundle_path(model_dir, lang, q, task) / "manifest.json")) {
          complete = false;
          break;
        }
      }
      if (!complete) continue;
      ModelSet set;
      for (auto q : kAllQuestions) {
        set[index_of(q)] = load_bundle(bundle_path(model_dir, lang, q, task));
      }
      registry.add(lang, task, std::move(set));
      spdlog::debug("loaded {}/{} models", code(lang), code(task));
    }
  }
  return registry;
}

void ModelRegistry::add(Language lang, Task task, ModelSet models) {
  for (auto q : kAllQuestions) {
    const auto& m = models[index_of(q)];
    if (m.question != q || m.task != task) {
      throw Error(ErrorCode::kFormatError, "model set for " + std::string(code(lang)) + "/" +
                                               std::string(code(task)) + " is out of order");
    }
  }
  sets_[{lang, task}] = std::make_shared<const ModelSet>(std::move(models));
}

bool ModelRegistry::has(Language lang, Task task) const {
  return sets_.contains({lang, task});
}

std::vector<Prediction> ModelRegistry::classify(const NormalizedText& text, Language lang,
                                                Task task) const {
  auto it = sets_.find({lang, task});
  if (it == sets_.end()) {
    throw Error(ErrorCode::kMissingModel, "no models for " + std::string(code(lang)) + "/" +
                                              std::string(code(task)));
  }
  std::vector<Prediction> out;
  out.reserve(7);
  for (const auto& model : *it->second) out.push_back(predict(model, text));
  return out;
}

const QuestionModel* ModelRegistry::find(Language lang, QuestionId q, Task task) const {
  auto it = sets_.find({lang, task});
  if (it == sets_.end()) return nullptr;
  return &(*it->second)[index_of(q)];
}

std::vector<std::pair<Language, Task>> ModelRegistry::available() const {
  std::vector<std::pair<Language, Task>> out;
  for (const auto& [key, _] : sets_) out.push_back(key);
  return out;
}

}  // namespace infodemic
