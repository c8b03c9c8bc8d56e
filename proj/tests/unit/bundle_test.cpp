#include <gtest/gtest.h>

#include <fstream>
#include <nlohmann/json.hpp>

#include "infodemic/error.h"
#include "infodemic/eval.h"
#include "infodemic/models.h"
#include "infodemic/svm.h"
#include "synthetic.h"

namespace infodemic {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

QuestionModel trained(QuestionId q, Task task) {
  static const auto ds = testing::synthetic_dataset(Language::kDutch, {.rows = 200, .seed = 2});
  static const auto splits = stratified_split(ds, 2);
  return train_question(q, task, training_data(ds, splits, q, task));
}

ErrorCode load_error(const fs::path& dir) {
  try {
    load_bundle(dir);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIoError;
}

TEST(Bundle, PathLayout) {
  EXPECT_EQ(bundle_path("m", Language::kArabic, QuestionId::kQ6, Task::kMulticlass),
            fs::path("m") / "ar" / "Q6_multiclass");
}

TEST(Bundle, RoundTripPredictsIdentically) {
  TempDir dir;
  for (auto task : kAllTasks) {
    auto m = trained(QuestionId::kQ7, task);
    auto path = bundle_path(dir.path(), Language::kDutch, QuestionId::kQ7, task);
    save_bundle(m, Language::kDutch, path);
    EXPECT_TRUE(fs::exists(path / "manifest.json"));
    auto back = load_bundle(path);
    EXPECT_EQ(back.labels, m.labels);
    EXPECT_EQ(back.c, m.c);
    EXPECT_EQ(back.absent_labels, m.absent_labels);
    ASSERT_EQ(back.classifiers.size(), m.classifiers.size());
    for (std::size_t i = 0; i < m.classifiers.size(); ++i) {
      EXPECT_EQ(back.classifiers[i].weights, m.classifiers[i].weights);
      EXPECT_EQ(back.classifiers[i].platt_a, m.classifiers[i].platt_a);
    }
    for (const auto& text : testing::seed_sentences(Language::kDutch)) {
      auto a = predict(m, text), b = predict(back, text);
      EXPECT_EQ(a.label, b.label);
      for (std::size_t k = 0; k < a.label_dictionary.size(); ++k) {
        EXPECT_NEAR(a.label_dictionary[k].second, b.label_dictionary[k].second, 1e-12);
      }
    }
  }
}

TEST(Bundle, ManifestContents) {
  TempDir dir;
  auto m = trained(QuestionId::kQ2, Task::kBinary);
  save_bundle(m, Language::kDutch, dir.path());
  std::ifstream in(dir.path() / "manifest.json");
  auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j["schema_version"], kBundleSchemaVersion);
  EXPECT_EQ(j["question"], "Q2");
  EXPECT_EQ(j["task"], "binary");
  EXPECT_EQ(j["language"], "nl");
  EXPECT_EQ(j["labels"], (std::vector<std::string>{"no", "yes"}));
  EXPECT_TRUE(j.contains("C"));
  EXPECT_TRUE(j["metrics"].contains("dev"));
}

TEST(Bundle, Errors) {
  TempDir dir;
  EXPECT_EQ(load_error(dir.path() / "absent"), ErrorCode::kMissingModel);

  auto m = trained(QuestionId::kQ3, Task::kMulticlass);
  save_bundle(m, Language::kDutch, dir.path());
  auto manifest = dir.path() / "manifest.json";
  auto edit = [&](auto change) {
    std::ifstream in(manifest);
    auto j = nlohmann::json::parse(in);
    in.close();
    change(j);
    std::ofstream(manifest) << j.dump();
  };

  edit([](nlohmann::json& j) { j["schema_version"] = 99; });
  EXPECT_EQ(load_error(dir.path()), ErrorCode::kFormatError);

  save_bundle(m, Language::kDutch, dir.path());
  edit([](nlohmann::json& j) { std::swap(j["labels"][0], j["labels"][1]); });
  EXPECT_EQ(load_error(dir.path()), ErrorCode::kFormatError);

  save_bundle(m, Language::kDutch, dir.path());
  std::ofstream(dir.path() / "classifiers.json") << "[]";
  EXPECT_EQ(load_error(dir.path()), ErrorCode::kFormatError);
}

TEST(ModelRegistry, LoadsOnlyCompleteSets) {
  TempDir dir;
  for (auto q : kAllQuestions) {
    auto m = trained(q, Task::kBinary);
    save_bundle(m, Language::kDutch, bundle_path(dir.path(), Language::kDutch, q, Task::kBinary));
  }
  // A lone multiclass bundle does not make a set.
  save_bundle(trained(QuestionId::kQ1, Task::kMulticlass), Language::kDutch,
              bundle_path(dir.path(), Language::kDutch, QuestionId::kQ1, Task::kMulticlass));

  auto reg = ModelRegistry::load(dir.path());
  EXPECT_TRUE(reg.has(Language::kDutch, Task::kBinary));
  EXPECT_FALSE(reg.has(Language::kDutch, Task::kMulticlass));
  EXPECT_FALSE(reg.has(Language::kEnglish, Task::kBinary));
  auto preds = reg.classify(normalize("wat een dag"), Language::kDutch, Task::kBinary);
  ASSERT_EQ(preds.size(), 7u);
  for (std::size_t i = 0; i < 7; ++i) EXPECT_EQ(preds[i].question, kAllQuestions[i]);
  try {
    reg.classify(normalize("x"), Language::kDutch, Task::kMulticlass);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingModel);
  }
  EXPECT_TRUE(ModelRegistry::load(dir.path() / "nothing").empty());
}

TEST(ModelRegistry, RejectsOutOfOrderSet) {
  ModelSet set;
  for (auto q : kAllQuestions) set[index_of(q)] = trained(q, Task::kBinary);
  std::swap(set[0], set[1]);
  ModelRegistry reg;
  EXPECT_THROW(reg.add(Language::kDutch, Task::kBinary, std::move(set)), Error);
}

}  // namespace
}  // namespace infodemic
