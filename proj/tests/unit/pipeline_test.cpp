#include <gtest/gtest.h>

#include <atomic>
#include <sstream>

#include "infodemic/error.h"
#include "infodemic/pipeline.h"
#include "synthetic.h"

namespace infodemic {
namespace {

using testing::TempDir;

// Labels every question with its first schema label and records what it saw.
class FakeClassifier : public TextClassifier {
 public:
  explicit FakeClassifier(std::vector<Language> langs) : langs_(std::move(langs)) {}

  bool has(Language lang, Task) const override {
    return std::find(langs_.begin(), langs_.end(), lang) != langs_.end();
  }
  std::vector<Prediction> classify(const NormalizedText& text, Language lang,
                                   Task task) const override {
    if (!has(lang, task)) throw Error(ErrorCode::kMissingModel, "fake");
    ++calls;
    last_text = text.normalized;
    std::vector<Prediction> out;
    for (auto q : kAllQuestions) {
      auto ls = labels(q, task);
      Prediction p{q, ls.front(), 1.0, {}};
      for (const auto& l : ls) p.label_dictionary.emplace_back(l, l == ls.front() ? 1.0 : 0.0);
      out.push_back(p);
    }
    return out;
  }

  mutable std::atomic<int> calls{0};
  mutable std::string last_text;

 private:
  std::vector<Language> langs_;
};

const std::vector<LanguageProfile>& profiles() {
  static const auto p = train_seed_profiles(testing::data_dir() / "langid");
  return p;
}

TEST(Ingest, TenValidRecords) {
  TempDir dir;
  auto store = EmbeddedStore::open(dir.path());
  FakeClassifier models({Language::kEnglish});
  auto s = ingest_file(testing::fixtures_dir() / "ingest_en_10.jsonl", Language::kEnglish, models,
                       profiles(), *store);
  EXPECT_EQ(s.read, 10u);
  EXPECT_EQ(s.accepted, 10u);
  EXPECT_EQ(store->size(), 10u);
  EXPECT_EQ(models.calls, 20);  // both tasks per record
}

TEST(Ingest, FilterRules) {
  TempDir dir;
  auto store = EmbeddedStore::open(dir.path());
  FakeClassifier models({Language::kEnglish});
  auto s = ingest_file(testing::fixtures_dir() / "ingest_filters.jsonl", Language::kEnglish,
                       models, profiles(), *store);
  EXPECT_EQ(s.read, 7u);
  EXPECT_EQ(s.accepted, 1u);
  EXPECT_EQ(s.dropped_short, 3u);     // 4 tokens, truncated text, placeholders
  EXPECT_EQ(s.dropped_language, 1u);  // Dutch despite the declared tag
  EXPECT_EQ(s.failed, 2u);            // empty text, malformed JSON
  auto records = store->query({});
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].id, "full");
  EXPECT_EQ(records[0].raw_text, "Wash your hands often with soap and water for twenty seconds");
}

TEST(Ingest, EnglishIntoArabicPipelineIsDropped) {
  TempDir dir;
  auto store = EmbeddedStore::open(dir.path());
  FakeClassifier models({Language::kArabic});
  auto s = ingest_file(testing::fixtures_dir() / "ingest_en_10.jsonl", Language::kArabic, models,
                       profiles(), *store);
  EXPECT_EQ(s.dropped_language, 10u);
  EXPECT_EQ(store->size(), 0u);
}

TEST(Ingest, PlaceholdersDoNotCountAsLanguage) {
  TempDir dir;
  auto store = EmbeddedStore::open(dir.path());
  FakeClassifier models({Language::kEnglish});
  std::istringstream in(testing::tweet_json("1", "@a @b @c https://x.y 2020", "2020-03-01"));
  auto s = ingest(in, Language::kEnglish, models, profiles(), *store);
  EXPECT_EQ(s.dropped_language, 1u);
  EXPECT_EQ(detection_text(normalize("@a hello https://x.y world")), "hello world");
}

TEST(Ingest, IdempotentOnId) {
  TempDir dir;
  auto store = EmbeddedStore::open(dir.path());
  FakeClassifier models({Language::kEnglish});
  const auto path = testing::fixtures_dir() / "ingest_en_10.jsonl";
  ingest_file(path, Language::kEnglish, models, profiles(), *store);
  ingest_file(path, Language::kEnglish, models, profiles(), *store, {.batch_size = 3});
  EXPECT_EQ(store->size(), 10u);
}

TEST(Ingest, StoresBothTasks) {
  TempDir dir;
  auto store = EmbeddedStore::open(dir.path());
  FakeClassifier models({Language::kEnglish});
  ingest_file(testing::fixtures_dir() / "ingest_en_10.jsonl", Language::kEnglish, models,
              profiles(), *store);
  auto r = store->query({}).front();
  for (auto q : kAllQuestions) {
    EXPECT_EQ(r.prediction(q, Task::kBinary).label, "no");
    EXPECT_EQ(r.prediction(q, Task::kMulticlass).label, labels(q, Task::kMulticlass).front());
  }
}

TEST(Ingest, MissingModelsAbort) {
  TempDir dir;
  auto store = EmbeddedStore::open(dir.path());
  FakeClassifier models({Language::kDutch});
  std::istringstream in("");
  try {
    ingest(in, Language::kEnglish, models, profiles(), *store);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingModel);
  }
}

TEST(Ingest, UnreadableSource) {
  TempDir dir;
  auto store = EmbeddedStore::open(dir.path());
  FakeClassifier models({Language::kEnglish});
  for (auto path : {dir.path() / "missing.jsonl", dir.path()}) {
    try {
      ingest_file(path, Language::kEnglish, models, profiles(), *store);
      ADD_FAILURE() << path;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kSourceUnreadable);
    }
  }
}

TEST(Ingest, WithTrainedModels) {
  TempDir dir;
  auto store = EmbeddedStore::open(dir.path());
  auto registry = testing::synthetic_registry({Language::kEnglish}, {.rows = 200});
  auto s = ingest_file(testing::fixtures_dir() / "ingest_en_10.jsonl", Language::kEnglish,
                       registry, profiles(), *store);
  EXPECT_EQ(s.accepted, 10u);
  for (const auto& r : store->query({})) {
    for (auto task : kAllTasks) {
      for (auto q : kAllQuestions) {
        auto ls = labels(q, task);
        const auto& p = r.prediction(q, task);
        EXPECT_NE(std::find(ls.begin(), ls.end(), p.label), ls.end());
        EXPECT_GT(p.probability, 0.0);
        EXPECT_LE(p.probability, 1.0);
      }
    }
  }
}

TEST(IngestSummary, Format) {
  IngestSummary s{10, 10, 0, 0, 0};
  EXPECT_EQ(to_string(s), "read=10 accepted=10 dropped_short=0 dropped_language=0 failed=0");
}

}  // namespace
}  // namespace infodemic
