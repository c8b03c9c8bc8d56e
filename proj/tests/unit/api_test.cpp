#include <gtest/gtest.h>
#include <httplib.h>

#include <set>
#include <thread>

#include "infodemic/api.h"
#include "infodemic/error.h"
#include "infodemic/http_server.h"
#include "infodemic/store.h"
#include "synthetic.h"

namespace infodemic {
namespace {

using namespace std::chrono_literals;
using nlohmann::json;

std::shared_ptr<const ModelRegistry> all_models() {
  static const auto registry = std::make_shared<const ModelRegistry>(
      testing::synthetic_registry({kAllLanguages.begin(), kAllLanguages.end()}, {.rows = 150}));
  return registry;
}

ApiResponse wait_for(const ClassificationService& service, const std::string& key,
                     const std::string& lang) {
  auto deadline = std::chrono::steady_clock::now() + 10s;
  for (;;) {
    auto r = service.fetch(key, lang);
    if (r.status != 202 || std::chrono::steady_clock::now() > deadline) return r;
    std::this_thread::sleep_for(5ms);
  }
}

TEST(RandomKey, HexAndUnique) {
  std::set<std::string> keys;
  for (int i = 0; i < 1000; ++i) {
    auto k = random_key();
    ASSERT_EQ(k.size(), 32u);
    EXPECT_EQ(k.find_first_not_of("0123456789abcdef"), std::string::npos);
    keys.insert(k);
  }
  EXPECT_EQ(keys.size(), 1000u);
}

TEST(JobStore, LifecycleAndExpiry) {
  auto now = std::chrono::system_clock::time_point{} + 1000h;
  JobStore jobs(24h, [&] { return now; });
  auto job = jobs.create("text", Language::kEnglish, Task::kBinary);
  EXPECT_EQ(jobs.get(job.key)->state, JobState::kPending);

  jobs.complete(job.key, {Prediction{}});
  EXPECT_EQ(jobs.get(job.key)->state, JobState::kDone);
  jobs.fail(job.key, "late failure");  // done is final
  EXPECT_EQ(jobs.get(job.key)->state, JobState::kDone);
  EXPECT_EQ(jobs.get(job.key)->result.size(), 1u);

  now += 23h;
  EXPECT_TRUE(jobs.get(job.key));
  now += 1h;
  EXPECT_FALSE(jobs.get(job.key));
  EXPECT_EQ(jobs.purge_expired(), 1u);
  EXPECT_EQ(jobs.size(), 0u);
  EXPECT_FALSE(jobs.get("unknown"));
}

TEST(Service, SubmitValidation) {
  ClassificationService service(all_models());
  auto err = [](const ApiResponse& r) { return r.body.value("error", ""); };
  auto r = service.submit("text", "fr", "binary");
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(err(r), "UnsupportedLanguage");
  r = service.submit("text", "en", "ternary");
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(err(r), "UnsupportedTask");
  r = service.submit("", "en", "multiclass");
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(err(r), "EmptyText");
  r = service.submit("{not json");
  EXPECT_EQ(err(r), "InvalidRequest");
  r = service.submit(R"({"text": 5, "language": "en", "task": "binary"})");
  EXPECT_EQ(err(r), "InvalidRequest");
  r = service.submit(R"({"text": "vaccine cures everything", "language": "en", "task": "binary"})");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body["message"], "success");
  EXPECT_EQ(r.body["key"].get<std::string>().size(), 32u);
}

TEST(Service, ModelsNotLoaded) {
  ClassificationService service(std::make_shared<ModelRegistry>());
  auto r = service.submit("text", "en", "binary");
  EXPECT_EQ(r.status, 503);
  EXPECT_EQ(r.body["error"], "ModelsNotLoaded");
}

TEST(Service, FetchStatuses) {
  ClassificationService service(all_models());
  EXPECT_EQ(service.fetch("deadbeef", "en").status, 404);
  auto key = service.submit("vaccine cures everything", "en", "binary").body["key"].get<std::string>();
  auto first = service.fetch(key, "en");
  EXPECT_TRUE(first.status == 200 || first.status == 202);
  EXPECT_EQ(service.fetch(key, "nl").status, 400);
  EXPECT_EQ(service.fetch(key, "nl").body["error"], "LanguageMismatch");
  EXPECT_EQ(service.fetch(key, std::nullopt).body["error"], "MissingLanguage");
  EXPECT_EQ(wait_for(service, key, "en").status, 200);
}

TEST(Service, RoundTripAllLanguagesAndTasks) {
  ClassificationService service(all_models(), {.workers = 3});
  for (auto lang : kAllLanguages) {
    const auto text = testing::seed_sentences(lang).front();
    for (auto task : kAllTasks) {
      auto sub = service.submit(text, std::string(code(lang)), std::string(code(task)));
      ASSERT_EQ(sub.status, 200);
      auto r = wait_for(service, sub.body["key"], std::string(code(lang)));
      ASSERT_EQ(r.status, 200) << r.body.dump();
      EXPECT_EQ(r.body["status"], "done");
      const auto& results = r.body["results"];
      ASSERT_EQ(results.size(), 7u);
      for (std::size_t i = 0; i < 7; ++i) {
        const auto q = kAllQuestions[i];
        EXPECT_EQ(results[i]["question"], code(q));
        auto ls = labels(q, task);
        const auto& dict = results[i]["labels"];
        ASSERT_EQ(dict.size(), ls.size());
        double sum = 0, best = 0;
        std::size_t k = 0;
        for (auto it = dict.begin(); it != dict.end(); ++it, ++k) {
          EXPECT_EQ(it.key(), ls[k]);
          sum += it.value().get<double>();
          best = std::max(best, it.value().get<double>());
        }
        EXPECT_NEAR(sum, 1.0, 1e-6);
        EXPECT_EQ(results[i]["probability"].get<double>(), best);
        EXPECT_EQ(dict[results[i]["label"].get<std::string>()].get<double>(), best);
      }
    }
  }
}

TEST(Service, IdenticalSubmissionsGiveDistinctKeysSameResults) {
  ClassificationService service(all_models());
  auto a = service.submit("masks help", "en", "multiclass").body["key"].get<std::string>();
  auto b = service.submit("masks help", "en", "multiclass").body["key"].get<std::string>();
  EXPECT_NE(a, b);
  EXPECT_EQ(wait_for(service, a, "en").body["results"], wait_for(service, b, "en").body["results"]);
}

TEST(Service, ExpiredJobIs404) {
  auto now = std::chrono::system_clock::now();
  ClassificationService service(all_models(), {.workers = 1, .ttl = 1h, .clock = [&] { return now; }});
  auto key = service.submit("masks help", "en", "binary").body["key"].get<std::string>();
  wait_for(service, key, "en");
  now += 2h;
  EXPECT_EQ(service.fetch(key, "en").status, 404);
}

// --- HTTP ------------------------------------------------------------------

class LiveServer : public ::testing::Test {
 protected:
  void SetUp() override {
    store_dir_ = std::make_unique<testing::TempDir>();
    store_ = EmbeddedStore::open(store_dir_->path());
    service_ = std::make_unique<ClassificationService>(all_models());
    server_ = std::make_unique<HttpServer>(*service_, store_.get());
    port_ = server_->bind("127.0.0.1", 0);
    thread_ = std::thread([this] { server_->listen(); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    for (int i = 0; i < 200 && !server_->running(); ++i) std::this_thread::sleep_for(5ms);
  }
  void TearDown() override {
    server_->stop();
    thread_.join();
  }

  std::unique_ptr<testing::TempDir> store_dir_;
  std::unique_ptr<EmbeddedStore> store_;
  std::unique_ptr<ClassificationService> service_;
  std::unique_ptr<HttpServer> server_;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
  int port_ = 0;
};

TEST_F(LiveServer, HealthAndSchema) {
  auto h = client_->Get("/api/v1/health");
  ASSERT_TRUE(h);
  EXPECT_EQ(h->status, 200);
  auto body = json::parse(h->body);
  EXPECT_EQ(body["status"], "ok");
  EXPECT_EQ(body["models"].size(), 8u);
  auto s = client_->Get("/api/v1/schema");
  ASSERT_TRUE(s);
  EXPECT_EQ(json::parse(s->body)["questions"].size(), 7u);
}

TEST_F(LiveServer, SubmitPollFetch) {
  json req = {{"text", "vaccine cures everything"}, {"language", "en"}, {"task", "multiclass"}};
  auto sub = client_->Post("/api/v1/classify", req.dump(), "application/json");
  ASSERT_TRUE(sub);
  ASSERT_EQ(sub->status, 200);
  auto key = json::parse(sub->body)["key"].get<std::string>();
  httplib::Result res;
  for (int i = 0; i < 2000; ++i) {
    res = client_->Get("/api/v1/classify/" + key + "?language=en");
    ASSERT_TRUE(res);
    if (res->status != 202) break;
    std::this_thread::sleep_for(5ms);
  }
  ASSERT_EQ(res->status, 200);
  auto body = json::parse(res->body);
  EXPECT_EQ(body["key"], key);
  EXPECT_EQ(body["results"].size(), 7u);
  EXPECT_EQ(body["results"][6]["labels"].size(), 10u);
}

TEST_F(LiveServer, ErrorStatuses) {
  auto r = client_->Get("/api/v1/classify/0123456789abcdef0123456789abcdef?language=en");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 404);
  json bad = {{"text", "hello"}, {"language", "fr"}, {"task", "binary"}};
  r = client_->Post("/api/v1/classify", bad.dump(), "application/json");
  EXPECT_EQ(r->status, 400);
  EXPECT_EQ(json::parse(r->body)["error"], "UnsupportedLanguage");
}

TEST_F(LiveServer, RecordsAndAggregates) {
  ClassifiedRecord rec;
  rec.id = "1";
  rec.created_at = *parse_timestamp("2020-03-01T10:00:00Z");
  rec.raw_text = "vaccine news";
  rec.normalized = "vaccine news";
  for (auto task : kAllTasks) {
    for (auto q : kAllQuestions) rec.prediction(q, task) = {labels(q, task).back(), 0.7};
  }
  store_->upsert({rec});

  auto r = client_->Get("/api/v1/records?keyword=vaccine&from=2020-03-01&to=2020-03-01");
  ASSERT_TRUE(r);
  ASSERT_EQ(r->status, 200);
  auto body = json::parse(r->body);
  EXPECT_EQ(body["total"], 1);
  EXPECT_EQ(body["records"][0]["id"], "1");

  r = client_->Get("/api/v1/aggregates?question=Q1&task=binary");
  ASSERT_EQ(r->status, 200);
  body = json::parse(r->body);
  ASSERT_EQ(body["buckets"].size(), 1u);
  EXPECT_EQ(body["buckets"][0]["date"], "2020-03-01");
  EXPECT_EQ(body["buckets"][0]["counts"]["yes"], 1);
  EXPECT_EQ(body["labels"], (json{"no", "yes"}));

  r = client_->Get("/api/v1/aggregates?from=2020-03-05&to=2020-03-01");
  EXPECT_EQ(r->status, 400);
  EXPECT_EQ(json::parse(r->body)["error"], "InvalidDateRange");
  r = client_->Get("/api/v1/aggregates?question=Q9");
  EXPECT_EQ(r->status, 400);
  r = client_->Get("/api/v1/records?language=fr");
  EXPECT_EQ(r->status, 400);
}

TEST(HttpServer, AnalyticsWithoutStoreIs503) {
  ClassificationService service(all_models());
  HttpServer server(service, nullptr);
  int port = server.bind("127.0.0.1", 0);
  std::thread t([&] { server.listen(); });
  for (int i = 0; i < 200 && !server.running(); ++i) std::this_thread::sleep_for(5ms);
  httplib::Client client("127.0.0.1", port);
  auto r = client.Get("/api/v1/aggregates");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->status, 503);
  server.stop();
  t.join();
}

TEST(HttpServer, BindFailureThrows) {
  ClassificationService service(all_models());
  HttpServer a(service, nullptr);
  int port = a.bind("127.0.0.1", 0);
  HttpServer b(service, nullptr);
  EXPECT_THROW(b.bind("127.0.0.1", port), Error);
}

}  // namespace
}  // namespace infodemic
