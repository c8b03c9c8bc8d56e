#include <gtest/gtest.h>
#include <httplib.h>

#include <csignal>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "infodemic/api.h"
#include "infodemic/cli.h"
#include "infodemic/http_server.h"
#include "synthetic.h"

namespace infodemic {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  args.insert(args.begin(), {"--log-level", "error"});
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// One trained English model directory shared by the tests below.
class CliWithModels : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir("cli");
    data_ = dir_->path() / "en.tsv";
    std::ofstream(data_) << testing::to_tsv(
        testing::synthetic_dataset(Language::kEnglish, {.rows = 200, .seed = 3}));
    models_ = dir_->path() / "models";
    train_result_ = new CliRun(run({"train", "--data", data_.string(), "--language", "en", "--out",
                                 models_.string(), "--c-grid", "0.1,1,10"}));
  }
  static void TearDownTestSuite() {
    delete train_result_;
    delete dir_;
  }

  static TempDir* dir_;
  static fs::path data_;
  static fs::path models_;
  static CliRun* train_result_;
};

TempDir* CliWithModels::dir_ = nullptr;
fs::path CliWithModels::data_;
fs::path CliWithModels::models_;
CliRun* CliWithModels::train_result_ = nullptr;

TEST_F(CliWithModels, TrainWritesFourteenBundles) {
  ASSERT_EQ(train_result_->code, kExitOk) << train_result_->err;
  std::size_t bundles = 0;
  for (const auto& e : fs::directory_iterator(models_ / "en")) {
    bundles += fs::exists(e.path() / "manifest.json");
  }
  EXPECT_EQ(bundles, 14u);
  EXPECT_TRUE(fs::exists(models_ / "en" / "split.json"));
  EXPECT_TRUE(fs::exists(models_ / "en" / "metrics.json"));
  for (auto lang : kAllLanguages) {
    EXPECT_TRUE(fs::exists(models_ / "langid" / (std::string(code(lang)) + ".profile")));
  }
}

TEST_F(CliWithModels, RetrainGivesByteIdenticalSplit) {
  TempDir other;
  auto r = run({"train", "--data", data_.string(), "-l", "en", "--out", other.path().string(),
                "--c-grid", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(read_file(other.path() / "en" / "split.json"), read_file(models_ / "en" / "split.json"));
}

TEST_F(CliWithModels, EvaluateReportsBothPanels) {
  auto r = run({"evaluate", "--data", data_.string(), "-l", "en", "--models", models_.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("Binary"), std::string::npos);
  EXPECT_NE(r.out.find("Multiclass"), std::string::npos);

  auto j = run({"evaluate", "--data", data_.string(), "-l", "en", "--models", models_.string(),
                "--format", "json"});
  ASSERT_EQ(j.code, kExitOk);
  auto report = nlohmann::json::parse(j.out);
  ASSERT_FALSE(report["rows"].empty());
  for (const auto& row : report["rows"]) {
    ASSERT_FALSE(row["svm_weighted_f1"].is_null()) << row.dump();
    EXPECT_GE(row["svm_weighted_f1"].get<double>(), row["majority_weighted_f1"].get<double>());
  }
}

TEST_F(CliWithModels, EvaluateWithoutModelsIsEnvironmentError) {
  TempDir empty;
  auto r = run({"evaluate", "--data", data_.string(), "-l", "en", "--models", empty.path().string()});
  EXPECT_EQ(r.code, kExitEnvironment);
}

TEST_F(CliWithModels, IngestThenQuery) {
  TempDir store;
  auto r = run({"ingest", "--source", (testing::fixtures_dir() / "ingest_en_10.jsonl").string(),
                "-l", "en", "--store", store.path().string(), "--models", models_.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("accepted=10"), std::string::npos) << r.out;

  auto q = run({"query", "--store", store.path().string()});
  ASSERT_EQ(q.code, kExitOk);
  EXPECT_NE(q.out.find("records: 10"), std::string::npos) << q.out;
  EXPECT_NE(q.out.find("2020-03-10"), std::string::npos);

  auto k = run({"query", "--store", store.path().string(), "--keyword", "vaccine", "--format",
                "json"});
  ASSERT_EQ(k.code, kExitOk);
  EXPECT_EQ(nlohmann::json::parse(k.out)["records"], 1);
}

TEST_F(CliWithModels, IngestForLanguageWithoutModels) {
  TempDir store;
  auto r = run({"ingest", "--source", (testing::fixtures_dir() / "ingest_en_10.jsonl").string(),
                "-l", "ar", "--store", store.path().string(), "--models", models_.string()});
  EXPECT_EQ(r.code, kExitEnvironment);
}

TEST_F(CliWithModels, ServeAnswersHealthAndStopsOnSignal) {
  int port;
  {
    ClassificationService probe(std::make_shared<ModelRegistry>());
    HttpServer s(probe, nullptr);
    port = s.bind("127.0.0.1", 0);
  }
  CliRun result{};
  std::thread t([&] {
    result = run({"serve", "--models", models_.string(), "--port", std::to_string(port)});
  });
  httplib::Client client("127.0.0.1", port);
  httplib::Result health;
  for (int i = 0; i < 400 && !(health = client.Get("/api/v1/health")); ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_EQ(nlohmann::json::parse(health->body)["status"], "ok");
  std::raise(SIGINT);
  t.join();
  EXPECT_EQ(result.code, kExitOk);
  EXPECT_NE(result.out.find("listening on"), std::string::npos);
}

TEST_F(CliWithModels, ServeBindFailure) {
  ClassificationService probe(std::make_shared<ModelRegistry>());
  HttpServer holder(probe, nullptr);
  int port = holder.bind("127.0.0.1", 0);
  auto r = run({"serve", "--models", models_.string(), "--port", std::to_string(port)});
  EXPECT_EQ(r.code, kExitEnvironment);
}

TEST(Cli, ServeWithEmptyModelDir) {
  TempDir empty;
  auto r = run({"serve", "--models", empty.path().string(), "--port", "0"});
  EXPECT_EQ(r.code, kExitEnvironment);
}

TEST(Cli, TrainMissingFileNamesPath) {
  auto r = run({"train", "--data", "/nonexistent/tweets.tsv", "-l", "en"});
  EXPECT_EQ(r.code, kExitInput);
  EXPECT_NE(r.err.find("/nonexistent/tweets.tsv"), std::string::npos);
}

TEST(Cli, TrainBadLabelIsInputError) {
  TempDir dir;
  std::ofstream(dir.path() / "bad.tsv") << "text\tyes\tmaybe\t\t\t\t\t\n";
  auto r = run({"train", "--data", (dir.path() / "bad.tsv").string(), "-l", "en", "--out",
                (dir.path() / "m").string()});
  EXPECT_EQ(r.code, kExitInput);
}

TEST(Cli, QueryEmptyStore) {
  TempDir store;
  auto r = run({"query", "--store", store.path().string()});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("records: 0"), std::string::npos);
}

TEST(Cli, QueryInvalidDateIsUsage) {
  TempDir store;
  EXPECT_EQ(run({"query", "--store", store.path().string(), "--from", "2020-13-45"}).code, kExitUsage);
  EXPECT_EQ(run({"query", "--store", store.path().string(), "--from", "2020-03-05", "--to",
                 "2020-03-01"}).code,
            kExitUsage);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"train", "--bogus-flag"}).code, kExitUsage);
  EXPECT_EQ(run({"train", "--data", "x.tsv"}).code, kExitUsage);  // no language
  EXPECT_EQ(run({"train", "--data", "x.tsv", "-l", "fr"}).code, kExitUsage);
  EXPECT_EQ(run({"--config", "/nonexistent.json", "query"}).code, kExitUsage);
}

TEST(Cli, HelpListsSubcommands) {
  auto r = run({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  for (auto sub : {"train", "evaluate", "serve", "ingest", "query"}) {
    EXPECT_NE(r.out.find(sub), std::string::npos) << sub;
  }
}

TEST(Cli, ConfigFileWithFlagOverride) {
  TempDir dir;
  const auto a = dir.path() / "a", b = dir.path() / "b";
  std::ofstream(dir.path() / "c.json") << nlohmann::json{{"store_dir", a.string()}}.dump();
  auto r = run({"--config", (dir.path() / "c.json").string(), "query"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(a / "store.json"));
  r = run({"--config", (dir.path() / "c.json").string(), "query", "--store", b.string()});
  ASSERT_EQ(r.code, kExitOk);
  EXPECT_TRUE(fs::exists(b / "store.json"));
}

}  // namespace
}  // namespace infodemic
