#include "infodemic/cli.h"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <ostream>
#include <thread>

#include "infodemic/api.h"
#include "infodemic/error.h"
#include "infodemic/eval.h"
#include "infodemic/http_server.h"
#include "infodemic/langid.h"
#include "infodemic/models.h"
#include "infodemic/pipeline.h"
#include "infodemic/store.h"

#ifndef INFODEMIC_DEFAULT_LANGID_DIR
#define INFODEMIC_DEFAULT_LANGID_DIR "data/langid"
#endif

namespace infodemic {
namespace fs = std::filesystem;
namespace {

// Settings shared by every subcommand. Keys of the --config file use the
// field names below; command-line flags override them.
struct Config {
  std::string data;
  std::string language;
  std::string model_dir = "models";
  std::string store_dir = "store";
  std::string source;
  std::string keyword;
  std::string from;
  std::string to;
  std::string question = "Q1";
  std::string task = "binary";
  std::string format = "text";
  std::string host = "127.0.0.1";
  std::string ui_dir;
  std::string langid_corpus = INFODEMIC_DEFAULT_LANGID_DIR;
  std::string log_level = "info";
  std::vector<double> c_grid = {0.01, 0.1, 1.0, 10.0, 100.0};
  std::size_t min_df = 2;
  std::uint64_t seed = kDefaultSplitSeed;
  int port = 8080;
  std::size_t workers = 4;
  double ttl_hours = 24.0;
  std::size_t batch_size = 256;
  std::size_t limit = 0;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EnvironmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename T>
void take(const nlohmann::json& j, const char* key, T& dst) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) dst = it->get<T>();
}

void apply_config(const fs::path& path, Config& c) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
    take(j, "data", c.data);
    take(j, "language", c.language);
    take(j, "model_dir", c.model_dir);
    take(j, "store_dir", c.store_dir);
    take(j, "source", c.source);
    take(j, "keyword", c.keyword);
    take(j, "from", c.from);
    take(j, "to", c.to);
    take(j, "question", c.question);
    take(j, "task", c.task);
    take(j, "format", c.format);
    take(j, "host", c.host);
    take(j, "ui_dir", c.ui_dir);
    take(j, "langid_corpus", c.langid_corpus);
    take(j, "log_level", c.log_level);
    take(j, "c_grid", c.c_grid);
    take(j, "min_df", c.min_df);
    take(j, "seed", c.seed);
    take(j, "port", c.port);
    take(j, "workers", c.workers);
    take(j, "ttl_hours", c.ttl_hours);
    take(j, "batch_size", c.batch_size);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
}

// The config file is read before flag parsing so flags overwrite its values.
std::optional<std::string> find_config(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

Language require_language(const std::string& tag) {
  if (tag.empty()) throw UsageError("--language is required");
  auto lang = parse_language(tag);
  if (!lang) throw UsageError("unsupported language '" + tag + "' (expected ar, bg, nl or en)");
  return *lang;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string(flag) + " is required");
}

void setup_logging(const std::string& level) {
  auto logger = spdlog::get("infodemic");
  if (!logger) {
    logger = spdlog::stderr_color_mt("infodemic");
    spdlog::set_default_logger(logger);
  }
  auto lvl = spdlog::level::from_str(level);
  if (lvl == spdlog::level::off && level != "off") throw UsageError("unknown log level " + level);
  spdlog::set_level(lvl);
}

LabeledDataset read_dataset(const std::string& path, Language lang) {
  if (!fs::is_regular_file(path)) {
    throw InputError("cannot read dataset " + path);
  }
  return load_dataset(path, lang);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw EnvironmentError("cannot write " + path.string());
}

std::vector<LanguageProfile> profiles_for(const Config& c) {
  const fs::path saved = fs::path(c.model_dir) / "langid";
  if (fs::exists(saved / "en.profile")) return load_profiles(saved);
  return train_seed_profiles(c.langid_corpus);
}

// ---------------------------------------------------------------------------

int cmd_train(const Config& c, std::ostream& out) {
  require(c.data, "--data");
  const Language lang = require_language(c.language);
  if (c.c_grid.empty()) throw UsageError("--c-grid needs at least one value");

  auto dataset = read_dataset(c.data, lang);
  auto splits = stratified_split(dataset, c.seed);
  const fs::path lang_dir = fs::path(c.model_dir) / code(lang);
  std::error_code ec;
  fs::create_directories(lang_dir, ec);
  if (ec) throw EnvironmentError("cannot create " + lang_dir.string());

  TrainOptions options;
  options.c_grid = c.c_grid;
  options.tfidf.min_df = c.min_df;

  nlohmann::json metrics = nlohmann::json::array();
  for (auto task : kAllTasks) {
    for (auto q : kAllQuestions) {
      auto model = train_question(q, task, training_data(dataset, splits, q, task), options);
      save_bundle(model, lang, bundle_path(c.model_dir, lang, q, task));
      nlohmann::json scores = nlohmann::json::array();
      for (const auto& [cv, f1] : model.c_scores) scores.push_back({{"C", cv}, {"f1", f1}});
      metrics.push_back({{"question", code(q)},
                         {"task", code(task)},
                         {"C", model.c},
                         {"c_scores", std::move(scores)},
                         {"dev", to_json(model.dev_metrics)}});
      spdlog::info("{} {} {}: C={} dev weighted-F1={:.4f}", code(lang), code(q), code(task),
                   model.c, model.dev_metrics.weighted_f1);
    }
  }

  write_file(lang_dir / "split.json", splits.to_json().dump(1) + "\n");
  nlohmann::json summary = {{"language", code(lang)}, {"seed", c.seed}, {"models", metrics}};
  write_file(lang_dir / "metrics.json", summary.dump(1) + "\n");

  if (fs::is_directory(c.langid_corpus)) {
    save_profiles(train_seed_profiles(c.langid_corpus), fs::path(c.model_dir) / "langid");
  } else {
    spdlog::warn("language-id corpus {} not found; profiles not written", c.langid_corpus);
  }

  auto sizes = splits.sizes();
  out << "trained 14 models for " << code(lang) << " (train=" << sizes[0]
      << " dev=" << sizes[1] << " test=" << sizes[2] << ") in " << c.model_dir << "\n";
  return kExitOk;
}

int cmd_evaluate(const Config& c, std::ostream& out) {
  require(c.data, "--data");
  const Language lang = require_language(c.language);
  auto dataset = read_dataset(c.data, lang);

  const fs::path split_file = fs::path(c.model_dir) / code(lang) / "split.json";
  SplitAssignment splits;
  if (fs::exists(split_file)) {
    std::ifstream in(split_file);
    try {
      splits = SplitAssignment::from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kFormatError, split_file.string() + ": " + e.what());
    }
    if (splits.assignment.size() != dataset.rows.size()) {
      throw Error(ErrorCode::kLengthMismatch,
                  split_file.string() + " covers " + std::to_string(splits.assignment.size()) +
                      " rows but the dataset has " + std::to_string(dataset.rows.size()));
    }
  } else {
    spdlog::warn("{} not found; recomputing the split with seed {}", split_file.string(), c.seed);
    splits = stratified_split(dataset, c.seed);
  }

  std::map<std::pair<QuestionId, Task>, QuestionModel> loaded;
  for (auto task : kAllTasks) {
    for (auto q : reported_questions(task)) {
      loaded.emplace(std::pair{q, task}, load_bundle(bundle_path(c.model_dir, lang, q, task)));
    }
  }
  ModelLookup lookup = [&](QuestionId q, Task t) -> const QuestionModel* {
    auto it = loaded.find({q, t});
    return it == loaded.end() ? nullptr : &it->second;
  };
  auto rep = report(lookup, dataset, splits);
  if (c.format == "json") {
    out << rep.to_json().dump(1) << "\n";
  } else {
    out << rep.to_text();
  }
  return kExitOk;
}

std::atomic<bool> g_stop_requested{false};

extern "C" void on_stop_signal(int) { g_stop_requested = true; }

int cmd_serve(const Config& c, std::ostream& out) {
  auto registry = std::make_shared<ModelRegistry>(ModelRegistry::load(c.model_dir));
  if (registry->empty()) throw EnvironmentError("no complete model sets in " + c.model_dir);

  std::unique_ptr<EmbeddedStore> store;
  if (!c.store_dir.empty() && fs::exists(fs::path(c.store_dir) / "store.json")) {
    store = EmbeddedStore::open(c.store_dir);
  }
  ServiceOptions options;
  options.workers = c.workers;
  options.ttl = std::chrono::seconds(static_cast<long long>(c.ttl_hours * 3600));
  ClassificationService service(registry, options);
  std::optional<fs::path> ui;
  if (!c.ui_dir.empty()) ui = c.ui_dir;
  HttpServer server(service, store.get(), ui);

  int port;
  try {
    port = server.bind(c.host, c.port);
  } catch (const Error& e) {
    throw EnvironmentError(e.what());
  }
  out << "listening on http://" << c.host << ":" << port << std::endl;

  g_stop_requested = false;
  auto old_int = std::signal(SIGINT, on_stop_signal);
  auto old_term = std::signal(SIGTERM, on_stop_signal);
  std::atomic<bool> done{false};
  std::thread watcher([&] {
    while (!done) {
      if (g_stop_requested) {
        server.stop();
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
  });
  server.listen();
  done = true;
  watcher.join();
  std::signal(SIGINT, old_int);
  std::signal(SIGTERM, old_term);
  return kExitOk;
}

int cmd_ingest(const Config& c, std::ostream& out) {
  require(c.source, "--source");
  const Language lang = require_language(c.language);
  auto registry = ModelRegistry::load(c.model_dir);
  for (auto task : kAllTasks) {
    if (!registry.has(lang, task)) {
      throw EnvironmentError("no " + std::string(code(task)) + " models for " +
                             std::string(code(lang)) + " in " + c.model_dir);
    }
  }
  auto profiles = profiles_for(c);
  auto store = EmbeddedStore::open(c.store_dir);
  IngestOptions options;
  options.batch_size = c.batch_size;
  auto summary = ingest_file(c.source, lang, registry, profiles, *store, options);
  out << to_string(summary) << "\n";
  return kExitOk;
}

int cmd_query(const Config& c, std::ostream& out) {
  std::optional<Language> lang;
  if (!c.language.empty()) lang = require_language(c.language);
  RecordFilter filter;
  QuestionId q;
  Task task;
  try {
    filter = make_filter(c.keyword.empty() ? std::nullopt : std::optional(c.keyword),
                         c.from.empty() ? std::nullopt : std::optional(c.from),
                         c.to.empty() ? std::nullopt : std::optional(c.to), lang);
    q = parse_question(c.question);
    task = parse_task(c.task);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  auto store = EmbeddedStore::open(c.store_dir);
  auto records = store->query(filter);
  auto buckets = store->aggregate(filter, q, task);

  if (c.format == "json") {
    nlohmann::json j = {{"records", records.size()}, {"question", code(q)}, {"task", code(task)}};
    nlohmann::json list = nlohmann::json::array();
    for (const auto& b : buckets) list.push_back({{"date", format_day(b.day)}, {"counts", b.counts}});
    j["buckets"] = std::move(list);
    out << j.dump(1) << "\n";
    return kExitOk;
  }

  out << "records: " << records.size() << "\n";
  for (std::size_t i = 0; i < records.size() && i < c.limit; ++i) {
    const auto& r = records[i];
    out << "  " << format_timestamp(r.created_at) << "  " << r.id << "  " << r.normalized << "\n";
  }
  if (!buckets.empty()) out << code(q) << " " << code(task) << " per day:\n";
  for (const auto& b : buckets) {
    out << "  " << format_day(b.day);
    for (const auto& [label, n] : b.counts) out << "  " << label << "=" << n;
    out << "  total=" << b.total() << "\n";
  }
  return kExitOk;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingModel:
    case ErrorCode::kFormatError:
    case ErrorCode::kNoProfiles:
    case ErrorCode::kInsufficientCorpus:
    case ErrorCode::kIoError:
      return kExitEnvironment;
    default:
      return kExitInput;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Multilingual infodemic tweet classifier: training, evaluation, serving and analytics",
               "infodemic"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  app.add_option("--config", config_path, "JSON file with default settings; flags override it");
  app.add_option("--log-level", c.log_level, "trace, debug, info, warn, error or off");

  auto* train = app.add_subcommand("train", "Train the 14 question models for one language");
  train->add_option("--data", c.data, "Tab-separated labeled dataset");
  train->add_option("--language,-l", c.language, "ar, bg, nl or en");
  train->add_option("--out,--model-dir", c.model_dir, "Output model directory");
  train->add_option("--seed", c.seed, "Split seed");
  train->add_option("--min-df", c.min_df, "Minimum document frequency of a term");
  train->add_option("--c-grid", c.c_grid, "Regularization values tried on dev")->delimiter(',');
  train->add_option("--langid-corpus", c.langid_corpus, "Seed corpora for language profiles");

  auto* evaluate = app.add_subcommand("evaluate", "Report test weighted-F1 against the majority baseline");
  evaluate->add_option("--data", c.data, "Tab-separated labeled dataset");
  evaluate->add_option("--language,-l", c.language, "ar, bg, nl or en");
  evaluate->add_option("--model-dir,--models", c.model_dir, "Trained model directory");
  evaluate->add_option("--seed", c.seed, "Split seed when split.json is absent");
  evaluate->add_option("--format", c.format, "text or json")->check(CLI::IsMember({"text", "json"}));

  auto* serve = app.add_subcommand("serve", "Run the classification and analytics HTTP service");
  serve->add_option("--model-dir,--models", c.model_dir, "Trained model directory")
      ->envname("INFODEMIC_MODEL_DIR");
  serve->add_option("--store", c.store_dir, "Record store for the analytics routes")
      ->envname("INFODEMIC_STORE_DIR");
  serve->add_option("--host", c.host, "Bind address")->envname("INFODEMIC_HOST");
  serve->add_option("--port", c.port, "Port, 0 for any free port")->envname("INFODEMIC_PORT");
  serve->add_option("--workers", c.workers, "Classification worker threads")
      ->envname("INFODEMIC_WORKERS");
  serve->add_option("--ttl-hours", c.ttl_hours, "Job expiry")->envname("INFODEMIC_TTL_HOURS");
  serve->add_option("--ui", c.ui_dir, "Static files served under /ui");

  auto* ingest_cmd = app.add_subcommand("ingest", "Classify and store line-delimited tweet records");
  ingest_cmd->add_option("--source", c.source, "JSON-lines input file");
  ingest_cmd->add_option("--language,-l", c.language, "Target language; other records are dropped");
  ingest_cmd->add_option("--store", c.store_dir, "Record store directory");
  ingest_cmd->add_option("--model-dir,--models", c.model_dir, "Trained model directory");
  ingest_cmd->add_option("--batch-size", c.batch_size, "Records per store commit");
  ingest_cmd->add_option("--langid-corpus", c.langid_corpus,
                         "Seed corpora used when the model directory has no profiles");

  auto* query = app.add_subcommand("query", "Search stored records and print day-wise counts");
  query->add_option("--store", c.store_dir, "Record store directory");
  query->add_option("--keyword,-k", c.keyword, "Token that must occur in the text");
  query->add_option("--from", c.from, "First day (YYYY-MM-DD) or timestamp");
  query->add_option("--to", c.to, "Last day (inclusive) or timestamp");
  query->add_option("--language,-l", c.language, "Restrict to one language");
  query->add_option("--question,-q", c.question, "Question for the day-wise counts");
  query->add_option("--task", c.task, "binary or multiclass");
  query->add_option("--limit", c.limit, "Print up to this many matching records");
  query->add_option("--format", c.format, "text or json")->check(CLI::IsMember({"text", "json"}));

  try {
    if (auto path = find_config(args)) apply_config(*path, c);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    setup_logging(c.log_level);
    if (*train) return cmd_train(c, out);
    if (*evaluate) return cmd_evaluate(c, out);
    if (*serve) return cmd_serve(c, out);
    if (*ingest_cmd) return cmd_ingest(c, out);
    if (*query) return cmd_query(c, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const EnvironmentError& e) {
    err << "error: " << e.what() << "\n";
    return kExitEnvironment;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitEnvironment;
  }
  return kExitUsage;
}

}  // namespace infodemic
