#include <fstream>
#include <nlohmann/json.hpp>

#include "infodemic/error.h"
#include "infodemic/svm.h"

namespace infodemic {
namespace fs = std::filesystem;
namespace {

constexpr const char* kManifestFormat = "infodemic-question-model";

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << j.dump(1) << '\n';
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingModel, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, path.string() + ": " + e.what());
  }
}

}  // namespace

fs::path bundle_path(const fs::path& model_dir, Language lang,
                     QuestionId question, Task task) {
  return model_dir / std::string(code(lang)) /
         (std::string(code(question)) + "_" + std::string(code(task)));
}

void save_bundle(const QuestionModel& model, Language lang, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());

  nlohmann::json c_scores = nlohmann::json::array();
  for (const auto& [c, f1] : model.c_scores) c_scores.push_back({{"C", c}, {"dev_weighted_f1", f1}});

  nlohmann::json manifest = {
      {"format", kManifestFormat},
      {"schema_version", kBundleSchemaVersion},
      {"language", code(lang)},
      {"question", code(model.question)},
      {"task", code(model.task)},
      {"labels", model.labels},
      {"absent_labels", model.absent_labels},
      {"C", model.c},
      {"c_scores", std::move(c_scores)},
      {"metrics", {{"dev", to_json(model.dev_metrics)}}},
      {"files", {{"tfidf", "tfidf.json"}, {"classifiers", "classifiers.json"}}},
  };

  nlohmann::json classifiers = nlohmann::json::array();
  for (const auto& clf : model.classifiers) {
    classifiers.push_back({{"weights", clf.weights},
                           {"bias", clf.bias},
                           {"C", clf.c},
                           {"platt_a", clf.platt_a},
                           {"platt_b", clf.platt_b}});
  }

  write_json(dir / "tfidf.json", model.tfidf.to_json());
  write_json(dir / "classifiers.json", classifiers);
  // Manifest last: its presence marks a complete bundle.
  write_json(dir / "manifest.json", manifest);
}

QuestionModel load_bundle(const fs::path& dir) {
  if (!fs::exists(dir / "manifest.json")) {
    throw Error(ErrorCode::kMissingModel, "no model bundle at " + dir.string());
  }
  auto manifest = read_json(dir / "manifest.json");
  QuestionModel model;
  try {
    if (manifest.at("format") != kManifestFormat) {
      throw Error(ErrorCode::kFormatError, dir.string() + ": not a question model bundle");
    }
    if (manifest.at("schema_version").get<int>() != kBundleSchemaVersion) {
      throw Error(ErrorCode::kFormatError,
                  dir.string() + ": unsupported bundle version " +
                      manifest.at("schema_version").dump());
    }
    model.question = parse_question(manifest.at("question").get<std::string>());
    model.task = parse_task(manifest.at("task").get<std::string>());
    model.labels = manifest.at("labels").get<std::vector<std::string>>();
    model.absent_labels = manifest.at("absent_labels").get<std::vector<std::string>>();
    model.c = manifest.at("C").get<double>();
    for (const auto& cs : manifest.at("c_scores")) {
      model.c_scores.emplace_back(cs.at("C").get<double>(), cs.at("dev_weighted_f1").get<double>());
    }
    const auto& dev = manifest.at("metrics").at("dev");
    model.dev_metrics.weighted_precision = dev.at("weighted_precision").get<double>();
    model.dev_metrics.weighted_recall = dev.at("weighted_recall").get<double>();
    model.dev_metrics.weighted_f1 = dev.at("weighted_f1").get<double>();
    model.dev_metrics.accuracy = dev.at("accuracy").get<double>();
    model.dev_metrics.n = dev.at("n").get<std::size_t>();

    model.tfidf = TfidfModel::from_json(read_json(dir / "tfidf.json"));
    for (const auto& c : read_json(dir / "classifiers.json")) {
      LinearBinaryModel clf;
      clf.weights = c.at("weights").get<std::vector<double>>();
      clf.bias = c.at("bias").get<double>();
      clf.c = c.at("C").get<double>();
      clf.platt_a = c.at("platt_a").get<double>();
      clf.platt_b = c.at("platt_b").get<double>();
      model.classifiers.push_back(std::move(clf));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, dir.string() + ": " + e.what());
  }

  if (model.labels != labels(model.question, model.task)) {
    throw Error(ErrorCode::kFormatError, dir.string() + ": label order differs from schema");
  }
  const std::size_t expected = model.task == Task::kBinary ? 1 : model.labels.size();
  if (model.classifiers.size() != expected) {
    throw Error(ErrorCode::kFormatError, dir.string() + ": expected " +
                                             std::to_string(expected) + " classifiers");
  }
  for (const auto& clf : model.classifiers) {
    if (clf.weights.size() != model.tfidf.dimension()) {
      throw Error(ErrorCode::kFormatError, dir.string() + ": weight vector size mismatch");
    }
  }
  return model;
}

}  // namespace infodemic
