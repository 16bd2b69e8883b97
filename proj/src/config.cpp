#include "evokg/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>

#include "evokg/error.hpp"
#include "evokg/metrics.hpp"
#include "evokg/text.hpp"

namespace evokg {

namespace fs = std::filesystem;

namespace {

std::string resolve(const std::string& base_dir, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute() || base_dir.empty()) return p;
  return (fs::path(base_dir) / p).lexically_normal().string();
}

}  // namespace

RunConfig run_config_from_json(const nlohmann::json& j, const std::string& base_dir) {
  static const std::set<std::string> known{"raw_schema", "train",    "dev",     "test",
                                           "embeddings", "corpus",   "lexicon", "output_dir",
                                           "evolution",  "decode",   "metrics", "endpoint"};
  if (!j.is_object()) throw DataError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw DataError("unknown config key: " + key);
  }
  RunConfig cfg;
  try {
    auto path = [&](const char* key) { return resolve(base_dir, j.value(key, std::string())); };
    cfg.raw_schema = path("raw_schema");
    cfg.train = path("train");
    cfg.dev = path("dev");
    cfg.test = path("test");
    cfg.embeddings = path("embeddings");
    cfg.corpus = path("corpus");
    cfg.lexicon = path("lexicon");
    cfg.output_dir = path("output_dir");
    if (j.contains("evolution")) cfg.evolution = config_from_json(j.at("evolution"));
    if (j.contains("decode")) {
      const auto& d = j.at("decode");
      cfg.decode.scorer = d.value("scorer", cfg.decode.scorer);
      cfg.decode.max_len = d.value("max_len", cfg.decode.max_len);
      cfg.decode.seed = d.value("seed", cfg.decode.seed);
      cfg.decode.threads = d.value("threads", cfg.decode.threads);
      if (d.contains("favored")) cfg.decode.favored = d.at("favored").get<std::vector<std::string>>();
    }
    if (j.contains("metrics")) {
      cfg.metrics = j.at("metrics").get<std::vector<std::string>>();
      for (const auto& m : cfg.metrics) parse_metric(m);
    }
    if (j.contains("endpoint")) cfg.endpoint = endpoint_from_json(j.at("endpoint"));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad config: ") + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  return run_config_from_json(j, fs::path(path).parent_path().string());
}

void validate_build_inputs(const RunConfig& cfg) {
  auto need = [](const std::string& p, const char* what) {
    if (p.empty()) throw DataError(std::string("config is missing ") + what);
    if (!fs::exists(p)) throw DataError(std::string(what) + " not found: " + p);
  };
  need(cfg.raw_schema, "raw_schema");
  need(cfg.train, "train");
  need(cfg.dev, "dev");
  need(cfg.test, "test");
  const auto s = cfg.evolution.strategy;
  if (cfg.evolution.iterations > 1) {
    if (s == Strategy::Horizontal || s == Strategy::Hybrid) need(cfg.embeddings, "embeddings");
    if (s == Strategy::Analogous) need(cfg.corpus, "corpus");
  }
  if (!cfg.lexicon.empty()) need(cfg.lexicon, "lexicon");
  if (cfg.output_dir.empty()) throw DataError("config is missing output_dir");
}

std::vector<std::vector<std::string>> load_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus: " + path);
  std::vector<std::vector<std::string>> out;
  std::string line;
  while (std::getline(in, line)) {
    auto toks = split_ws(to_lower(line));
    if (!toks.empty()) out.push_back(std::move(toks));
  }
  return out;
}

std::vector<std::string> load_lexicon(const std::string& path) {
  std::vector<std::string> out;
  for (auto& sentence : load_corpus(path)) {
    for (auto& w : sentence) out.push_back(std::move(w));
  }
  return out;
}

}  // namespace evokg
