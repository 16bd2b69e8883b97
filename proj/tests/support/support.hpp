#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "evokg/config.hpp"
#include "evokg/corpus.hpp"
#include "evokg/embed.hpp"
#include "evokg/evolve.hpp"
#include "evokg/schema.hpp"

namespace evokg::testing {

using Rng = std::mt19937_64;

/// Absolute path of a file in the source tree.
std::string source_path(const std::string& rel);

SchemaGraph load_toy_schema(const std::string& dataset);
SplitSet load_toy_splits(const std::string& dataset);

/// A preset config from configs/ with its inputs loaded.
struct ToyRun {
  RunConfig cfg;
  SchemaGraph raw;
  SplitSet splits;
  std::optional<EmbeddingStore> embeddings;
  std::optional<CoocTable> cooc;

  BenchmarkInputs inputs() const;
};

ToyRun load_toy_run(const std::string& preset);  // e.g. "ace-x"

SchemaGraph schema_from_text(const std::string& json_text);

/// Small hand-written schemas shared by several tests.
SchemaGraph tiny_ner_schema();
SchemaGraph tiny_re_schema();
SchemaGraph tiny_ee_schema();

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& rel = "") const;

 private:
  std::filesystem::path path_;
};

/// relative path -> file bytes, for every regular file under `root`.
std::map<std::string, std::string> read_tree(const std::filesystem::path& root);

/// Code-point length, counted without the library's UTF-8 helpers.
std::size_t cp_len(const std::string& s);

/// Fresh pseudo-words, never repeated within one generator and never reserved.
class WordSource {
 public:
  explicit WordSource(Rng& rng) : rng_(rng) {}
  std::string next();

 private:
  Rng& rng_;
  std::vector<std::string> used_;
};

/// Random example whose gold uses only labels of `schema` and respects its RE
/// constraints and EE role lists. Sentence tokens are unique, so every mention
/// can be located from its surface string.
Example random_example(Rng& rng, const SchemaGraph& schema, const std::string& id,
                       int max_records = 3);

/// Random sub-schema of `raw`: each sub kept with probability p_sub; parents
/// of kept subs become labels or structural nodes at random.
SchemaGraph random_subschema(Rng& rng, const SchemaGraph& raw, double p_sub, int version = 1);

}  // namespace evokg::testing
