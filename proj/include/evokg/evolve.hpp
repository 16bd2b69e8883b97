#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "evokg/corpus.hpp"
#include "evokg/embed.hpp"
#include "evokg/rng.hpp"
#include "evokg/schema.hpp"

namespace evokg {

enum class Strategy { Horizontal, Vertical, Hybrid, Analogous };
/// How a horizontal candidate's similarity to the current schema is pooled.
enum class Aggregation { Max, Mean };

std::string_view to_string(Strategy s);
std::string_view to_string(Aggregation a);
Strategy parse_strategy(std::string_view s);
Aggregation parse_aggregation(std::string_view s);

struct EvolutionConfig {
  Strategy strategy = Strategy::Horizontal;
  std::uint64_t seed = 42;
  int iterations = 7;
  int n_init = 1;
  int n_iter = 1;
  double alpha = 0.5;
  double eps = 1e-12;
  double gamma = 1.0;
  int window = 5;
  double analogous_threshold = 0.3;
  Aggregation aggregation = Aggregation::Max;

  /// Throws DataError when the config cannot run on `raw` (for growth
  /// strategies: n_init + (N - 1) * n_iter must not exceed the sub-node count).
  void validate(const SchemaGraph& raw) const;
};

/// Initial schema S_1 (version 1).
///
/// Horizontal and hybrid: n_init uniformly drawn sub nodes; their majors are
/// kept as structural nodes only. Vertical: every major as a label plus n_init
/// drawn subs. Analogous: the whole raw taxonomy.
SchemaGraph init_schema(const SchemaGraph& raw, const EvolutionConfig& cfg, SplitMix64& rng);

struct ExpansionStep {
  SchemaGraph schema;
  std::vector<std::string> added;      // names of sub nodes added in this step
  std::vector<std::string> warnings;
};

/// Adds the n_iter unused raw subs most similar (by cosine of node vectors) to
/// the subs already present. Ties break on name. Missing majors come in as
/// structural nodes, or as labels when `parents_as_labels`.
ExpansionStep expand_horizontal(const SchemaGraph& current, const SchemaGraph& raw,
                                const EmbeddingStore& store, int n_iter,
                                Aggregation aggregation = Aggregation::Max,
                                bool parents_as_labels = false);

/// Adds n_iter uniformly drawn unused subs whose parent is already present.
/// The parent of each added sub becomes a label.
ExpansionStep expand_vertical(const SchemaGraph& current, const SchemaGraph& raw, SplitMix64& rng,
                              int n_iter);

struct HybridStep : ExpansionStep {
  Strategy branch = Strategy::Horizontal;  // branch that produced the step
  bool fell_back = false;                  // drawn branch had no eligible nodes
};

/// Draws u ~ U[0,1): u < alpha takes the horizontal branch, otherwise the
/// vertical one; falls back to the other branch when the drawn one is exhausted.
HybridStep expand_hybrid(const SchemaGraph& current, const SchemaGraph& raw,
                         const EmbeddingStore& store, SplitMix64& rng, int n_iter, double alpha,
                         Aggregation aggregation = Aggregation::Max);

struct AnalogousStep {
  SchemaGraph schema;
  std::map<std::string, std::string> renames;  // old name -> new name, this step only
};

/// Renames up to n_iter uniformly drawn sub nodes to the lexicon word with the
/// highest summed NPMI against the node's name tokens, when that score reaches
/// `threshold`. Candidates never reuse a schema name or the node's own tokens.
/// Nodes named in `frozen` (already renamed) are not drawn; when fewer than
/// n_iter nodes remain, all of them are tried.
AnalogousStep expand_analogous(const SchemaGraph& current, const std::vector<std::string>& lexicon,
                               const CoocTable& cooc, SplitMix64& rng, int n_iter, NpmiParams params,
                               double threshold, const std::set<std::string>& frozen = {});

struct IterationArtifact {
  int index = 1;
  SchemaGraph schema;
  std::vector<Example> dev;
  std::vector<Example> test;
  std::optional<std::vector<Example>> train;  // iteration 1 only
  std::vector<std::string> added;
  std::optional<Strategy> branch;             // hybrid only
  std::map<std::string, std::string> renames; // analogous: raw name -> current name
};

struct BenchmarkInputs {
  const SchemaGraph* raw = nullptr;
  const SplitSet* splits = nullptr;
  const EmbeddingStore* embeddings = nullptr;  // horizontal and hybrid
  const CoocTable* cooc = nullptr;             // analogous
  std::vector<std::string> lexicon;            // analogous; empty = cooc vocabulary
};

std::vector<IterationArtifact> build_benchmark(const BenchmarkInputs& inputs,
                                               const EvolutionConfig& cfg,
                                               std::vector<std::string>* warnings = nullptr);

nlohmann::ordered_json config_to_json(const EvolutionConfig& cfg);
EvolutionConfig config_from_json(const nlohmann::json& j, EvolutionConfig base = {});

/// Manifest describing a built benchmark: config, PRNG id, per-iteration nodes.
nlohmann::ordered_json build_manifest(const std::vector<IterationArtifact>& artifacts,
                                      const EvolutionConfig& cfg, const nlohmann::ordered_json& extra);

/// Writes iter_<i>/{schema.json,dev.jsonl,test.jsonl}, iter_1/train.jsonl and
/// manifest.json under `dir`. Examples are written in example-id order.
void write_benchmark(const std::string& dir, const std::vector<IterationArtifact>& artifacts,
                     const nlohmann::ordered_json& manifest);

}  // namespace evokg
