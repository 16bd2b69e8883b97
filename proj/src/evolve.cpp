#include "evokg/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <set>

#include "evokg/error.hpp"
#include "evokg/text.hpp"

namespace evokg {

namespace fs = std::filesystem;

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::Horizontal: return "horizontal";
    case Strategy::Vertical: return "vertical";
    case Strategy::Hybrid: return "hybrid";
    case Strategy::Analogous: return "analogous";
  }
  return "?";
}

std::string_view to_string(Aggregation a) { return a == Aggregation::Max ? "max" : "mean"; }

Strategy parse_strategy(std::string_view s) {
  if (s == "horizontal") return Strategy::Horizontal;
  if (s == "vertical") return Strategy::Vertical;
  if (s == "hybrid") return Strategy::Hybrid;
  if (s == "analogous") return Strategy::Analogous;
  throw DataError("unknown strategy: " + std::string(s));
}

Aggregation parse_aggregation(std::string_view s) {
  if (s == "max") return Aggregation::Max;
  if (s == "mean") return Aggregation::Mean;
  throw DataError("unknown aggregation: " + std::string(s));
}

void EvolutionConfig::validate(const SchemaGraph& raw) const {
  if (iterations < 1) throw DataError("iterations must be positive");
  if (n_iter < 1) throw DataError("n_iter must be positive");
  if (alpha < 0.0 || alpha > 1.0) throw DataError("alpha must lie in [0, 1]");
  if (eps < 0.0) throw DataError("eps must be non-negative");
  if (!(gamma > 0.0)) throw DataError("gamma must be positive");
  if (window < 1) throw DataError("window must be positive");
  const auto subs = static_cast<long>(raw.subs(primary_role(raw.task())).size());
  if (strategy == Strategy::Analogous) {
    if (n_iter > subs) throw DataError("n_iter exceeds the number of sub nodes");
    return;
  }
  if (n_init < 1) throw DataError("n_init must be positive");
  const long needed = static_cast<long>(n_init) + static_cast<long>(iterations - 1) * n_iter;
  if (needed > subs) {
    throw DataError("n_init + (N-1)*n_iter = " + std::to_string(needed) + " exceeds the " +
                    std::to_string(subs) + " sub nodes of the raw taxonomy");
  }
}

namespace {

struct NodeSets {
  std::set<NodeId> labels;
  std::set<NodeId> structural;

  bool present(const NodeId& id) const { return labels.count(id) || structural.count(id); }

  void add_label(const NodeId& id) {
    structural.erase(id);
    labels.insert(id);
  }
  void add_structural(const NodeId& id) {
    if (!labels.count(id)) structural.insert(id);
  }
};

NodeSets primary_sets(const SchemaGraph& g) {
  NodeSets sets;
  const Role primary = primary_role(g.task());
  for (const auto& n : g.nodes()) {
    if (n.level == Level::Root || n.role != primary) continue;
    (n.structural ? sets.structural : sets.labels).insert(n.id);
  }
  return sets;
}

std::vector<const SchemaNode*> unused_subs(const SchemaGraph& raw, const NodeSets& sets) {
  std::vector<const SchemaNode*> out;
  for (const SchemaNode* n : raw.subs(primary_role(raw.task()))) {
    if (!sets.present(n->id)) out.push_back(n);
  }
  return out;
}

}  // namespace

SchemaGraph init_schema(const SchemaGraph& raw, const EvolutionConfig& cfg, SplitMix64& rng) {
  const Role primary = primary_role(raw.task());
  NodeSets sets;
  if (cfg.strategy == Strategy::Analogous) {
    for (const auto& n : raw.nodes()) {
      if (n.level != Level::Root && n.role == primary) sets.labels.insert(n.id);
    }
    return make_subschema(raw, sets.labels, {}, 1);
  }
  const auto subs = raw.subs(primary);
  if (cfg.n_init < 0 || static_cast<std::size_t>(cfg.n_init) > subs.size()) {
    throw DataError("n_init " + std::to_string(cfg.n_init) + " exceeds the " +
                    std::to_string(subs.size()) + " available sub nodes");
  }
  for (std::size_t i : sample_indices(rng, subs.size(), static_cast<std::size_t>(cfg.n_init))) {
    sets.add_label(subs[i]->id);
  }
  if (cfg.strategy == Strategy::Vertical) {
    for (const SchemaNode* m : raw.majors(primary)) sets.add_label(m->id);
  } else {
    for (const NodeId& id : std::set<NodeId>(sets.labels)) {
      if (auto p = raw.node(id)->parent) sets.add_structural(*p);
    }
  }
  return make_subschema(raw, sets.labels, sets.structural, 1);
}

ExpansionStep expand_horizontal(const SchemaGraph& current, const SchemaGraph& raw,
                                const EmbeddingStore& store, int n_iter, Aggregation aggregation,
                                bool parents_as_labels) {
  ExpansionStep step;
  NodeSets sets = primary_sets(current);
  const auto candidates = unused_subs(raw, sets);
  if (n_iter < 0 || candidates.size() < static_cast<std::size_t>(n_iter)) {
    throw DataError("horizontal expansion needs " + std::to_string(n_iter) +
                    " unused sub nodes, only " + std::to_string(candidates.size()) + " left");
  }

  std::vector<std::vector<double>> anchors;
  for (const SchemaNode* s : current.subs(primary_role(current.task()))) {
    try {
      anchors.push_back(node_vector(*s, store, &step.warnings));
    } catch (const DataError& e) {
      step.warnings.push_back(std::string("anchor skipped: ") + e.what());
    }
  }
  if (anchors.empty()) throw DataError("horizontal expansion: no current node has an embedding");

  struct Scored {
    double score;
    std::string name;
    const SchemaNode* node;
  };
  std::vector<Scored> scored;
  for (const SchemaNode* c : candidates) {
    try {
      const auto v = node_vector(*c, store, &step.warnings);
      double agg = aggregation == Aggregation::Max ? -std::numeric_limits<double>::infinity() : 0.0;
      for (const auto& a : anchors) {
        const double sim = cosine(v, a);
        agg = aggregation == Aggregation::Max ? std::max(agg, sim) : agg + sim;
      }
      if (aggregation == Aggregation::Mean) agg /= static_cast<double>(anchors.size());
      scored.push_back({agg, c->name_key(), c});
    } catch (const Error& e) {
      step.warnings.push_back(std::string("candidate skipped: ") + e.what());
    }
  }
  if (scored.size() < static_cast<std::size_t>(n_iter)) {
    throw DataError("horizontal expansion: only " + std::to_string(scored.size()) +
                    " candidates have embeddings, need " + std::to_string(n_iter));
  }
  std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.name < b.name;
  });
  for (int i = 0; i < n_iter; ++i) {
    const SchemaNode* c = scored[static_cast<std::size_t>(i)].node;
    sets.add_label(c->id);
    step.added.push_back(c->name_key());
    if (c->parent) {
      if (parents_as_labels) {
        sets.add_label(*c->parent);
      } else {
        sets.add_structural(*c->parent);
      }
    }
  }
  step.schema = make_subschema(raw, sets.labels, sets.structural, current.version() + 1);
  return step;
}

ExpansionStep expand_vertical(const SchemaGraph& current, const SchemaGraph& raw, SplitMix64& rng,
                              int n_iter) {
  ExpansionStep step;
  NodeSets sets = primary_sets(current);
  std::vector<const SchemaNode*> eligible;
  for (const SchemaNode* c : unused_subs(raw, sets)) {
    if (c->parent && sets.present(*c->parent)) eligible.push_back(c);
  }
  if (n_iter < 0 || eligible.size() < static_cast<std::size_t>(n_iter)) {
    throw DataError("vertical expansion: " + std::to_string(eligible.size()) +
                    " eligible sub nodes, need " + std::to_string(n_iter) + " (deficit " +
                    std::to_string(n_iter - static_cast<long>(eligible.size())) + ")");
  }
  for (std::size_t i : sample_indices(rng, eligible.size(), static_cast<std::size_t>(n_iter))) {
    const SchemaNode* c = eligible[i];
    sets.add_label(c->id);
    sets.add_label(*c->parent);
    step.added.push_back(c->name_key());
  }
  step.schema = make_subschema(raw, sets.labels, sets.structural, current.version() + 1);
  return step;
}

HybridStep expand_hybrid(const SchemaGraph& current, const SchemaGraph& raw,
                         const EmbeddingStore& store, SplitMix64& rng, int n_iter, double alpha,
                         Aggregation aggregation) {
  const double u = rng.next_double();
  const Strategy drawn = u < alpha ? Strategy::Horizontal : Strategy::Vertical;
  auto run = [&](Strategy branch) {
    HybridStep step;
    ExpansionStep base = branch == Strategy::Horizontal
                             ? expand_horizontal(current, raw, store, n_iter, aggregation, true)
                             : expand_vertical(current, raw, rng, n_iter);
    static_cast<ExpansionStep&>(step) = std::move(base);
    step.branch = branch;
    return step;
  };
  try {
    return run(drawn);
  } catch (const DataError& first) {
    const Strategy other = drawn == Strategy::Horizontal ? Strategy::Vertical : Strategy::Horizontal;
    try {
      HybridStep step = run(other);
      step.fell_back = true;
      step.warnings.push_back(std::string(to_string(drawn)) + " branch exhausted: " + first.what());
      return step;
    } catch (const DataError& second) {
      throw DataError(std::string("hybrid expansion exhausted: ") + first.what() + "; " +
                      second.what());
    }
  }
}

AnalogousStep expand_analogous(const SchemaGraph& current, const std::vector<std::string>& lexicon,
                               const CoocTable& cooc, SplitMix64& rng, int n_iter, NpmiParams params,
                               double threshold, const std::set<std::string>& frozen) {
  const auto all_subs = current.subs(primary_role(current.task()));
  if (n_iter < 0 || all_subs.size() < static_cast<std::size_t>(n_iter)) {
    throw DataError("analogous expansion needs " + std::to_string(n_iter) + " sub nodes");
  }
  std::vector<const SchemaNode*> subs;
  for (const auto* n : all_subs) {
    if (!frozen.count(n->name_key())) subs.push_back(n);
  }
  std::set<std::string> taken;
  for (const auto& n : current.nodes()) taken.insert(n.name_key());

  std::vector<std::string> words;
  for (const auto& w : lexicon) {
    if (cooc.unigram(w) > 0 && !is_reserved_surface(w) && split_ws(w).size() == 1) words.push_back(w);
  }
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());

  AnalogousStep step;
  std::map<std::string, std::vector<std::string>> mapping;
  const auto draws = std::min(subs.size(), static_cast<std::size_t>(n_iter));
  for (std::size_t i : sample_indices(rng, subs.size(), draws)) {
    const SchemaNode* node = subs[i];
    std::vector<std::string> context;
    for (const auto& tok : node->name) {
      if (cooc.unigram(tok) > 0) context.push_back(tok);
    }
    if (context.empty()) continue;
    std::vector<std::string> pool;
    for (const auto& w : words) {
      if (taken.count(w)) continue;
      if (std::find(node->name.begin(), node->name.end(), w) != node->name.end()) continue;
      pool.push_back(w);
    }
    if (pool.empty()) continue;
    const auto scores = analogy_scores(context, pool, cooc, params);
    std::size_t best = 0;
    for (std::size_t j = 1; j < pool.size(); ++j) {
      if (scores[j] > scores[best]) best = j;  // pool is sorted, so ties keep the smaller word
    }
    if (!(scores[best] >= threshold)) continue;
    mapping[node->name_key()] = {pool[best]};
    step.renames[node->name_key()] = pool[best];
    taken.insert(pool[best]);
  }
  step.schema = apply_rename(current, mapping);
  return step;
}

namespace {

std::set<std::string> renamed_now(const std::map<std::string, std::string>& cumulative) {
  std::set<std::string> out;
  for (const auto& [raw_name, cur] : cumulative) out.insert(cur);
  return out;
}

}  // namespace

std::vector<IterationArtifact> build_benchmark(const BenchmarkInputs& inputs,
                                               const EvolutionConfig& cfg,
                                               std::vector<std::string>* warnings) {
  if (!inputs.raw || !inputs.splits) throw DataError("build_benchmark: raw schema and splits required");
  const SchemaGraph& raw = *inputs.raw;
  const SplitSet& splits = *inputs.splits;
  cfg.validate(raw);
  const bool needs_embeddings =
      cfg.strategy == Strategy::Horizontal || cfg.strategy == Strategy::Hybrid;
  if (needs_embeddings && cfg.iterations > 1 && !inputs.embeddings) {
    throw DataError(std::string(to_string(cfg.strategy)) + " expansion needs word embeddings");
  }
  if (cfg.strategy == Strategy::Analogous && cfg.iterations > 1 && !inputs.cooc) {
    throw DataError("analogous expansion needs a co-occurrence table");
  }
  for (const auto* split : {&splits.train, &splits.dev, &splits.test}) {
    auto problems = check_against_schema(*split, raw);
    if (!problems.empty()) {
      throw DataError("gold annotations do not fit the raw taxonomy: " + problems.front() +
                      (problems.size() > 1 ? " (+" + std::to_string(problems.size() - 1) + " more)" : ""));
    }
  }

  auto note = [&](const std::vector<std::string>& ws) {
    if (warnings) warnings->insert(warnings->end(), ws.begin(), ws.end());
  };

  SplitMix64 root(cfg.seed);
  SplitMix64 init_rng = root.split();
  SplitMix64 step_rng = root.split();

  std::vector<IterationArtifact> artifacts;
  IterationArtifact first;
  first.index = 1;
  first.schema = init_schema(raw, cfg, init_rng);
  for (const auto& n : first.schema.subs(primary_role(raw.task()))) first.added.push_back(n->name_key());
  first.train = filter_to_schema(splits.train, raw, first.schema, true);
  first.dev = filter_to_schema(splits.dev, raw, first.schema, false);
  first.test = filter_to_schema(splits.test, raw, first.schema, false);
  artifacts.push_back(std::move(first));

  std::vector<std::string> lexicon = inputs.lexicon;
  if (cfg.strategy == Strategy::Analogous && lexicon.empty() && inputs.cooc) {
    lexicon = inputs.cooc->vocabulary();
  }
  // A renamed node must not drift back into a raw name.
  {
    std::set<std::string> raw_names;
    for (const auto& n : raw.nodes()) raw_names.insert(n.name_key());
    lexicon.erase(std::remove_if(lexicon.begin(), lexicon.end(),
                                 [&](const std::string& w) { return raw_names.count(w) > 0; }),
                  lexicon.end());
  }
  std::map<std::string, std::string> cumulative;  // raw name -> current name
  const NpmiParams params{cfg.eps, cfg.gamma};

  for (int i = 2; i <= cfg.iterations; ++i) {
    const SchemaGraph& prev = artifacts.back().schema;
    IterationArtifact art;
    art.index = i;
    switch (cfg.strategy) {
      case Strategy::Horizontal: {
        auto step = expand_horizontal(prev, raw, *inputs.embeddings, cfg.n_iter, cfg.aggregation);
        note(step.warnings);
        art.schema = std::move(step.schema);
        art.added = std::move(step.added);
        break;
      }
      case Strategy::Vertical: {
        auto step = expand_vertical(prev, raw, step_rng, cfg.n_iter);
        art.schema = std::move(step.schema);
        art.added = std::move(step.added);
        break;
      }
      case Strategy::Hybrid: {
        auto step = expand_hybrid(prev, raw, *inputs.embeddings, step_rng, cfg.n_iter, cfg.alpha,
                                  cfg.aggregation);
        note(step.warnings);
        art.schema = std::move(step.schema);
        art.added = std::move(step.added);
        art.branch = step.branch;
        break;
      }
      case Strategy::Analogous: {
        auto step = expand_analogous(prev, lexicon, *inputs.cooc, step_rng, cfg.n_iter, params,
                                     cfg.analogous_threshold, renamed_now(cumulative));
        art.schema = std::move(step.schema);
        for (const auto& [old_name, new_name] : step.renames) {
          bool found = false;
          for (auto& [raw_name, cur] : cumulative) {
            if (cur == old_name) {
              cur = new_name;
              found = true;
            }
          }
          if (!found) cumulative[old_name] = new_name;
        }
        break;
      }
    }
    if (cfg.strategy == Strategy::Analogous) {
      // The taxonomy keeps every node, so projection is the identity and only
      // the names move.
      art.renames = cumulative;
      art.dev = rename_labels(artifacts.front().dev, cumulative);
      art.test = rename_labels(artifacts.front().test, cumulative);
    } else {
      art.dev = filter_to_schema(splits.dev, raw, art.schema, false);
      art.test = filter_to_schema(splits.test, raw, art.schema, false);
    }
    artifacts.push_back(std::move(art));
  }
  return artifacts;
}

nlohmann::ordered_json config_to_json(const EvolutionConfig& cfg) {
  nlohmann::ordered_json j;
  j["strategy"] = std::string(to_string(cfg.strategy));
  j["seed"] = cfg.seed;
  j["iterations"] = cfg.iterations;
  j["n_init"] = cfg.n_init;
  j["n_iter"] = cfg.n_iter;
  j["alpha"] = cfg.alpha;
  j["eps"] = cfg.eps;
  j["gamma"] = cfg.gamma;
  j["window"] = cfg.window;
  j["analogous_threshold"] = cfg.analogous_threshold;
  j["aggregation"] = std::string(to_string(cfg.aggregation));
  return j;
}

EvolutionConfig config_from_json(const nlohmann::json& j, EvolutionConfig cfg) {
  static const std::set<std::string> known{"strategy", "seed",  "iterations", "n_init",
                                           "n_iter",   "alpha", "eps",        "gamma",
                                           "window",   "analogous_threshold", "aggregation"};
  try {
    for (const auto& [key, value] : j.items()) {
      if (!known.count(key)) throw DataError("unknown evolution setting: " + key);
    }
    if (j.contains("strategy")) cfg.strategy = parse_strategy(j.at("strategy").get<std::string>());
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("iterations")) cfg.iterations = j.at("iterations").get<int>();
    if (j.contains("n_init")) cfg.n_init = j.at("n_init").get<int>();
    if (j.contains("n_iter")) cfg.n_iter = j.at("n_iter").get<int>();
    if (j.contains("alpha")) cfg.alpha = j.at("alpha").get<double>();
    if (j.contains("eps")) cfg.eps = j.at("eps").get<double>();
    if (j.contains("gamma")) cfg.gamma = j.at("gamma").get<double>();
    if (j.contains("window")) cfg.window = j.at("window").get<int>();
    if (j.contains("analogous_threshold")) {
      cfg.analogous_threshold = j.at("analogous_threshold").get<double>();
    }
    if (j.contains("aggregation")) {
      cfg.aggregation = parse_aggregation(j.at("aggregation").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad evolution config: ") + e.what());
  }
  return cfg;
}

nlohmann::ordered_json build_manifest(const std::vector<IterationArtifact>& artifacts,
                                      const EvolutionConfig& cfg,
                                      const nlohmann::ordered_json& extra) {
  nlohmann::ordered_json m;
  m["prng"] = std::string(SplitMix64::kAlgorithm);
  m["seed"] = cfg.seed;
  m["config"] = config_to_json(cfg);
  if (!extra.is_null()) m["inputs"] = extra;
  auto iters = nlohmann::ordered_json::array();
  for (const auto& art : artifacts) {
    nlohmann::ordered_json ji;
    ji["i"] = art.index;
    ji["version"] = art.schema.version();
    const Role primary = primary_role(art.schema.task());
    auto labels = nlohmann::ordered_json::array();
    auto structural = nlohmann::ordered_json::array();
    std::size_t sub_count = 0;
    for (const auto& n : art.schema.nodes()) {
      if (n.level == Level::Root || n.role != primary) continue;
      if (n.level == Level::Sub) ++sub_count;
      nlohmann::ordered_json jn = {{"id", n.id}, {"name", n.name_key()}};
      (n.structural ? structural : labels).push_back(std::move(jn));
    }
    ji["sub_count"] = sub_count;
    ji["nodes"] = std::move(labels);
    ji["structural"] = std::move(structural);
    ji["added"] = art.added;
    if (art.branch) ji["branch"] = std::string(to_string(*art.branch));
    if (!art.renames.empty()) ji["renames"] = art.renames;
    ji["dev_sentences"] = art.dev.size();
    ji["test_sentences"] = art.test.size();
    if (art.train) ji["train_sentences"] = art.train->size();
    iters.push_back(std::move(ji));
  }
  m["iterations"] = std::move(iters);
  return m;
}

void write_benchmark(const std::string& dir, const std::vector<IterationArtifact>& artifacts,
                     const nlohmann::ordered_json& manifest) {
  auto by_id = [](std::vector<Example> xs) {
    std::stable_sort(xs.begin(), xs.end(),
                     [](const Example& a, const Example& b) { return a.id < b.id; });
    return xs;
  };
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create " + dir + ": " + ec.message());
  for (const auto& art : artifacts) {
    const fs::path sub = fs::path(dir) / ("iter_" + std::to_string(art.index));
    fs::create_directories(sub, ec);
    if (ec) throw DataError("cannot create " + sub.string() + ": " + ec.message());
    save_schema(art.schema, (sub / "schema.json").string());
    save_jsonl(by_id(art.dev), (sub / "dev.jsonl").string());
    save_jsonl(by_id(art.test), (sub / "test.jsonl").string());
    if (art.train) save_jsonl(by_id(*art.train), (sub / "train.jsonl").string());
  }
  write_file((fs::path(dir) / "manifest.json").string(), manifest.dump(2) + "\n");
}

}  // namespace evokg
