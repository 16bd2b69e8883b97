#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "evokg/error.hpp"
#include "evokg/evolve.hpp"
#include "support.hpp"

using namespace evokg;
using namespace evokg::testing;

namespace {

std::set<std::string> names(const std::vector<const SchemaNode*>& nodes) {
  std::set<std::string> out;
  for (const auto* n : nodes) out.insert(n->name_key());
  return out;
}

std::set<std::string> sub_names(const SchemaGraph& g) { return names(g.subs(primary_role(g.task()))); }
std::set<std::string> label_names(const SchemaGraph& g) { return names(g.labels(primary_role(g.task()))); }

std::set<std::string> structural_names(const SchemaGraph& g) {
  std::set<std::string> out;
  for (const auto& n : g.nodes()) {
    if (n.structural) out.insert(n.name_key());
  }
  return out;
}

// contact: meet, phone write; location: contains, capital
SchemaGraph small_raw() {
  return schema_from_text(R"({"task":"EE","nodes":[
    {"id":"r","name":"root","level":"root","role":"event-type"},
    {"id":"c","name":"contact","parent":"r","level":"major","role":"event-type"},
    {"id":"m","name":"meet","parent":"c","level":"sub","role":"event-type"},
    {"id":"pw","name":"phone write","parent":"c","level":"sub","role":"event-type"},
    {"id":"l","name":"location","parent":"r","level":"major","role":"event-type"},
    {"id":"co","name":"contains","parent":"l","level":"sub","role":"event-type"},
    {"id":"ca","name":"capital","parent":"l","level":"sub","role":"event-type"}
  ]})");
}

SchemaGraph only(const SchemaGraph& raw, std::initializer_list<const char*> subs, int version = 1) {
  std::set<NodeId> labels, structural;
  for (const char* s : subs) {
    const auto* n = raw.node_by_name(s);
    labels.insert(n->id);
    structural.insert(*n->parent);
  }
  return make_subschema(raw, labels, structural, version);
}

EvolutionConfig cfg_of(Strategy s, int n_init, int n_iter, int iterations, std::uint64_t seed = 42) {
  EvolutionConfig c;
  c.strategy = s;
  c.n_init = n_init;
  c.n_iter = n_iter;
  c.iterations = iterations;
  c.seed = seed;
  return c;
}

}  // namespace

TEST(EvolutionConfig, ValidateArithmetic) {
  const auto nerd = load_toy_schema("nerd");
  EXPECT_NO_THROW(cfg_of(Strategy::Horizontal, 30, 6, 7).validate(nerd));
  EXPECT_THROW(cfg_of(Strategy::Horizontal, 30, 7, 7).validate(nerd), DataError);
  EXPECT_THROW(cfg_of(Strategy::Vertical, 0, 6, 7).validate(nerd), DataError);
  auto bad = cfg_of(Strategy::Hybrid, 30, 6, 7);
  bad.alpha = 1.5;
  EXPECT_THROW(bad.validate(nerd), DataError);
  EXPECT_NO_THROW(cfg_of(Strategy::Analogous, 0, 6, 50).validate(nerd));
}

TEST(EvolutionConfig, JsonRoundTripAndUnknownKeys) {
  auto c = cfg_of(Strategy::Hybrid, 15, 3, 7, 9);
  c.alpha = 0.25;
  c.aggregation = Aggregation::Mean;
  auto back = config_from_json(nlohmann::json::parse(config_to_json(c).dump()));
  EXPECT_EQ(config_to_json(back), config_to_json(c));
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"strategy":"sideways"})")), DataError);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"n_inti":3})")), DataError);
}

TEST(InitSchema, HorizontalCountsAndStructuralParents) {
  const auto nerd = load_toy_schema("nerd");
  SplitMix64 rng(42);
  auto s = init_schema(nerd, cfg_of(Strategy::Horizontal, 30, 6, 7), rng);
  EXPECT_EQ(s.subs(Role::EntityType).size(), 30u);
  EXPECT_EQ(s.version(), 1);
  EXPECT_TRUE(validate(s).empty());
  for (const auto* m : s.majors(Role::EntityType)) EXPECT_TRUE(m->structural) << m->name_key();
  for (const auto* sub : s.subs(Role::EntityType)) EXPECT_NE(s.node(*sub->parent), nullptr);
}

TEST(InitSchema, VerticalKeepsAllMajorsAsLabels) {
  const auto ace = load_toy_schema("ace");
  SplitMix64 rng(42);
  auto s = init_schema(ace, cfg_of(Strategy::Vertical, 15, 3, 7), rng);
  EXPECT_EQ(s.subs(Role::EventType).size(), 15u);
  EXPECT_EQ(s.majors(Role::EventType).size(), 8u);
  EXPECT_TRUE(structural_names(s).empty());
}

TEST(InitSchema, FullAndDeterministic) {
  const auto nerd = load_toy_schema("nerd");
  SplitMix64 rng(1);
  auto all = init_schema(nerd, cfg_of(Strategy::Horizontal, 66, 1, 1), rng);
  EXPECT_EQ(sub_names(all), sub_names(nerd));
  SplitMix64 a(7), b(7);
  EXPECT_EQ(sub_names(init_schema(nerd, cfg_of(Strategy::Horizontal, 30, 6, 7), a)),
            sub_names(init_schema(nerd, cfg_of(Strategy::Horizontal, 30, 6, 7), b)));
  SplitMix64 c(8);
  auto ana = init_schema(nerd, cfg_of(Strategy::Analogous, 0, 6, 7), c);
  EXPECT_EQ(label_names(ana), label_names(nerd));
}

TEST(Horizontal, PicksClosestCandidate) {
  const auto raw = small_raw();
  EmbeddingStore store(2);
  store.add("meet", {1.0, 0.0});
  store.add("phone", {0.9, 0.3});
  store.add("write", {0.7, 0.1});
  store.add("contains", {0.1, 1.0});
  store.add("capital", {0.5, 0.9});
  auto s = only(raw, {"meet"});
  // oracle: exhaustive cosine over the candidates
  auto vec_of = [&](const std::vector<std::string>& toks) {
    std::vector<double> v(2, 0.0);
    for (const auto& t : toks) {
      for (int i = 0; i < 2; ++i) v[i] += (*store.find(t))[i] / toks.size();
    }
    return v;
  };
  auto cos = [](const std::vector<double>& a, const std::vector<double>& b) {
    return (a[0] * b[0] + a[1] * b[1]) / std::hypot(a[0], a[1]) / std::hypot(b[0], b[1]);
  };
  const auto meet = vec_of({"meet"});
  std::vector<std::pair<double, std::string>> ranked{
      {cos(vec_of({"phone", "write"}), meet), "phone write"},
      {cos(vec_of({"contains"}), meet), "contains"},
      {cos(vec_of({"capital"}), meet), "capital"}};
  std::sort(ranked.rbegin(), ranked.rend());
  ASSERT_EQ(ranked[0].second, "phone write");

  auto step = expand_horizontal(s, raw, store, 1);
  EXPECT_EQ(step.added, std::vector<std::string>{"phone write"});
  EXPECT_EQ(step.schema.version(), 2);
  auto two = expand_horizontal(s, raw, store, 2);
  EXPECT_EQ(two.added, (std::vector<std::string>{ranked[0].second, ranked[1].second}));
  // location comes in as a structural parent
  EXPECT_EQ(structural_names(two.schema), (std::set<std::string>{"contact", "location"}));
}

TEST(Horizontal, ExhaustingTheRawSubsGivesRaw) {
  const auto raw = small_raw();
  EmbeddingStore store(2);
  for (const char* w : {"meet", "phone", "write", "contains", "capital"}) store.add(w, {1.0, static_cast<double>(std::string(w).size())});
  auto step = expand_horizontal(only(raw, {"meet"}), raw, store, 3);
  EXPECT_EQ(sub_names(step.schema), sub_names(raw));
  EXPECT_THROW(expand_horizontal(step.schema, raw, store, 1), DataError);
}

TEST(Horizontal, MaxAndMeanAggregationDiffer) {
  const auto raw = small_raw();
  EmbeddingStore store(2);
  store.add("meet", {1.0, 0.0});
  store.add("contains", {0.0, 1.0});
  store.add("capital", {1.0, 0.01});  // max ~ 1, mean ~ 0.5
  store.add("phone", {1.0, 1.0});     // max = mean ~ 0.707
  store.add("write", {1.0, 1.0});
  auto s = only(raw, {"meet", "contains"});
  EXPECT_EQ(expand_horizontal(s, raw, store, 1, Aggregation::Max).added, std::vector<std::string>{"capital"});
  EXPECT_EQ(expand_horizontal(s, raw, store, 1, Aggregation::Mean).added, std::vector<std::string>{"phone write"});
}

TEST(Horizontal, TiesBreakOnNameAndMissingVectorsAreSkipped) {
  const auto raw = small_raw();
  EmbeddingStore store(2);
  store.add("meet", {1.0, 0.0});
  store.add("contains", {1.0, 1.0});
  store.add("capital", {1.0, 1.0});
  auto step = expand_horizontal(only(raw, {"meet"}), raw, store, 2);
  EXPECT_EQ(step.added, (std::vector<std::string>{"capital", "contains"}));
  bool warned = false;
  for (const auto& w : step.warnings) warned = warned || w.find("phone write") != std::string::npos || w.find("phone") != std::string::npos;
  EXPECT_TRUE(warned);
  EXPECT_THROW(expand_horizontal(only(raw, {"meet"}), raw, store, 3), DataError);
}

TEST(Vertical, OnlyChildrenOfPresentParents) {
  const auto raw = small_raw();
  // contact present as a label, location absent
  auto s = make_subschema(raw, {"m", "c"}, {}, 1);
  SplitMix64 rng(3);
  auto step = expand_vertical(s, raw, rng, 1);
  EXPECT_EQ(step.added, std::vector<std::string>{"phone write"});
  EXPECT_TRUE(label_names(step.schema).count("contact"));
  SplitMix64 rng2(3);
  try {
    expand_vertical(s, raw, rng2, 2);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("deficit 1"), std::string::npos);
  }
}

TEST(Vertical, StructuralParentBecomesLabel) {
  const auto raw = small_raw();
  auto s = only(raw, {"meet"});
  ASSERT_TRUE(structural_names(s).count("contact"));
  SplitMix64 rng(0);
  auto step = expand_vertical(s, raw, rng, 1);
  EXPECT_TRUE(label_names(step.schema).count("contact"));
  EXPECT_TRUE(structural_names(step.schema).empty());
}

TEST(Vertical, AceAddsThreePerIterationReproducibly) {
  auto run = load_toy_run("ace-v");
  auto a = build_benchmark(run.inputs(), run.cfg.evolution);
  auto b = build_benchmark(run.inputs(), run.cfg.evolution);
  ASSERT_EQ(a.size(), 7u);
  for (std::size_t i = 1; i < a.size(); ++i) {
    EXPECT_EQ(a[i].added.size(), 3u);
    EXPECT_EQ(sub_names(a[i].schema).size(), sub_names(a[i - 1].schema).size() + 3);
    EXPECT_EQ(a[i].added, b[i].added);
  }
}

TEST(Hybrid, AlphaOneMatchesHorizontalChoices) {
  auto run = load_toy_run("ace-x");
  const auto& raw = run.raw;
  SplitMix64 init(5);
  auto s = init_schema(raw, cfg_of(Strategy::Horizontal, 15, 3, 7), init);
  SplitMix64 rng(6);
  auto h = expand_hybrid(s, raw, *run.embeddings, rng, 3, 1.0);
  EXPECT_EQ(h.branch, Strategy::Horizontal);
  EXPECT_FALSE(h.fell_back);
  auto plain = expand_horizontal(s, raw, *run.embeddings, 3);
  EXPECT_EQ(h.added, plain.added);
  EXPECT_EQ(sub_names(h.schema), sub_names(plain.schema));
  auto promoted = expand_horizontal(s, raw, *run.embeddings, 3, Aggregation::Max, true);
  EXPECT_EQ(schema_to_json(h.schema), schema_to_json(promoted.schema));
}

TEST(Hybrid, AlphaZeroMatchesVertical) {
  auto run = load_toy_run("ace-x");
  SplitMix64 init(5);
  auto s = init_schema(run.raw, cfg_of(Strategy::Vertical, 15, 3, 7), init);
  SplitMix64 rng(6);
  auto h = expand_hybrid(s, run.raw, *run.embeddings, rng, 3, 0.0);
  EXPECT_EQ(h.branch, Strategy::Vertical);
  SplitMix64 twin(6);
  twin.next_double();  // the branch draw
  auto v = expand_vertical(s, run.raw, twin, 3);
  EXPECT_EQ(h.added, v.added);
  EXPECT_EQ(schema_to_json(h.schema), schema_to_json(v.schema));
}

TEST(Hybrid, BranchTraceReproducibleAndMonotone) {
  auto run = load_toy_run("ace-x");
  auto a = build_benchmark(run.inputs(), run.cfg.evolution);
  auto b = build_benchmark(run.inputs(), run.cfg.evolution);
  std::vector<std::string> trace_a, trace_b;
  for (std::size_t i = 1; i < a.size(); ++i) {
    trace_a.push_back(std::string(to_string(*a[i].branch)));
    trace_b.push_back(std::string(to_string(*b[i].branch)));
    auto prev = sub_names(a[i - 1].schema);
    auto cur = sub_names(a[i].schema);
    EXPECT_TRUE(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
    EXPECT_EQ(cur.size(), prev.size() + 3);
  }
  EXPECT_EQ(trace_a, trace_b);
}

TEST(Hybrid, FallsBackWhenDrawnBranchIsExhausted) {
  const auto raw = small_raw();
  EmbeddingStore store(2);
  for (const char* w : {"meet", "phone", "write", "contains", "capital"}) store.add(w, {1.0, static_cast<double>(std::string(w).size())});
  // only contact's subtree is reachable vertically, and it is used up
  auto s = make_subschema(raw, {"m", "pw", "c"}, {}, 1);
  SplitMix64 rng(1);
  auto step = expand_hybrid(s, raw, store, rng, 1, 0.0);
  EXPECT_TRUE(step.fell_back);
  EXPECT_EQ(step.branch, Strategy::Horizontal);
  EXPECT_FALSE(step.warnings.empty());
  auto full = make_subschema(raw, {"m", "pw", "c", "co", "ca", "l"}, {}, 1);
  EXPECT_THROW(expand_hybrid(full, raw, store, rng, 1, 0.5), DataError);
}

TEST(Analogous, DivorceBecomesSeparate) {
  auto run = load_toy_run("ace-a");
  SplitMix64 init(0);
  auto s = init_schema(run.raw, run.cfg.evolution, init);
  SplitMix64 rng(2);
  const auto n = static_cast<int>(s.subs(Role::EventType).size());
  auto step = expand_analogous(s, run.cooc->vocabulary(), *run.cooc, rng, n, {}, 0.3);
  ASSERT_TRUE(step.renames.count("divorce"));
  EXPECT_EQ(step.renames.at("divorce"), "separate");
  EXPECT_EQ(step.schema.nodes().size(), s.nodes().size());
  EXPECT_EQ(step.schema.node_by_name("separate")->id, s.node_by_name("divorce")->id);
}

TEST(Analogous, InfiniteThresholdKeepsNames) {
  auto run = load_toy_run("ace-a");
  SplitMix64 init(0);
  auto s = init_schema(run.raw, run.cfg.evolution, init);
  SplitMix64 rng(2);
  auto step = expand_analogous(s, run.cooc->vocabulary(), *run.cooc, rng, 5, {},
                               std::numeric_limits<double>::infinity());
  EXPECT_TRUE(step.renames.empty());
  EXPECT_EQ(label_names(step.schema), label_names(s));
}

TEST(Analogous, NeverReusesNamesAndFreezesRenamedNodes) {
  auto run = load_toy_run("ace-a");
  auto cfg = run.cfg.evolution;
  cfg.iterations = 12;
  auto arts = build_benchmark(run.inputs(), cfg);
  std::set<std::string> raw_names;
  for (const auto& n : run.raw.nodes()) raw_names.insert(n.name_key());
  for (const auto& art : arts) {
    EXPECT_TRUE(validate(art.schema).empty());
    EXPECT_EQ(art.schema.subs(Role::EventType).size(), 33u);
    for (const auto& [from, to] : art.renames) {
      EXPECT_TRUE(raw_names.count(from));
      EXPECT_FALSE(raw_names.count(to)) << to;
    }
  }
  // a node renamed once keeps that name in later iterations
  for (std::size_t i = 1; i < arts.size(); ++i) {
    for (const auto& [from, to] : arts[i - 1].renames) EXPECT_EQ(arts[i].renames.at(from), to);
  }
}

TEST(Analogous, NytKeepsTwentyFourSubs) {
  auto run = load_toy_run("nyt-a");
  auto arts = build_benchmark(run.inputs(), run.cfg.evolution);
  ASSERT_EQ(arts.size(), 7u);
  for (const auto& a : arts) EXPECT_EQ(a.schema.subs(Role::Relation).size(), 24u);
  // renamed gold follows the schema
  for (const auto& a : arts) {
    for (const auto& ex : a.test) {
      for (const auto& r : ex.gold.relations) EXPECT_NE(a.schema.label_by_name(r.relation), nullptr) << r.relation;
    }
  }
}

TEST(Benchmark, NerdHorizontalReachesSixtySix) {
  auto run = load_toy_run("nerd-h");
  auto arts = build_benchmark(run.inputs(), run.cfg.evolution);
  ASSERT_EQ(arts.size(), 7u);
  for (std::size_t i = 0; i < arts.size(); ++i) {
    EXPECT_EQ(arts[i].schema.subs(Role::EntityType).size(), 30u + 6u * i);
    EXPECT_EQ(arts[i].train.has_value(), i == 0);
    EXPECT_EQ(arts[i].index, static_cast<int>(i) + 1);
    EXPECT_EQ(arts[i].dev.size(), run.splits.dev.size());
  }
  EXPECT_EQ(sub_names(arts.back().schema), sub_names(run.raw));
}

TEST(Benchmark, SingleIterationIsPlainFilter) {
  auto run = load_toy_run("nyt-h");
  auto cfg = run.cfg.evolution;
  cfg.iterations = 1;
  auto arts = build_benchmark(run.inputs(), cfg);
  ASSERT_EQ(arts.size(), 1u);
  auto expect = filter_to_schema(run.splits.test, run.raw, arts[0].schema, false);
  ASSERT_EQ(arts[0].test.size(), expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_EQ(arts[0].test[i].gold, expect[i].gold);
  auto train = filter_to_schema(run.splits.train, run.raw, arts[0].schema, true);
  EXPECT_EQ(arts[0].train->size(), train.size());
}

TEST(Benchmark, RejectsGoldOutsideRawTaxonomy) {
  auto run = load_toy_run("ace-v");
  run.splits.dev[0].gold.events.push_back({{"x", -1, -1}, "teleport", {}});
  EXPECT_THROW(build_benchmark(run.inputs(), run.cfg.evolution), DataError);
}

TEST(Benchmark, ManifestRecordsEveryIteration) {
  auto run = load_toy_run("ace-x");
  auto arts = build_benchmark(run.inputs(), run.cfg.evolution);
  auto m = build_manifest(arts, run.cfg.evolution, nlohmann::ordered_json::object());
  EXPECT_EQ(m["prng"], "splitmix64");
  EXPECT_EQ(m["seed"], 42);
  ASSERT_EQ(m["iterations"].size(), 7u);
  EXPECT_EQ(m["iterations"][0]["sub_count"], 15);
  EXPECT_EQ(m["iterations"][6]["sub_count"], 33);
  EXPECT_TRUE(m["iterations"][1].contains("branch"));
}
