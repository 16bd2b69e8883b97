#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "evokg/corpus.hpp"
#include "evokg/error.hpp"
#include "evokg/text.hpp"
#include "support.hpp"

using namespace evokg;
using namespace evokg::testing;

namespace {

std::set<NodeId> ids_named(const SchemaGraph& g, const std::vector<std::string>& names) {
  std::set<NodeId> out;
  for (const auto& n : names) out.insert(g.node_by_name(n)->id);
  return out;
}

std::vector<Example> parse_text(const std::string& s, const LoadOptions& opts = {}) {
  std::istringstream in(s);
  return parse_jsonl(in, "mem", opts);
}

Example trial_example() {
  for (const auto& ex : load_toy_splits("ace").test) {
    if (ex.id == "ace-trial") return ex;
  }
  throw std::runtime_error("fixture sentence missing");
}

}  // namespace

TEST(Corpus, ParsesOneRelationLine) {
  auto xs = parse_text(
      R"({"id":"n1","text":"Queens contains Douglaston .","relations":[{"head":{"text":"Queens","start":0,"end":6},"head_type":"Location","relation":"contains","tail":{"text":"Douglaston","start":16,"end":26},"tail_type":"location"}]})");
  ASSERT_EQ(xs.size(), 1u);
  ASSERT_EQ(xs[0].gold.relations.size(), 1u);
  const auto& r = xs[0].gold.relations[0];
  EXPECT_EQ(r.head.text, "Queens");
  EXPECT_EQ(r.head_type, "location");  // canonicalized
  EXPECT_EQ(r.tail.start, 16);
  EXPECT_TRUE(xs[0].gold.entities.empty());
}

TEST(Corpus, EmptyInputGivesEmptyList) {
  EXPECT_TRUE(parse_text("").empty());
  EXPECT_TRUE(parse_text("\n  \n").empty());
}

TEST(Corpus, RejectsBadLines) {
  EXPECT_THROW(parse_text("{not json"), DataError);
  // offsets that do not select the mention text
  EXPECT_THROW(parse_text(R"({"id":"a","text":"abc def","entities":[{"text":"abc","start":1,"end":4,"type":"x"}]})"),
               DataError);
  EXPECT_THROW(parse_text(R"({"id":"a","text":"abc","entities":[{"text":"abc","start":0,"end":9,"type":"x"}]})"),
               DataError);
  // duplicate ids
  EXPECT_THROW(parse_text("{\"id\":\"a\",\"text\":\"x\"}\n{\"id\":\"a\",\"text\":\"y\"}"), DataError);
  // reserved surfaces may not appear in text
  EXPECT_THROW(parse_text(R"({"id":"a","text":"x [sep] y"})"), DataError);
  try {
    parse_text("{\"id\":\"a\",\"text\":\"x\"}\n{bad");
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("mem:2:"), std::string::npos);
  }
}

TEST(Corpus, UnknownOffsetsOnlyWhenAllowed) {
  const std::string line = R"({"id":"a","text":"abc","entities":[{"text":"zz","start":-1,"end":-1,"type":"x"}]})";
  EXPECT_THROW(parse_text(line), DataError);
  LoadOptions opts;
  opts.allow_unknown_offsets = true;
  auto xs = parse_text(line, opts);
  EXPECT_FALSE(xs[0].gold.entities[0].mention.has_offsets());
}

TEST(Corpus, CodePointOffsetsInToyData) {
  auto ex = trial_example();
  ASSERT_EQ(ex.gold.events.size(), 3u);
  for (const auto& ev : ex.gold.events) {
    // The sentence contains curly quotes before "sentence", so bytes and code
    // points disagree there.
    EXPECT_EQ(utf8_substr(ex.text, ev.trigger.start, ev.trigger.end).value(), ev.trigger.text);
  }
}

TEST(Corpus, SaveLoadRoundTripIsByteIdentical) {
  Rng rng(99);
  TempDir dir;
  for (const SchemaGraph& schema : {tiny_ner_schema(), tiny_re_schema(), tiny_ee_schema()}) {
    std::vector<Example> xs;
    for (int i = 0; i < 1000; ++i) xs.push_back(random_example(rng, schema, "ex" + std::to_string(i)));
    for (auto& x : xs) canonicalize(x.gold);
    save_jsonl(xs, dir.str("a.jsonl"));
    auto back = load_jsonl(dir.str("a.jsonl"));
    ASSERT_EQ(back.size(), xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      ASSERT_EQ(back[i].id, xs[i].id);
      ASSERT_EQ(back[i].text, xs[i].text);
      ASSERT_EQ(back[i].gold, xs[i].gold);
    }
    save_jsonl(back, dir.str("b.jsonl"));
    EXPECT_EQ(read_file(dir.str("a.jsonl")), read_file(dir.str("b.jsonl")));
  }
}

TEST(Corpus, CanonicalizeSortsArgsAndDropsDuplicates) {
  Annotations a;
  Mention m{"x", 0, 1};
  Mention n{"y", 2, 3};
  a.events.push_back({m, "Meet", {{n, "place"}, {m, "entity"}}});
  a.events.push_back({m, "meet", {{m, "entity"}, {n, "place"}}});
  canonicalize(a);
  ASSERT_EQ(a.events.size(), 1u);
  EXPECT_EQ(a.events[0].type, "meet");
  EXPECT_EQ(a.events[0].args[0].role, "entity");
}

TEST(Corpus, FilterFollowsTableEightIterations) {
  const auto raw = load_toy_schema("ace");
  const auto ex = trial_example();
  auto it1 = make_subschema(raw, ids_named(raw, {"sentence", "attack"}), ids_named(raw, {"justice", "conflict"}), 1);
  auto one = filter_to_schema({ex}, raw, it1, false);
  ASSERT_EQ(one[0].gold.events.size(), 1u);
  EXPECT_EQ(one[0].gold.events[0].type, "sentence");
  EXPECT_EQ(one[0].gold.events[0].trigger.text, "sentence");

  auto it6 = make_subschema(raw, ids_named(raw, {"sentence", "trial hearing", "charge indict"}),
                            ids_named(raw, {"justice"}), 6);
  EXPECT_EQ(filter_to_schema({ex}, raw, it6, false)[0].gold.events.size(), 3u);
}

TEST(Corpus, FullTaxonomyFilterIsIdentity) {
  for (const char* ds : {"nerd", "nyt", "ace"}) {
    const auto raw = load_toy_schema(ds);
    const auto splits = load_toy_splits(ds);
    auto out = filter_to_schema(splits.dev, raw, raw, false);
    ASSERT_EQ(out.size(), splits.dev.size());
    for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i].gold, splits.dev[i].gold) << ds;
  }
}

TEST(Corpus, FilterDropsEmptyOnlyWhenAsked) {
  const auto raw = load_toy_schema("ace");
  const auto splits = load_toy_splits("ace");
  auto tiny = make_subschema(raw, ids_named(raw, {"meet"}), ids_named(raw, {"contact"}), 1);
  auto kept = filter_to_schema(splits.test, raw, tiny, false);
  auto dropped = filter_to_schema(splits.test, raw, tiny, true);
  EXPECT_EQ(kept.size(), splits.test.size());
  EXPECT_LT(dropped.size(), kept.size());
  for (const auto& x : dropped) EXPECT_FALSE(x.gold.empty());
}

TEST(Corpus, FilterEnforcesConstraintsAndRoles) {
  const auto raw = tiny_re_schema();
  Annotations gold;
  Mention a{"A", 0, 1}, b{"B", 2, 3};
  gold.relations.push_back({a, "person", "capital", b, "place"});  // violates (place, capital, place)
  gold.relations.push_back({a, "place", "capital", b, "place"});
  auto out = filter_annotations(gold, LabelProjector(raw, raw));
  ASSERT_EQ(out.relations.size(), 1u);
  EXPECT_EQ(out.relations[0].head_type, "place");

  const auto ee = tiny_ee_schema();
  Annotations ev;
  ev.events.push_back({a, "phone write", {{b, "place"}, {b, "entity"}}});
  auto e_out = filter_annotations(ev, LabelProjector(ee, ee));
  ASSERT_EQ(e_out.events[0].args.size(), 1u);
  EXPECT_EQ(e_out.events[0].args[0].role, "entity");
}

TEST(Corpus, FilterIsMonotoneUnderGrowth) {
  // Every record kept under a smaller schema is kept (possibly refined) under
  // a larger one, and refinement only moves down the taxonomy.
  const auto raw = load_toy_schema("ace");
  const auto splits = load_toy_splits("ace");
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    auto small = random_subschema(rng, raw, 0.3);
    std::set<NodeId> labels, structural;
    for (const auto& n : small.nodes()) {
      if (n.level == Level::Root || n.role != Role::EventType) continue;
      (n.structural ? structural : labels).insert(n.id);
    }
    for (const auto* s : raw.subs(Role::EventType)) {
      if (rng() % 3 == 0) labels.insert(s->id);
    }
    for (const auto* m : raw.majors(Role::EventType)) {
      if (!labels.count(m->id)) structural.insert(m->id);
    }
    auto big = make_subschema(raw, labels, structural, 2);
    auto a = filter_to_schema(splits.test, raw, small, false);
    auto b = filter_to_schema(splits.test, raw, big, false);
    for (std::size_t i = 0; i < a.size(); ++i) {
      ASSERT_LE(a[i].gold.events.size(), b[i].gold.events.size());
      for (const auto& ev : a[i].gold.events) {
        bool found = false;
        for (const auto& ev2 : b[i].gold.events) {
          if (ev2.trigger != ev.trigger) continue;
          auto chain = raw.ancestors_or_self(raw.node_by_name(ev2.type)->id);
          for (const auto* c : chain) found = found || c->name_key() == ev.type;
        }
        ASSERT_TRUE(found) << a[i].id << " " << ev.type;
      }
    }
  }
}

TEST(Corpus, RenameLabels) {
  Annotations gold;
  gold.events.push_back({{"breakdowns", 0, 10}, "divorce", {}});
  gold.events.push_back({{"marriages", 11, 20}, "marry", {}});
  auto out = rename_annotations(gold, {{"divorce", "separate"}});
  EXPECT_EQ(out.events[0].type, "separate");
  EXPECT_EQ(out.events[1].type, "marry");
}

TEST(Corpus, CheckAgainstSchema) {
  const auto raw = tiny_ee_schema();
  Example ok{"a", "x y", {}};
  ok.gold.events.push_back({{"x", 0, 1}, "meet", {{{"y", 2, 3}, "place"}}});
  Example bad_role = ok;
  bad_role.id = "b";
  bad_role.gold.events[0].type = "phone write";
  Example bad_type = ok;
  bad_type.id = "c";
  bad_type.gold.events[0].type = "teleport";
  auto problems = check_against_schema({ok, bad_role, bad_type}, raw);
  ASSERT_EQ(problems.size(), 2u);
  EXPECT_NE(problems[0].find("not allowed"), std::string::npos);
  EXPECT_NE(problems[1].find("unknown event type 'teleport'"), std::string::npos);
  for (const char* ds : {"nerd", "nyt", "ace"}) {
    const auto s = load_toy_splits(ds);
    EXPECT_TRUE(check_against_schema(s.train, load_toy_schema(ds)).empty()) << ds;
  }
}

TEST(Corpus, Stats) {
  EXPECT_EQ(stats({}).sentences, 0u);
  EXPECT_EQ(stats({}).annotations, 0u);
  std::vector<Example> xs(3);
  xs[0].gold.entities.push_back({{"a", 0, 1}, "person"});
  xs[1].gold.entities.push_back({{"b", 0, 1}, "person"});
  xs[2].gold.entities.push_back({{"c", 0, 1}, "island"});
  auto s = stats(xs);
  EXPECT_EQ(s.sentences, 3u);
  EXPECT_EQ(s.annotations, 3u);
  EXPECT_EQ(s.entity_types.at("person"), 2u);
  EXPECT_EQ(s.entity_types.at("island"), 1u);
}
