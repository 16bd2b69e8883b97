#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "evokg/error.hpp"
#include "evokg/schema.hpp"
#include "evokg/text.hpp"
#include "support.hpp"

using namespace evokg;
using namespace evokg::testing;

namespace {

SchemaNode mk(std::string id, std::string name, std::optional<std::string> parent, Level level,
              Role role = Role::EventType) {
  SchemaNode n;
  n.id = std::move(id);
  n.name = normalize_name(name);
  n.parent = std::move(parent);
  n.level = level;
  n.role = role;
  return n;
}

std::set<NodeId> ids_named(const SchemaGraph& g, std::initializer_list<const char*> names) {
  std::set<NodeId> out;
  for (const char* n : names) out.insert(g.node_by_name(n)->id);
  return out;
}

std::set<std::string> name_set(const SchemaGraph& g) {
  std::set<std::string> out;
  for (const auto& n : g.nodes()) out.insert(n.name_key());
  return out;
}

}  // namespace

TEST(Schema, ToyTaxonomiesAreWellFormed) {
  for (const char* ds : {"nerd", "nyt", "ace"}) {
    EXPECT_TRUE(validate(load_toy_schema(ds)).empty()) << ds;
  }
  const auto nerd = load_toy_schema("nerd");
  EXPECT_EQ(nerd.subs(Role::EntityType).size(), 66u);
  EXPECT_EQ(nerd.majors(Role::EntityType).size(), 8u);
  EXPECT_EQ(load_toy_schema("nyt").subs(Role::Relation).size(), 24u);
  EXPECT_EQ(load_toy_schema("ace").subs(Role::EventType).size(), 33u);
}

TEST(Schema, DanglingParentReported) {
  SchemaGraph g(Task::EE,
                {mk("r", "root", std::nullopt, Level::Root), mk("c", "contact", "r", Level::Major),
                 mk("m", "meet", "ghost", Level::Sub)},
                {}, {}, 1);
  EXPECT_EQ(validate(g), std::vector<std::string>{"dangling parent: m"});
}

TEST(Schema, DuplicateNameReported) {
  SchemaGraph g(Task::EE,
                {mk("r", "root", std::nullopt, Level::Root), mk("c", "contact", "r", Level::Major),
                 mk("m1", "meet", "c", Level::Sub), mk("m2", "Meet", "c", Level::Sub)},
                {}, {}, 1);
  // oracle: linear scan over names
  std::map<std::string, int> counts;
  for (const auto& n : g.nodes()) counts[n.name_key()]++;
  ASSERT_EQ(counts["meet"], 2);
  EXPECT_EQ(validate(g), std::vector<std::string>{"duplicate name: meet"});
}

TEST(Schema, StructuralViolationsReported) {
  SchemaGraph deep(Task::EE,
                   {mk("r", "root", std::nullopt, Level::Root), mk("c", "contact", "r", Level::Major),
                    mk("m", "meet", "c", Level::Sub), mk("x", "brief meet", "m", Level::Sub)},
                   {}, {}, 1);
  EXPECT_EQ(validate(deep), std::vector<std::string>{"level mismatch: x"});

  SchemaGraph two_roots(Task::EE,
                        {mk("r", "root", std::nullopt, Level::Root), mk("q", "other", std::nullopt, Level::Root)},
                        {}, {}, 1);
  EXPECT_EQ(validate(two_roots), std::vector<std::string>{"multiple roots: r, q"});
  EXPECT_EQ(validate(SchemaGraph(Task::NER, {}, {}, {}, 1)), std::vector<std::string>{"no root"});
}

TEST(Schema, JsonLoaderRejectsInvalidGraphs) {
  EXPECT_THROW(schema_from_text(R"({"task":"NER","nodes":[
      {"id":"r","name":"root","level":"root","role":"entity-type"},
      {"id":"a","name":"x","parent":"zz","level":"major","role":"entity-type"}]})"),
               DataError);
  EXPECT_THROW(schema_from_text(R"({"task":"XX","nodes":[]})"), DataError);
  EXPECT_THROW(schema_from_text(R"({"task":"RE","nodes":[
      {"id":"r","name":"root","level":"root","role":"relation"}],
      "re_constraints":[["a","b","c"]]})"),
               DataError);
}

TEST(Schema, JsonRoundTrip) {
  for (const char* ds : {"nerd", "nyt", "ace"}) {
    const auto g = load_toy_schema(ds);
    const auto back = schema_from_json(nlohmann::json::parse(schema_to_json(g).dump()));
    EXPECT_EQ(schema_to_json(back).dump(), schema_to_json(g).dump()) << ds;
  }
  Rng rng(5);
  const auto ace = load_toy_schema("ace");
  auto sub = random_subschema(rng, ace, 0.4, 3);
  const auto back = schema_from_json(nlohmann::json::parse(schema_to_json(sub).dump()));
  EXPECT_EQ(schema_to_json(back).dump(), schema_to_json(sub).dump());
  EXPECT_EQ(back.version(), 3);
}

TEST(Schema, ProjectionFollowsTaxonomy) {
  const auto raw = load_toy_schema("ace");
  // iteration-1 style: contact present as a label, meet absent
  auto it1 = make_subschema(raw, ids_named(raw, {"contact", "transport"}), ids_named(raw, {"movement"}), 1);
  EXPECT_EQ(it1.name_of(*project_label("meet", raw, it1)), "contact");
  auto it2 = make_subschema(raw, ids_named(raw, {"contact", "meet"}), {}, 2);
  EXPECT_EQ(it2.name_of(*project_label("meet", raw, it2)), "meet");
  // neither sentence nor justice present
  EXPECT_FALSE(project_label("sentence", raw, it1).has_value());
  // structural parents are never projection targets
  auto it3 = make_subschema(raw, ids_named(raw, {"sentence"}), ids_named(raw, {"justice"}), 3);
  EXPECT_FALSE(project_label("trial hearing", raw, it3).has_value());
  EXPECT_THROW(project_label("teleport", raw, it1), DataError);
}

TEST(Schema, ProjectionIsIdempotent) {
  const auto raw = load_toy_schema("ace");
  Rng rng(17);
  for (int t = 0; t < 50; ++t) {
    auto s = random_subschema(rng, raw, 0.5);
    LabelProjector proj(raw, s);
    for (const auto* n : raw.labels(Role::EventType)) {
      auto p = proj.project(n->name_key());
      if (!p) continue;
      ASSERT_EQ(proj.project(*p), p);
      ASSERT_NE(s.label_by_name(*p), nullptr);
    }
  }
}

TEST(Schema, RenameKeepsNodeCount) {
  const auto raw = load_toy_schema("ace");
  auto g = apply_rename(raw, {{"divorce", {"separate"}}});
  EXPECT_EQ(g.nodes().size(), raw.nodes().size());
  EXPECT_EQ(g.node_by_name("divorce"), nullptr);
  ASSERT_NE(g.node_by_name("separate"), nullptr);
  EXPECT_EQ(g.node_by_name("separate")->id, raw.node_by_name("divorce")->id);
  EXPECT_EQ(g.version(), raw.version() + 1);
}

TEST(Schema, EmptyRenameBumpsVersionOnly) {
  const auto raw = load_toy_schema("ace");
  auto g = apply_rename(raw, {});
  auto a = schema_to_json(raw);
  auto b = schema_to_json(g);
  EXPECT_EQ(b["version"], raw.version() + 1);
  a.erase("version");
  b.erase("version");
  EXPECT_EQ(a, b);
}

TEST(Schema, RenameComposition) {
  const auto raw = load_toy_schema("ace");
  auto there = apply_rename(raw, {{"marry", {"wed"}}});
  auto back = apply_rename(there, {{"wed", {"marry"}}});
  EXPECT_EQ(name_set(back), name_set(raw));
  // renames are simultaneous, so a swap is legal
  auto swapped = apply_rename(raw, {{"marry", {"divorce"}}, {"divorce", {"marry"}}});
  EXPECT_EQ(swapped.node_by_name("marry")->id, raw.node_by_name("divorce")->id);
}

TEST(Schema, RenameErrors) {
  const auto raw = load_toy_schema("ace");
  EXPECT_THROW(apply_rename(raw, {{"teleport", {"x"}}}), DataError);
  EXPECT_THROW(apply_rename(raw, {{"marry", {"divorce"}}}), DataError);
  EXPECT_THROW(apply_rename(raw, {{"marry", {"x"}}, {"divorce", {"x"}}}), DataError);
  EXPECT_THROW(apply_rename(raw, {{"marry", {}}}), DataError);
}

TEST(Schema, SubschemaProjectsConstraintsAndRoles) {
  const auto raw = tiny_re_schema();
  auto s = make_subschema(raw, ids_named(raw, {"place lived", "location"}), ids_named(raw, {"people"}), 1);
  EXPECT_TRUE(validate(s).empty());
  std::set<std::vector<std::string>> got;
  for (const auto& c : s.re_constraints()) got.insert({s.name_of(c.head), s.name_of(c.relation), s.name_of(c.tail)});
  // contains/capital collapse onto location; nationality and people have no target
  EXPECT_EQ(got, (std::set<std::vector<std::string>>{{"person", "place lived", "place"},
                                                     {"place", "location", "place"}}));

  const auto ee = tiny_ee_schema();
  auto e = make_subschema(ee, ids_named(ee, {"contact"}), {}, 1);
  const auto& roles = e.ee_roles().at(e.node_by_name("contact")->id);
  std::set<std::string> role_names;
  for (const auto& r : roles) role_names.insert(e.name_of(r));
  EXPECT_EQ(role_names, (std::set<std::string>{"entity", "place"}));
  EXPECT_EQ(e.ee_roles().size(), 1u);
}

TEST(Schema, AccessorsRespectStructuralFlag) {
  const auto raw = load_toy_schema("ace");
  auto s = make_subschema(raw, ids_named(raw, {"meet", "attack"}), ids_named(raw, {"contact", "conflict"}), 1);
  EXPECT_EQ(s.labels(Role::EventType).size(), 2u);
  EXPECT_EQ(s.subs(Role::EventType).size(), 2u);
  EXPECT_EQ(s.majors(Role::EventType).size(), 2u);
  EXPECT_EQ(s.label_by_name("contact"), nullptr);
  EXPECT_NE(s.node_by_name("contact"), nullptr);
  auto chain = s.ancestors_or_self(s.node_by_name("meet")->id);
  ASSERT_EQ(chain.size(), 3u);
  EXPECT_EQ(chain[1]->name_key(), "contact");
  EXPECT_EQ(chain[2]->level, Level::Root);
  // aux arg roles survive every sub-schema
  EXPECT_EQ(s.labels(Role::ArgRole).size(), raw.labels(Role::ArgRole).size());
}
