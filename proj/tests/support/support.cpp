#include "support.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "evokg/text.hpp"
#include "json.hpp"

#ifndef EVOKG_SOURCE_DIR
#error "EVOKG_SOURCE_DIR must be defined"
#endif

namespace fs = std::filesystem;

namespace evokg::testing {

std::string source_path(const std::string& rel) {
  return (fs::path(EVOKG_SOURCE_DIR) / rel).string();
}

SchemaGraph load_toy_schema(const std::string& dataset) {
  return load_schema(source_path("data/toy/" + dataset + "/raw_schema.json"));
}

SplitSet load_toy_splits(const std::string& dataset) {
  const std::string base = "data/toy/" + dataset + "/";
  SplitSet s;
  s.train = load_jsonl(source_path(base + "train.jsonl"));
  s.dev = load_jsonl(source_path(base + "dev.jsonl"));
  s.test = load_jsonl(source_path(base + "test.jsonl"));
  return s;
}

BenchmarkInputs ToyRun::inputs() const {
  BenchmarkInputs in;
  in.raw = &raw;
  in.splits = &splits;
  if (embeddings) in.embeddings = &*embeddings;
  if (cooc) in.cooc = &*cooc;
  return in;
}

ToyRun load_toy_run(const std::string& preset) {
  ToyRun run;
  run.cfg = load_run_config(source_path("configs/" + preset + ".json"));
  run.raw = load_schema(run.cfg.raw_schema);
  run.splits.train = load_jsonl(run.cfg.train);
  run.splits.dev = load_jsonl(run.cfg.dev);
  run.splits.test = load_jsonl(run.cfg.test);
  if (!run.cfg.embeddings.empty()) run.embeddings = EmbeddingStore::load(run.cfg.embeddings);
  if (!run.cfg.corpus.empty()) {
    run.cooc = CoocTable::build(load_corpus(run.cfg.corpus),
                                static_cast<std::size_t>(run.cfg.evolution.window));
  }
  return run;
}

SchemaGraph schema_from_text(const std::string& json_text) {
  return schema_from_json(nlohmann::json::parse(json_text));
}

SchemaGraph tiny_ner_schema() {
  return schema_from_text(R"({"task":"NER","nodes":[
    {"id":"r","name":"root","level":"root","role":"entity-type"},
    {"id":"per","name":"person","parent":"r","level":"major","role":"entity-type"},
    {"id":"act","name":"actor","parent":"per","level":"sub","role":"entity-type"},
    {"id":"pol","name":"politician","parent":"per","level":"sub","role":"entity-type"},
    {"id":"loc","name":"location","parent":"r","level":"major","role":"entity-type"},
    {"id":"isl","name":"island","parent":"loc","level":"sub","role":"entity-type"},
    {"id":"bow","name":"bodies of water","parent":"loc","level":"sub","role":"entity-type"}
  ],"version":1})");
}

SchemaGraph tiny_re_schema() {
  return schema_from_text(R"({"task":"RE","nodes":[
    {"id":"r","name":"root","level":"root","role":"relation"},
    {"id":"peo","name":"people","parent":"r","level":"major","role":"relation"},
    {"id":"pl","name":"place lived","parent":"peo","level":"sub","role":"relation"},
    {"id":"nat","name":"nationality","parent":"peo","level":"sub","role":"relation"},
    {"id":"loc","name":"location","parent":"r","level":"major","role":"relation"},
    {"id":"con","name":"contains","parent":"loc","level":"sub","role":"relation"},
    {"id":"cap","name":"capital","parent":"loc","level":"sub","role":"relation"},
    {"id":"per","name":"person","parent":"r","level":"major","role":"entity-type"},
    {"id":"gpe","name":"place","parent":"r","level":"major","role":"entity-type"}
  ],"re_constraints":[["person","place lived","place"],["person","nationality","place"],
    ["place","contains","place"],["place","capital","place"],["person","people","place"]],
  "version":1})");
}

SchemaGraph tiny_ee_schema() {
  return schema_from_text(R"({"task":"EE","nodes":[
    {"id":"r","name":"root","level":"root","role":"event-type"},
    {"id":"con","name":"contact","parent":"r","level":"major","role":"event-type"},
    {"id":"meet","name":"meet","parent":"con","level":"sub","role":"event-type"},
    {"id":"pw","name":"phone write","parent":"con","level":"sub","role":"event-type"},
    {"id":"bus","name":"business","parent":"r","level":"major","role":"event-type"},
    {"id":"mo","name":"merge organization","parent":"bus","level":"sub","role":"event-type"},
    {"id":"ent","name":"entity","parent":"r","level":"major","role":"arg-role"},
    {"id":"pla","name":"place","parent":"r","level":"major","role":"arg-role"},
    {"id":"org","name":"org","parent":"r","level":"major","role":"arg-role"}
  ],"ee_roles":{"meet":["entity","place"],"phone write":["entity"],
    "merge organization":["org","place"]},"version":1})");
}

TempDir::TempDir() {
  static Rng rng(std::random_device{}());
  for (;;) {
    auto p = fs::temp_directory_path() / ("evokg-test-" + std::to_string(rng()));
    if (fs::create_directory(p)) {
      path_ = p;
      return;
    }
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string TempDir::str(const std::string& rel) const {
  return rel.empty() ? path_.string() : (path_ / rel).string();
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out[fs::relative(entry.path(), root).generic_string()] = ss.str();
  }
  return out;
}

std::size_t cp_len(const std::string& s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::string WordSource::next() {
  static const char* syl[] = {"ka", "lo", "mi", "ra", "ve", "to", "su", "na", "di", "zo",
                              "pe", "qu", "fa", "ne", "bi", "ho", "gu", "ye", "ci", "wa"};
  static const char* accented[] = {"é", "ü", "ø", "ñ"};
  for (;;) {
    std::string w;
    const int n = 2 + static_cast<int>(rng_() % 3);
    for (int i = 0; i < n; ++i) w += syl[rng_() % 20];
    if (rng_() % 6 == 0) w += accented[rng_() % 4];
    if (rng_() % 2 == 0) w[0] = static_cast<char>(w[0] - 'a' + 'A');
    if (std::find(used_.begin(), used_.end(), w) == used_.end()) {
      used_.push_back(w);
      return w;
    }
  }
}

namespace {

struct TextBuilder {
  std::string text;
  std::size_t cps = 0;

  Mention add_mention(const std::vector<std::string>& toks) {
    if (!text.empty()) {
      text += ' ';
      ++cps;
    }
    Mention m;
    m.text = join(toks);
    m.start = static_cast<std::int64_t>(cps);
    text += m.text;
    cps += cp_len(m.text);
    m.end = static_cast<std::int64_t>(cps);
    return m;
  }

  void add_word(const std::string& w) {
    if (!text.empty()) {
      text += ' ';
      ++cps;
    }
    text += w;
    cps += cp_len(w);
  }
};

template <class T>
const T& pick(Rng& rng, const std::vector<T>& xs) {
  return xs[rng() % xs.size()];
}

}  // namespace

Example random_example(Rng& rng, const SchemaGraph& schema, const std::string& id, int max_records) {
  WordSource words(rng);
  TextBuilder tb;
  auto filler = [&] {
    if (rng() % 2) tb.add_word(words.next());
  };
  auto new_mention = [&] {
    filler();
    std::vector<std::string> toks;
    const int n = 1 + static_cast<int>(rng() % 2);
    for (int i = 0; i < n; ++i) toks.push_back(words.next());
    return tb.add_mention(toks);
  };

  Example ex;
  ex.id = id;
  const int n_records = static_cast<int>(rng() % (max_records + 1));
  switch (schema.task()) {
    case Task::NER: {
      std::vector<std::string> types;
      for (const auto* n : schema.labels(Role::EntityType)) types.push_back(n->name_key());
      if (types.empty()) break;
      for (int k = 0; k < n_records; ++k) ex.gold.entities.push_back({new_mention(), pick(rng, types)});
      break;
    }
    case Task::RE: {
      std::vector<std::vector<std::string>> triples;
      for (const auto& c : schema.re_constraints()) {
        const auto* h = schema.node(c.head);
        const auto* r = schema.node(c.relation);
        const auto* t = schema.node(c.tail);
        if (!h || !r || !t || h->structural || r->structural || t->structural) continue;
        triples.push_back({h->name_key(), r->name_key(), t->name_key()});
      }
      if (triples.empty()) break;
      std::vector<Mention> seen;
      auto mention = [&] {
        if (!seen.empty() && rng() % 3 == 0) return pick(rng, seen);
        seen.push_back(new_mention());
        return seen.back();
      };
      for (int k = 0; k < n_records; ++k) {
        const auto& tr = pick(rng, triples);
        Relation r;
        r.head = mention();
        r.head_type = tr[0];
        r.relation = tr[1];
        r.tail = mention();
        r.tail_type = tr[2];
        // gold never repeats a record
        if (std::find(ex.gold.relations.begin(), ex.gold.relations.end(), r) != ex.gold.relations.end()) continue;
        ex.gold.relations.push_back(std::move(r));
      }
      break;
    }
    case Task::EE: {
      std::vector<const SchemaNode*> types = schema.labels(Role::EventType);
      if (types.empty()) break;
      for (int k = 0; k < n_records; ++k) {
        const SchemaNode* t = pick(rng, types);
        Event ev;
        ev.type = t->name_key();
        ev.trigger = new_mention();
        auto it = schema.ee_roles().find(t->id);
        if (it != schema.ee_roles().end() && !it->second.empty()) {
          const int n_args = static_cast<int>(rng() % 3);
          for (int a = 0; a < n_args; ++a) {
            ev.args.push_back({new_mention(), schema.name_of(pick(rng, it->second))});
          }
        }
        ex.gold.events.push_back(std::move(ev));
      }
      break;
    }
  }
  filler();
  tb.add_word(".");
  ex.text = tb.text;
  return ex;
}

SchemaGraph random_subschema(Rng& rng, const SchemaGraph& raw, double p_sub, int version) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Role role = primary_role(raw.task());
  std::set<NodeId> labels;
  std::set<NodeId> structural;
  for (const auto* sub : raw.subs(role)) {
    if (u(rng) < p_sub) labels.insert(sub->id);
  }
  for (const auto* major : raw.majors(role)) {
    bool has_child = false;
    for (const auto* c : raw.children(major->id)) has_child = has_child || labels.count(c->id);
    if (has_child) {
      (u(rng) < 0.5 ? labels : structural).insert(major->id);
    } else if (u(rng) < 0.3) {
      labels.insert(major->id);
    }
  }
  return make_subschema(raw, labels, structural, version);
}

}  // namespace evokg::testing
