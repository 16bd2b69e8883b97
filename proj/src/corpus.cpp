#include "evokg/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include "evokg/error.hpp"
#include "evokg/text.hpp"

namespace evokg {

namespace {

template <typename T>
void dedupe_in_order(std::vector<T>& items) {
  std::set<T> seen;
  std::vector<T> out;
  out.reserve(items.size());
  for (auto& item : items) {
    if (seen.insert(item).second) out.push_back(std::move(item));
  }
  items = std::move(out);
}

nlohmann::ordered_json mention_to_json(const Mention& m) {
  nlohmann::ordered_json j;
  j["text"] = m.text;
  j["start"] = m.start;
  j["end"] = m.end;
  return j;
}

void check_type_name(const std::string& name, const std::string& example_id) {
  if (name.empty()) throw DataError("example " + example_id + ": empty type name");
  for (const auto& tok : split_ws(name)) {
    if (is_reserved_surface(tok)) {
      throw DataError("example " + example_id + ": type name uses reserved token " + tok);
    }
  }
}

Mention mention_from_json(const nlohmann::json& j, const std::string& text,
                          const std::string& example_id, const LoadOptions& options) {
  Mention m;
  m.text = j.at("text").get<std::string>();
  m.start = j.value("start", std::int64_t{-1});
  m.end = j.value("end", std::int64_t{-1});
  if (options.allow_unknown_offsets && m.start == -1 && m.end == -1) return m;
  const auto len = static_cast<std::int64_t>(utf8_length(text));
  if (m.start < 0 || m.start >= m.end || m.end > len) {
    throw DataError("offset violation in example " + example_id + ": mention '" + m.text + "' [" +
                    std::to_string(m.start) + "," + std::to_string(m.end) + ")");
  }
  auto sub = utf8_substr(text, static_cast<std::size_t>(m.start), static_cast<std::size_t>(m.end));
  if (!sub || *sub != m.text) {
    throw DataError("offset violation in example " + example_id + ": text at [" +
                    std::to_string(m.start) + "," + std::to_string(m.end) + ") is not '" + m.text +
                    "'");
  }
  return m;
}

}  // namespace

void canonicalize(Annotations& a) {
  for (auto& e : a.entities) e.type = canonical_name(e.type);
  for (auto& r : a.relations) {
    r.head_type = canonical_name(r.head_type);
    r.relation = canonical_name(r.relation);
    r.tail_type = canonical_name(r.tail_type);
  }
  for (auto& ev : a.events) {
    ev.type = canonical_name(ev.type);
    for (auto& arg : ev.args) arg.role = canonical_name(arg.role);
    std::sort(ev.args.begin(), ev.args.end(), [](const Argument& x, const Argument& y) {
      return std::tie(x.mention.start, x.mention.end, x.role, x.mention.text) <
             std::tie(y.mention.start, y.mention.end, y.role, y.mention.text);
    });
    ev.args.erase(std::unique(ev.args.begin(), ev.args.end()), ev.args.end());
  }
  dedupe_in_order(a.entities);
  dedupe_in_order(a.relations);
  dedupe_in_order(a.events);
}

Annotations sorted_set(Annotations a) {
  canonicalize(a);
  std::sort(a.entities.begin(), a.entities.end());
  std::sort(a.relations.begin(), a.relations.end());
  std::sort(a.events.begin(), a.events.end());
  return a;
}

nlohmann::ordered_json example_to_json(const Example& ex) {
  nlohmann::ordered_json j;
  j["id"] = ex.id;
  j["text"] = ex.text;
  if (!ex.gold.entities.empty()) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& e : ex.gold.entities) {
      auto je = mention_to_json(e.mention);
      je["type"] = e.type;
      arr.push_back(std::move(je));
    }
    j["entities"] = std::move(arr);
  }
  if (!ex.gold.relations.empty()) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : ex.gold.relations) {
      nlohmann::ordered_json jr;
      jr["head"] = mention_to_json(r.head);
      jr["head_type"] = r.head_type;
      jr["relation"] = r.relation;
      jr["tail"] = mention_to_json(r.tail);
      jr["tail_type"] = r.tail_type;
      arr.push_back(std::move(jr));
    }
    j["relations"] = std::move(arr);
  }
  if (!ex.gold.events.empty()) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& ev : ex.gold.events) {
      nlohmann::ordered_json jv;
      jv["trigger"] = mention_to_json(ev.trigger);
      jv["type"] = ev.type;
      auto args = nlohmann::ordered_json::array();
      for (const auto& a : ev.args) {
        nlohmann::ordered_json ja;
        ja["mention"] = mention_to_json(a.mention);
        ja["role"] = a.role;
        args.push_back(std::move(ja));
      }
      jv["args"] = std::move(args);
      arr.push_back(std::move(jv));
    }
    j["events"] = std::move(arr);
  }
  return j;
}

Example example_from_json(const nlohmann::json& j, const LoadOptions& options) {
  Example ex;
  ex.id = j.at("id").get<std::string>();
  ex.text = j.at("text").get<std::string>();
  for (const auto& tok : split_ws(ex.text)) {
    if (is_reserved_surface(tok)) {
      throw DataError("example " + ex.id + ": text contains reserved token " + tok);
    }
  }
  if (j.contains("entities")) {
    for (const auto& je : j.at("entities")) {
      Entity e;
      e.mention = mention_from_json(je, ex.text, ex.id, options);
      e.type = je.at("type").get<std::string>();
      check_type_name(e.type, ex.id);
      ex.gold.entities.push_back(std::move(e));
    }
  }
  if (j.contains("relations")) {
    for (const auto& jr : j.at("relations")) {
      Relation r;
      r.head = mention_from_json(jr.at("head"), ex.text, ex.id, options);
      r.head_type = jr.at("head_type").get<std::string>();
      r.relation = jr.at("relation").get<std::string>();
      r.tail = mention_from_json(jr.at("tail"), ex.text, ex.id, options);
      r.tail_type = jr.at("tail_type").get<std::string>();
      check_type_name(r.head_type, ex.id);
      check_type_name(r.relation, ex.id);
      check_type_name(r.tail_type, ex.id);
      ex.gold.relations.push_back(std::move(r));
    }
  }
  if (j.contains("events")) {
    for (const auto& jv : j.at("events")) {
      Event ev;
      ev.trigger = mention_from_json(jv.at("trigger"), ex.text, ex.id, options);
      ev.type = jv.at("type").get<std::string>();
      check_type_name(ev.type, ex.id);
      if (jv.contains("args")) {
        for (const auto& ja : jv.at("args")) {
          Argument a;
          a.mention = mention_from_json(ja.at("mention"), ex.text, ex.id, options);
          a.role = ja.at("role").get<std::string>();
          check_type_name(a.role, ex.id);
          ev.args.push_back(std::move(a));
        }
      }
      ex.gold.events.push_back(std::move(ev));
    }
  }
  canonicalize(ex.gold);
  return ex;
}

std::vector<Example> parse_jsonl(std::istream& in, const std::string& source_name,
                                 const LoadOptions& options) {
  std::vector<Example> out;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (split_ws(line).empty()) continue;
    const std::string where = source_name + ":" + std::to_string(line_no) + ": ";
    try {
      Example ex = example_from_json(nlohmann::json::parse(line), options);
      if (!ids.insert(ex.id).second) throw DataError("duplicate example id " + ex.id);
      out.push_back(std::move(ex));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + "malformed line: " + e.what());
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
  }
  return out;
}

std::vector<Example> load_jsonl(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  return parse_jsonl(in, path, options);
}

std::string to_jsonl(const std::vector<Example>& examples) {
  std::string out;
  for (const auto& ex : examples) {
    out += example_to_json(ex).dump();
    out += '\n';
  }
  return out;
}

void save_jsonl(const std::vector<Example>& examples, const std::string& path) {
  write_file(path, to_jsonl(examples));
}

std::vector<std::string> check_against_schema(const std::vector<Example>& examples,
                                              const SchemaGraph& raw) {
  std::vector<std::string> out;
  for (const auto& ex : examples) {
    auto expect = [&](const std::string& name, Role role, std::string_view what) -> const SchemaNode* {
      const SchemaNode* n = raw.node_by_name(name);
      if (!n || n->level == Level::Root || n->role != role) {
        out.push_back("example " + ex.id + ": unknown " + std::string(what) + " '" + name + "'");
        return nullptr;
      }
      return n;
    };
    for (const auto& e : ex.gold.entities) expect(e.type, Role::EntityType, "entity type");
    for (const auto& r : ex.gold.relations) {
      expect(r.head_type, Role::EntityType, "entity type");
      expect(r.relation, Role::Relation, "relation");
      expect(r.tail_type, Role::EntityType, "entity type");
    }
    for (const auto& ev : ex.gold.events) {
      const SchemaNode* type = expect(ev.type, Role::EventType, "event type");
      for (const auto& a : ev.args) {
        const SchemaNode* role = expect(a.role, Role::ArgRole, "argument role");
        if (!type || !role) continue;
        auto it = raw.ee_roles().find(type->id);
        if (it == raw.ee_roles().end() ||
            std::find(it->second.begin(), it->second.end(), role->id) == it->second.end()) {
          out.push_back("example " + ex.id + ": role '" + a.role + "' not allowed for event type '" +
                        ev.type + "'");
        }
      }
    }
  }
  return out;
}

Annotations filter_annotations(const Annotations& gold, const LabelProjector& projector) {
  const SchemaGraph& current = projector.current();
  Annotations out;
  for (const auto& e : gold.entities) {
    if (auto t = projector.project(e.type)) out.entities.push_back({e.mention, *t});
  }

  std::set<std::tuple<std::string, std::string, std::string>> allowed;
  for (const auto& c : current.re_constraints()) {
    allowed.emplace(current.name_of(c.head), current.name_of(c.relation), current.name_of(c.tail));
  }
  for (const auto& r : gold.relations) {
    auto h = projector.project(r.head_type);
    auto rel = projector.project(r.relation);
    auto t = projector.project(r.tail_type);
    if (!h || !rel || !t) continue;
    if (!allowed.count({*h, *rel, *t})) continue;
    out.relations.push_back({r.head, *h, *rel, r.tail, *t});
  }

  for (const auto& ev : gold.events) {
    auto type = projector.project(ev.type);
    if (!type) continue;
    Event projected{ev.trigger, *type, {}};
    const SchemaNode* type_node = current.label_by_name(*type);
    auto roles_it = current.ee_roles().find(type_node->id);
    for (const auto& a : ev.args) {
      auto role = projector.project(a.role);
      if (!role || roles_it == current.ee_roles().end()) continue;
      const SchemaNode* role_node = current.label_by_name(*role);
      const auto& roles = roles_it->second;
      if (std::find(roles.begin(), roles.end(), role_node->id) == roles.end()) continue;
      projected.args.push_back({a.mention, *role});
    }
    out.events.push_back(std::move(projected));
  }
  canonicalize(out);
  return out;
}

std::vector<Example> filter_to_schema(const std::vector<Example>& examples, const SchemaGraph& raw,
                                      const SchemaGraph& schema, bool drop_empty) {
  const LabelProjector projector(raw, schema);
  std::vector<Example> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    Example filtered{ex.id, ex.text, filter_annotations(ex.gold, projector)};
    if (drop_empty && filtered.gold.empty()) continue;
    out.push_back(std::move(filtered));
  }
  return out;
}

Annotations rename_annotations(const Annotations& gold,
                               const std::map<std::string, std::string>& mapping) {
  auto rn = [&](const std::string& name) {
    auto it = mapping.find(name);
    return it == mapping.end() ? name : it->second;
  };
  Annotations out = gold;
  for (auto& e : out.entities) e.type = rn(e.type);
  for (auto& r : out.relations) {
    r.head_type = rn(r.head_type);
    r.relation = rn(r.relation);
    r.tail_type = rn(r.tail_type);
  }
  for (auto& ev : out.events) {
    ev.type = rn(ev.type);
    for (auto& a : ev.args) a.role = rn(a.role);
  }
  canonicalize(out);
  return out;
}

std::vector<Example> rename_labels(const std::vector<Example>& examples,
                                   const std::map<std::string, std::string>& mapping) {
  std::vector<Example> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) out.push_back({ex.id, ex.text, rename_annotations(ex.gold, mapping)});
  return out;
}

SplitStats stats(const std::vector<Example>& examples) {
  SplitStats s;
  s.sentences = examples.size();
  for (const auto& ex : examples) {
    s.annotations += ex.gold.size();
    for (const auto& e : ex.gold.entities) ++s.entity_types[e.type];
    for (const auto& r : ex.gold.relations) ++s.relations[r.relation];
    for (const auto& ev : ex.gold.events) {
      ++s.event_types[ev.type];
      for (const auto& a : ev.args) ++s.arg_roles[a.role];
    }
  }
  return s;
}

}  // namespace evokg
