#include "evokg/schema.hpp"

#include <algorithm>
#include <fstream>

#include "evokg/error.hpp"
#include "evokg/text.hpp"

namespace evokg {

std::string_view to_string(Task task) {
  switch (task) {
    case Task::NER: return "NER";
    case Task::RE: return "RE";
    case Task::EE: return "EE";
  }
  return "?";
}

std::string_view to_string(Level level) {
  switch (level) {
    case Level::Root: return "root";
    case Level::Major: return "major";
    case Level::Sub: return "sub";
  }
  return "?";
}

std::string_view to_string(Role role) {
  switch (role) {
    case Role::EntityType: return "entity-type";
    case Role::Relation: return "relation";
    case Role::EventType: return "event-type";
    case Role::ArgRole: return "arg-role";
  }
  return "?";
}

Task parse_task(std::string_view s) {
  if (s == "NER") return Task::NER;
  if (s == "RE") return Task::RE;
  if (s == "EE") return Task::EE;
  throw DataError("unknown task: " + std::string(s));
}

Level parse_level(std::string_view s) {
  if (s == "root") return Level::Root;
  if (s == "major") return Level::Major;
  if (s == "sub") return Level::Sub;
  throw DataError("unknown level: " + std::string(s));
}

Role parse_role(std::string_view s) {
  if (s == "entity-type") return Role::EntityType;
  if (s == "relation") return Role::Relation;
  if (s == "event-type") return Role::EventType;
  if (s == "arg-role") return Role::ArgRole;
  throw DataError("unknown role: " + std::string(s));
}

Role primary_role(Task task) {
  switch (task) {
    case Task::NER: return Role::EntityType;
    case Task::RE: return Role::Relation;
    case Task::EE: return Role::EventType;
  }
  return Role::EntityType;
}

std::string SchemaNode::name_key() const { return join(name); }

SchemaGraph::SchemaGraph(Task task, std::vector<SchemaNode> nodes,
                         std::vector<ReConstraint> re_constraints,
                         std::map<NodeId, std::vector<NodeId>> ee_roles, int version)
    : task_(task),
      version_(version),
      nodes_(std::move(nodes)),
      re_constraints_(std::move(re_constraints)),
      ee_roles_(std::move(ee_roles)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    by_id_.emplace(nodes_[i].id, i);
    by_name_.emplace(nodes_[i].name_key(), i);
  }
}

const SchemaNode* SchemaGraph::node(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &nodes_[it->second];
}

const SchemaNode* SchemaGraph::node_by_name(std::string_view name) const {
  auto it = by_name_.find(canonical_name(name));
  return it == by_name_.end() ? nullptr : &nodes_[it->second];
}

const SchemaNode* SchemaGraph::label_by_name(std::string_view name) const {
  const SchemaNode* n = node_by_name(name);
  if (!n || n->structural || n->level == Level::Root) return nullptr;
  return n;
}

const SchemaNode* SchemaGraph::root() const {
  for (const auto& n : nodes_) {
    if (n.level == Level::Root) return &n;
  }
  return nullptr;
}

std::vector<const SchemaNode*> SchemaGraph::children(std::string_view id) const {
  std::vector<const SchemaNode*> out;
  for (const auto& n : nodes_) {
    if (n.parent && *n.parent == id) out.push_back(&n);
  }
  return out;
}

std::vector<const SchemaNode*> SchemaGraph::ancestors_or_self(std::string_view id) const {
  std::vector<const SchemaNode*> chain;
  const SchemaNode* cur = node(id);
  while (cur && chain.size() <= nodes_.size()) {
    chain.push_back(cur);
    cur = cur->parent ? node(*cur->parent) : nullptr;
  }
  return chain;
}

std::vector<const SchemaNode*> SchemaGraph::labels(Role role) const {
  std::vector<const SchemaNode*> out;
  for (const auto& n : nodes_) {
    if (n.role == role && n.level != Level::Root && !n.structural) out.push_back(&n);
  }
  return out;
}

std::vector<const SchemaNode*> SchemaGraph::subs(Role role) const {
  std::vector<const SchemaNode*> out;
  for (const auto& n : nodes_) {
    if (n.role == role && n.level == Level::Sub) out.push_back(&n);
  }
  return out;
}

std::vector<const SchemaNode*> SchemaGraph::majors(Role role) const {
  std::vector<const SchemaNode*> out;
  for (const auto& n : nodes_) {
    if (n.role == role && n.level == Level::Major) out.push_back(&n);
  }
  return out;
}

std::string SchemaGraph::name_of(std::string_view id) const {
  const SchemaNode* n = node(id);
  return n ? n->name_key() : std::string();
}

SchemaGraph SchemaGraph::with_version(int version) const {
  return SchemaGraph(task_, nodes_, re_constraints_, ee_roles_, version);
}

std::vector<std::string> validate(const SchemaGraph& graph) {
  std::vector<std::string> out;
  const auto nodes = graph.nodes();

  std::set<std::string> seen_ids;
  for (const auto& n : nodes) {
    if (n.id.empty()) out.push_back("empty id");
    if (!seen_ids.insert(n.id).second) out.push_back("duplicate id: " + n.id);
    if (n.name.empty()) out.push_back("empty name: " + n.id);
    for (const auto& tok : n.name) {
      if (tok.empty() || split_ws(tok).size() != 1 || tok != to_lower(tok)) {
        out.push_back("bad name token: " + n.id);
        break;
      }
    }
  }

  std::vector<std::string> roots;
  for (const auto& n : nodes) {
    if (n.level == Level::Root) roots.push_back(n.id);
  }
  if (roots.empty()) out.push_back("no root");
  if (roots.size() > 1) out.push_back("multiple roots: " + join(roots, ", "));

  for (const auto& n : nodes) {
    if (n.level == Level::Root) {
      if (n.parent) out.push_back("root has parent: " + n.id);
      continue;
    }
    if (!n.parent) {
      out.push_back("missing parent: " + n.id);
      continue;
    }
    const SchemaNode* p = graph.node(*n.parent);
    if (!p) {
      out.push_back("dangling parent: " + n.id);
      continue;
    }
    const bool ok = (n.level == Level::Major && p->level == Level::Root) ||
                    (n.level == Level::Sub && p->level == Level::Major);
    if (!ok) out.push_back("level mismatch: " + n.id);
    if (n.structural && n.level != Level::Major) out.push_back("structural non-major: " + n.id);

    // Parent chains must reach the root without revisiting a node.
    std::set<std::string> visited{n.id};
    const SchemaNode* cur = p;
    while (cur && cur->parent) {
      if (!visited.insert(cur->id).second) {
        out.push_back("cycle: " + n.id);
        break;
      }
      cur = graph.node(*cur->parent);
    }
  }

  std::map<std::string, int> name_counts;
  std::vector<std::string> name_order;
  for (const auto& n : nodes) {
    if (n.name.empty()) continue;
    const std::string key = to_lower(n.name_key());
    if (name_counts[key]++ == 0) name_order.push_back(key);
  }
  for (const auto& key : name_order) {
    if (name_counts[key] > 1) out.push_back("duplicate name: " + key);
  }

  auto check_role = [&](const NodeId& id, Role role, std::string_view what) {
    const SchemaNode* n = graph.node(id);
    if (!n) {
      out.push_back("unknown " + std::string(what) + " node: " + id);
    } else if (n->role != role) {
      out.push_back("wrong role for " + std::string(what) + ": " + id);
    }
  };
  for (const auto& c : graph.re_constraints()) {
    check_role(c.head, Role::EntityType, "constraint");
    check_role(c.relation, Role::Relation, "constraint");
    check_role(c.tail, Role::EntityType, "constraint");
  }
  for (const auto& [event, roles] : graph.ee_roles()) {
    check_role(event, Role::EventType, "ee_roles");
    for (const auto& r : roles) check_role(r, Role::ArgRole, "ee_roles");
  }
  return out;
}

std::optional<NodeId> project_label(std::string_view raw_label, const SchemaGraph& raw,
                                    const SchemaGraph& current) {
  const SchemaNode* start = raw.node_by_name(raw_label);
  if (!start || start->level == Level::Root) {
    throw DataError("label not in raw taxonomy: " + std::string(raw_label));
  }
  for (const SchemaNode* a : raw.ancestors_or_self(start->id)) {
    if (a->level == Level::Root) break;
    if (const SchemaNode* hit = current.label_by_name(a->name_key())) return hit->id;
  }
  return std::nullopt;
}

LabelProjector::LabelProjector(const SchemaGraph& raw, const SchemaGraph& current)
    : raw_(&raw), current_(&current) {
  for (const auto& n : raw.nodes()) {
    if (n.level == Level::Root) continue;
    std::optional<std::string> target;
    if (auto id = project_label(n.name_key(), raw, current)) target = current.name_of(*id);
    table_.emplace(n.name_key(), std::move(target));
  }
}

std::optional<std::string> LabelProjector::project(std::string_view raw_label) const {
  auto it = table_.find(canonical_name(raw_label));
  if (it == table_.end()) throw DataError("label not in raw taxonomy: " + std::string(raw_label));
  return it->second;
}

SchemaGraph apply_rename(const SchemaGraph& graph,
                         const std::map<std::string, std::vector<std::string>>& mapping) {
  std::map<std::string, std::string> renames;  // canonical old -> canonical new
  std::vector<std::string> unknown;
  for (const auto& [old_name, new_tokens] : mapping) {
    const std::string key = canonical_name(old_name);
    if (!graph.node_by_name(key)) unknown.push_back(old_name);
    std::string joined;
    for (const auto& t : new_tokens) joined += (joined.empty() ? "" : " ") + t;
    renames[key] = canonical_name(joined);
  }
  if (!unknown.empty()) throw DataError("rename of unknown name(s): " + join(unknown, ", "));

  std::set<std::string> surviving;
  for (const auto& n : graph.nodes()) {
    if (!renames.count(n.name_key())) surviving.insert(n.name_key());
  }
  std::vector<std::string> collisions;
  std::set<std::string> targets;
  for (const auto& [old_name, new_name] : renames) {
    if (new_name.empty() || surviving.count(new_name) || !targets.insert(new_name).second) {
      collisions.push_back(old_name + " -> " + new_name);
    }
  }
  if (!collisions.empty()) throw DataError("rename collision: " + join(collisions, ", "));

  std::vector<SchemaNode> nodes(graph.nodes().begin(), graph.nodes().end());
  for (auto& n : nodes) {
    auto it = renames.find(n.name_key());
    if (it != renames.end()) n.name = split_ws(it->second);
  }
  return SchemaGraph(graph.task(), std::move(nodes), graph.re_constraints(), graph.ee_roles(),
                     graph.version() + 1);
}

SchemaGraph make_subschema(const SchemaGraph& raw, const std::set<NodeId>& labels,
                           const std::set<NodeId>& structural, int version) {
  const Role primary = primary_role(raw.task());
  std::vector<SchemaNode> nodes;
  for (const auto& n : raw.nodes()) {
    if (n.level == Level::Root || n.role != primary || labels.count(n.id)) {
      SchemaNode copy = n;
      copy.structural = false;
      nodes.push_back(std::move(copy));
    } else if (structural.count(n.id)) {
      SchemaNode copy = n;
      copy.structural = true;
      nodes.push_back(std::move(copy));
    }
  }
  const SchemaGraph bare(raw.task(), nodes, {}, {}, version);
  const LabelProjector proj(raw, bare);

  auto projected_id = [&](const NodeId& raw_id) -> std::optional<NodeId> {
    auto name = proj.project(raw.name_of(raw_id));
    if (!name) return std::nullopt;
    return bare.node_by_name(*name)->id;
  };

  std::set<ReConstraint> constraints;
  for (const auto& c : raw.re_constraints()) {
    auto h = projected_id(c.head);
    auto r = projected_id(c.relation);
    auto t = projected_id(c.tail);
    if (h && r && t) constraints.insert({*h, *r, *t});
  }

  std::map<NodeId, std::vector<NodeId>> ee_roles;
  for (const auto& n : raw.nodes()) {
    auto it = raw.ee_roles().find(n.id);
    if (it == raw.ee_roles().end()) continue;
    auto target = projected_id(n.id);
    if (!target) continue;
    auto& roles = ee_roles[*target];
    for (const auto& role : it->second) {
      auto pr = projected_id(role);
      if (pr && std::find(roles.begin(), roles.end(), *pr) == roles.end()) roles.push_back(*pr);
    }
  }

  return SchemaGraph(raw.task(), std::move(nodes),
                     std::vector<ReConstraint>(constraints.begin(), constraints.end()),
                     std::move(ee_roles), version);
}

nlohmann::ordered_json schema_to_json(const SchemaGraph& graph) {
  nlohmann::ordered_json j;
  j["task"] = std::string(to_string(graph.task()));
  auto nodes = nlohmann::ordered_json::array();
  for (const auto& n : graph.nodes()) {
    nlohmann::ordered_json jn;
    jn["id"] = n.id;
    jn["name"] = n.name_key();
    if (n.parent) jn["parent"] = *n.parent;
    jn["level"] = std::string(to_string(n.level));
    jn["role"] = std::string(to_string(n.role));
    if (n.structural) jn["structural"] = true;
    nodes.push_back(std::move(jn));
  }
  j["nodes"] = std::move(nodes);
  if (graph.task() == Task::RE || !graph.re_constraints().empty()) {
    auto rc = nlohmann::ordered_json::array();
    for (const auto& c : graph.re_constraints()) {
      rc.push_back({graph.name_of(c.head), graph.name_of(c.relation), graph.name_of(c.tail)});
    }
    j["re_constraints"] = std::move(rc);
  }
  if (graph.task() == Task::EE || !graph.ee_roles().empty()) {
    nlohmann::ordered_json er = nlohmann::ordered_json::object();
    for (const auto& n : graph.nodes()) {
      auto it = graph.ee_roles().find(n.id);
      if (it == graph.ee_roles().end()) continue;
      auto roles = nlohmann::ordered_json::array();
      for (const auto& r : it->second) roles.push_back(graph.name_of(r));
      er[n.name_key()] = std::move(roles);
    }
    j["ee_roles"] = std::move(er);
  }
  j["version"] = graph.version();
  return j;
}

SchemaGraph schema_from_json(const nlohmann::json& j) {
  try {
    const Task task = parse_task(j.at("task").get<std::string>());
    std::vector<SchemaNode> nodes;
    for (const auto& jn : j.at("nodes")) {
      SchemaNode n;
      n.id = jn.at("id").get<std::string>();
      n.name = normalize_name(jn.at("name").get<std::string>());
      if (jn.contains("parent") && !jn.at("parent").is_null()) {
        n.parent = jn.at("parent").get<std::string>();
      }
      n.level = parse_level(jn.at("level").get<std::string>());
      n.role = parse_role(jn.at("role").get<std::string>());
      n.structural = jn.value("structural", false);
      nodes.push_back(std::move(n));
    }
    const SchemaGraph bare(task, nodes, {}, {}, 0);
    auto id_of = [&](const std::string& name) {
      const SchemaNode* n = bare.node_by_name(name);
      if (!n) throw DataError("schema references unknown name: " + name);
      return n->id;
    };
    std::vector<ReConstraint> constraints;
    if (j.contains("re_constraints")) {
      for (const auto& c : j.at("re_constraints")) {
        if (!c.is_array() || c.size() != 3) throw DataError("re_constraints entries must be triples");
        constraints.push_back({id_of(c[0].get<std::string>()), id_of(c[1].get<std::string>()),
                               id_of(c[2].get<std::string>())});
      }
    }
    std::map<NodeId, std::vector<NodeId>> ee_roles;
    if (j.contains("ee_roles")) {
      for (const auto& [event, roles] : j.at("ee_roles").items()) {
        auto& out = ee_roles[id_of(event)];
        for (const auto& r : roles) out.push_back(id_of(r.get<std::string>()));
      }
    }
    SchemaGraph graph(task, std::move(nodes), std::move(constraints), std::move(ee_roles),
                      j.value("version", 0));
    auto violations = validate(graph);
    if (!violations.empty()) throw DataError("invalid schema: " + join(violations, "; "));
    return graph;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed schema json: ") + e.what());
  }
}

SchemaGraph load_schema(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path + ": " + e.what());
  }
  try {
    return schema_from_json(j);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void save_schema(const SchemaGraph& graph, const std::string& path) {
  write_file(path, schema_to_json(graph).dump(2) + "\n");
}

}  // namespace evokg
