#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace evokg {

enum class Task { NER, RE, EE };
enum class Level { Root, Major, Sub };
enum class Role { EntityType, Relation, EventType, ArgRole };

std::string_view to_string(Task task);
std::string_view to_string(Level level);
std::string_view to_string(Role role);
Task parse_task(std::string_view s);
Level parse_level(std::string_view s);
Role parse_role(std::string_view s);

/// The node role that a task's taxonomy evolves over (entity types for NER,
/// relations for RE, event types for EE). Nodes of other roles are auxiliary
/// and are carried unchanged through every evolution step.
Role primary_role(Task task);

using NodeId = std::string;

struct SchemaNode {
  NodeId id;
  std::vector<std::string> name;  // lowercase tokens
  std::optional<NodeId> parent;
  Level level = Level::Sub;
  Role role = Role::EntityType;
  // Kept only so a sub node's parent chain stays intact; never used as a label.
  bool structural = false;

  std::string name_key() const;
};

struct ReConstraint {
  NodeId head;
  NodeId relation;
  NodeId tail;

  auto operator<=>(const ReConstraint&) const = default;
};

/// Immutable snapshot of a typed schema graph: a rooted two-level taxonomy plus
/// RE triple constraints and EE role lists. Evolution produces new snapshots.
class SchemaGraph {
 public:
  SchemaGraph() = default;
  SchemaGraph(Task task, std::vector<SchemaNode> nodes, std::vector<ReConstraint> re_constraints,
              std::map<NodeId, std::vector<NodeId>> ee_roles, int version);

  Task task() const { return task_; }
  int version() const { return version_; }
  std::span<const SchemaNode> nodes() const { return nodes_; }
  const std::vector<ReConstraint>& re_constraints() const { return re_constraints_; }
  const std::map<NodeId, std::vector<NodeId>>& ee_roles() const { return ee_roles_; }

  const SchemaNode* node(std::string_view id) const;
  /// Lookup by name, case-insensitive on whitespace tokens.
  const SchemaNode* node_by_name(std::string_view name) const;
  /// Like node_by_name but ignores structural nodes.
  const SchemaNode* label_by_name(std::string_view name) const;
  const SchemaNode* root() const;

  std::vector<const SchemaNode*> children(std::string_view id) const;
  /// Deepest first: the node itself, its parent, ..., the root.
  std::vector<const SchemaNode*> ancestors_or_self(std::string_view id) const;

  /// Non-structural, non-root nodes of `role`, in graph order.
  std::vector<const SchemaNode*> labels(Role role) const;
  /// Sub-level nodes of `role`, in graph order.
  std::vector<const SchemaNode*> subs(Role role) const;
  std::vector<const SchemaNode*> majors(Role role) const;

  /// Name of a node id; empty when unknown.
  std::string name_of(std::string_view id) const;

  SchemaGraph with_version(int version) const;

 private:
  Task task_ = Task::NER;
  int version_ = 0;
  std::vector<SchemaNode> nodes_;
  std::vector<ReConstraint> re_constraints_;
  std::map<NodeId, std::vector<NodeId>> ee_roles_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::unordered_map<std::string, std::size_t> by_name_;
};

/// Every invariant violation, in a deterministic order. Empty iff the graph is
/// well formed.
std::vector<std::string> validate(const SchemaGraph& graph);

/// Deepest node on `raw_label`'s ancestor-or-self chain in `raw` whose name is a
/// label in `current`. Throws DataError("label not in raw taxonomy: ...").
std::optional<NodeId> project_label(std::string_view raw_label, const SchemaGraph& raw,
                                    const SchemaGraph& current);

/// Precomputed projection of every raw label onto one schema snapshot.
class LabelProjector {
 public:
  LabelProjector(const SchemaGraph& raw, const SchemaGraph& current);

  /// Projected label name; nullopt when nothing on the chain is present.
  /// Throws DataError for names outside the raw taxonomy.
  std::optional<std::string> project(std::string_view raw_label) const;

  const SchemaGraph& raw() const { return *raw_; }
  const SchemaGraph& current() const { return *current_; }

 private:
  const SchemaGraph* raw_;
  const SchemaGraph* current_;
  std::unordered_map<std::string, std::optional<std::string>> table_;
};

/// Renames nodes by name. Node count and ids are unchanged; version + 1.
/// Throws DataError on unknown names or collisions.
SchemaGraph apply_rename(const SchemaGraph& graph,
                         const std::map<std::string, std::vector<std::string>>& mapping);

/// Sub-schema of `raw` with the given label and structural nodes (plus the root
/// and every auxiliary-role node). Constraints are the raw constraints projected
/// onto the new node set.
SchemaGraph make_subschema(const SchemaGraph& raw, const std::set<NodeId>& labels,
                           const std::set<NodeId>& structural, int version);

nlohmann::ordered_json schema_to_json(const SchemaGraph& graph);
/// Parses and validates; rejects deeper-than-two-level taxonomies.
SchemaGraph schema_from_json(const nlohmann::json& j);
SchemaGraph load_schema(const std::string& path);
void save_schema(const SchemaGraph& graph, const std::string& path);

}  // namespace evokg
