#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "evokg/schema.hpp"

namespace evokg {

/// A span of the example text. Offsets are Unicode code points, end exclusive;
/// -1 marks a mention whose position in the text is unknown.
struct Mention {
  std::string text;
  std::int64_t start = -1;
  std::int64_t end = -1;

  bool has_offsets() const { return start >= 0 && end >= 0; }
  auto operator<=>(const Mention&) const = default;
};

struct Entity {
  Mention mention;
  std::string type;

  auto operator<=>(const Entity&) const = default;
};

struct Relation {
  Mention head;
  std::string head_type;
  std::string relation;
  Mention tail;
  std::string tail_type;

  auto operator<=>(const Relation&) const = default;
};

struct Argument {
  Mention mention;
  std::string role;

  auto operator<=>(const Argument&) const = default;
};

struct Event {
  Mention trigger;
  std::string type;
  std::vector<Argument> args;

  auto operator<=>(const Event&) const = default;
};

struct Annotations {
  std::vector<Entity> entities;
  std::vector<Relation> relations;
  std::vector<Event> events;

  std::size_t size() const { return entities.size() + relations.size() + events.size(); }
  bool empty() const { return size() == 0; }
  bool operator==(const Annotations&) const = default;
};

/// Lowercases type names, sorts event arguments and removes exact duplicates
/// while keeping first-occurrence order of records.
void canonicalize(Annotations& annotations);

/// Sorted, deduplicated copy; two annotation sets are equal as sets iff their
/// sorted forms compare equal.
Annotations sorted_set(Annotations annotations);

struct Example {
  std::string id;
  std::string text;
  Annotations gold;
};

struct SplitSet {
  std::vector<Example> train;
  std::vector<Example> dev;
  std::vector<Example> test;
};

struct LoadOptions {
  // Prediction files may carry mentions that could not be located (-1 offsets).
  bool allow_unknown_offsets = false;
};

nlohmann::ordered_json example_to_json(const Example& example);
Example example_from_json(const nlohmann::json& j, const LoadOptions& options = {});

std::vector<Example> parse_jsonl(std::istream& in, const std::string& source_name,
                                 const LoadOptions& options = {});
std::vector<Example> load_jsonl(const std::string& path, const LoadOptions& options = {});
std::string to_jsonl(const std::vector<Example>& examples);
void save_jsonl(const std::vector<Example>& examples, const std::string& path);

/// Violations of the raw-taxonomy invariants (unknown labels, roles outside the
/// event type's role list). Empty when every annotation is valid for `raw`.
std::vector<std::string> check_against_schema(const std::vector<Example>& examples,
                                              const SchemaGraph& raw);

/// Projects gold annotations onto `schema` and drops whatever no longer fits.
Annotations filter_annotations(const Annotations& gold, const LabelProjector& projector);

std::vector<Example> filter_to_schema(const std::vector<Example>& examples, const SchemaGraph& raw,
                                      const SchemaGraph& schema, bool drop_empty);

/// Rewrites every type, relation and role name through `mapping` (canonical old
/// name to canonical new name); unmapped names are kept.
Annotations rename_annotations(const Annotations& gold,
                               const std::map<std::string, std::string>& mapping);
std::vector<Example> rename_labels(const std::vector<Example>& examples,
                                   const std::map<std::string, std::string>& mapping);

struct SplitStats {
  std::size_t sentences = 0;
  std::size_t annotations = 0;
  std::map<std::string, std::size_t> entity_types;
  std::map<std::string, std::size_t> relations;
  std::map<std::string, std::size_t> event_types;
  std::map<std::string, std::size_t> arg_roles;
};

SplitStats stats(const std::vector<Example>& examples);

}  // namespace evokg
