#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "evokg/corpus.hpp"
#include "evokg/error.hpp"
#include "evokg/lineal.hpp"
#include "evokg/schema.hpp"

namespace evokg {

/// Token trie over schema names. Node 0 is the root.
class NameTrie {
 public:
  NameTrie();
  static NameTrie from_names(const std::vector<std::vector<std::string>>& names);

  void insert(const std::vector<std::string>& tokens);
  std::optional<std::size_t> step(std::size_t node, const std::string& token) const;
  const std::map<std::string, std::size_t>& children(std::size_t node) const {
    return nodes_[node].children;
  }
  bool terminal(std::size_t node) const { return nodes_[node].terminal; }
  bool empty() const { return nodes_[0].children.empty(); }
  std::set<std::vector<std::string>> paths() const;

 private:
  struct Node {
    std::map<std::string, std::size_t> children;
    bool terminal = false;
  };
  std::vector<Node> nodes_;
};

/// Per-category tries built from one schema snapshot, plus the constraint-
/// filtered tries used at RE relation/tail positions and EE role positions.
struct TypeTrie {
  Task task = Task::NER;
  int version = 0;
  NameTrie entity_types;
  NameTrie relations;
  NameTrie event_types;
  NameTrie arg_roles;

  NameTrie re_heads;                                               // types that head some constraint
  std::map<std::string, NameTrie> re_relations;                    // head -> relations
  std::map<std::pair<std::string, std::string>, NameTrie> re_tails;  // (head, relation) -> tails
  std::map<std::string, NameTrie> ee_roles;                        // event type -> roles

  const NameTrie& category(Role role) const;
};

TypeTrie build_trie(const SchemaGraph& schema);

enum class Position { ExpectRecOrEos, InType, InMention, Done };
enum class Slot {
  None,
  EntityType, EntityMention,                                    // NER
  HeadType, HeadMention, Relation, TailType, TailMention,       // RE
  EventType, Trigger, ArgRole, ArgMention,                      // EE
};

struct GrammarState {
  Task task = Task::NER;
  Position position = Position::ExpectRecOrEos;
  Slot slot = Slot::None;
  std::size_t cursor = 0;           // node in the active trie (InType)
  std::vector<std::string> name;    // name tokens accepted so far (InType)
  std::size_t mention_tokens = 0;   // tokens accepted so far (InMention)
  std::string head_type;            // RE
  std::string relation;             // RE
  std::string event_type;           // EE

  explicit GrammarState(Task t = Task::NER) : task(t) {}
};

std::string describe(const GrammarState& state);

class DecodeError : public Error {
 public:
  DecodeError(const std::string& what, LinearSequence partial)
      : Error(what), partial_(std::move(partial)) {}
  const LinearSequence& partial() const { return partial_; }

 private:
  LinearSequence partial_;
};

/// Admissible next-token surfaces, sorted in tie-break order (structural
/// tokens first as [eos] < [rec] < [sep] < [arg], then words). A mention takes
/// at least one source token before it can be closed; [rec] is offered only when
/// a whole record can still be produced. Throws DecodeError("dead end ...").
std::vector<std::string> admissible_tokens(const GrammarState& state, const TypeTrie& trie,
                                           const std::vector<std::string>& source_tokens);

/// State after emitting `token`; throws DecodeError when it is not admissible.
GrammarState advance(const GrammarState& state, const std::string& token, const TypeTrie& trie,
                     const std::vector<std::string>& source_tokens);

struct ScoringContext {
  const std::vector<std::string>& source;
  const LinearSequence& prefix;  // starts with [bos]
  const std::vector<std::string>& vocabulary;
};

/// Next-token scorer. Must be pure in its inputs and return one finite score
/// per vocabulary entry.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual std::vector<double> next_scores(const ScoringContext& ctx) const = 0;
  /// Extra surfaces the scorer wants in the vocabulary.
  virtual std::vector<std::string> extra_vocabulary() const { return {}; }
};

class UniformScorer : public Scorer {
 public:
  std::vector<double> next_scores(const ScoringContext& ctx) const override;
};

/// Scores drawn from a hash of (seed, prefix, token); pure and reproducible.
class RandomScorer : public Scorer {
 public:
  explicit RandomScorer(std::uint64_t seed) : seed_(seed) {}
  std::vector<double> next_scores(const ScoringContext& ctx) const override;

 private:
  std::uint64_t seed_;
};

/// Random scores, except that `favored` words always score highest.
class AdversarialScorer : public Scorer {
 public:
  AdversarialScorer(std::vector<std::string> favored, std::uint64_t seed)
      : favored_(std::move(favored)), base_(seed) {}
  std::vector<double> next_scores(const ScoringContext& ctx) const override;
  std::vector<std::string> extra_vocabulary() const override { return favored_; }

 private:
  std::vector<std::string> favored_;
  RandomScorer base_;
};

/// Scores 1.0 for the next token of linearize(target) while the prefix agrees
/// with it, 0.0 everywhere else.
class OracleScorer : public Scorer {
 public:
  OracleScorer(const Annotations& target, Task task);
  std::vector<double> next_scores(const ScoringContext& ctx) const override;
  const LinearSequence& target() const { return target_; }

 private:
  LinearSequence target_;
};

/// Oracle for the gold projected onto `schema` (what filter_to_schema keeps).
OracleScorer oracle_scorer(const Annotations& raw_gold, const SchemaGraph& raw,
                           const SchemaGraph& schema);

struct DecodeOptions {
  std::size_t max_len = 256;
};

struct DecodeResult {
  Annotations annotations;
  LinearSequence sequence;
  std::vector<std::string> diagnostics;
  bool truncated = false;
};

/// Decoder vocabulary: structural tokens, schema name tokens, source tokens and
/// the scorer's extras; sorted and unique.
std::vector<std::string> decoder_vocabulary(const SchemaGraph& schema,
                                            const std::vector<std::string>& source_tokens,
                                            const Scorer& scorer);

/// Greedy decoding restricted to admissible tokens. Stops at [eos] or at
/// max_len tokens, in which case [eos] is forced and `truncated` is set.
DecodeResult decode_greedy(std::string_view source_text, const Scorer& scorer,
                           const SchemaGraph& schema, const TypeTrie& trie,
                           const DecodeOptions& options = {});
DecodeResult decode_greedy(std::string_view source_text, const Scorer& scorer,
                           const SchemaGraph& schema, const DecodeOptions& options = {});

}  // namespace evokg
