#include "evokg/decode.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "evokg/rng.hpp"
#include "evokg/text.hpp"

namespace evokg {

namespace {

const std::string kEos = "[eos]";
const std::string kRec = "[rec]";
const std::string kSep = "[sep]";
const std::string kArg = "[arg]";

int tie_rank(const std::string& s) {
  if (s == kEos) return 0;
  if (s == kRec) return 1;
  if (s == kSep) return 2;
  if (s == kArg) return 3;
  return 4;
}

bool tie_less(const std::string& a, const std::string& b) {
  const int ra = tie_rank(a);
  const int rb = tie_rank(b);
  if (ra != rb) return ra < rb;
  return a < b;
}

const NameTrie kEmptyTrie;

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

NameTrie::NameTrie() : nodes_(1) {}

NameTrie NameTrie::from_names(const std::vector<std::vector<std::string>>& names) {
  NameTrie t;
  for (const auto& n : names) t.insert(n);
  return t;
}

void NameTrie::insert(const std::vector<std::string>& tokens) {
  if (tokens.empty()) return;
  std::size_t cur = 0;
  for (const auto& tok : tokens) {
    auto it = nodes_[cur].children.find(tok);
    if (it == nodes_[cur].children.end()) {
      nodes_.emplace_back();
      const std::size_t next = nodes_.size() - 1;
      nodes_[cur].children.emplace(tok, next);
      cur = next;
    } else {
      cur = it->second;
    }
  }
  nodes_[cur].terminal = true;
}

std::optional<std::size_t> NameTrie::step(std::size_t node, const std::string& token) const {
  auto it = nodes_[node].children.find(token);
  if (it == nodes_[node].children.end()) return std::nullopt;
  return it->second;
}

std::set<std::vector<std::string>> NameTrie::paths() const {
  std::set<std::vector<std::string>> out;
  std::vector<std::string> path;
  auto walk = [&](auto&& self, std::size_t node) -> void {
    if (nodes_[node].terminal) out.insert(path);
    for (const auto& [tok, child] : nodes_[node].children) {
      path.push_back(tok);
      self(self, child);
      path.pop_back();
    }
  };
  walk(walk, 0);
  return out;
}

const NameTrie& TypeTrie::category(Role role) const {
  switch (role) {
    case Role::EntityType: return entity_types;
    case Role::Relation: return relations;
    case Role::EventType: return event_types;
    case Role::ArgRole: return arg_roles;
  }
  return entity_types;
}

TypeTrie build_trie(const SchemaGraph& schema) {
  TypeTrie trie;
  trie.task = schema.task();
  trie.version = schema.version();
  for (Role role : {Role::EntityType, Role::Relation, Role::EventType, Role::ArgRole}) {
    NameTrie& t = role == Role::EntityType ? trie.entity_types
                  : role == Role::Relation ? trie.relations
                  : role == Role::EventType ? trie.event_types
                                            : trie.arg_roles;
    for (const SchemaNode* n : schema.labels(role)) t.insert(n->name);
  }

  auto is_label = [&](const NodeId& id) {
    const SchemaNode* n = schema.node(id);
    return n && !n->structural && n->level != Level::Root;
  };
  for (const auto& c : schema.re_constraints()) {
    if (!is_label(c.head) || !is_label(c.relation) || !is_label(c.tail)) continue;
    const std::string h = schema.name_of(c.head);
    const std::string r = schema.name_of(c.relation);
    trie.re_heads.insert(split_ws(h));
    trie.re_relations[h].insert(split_ws(r));
    trie.re_tails[{h, r}].insert(split_ws(schema.name_of(c.tail)));
  }
  for (const auto& [event, roles] : schema.ee_roles()) {
    if (!is_label(event)) continue;
    NameTrie& t = trie.ee_roles[schema.name_of(event)];
    for (const auto& r : roles) {
      if (is_label(r)) t.insert(split_ws(schema.name_of(r)));
    }
  }
  return trie;
}

namespace {

const char* slot_name(Slot s) {
  switch (s) {
    case Slot::None: return "none";
    case Slot::EntityType: return "entity-type";
    case Slot::EntityMention: return "entity-mention";
    case Slot::HeadType: return "head-type";
    case Slot::HeadMention: return "head-mention";
    case Slot::Relation: return "relation";
    case Slot::TailType: return "tail-type";
    case Slot::TailMention: return "tail-mention";
    case Slot::EventType: return "event-type";
    case Slot::Trigger: return "trigger";
    case Slot::ArgRole: return "arg-role";
    case Slot::ArgMention: return "arg-mention";
  }
  return "?";
}

const NameTrie& active_trie(const GrammarState& s, const TypeTrie& trie) {
  switch (s.slot) {
    case Slot::EntityType: return trie.entity_types;
    case Slot::HeadType: return trie.re_heads;
    case Slot::Relation: {
      auto it = trie.re_relations.find(s.head_type);
      return it == trie.re_relations.end() ? kEmptyTrie : it->second;
    }
    case Slot::TailType: {
      auto it = trie.re_tails.find({s.head_type, s.relation});
      return it == trie.re_tails.end() ? kEmptyTrie : it->second;
    }
    case Slot::EventType: return trie.event_types;
    case Slot::ArgRole: {
      auto it = trie.ee_roles.find(s.event_type);
      return it == trie.ee_roles.end() ? kEmptyTrie : it->second;
    }
    default: return kEmptyTrie;
  }
}

Slot first_slot(Task task) {
  switch (task) {
    case Task::NER: return Slot::EntityType;
    case Task::RE: return Slot::HeadType;
    case Task::EE: return Slot::EventType;
  }
  return Slot::None;
}

bool record_possible(Task task, const TypeTrie& trie, const std::vector<std::string>& source) {
  if (source.empty()) return false;
  switch (task) {
    case Task::NER: return !trie.entity_types.empty();
    case Task::RE: return !trie.re_heads.empty();
    case Task::EE: return !trie.event_types.empty();
  }
  return false;
}

bool has_roles(const GrammarState& s, const TypeTrie& trie) {
  auto it = trie.ee_roles.find(s.event_type);
  return it != trie.ee_roles.end() && !it->second.empty();
}

}  // namespace

std::string describe(const GrammarState& s) {
  std::string out = "task=" + std::string(to_string(s.task));
  switch (s.position) {
    case Position::ExpectRecOrEos: out += " expect-rec-or-eos"; break;
    case Position::InType: out += " in-type(" + std::string(slot_name(s.slot)) + ", '" + join(s.name) + "')"; break;
    case Position::InMention:
      out += " in-mention(" + std::string(slot_name(s.slot)) + ", " + std::to_string(s.mention_tokens) + " tokens)";
      break;
    case Position::Done: out += " done"; break;
  }
  if (!s.head_type.empty()) out += " head=" + s.head_type;
  if (!s.relation.empty()) out += " relation=" + s.relation;
  if (!s.event_type.empty()) out += " event=" + s.event_type;
  return out;
}

std::vector<std::string> admissible_tokens(const GrammarState& state, const TypeTrie& trie,
                                           const std::vector<std::string>& source) {
  std::vector<std::string> out;
  switch (state.position) {
    case Position::ExpectRecOrEos:
      out.push_back(kEos);
      if (record_possible(state.task, trie, source)) out.push_back(kRec);
      break;
    case Position::InType: {
      const NameTrie& t = active_trie(state, trie);
      if (state.cursor == 0 && t.empty()) break;
      if (t.terminal(state.cursor)) out.push_back(kSep);
      for (const auto& [tok, child] : t.children(state.cursor)) out.push_back(tok);
      break;
    }
    case Position::InMention: {
      out.assign(source.begin(), source.end());
      if (state.mention_tokens == 0) break;
      switch (state.slot) {
        case Slot::HeadMention: out.push_back(kSep); break;
        case Slot::Trigger:
        case Slot::ArgMention:
          if (has_roles(state, trie)) out.push_back(kArg);
          [[fallthrough]];
        default:
          out.push_back(kEos);
          out.push_back(kRec);
      }
      break;
    }
    case Position::Done: break;
  }
  std::sort(out.begin(), out.end(), tie_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) throw DecodeError("dead end: " + describe(state), {});
  return out;
}

GrammarState advance(const GrammarState& state, const std::string& token, const TypeTrie& trie,
                     const std::vector<std::string>& source) {
  const auto allowed = admissible_tokens(state, trie, source);
  if (!std::binary_search(allowed.begin(), allowed.end(), token, tie_less)) {
    throw DecodeError("token '" + token + "' not admissible in " + describe(state), {});
  }
  GrammarState s = state;
  auto enter_type = [&](Slot slot) {
    s.position = Position::InType;
    s.slot = slot;
    s.cursor = 0;
    s.name.clear();
  };
  auto enter_mention = [&](Slot slot) {
    s.position = Position::InMention;
    s.slot = slot;
    s.mention_tokens = 0;
  };
  auto new_record = [&] {
    s.head_type.clear();
    s.relation.clear();
    s.event_type.clear();
    enter_type(first_slot(s.task));
  };

  switch (state.position) {
    case Position::ExpectRecOrEos:
      if (token == kEos) {
        s.position = Position::Done;
      } else {
        new_record();
      }
      break;
    case Position::InType:
      if (token != kSep) {
        s.cursor = *active_trie(state, trie).step(state.cursor, token);
        s.name.push_back(token);
        break;
      }
      switch (state.slot) {
        case Slot::EntityType: enter_mention(Slot::EntityMention); break;
        case Slot::HeadType:
          s.head_type = join(state.name);
          enter_mention(Slot::HeadMention);
          break;
        case Slot::Relation:
          s.relation = join(state.name);
          enter_type(Slot::TailType);
          break;
        case Slot::TailType: enter_mention(Slot::TailMention); break;
        case Slot::EventType:
          s.event_type = join(state.name);
          enter_mention(Slot::Trigger);
          break;
        case Slot::ArgRole: enter_mention(Slot::ArgMention); break;
        default: break;
      }
      break;
    case Position::InMention:
      if (token == kSep) {
        enter_type(Slot::Relation);
      } else if (token == kArg) {
        enter_type(Slot::ArgRole);
      } else if (token == kRec) {
        new_record();
      } else if (token == kEos) {
        s.position = Position::Done;
      } else {
        ++s.mention_tokens;
      }
      break;
    case Position::Done: break;
  }
  return s;
}

std::vector<double> UniformScorer::next_scores(const ScoringContext& ctx) const {
  return std::vector<double>(ctx.vocabulary.size(), 0.0);
}

std::vector<double> RandomScorer::next_scores(const ScoringContext& ctx) const {
  std::uint64_t h = fnv1a(to_line(ctx.prefix)) ^ fnv1a(join(ctx.source));
  std::vector<double> out;
  out.reserve(ctx.vocabulary.size());
  for (const auto& tok : ctx.vocabulary) {
    SplitMix64 rng(seed_ ^ (h * 0x9e3779b97f4a7c15ULL) ^ fnv1a(tok));
    out.push_back(rng.next_double());
  }
  return out;
}

std::vector<double> AdversarialScorer::next_scores(const ScoringContext& ctx) const {
  auto out = base_.next_scores(ctx);
  for (std::size_t i = 0; i < ctx.vocabulary.size(); ++i) {
    if (std::find(favored_.begin(), favored_.end(), ctx.vocabulary[i]) != favored_.end()) {
      out[i] = 1e6;
    }
  }
  return out;
}

OracleScorer::OracleScorer(const Annotations& target, Task task) : target_(linearize(target, task)) {}

std::vector<double> OracleScorer::next_scores(const ScoringContext& ctx) const {
  std::vector<double> out(ctx.vocabulary.size(), 0.0);
  const auto& p = ctx.prefix;
  if (p.size() >= target_.size() || !std::equal(p.begin(), p.end(), target_.begin())) return out;
  const std::string_view next = target_[p.size()].text();
  for (std::size_t i = 0; i < ctx.vocabulary.size(); ++i) {
    if (ctx.vocabulary[i] == next) out[i] = 1.0;
  }
  return out;
}

OracleScorer oracle_scorer(const Annotations& raw_gold, const SchemaGraph& raw,
                           const SchemaGraph& schema) {
  const LabelProjector projector(raw, schema);
  return OracleScorer(filter_annotations(raw_gold, projector), schema.task());
}

std::vector<std::string> decoder_vocabulary(const SchemaGraph& schema,
                                            const std::vector<std::string>& source,
                                            const Scorer& scorer) {
  std::vector<std::string> vocab{kEos, kRec, kSep, kArg};
  for (const auto& n : schema.nodes()) {
    if (n.level == Level::Root || n.structural) continue;
    vocab.insert(vocab.end(), n.name.begin(), n.name.end());
  }
  vocab.insert(vocab.end(), source.begin(), source.end());
  for (auto& extra : scorer.extra_vocabulary()) vocab.push_back(std::move(extra));
  std::sort(vocab.begin(), vocab.end());
  vocab.erase(std::unique(vocab.begin(), vocab.end()), vocab.end());
  return vocab;
}

DecodeResult decode_greedy(std::string_view source_text, const Scorer& scorer,
                           const SchemaGraph& schema, const TypeTrie& trie,
                           const DecodeOptions& options) {
  if (options.max_len < 2) throw UsageError("max_len must be at least 2");
  if (trie.version != schema.version() || trie.task != schema.task()) {
    throw Error("trie was built from a different schema snapshot");
  }
  const auto source = split_ws(source_text);
  for (const auto& tok : source) {
    if (is_reserved_surface(tok)) throw DataError("source text uses reserved token " + tok);
  }
  const auto vocab = decoder_vocabulary(schema, source, scorer);
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < vocab.size(); ++i) index.emplace(vocab[i], i);

  DecodeResult result;
  LinearSequence& seq = result.sequence;
  seq.push_back(StructToken::of(TokenKind::Bos));
  GrammarState state(schema.task());

  while (state.position != Position::Done) {
    if (seq.size() + 1 >= options.max_len) {
      seq.push_back(StructToken::of(TokenKind::Eos));
      result.truncated = true;
      result.diagnostics.push_back("truncated at max_len " + std::to_string(options.max_len));
      break;
    }
    std::vector<std::string> allowed;
    try {
      allowed = admissible_tokens(state, trie, source);
    } catch (const DecodeError& e) {
      throw DecodeError(e.what(), seq);
    }
    const auto scores = scorer.next_scores({source, seq, vocab});
    if (scores.size() != vocab.size()) {
      throw Error("scorer returned " + std::to_string(scores.size()) + " scores for a vocabulary of " +
                  std::to_string(vocab.size()));
    }
    // `allowed` is already in tie-break order, so the first maximum wins.
    const std::string* best = nullptr;
    double best_score = 0.0;
    for (const auto& tok : allowed) {
      const double sc = scores[index.at(tok)];
      if (!std::isfinite(sc)) throw Error("scorer returned a non-finite score for '" + tok + "'");
      if (!best || sc > best_score) {
        best = &tok;
        best_score = sc;
      }
    }
    state = advance(state, *best, trie, source);
    seq.push_back(StructToken::parse(*best));
  }

  auto parsed = delinearize(seq, schema.task(), schema, source_text);
  result.annotations = std::move(parsed.annotations);
  result.diagnostics.insert(result.diagnostics.end(), parsed.diagnostics.begin(),
                            parsed.diagnostics.end());
  return result;
}

DecodeResult decode_greedy(std::string_view source_text, const Scorer& scorer,
                           const SchemaGraph& schema, const DecodeOptions& options) {
  return decode_greedy(source_text, scorer, schema, build_trie(schema), options);
}

}  // namespace evokg
