#include "evokg/lineal.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "evokg/error.hpp"
#include "evokg/text.hpp"

namespace evokg {

std::string_view reserved_surface(TokenKind kind) {
  switch (kind) {
    case TokenKind::Bos: return "[bos]";
    case TokenKind::Eos: return "[eos]";
    case TokenKind::Rec: return "[rec]";
    case TokenKind::Sep: return "[sep]";
    case TokenKind::Arg: return "[arg]";
    case TokenKind::Pad: return "[pad]";
    case TokenKind::Word: return "";
  }
  return "";
}

StructToken StructToken::parse(std::string_view surface) {
  for (TokenKind k : {TokenKind::Bos, TokenKind::Eos, TokenKind::Rec, TokenKind::Sep, TokenKind::Arg,
                      TokenKind::Pad}) {
    if (surface == reserved_surface(k)) return of(k);
  }
  return word(std::string(surface));
}

std::string to_line(const LinearSequence& seq) {
  std::string out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i) out += ' ';
    out += seq[i].text();
  }
  return out;
}

LinearSequence parse_line(std::string_view line) {
  LinearSequence seq;
  for (const auto& tok : split_ws(line)) seq.push_back(StructToken::parse(tok));
  return seq;
}

namespace {

void push_name(LinearSequence& seq, const std::string& name) {
  const auto toks = normalize_name(name);
  if (toks.empty()) throw DataError("cannot linearize an empty type name");
  for (const auto& t : toks) {
    if (is_reserved_surface(t)) throw DataError("type name uses reserved token: " + name);
    seq.push_back(StructToken::word(t));
  }
}

void push_mention(LinearSequence& seq, const Mention& m) {
  const auto toks = split_ws(m.text);
  if (toks.empty()) throw DataError("cannot linearize an empty mention");
  for (const auto& t : toks) {
    if (is_reserved_surface(t)) throw DataError("mention uses reserved token: " + m.text);
    seq.push_back(StructToken::word(t));
  }
}

template <typename T, typename Key>
std::vector<T> ordered(std::vector<T> items, Key key) {
  std::sort(items.begin(), items.end(), [&](const T& a, const T& b) {
    const auto ka = key(a);
    const auto kb = key(b);
    if (ka != kb) return ka < kb;
    return a < b;
  });
  items.erase(std::unique(items.begin(), items.end()), items.end());
  return items;
}

}  // namespace

LinearSequence linearize(const Annotations& input, Task task) {
  Annotations a = input;
  canonicalize(a);
  LinearSequence seq{StructToken::of(TokenKind::Bos)};
  const auto sep = StructToken::of(TokenKind::Sep);
  switch (task) {
    case Task::NER:
      for (const auto& e : ordered(a.entities, [](const Entity& e) {
             return std::tie(e.mention.start, e.type);
           })) {
        seq.push_back(StructToken::of(TokenKind::Rec));
        push_name(seq, e.type);
        seq.push_back(sep);
        push_mention(seq, e.mention);
      }
      break;
    case Task::RE:
      for (const auto& r : ordered(a.relations, [](const Relation& r) {
             return std::tie(r.head.start, r.head_type);
           })) {
        seq.push_back(StructToken::of(TokenKind::Rec));
        push_name(seq, r.head_type);
        seq.push_back(sep);
        push_mention(seq, r.head);
        seq.push_back(sep);
        push_name(seq, r.relation);
        seq.push_back(sep);
        push_name(seq, r.tail_type);
        seq.push_back(sep);
        push_mention(seq, r.tail);
      }
      break;
    case Task::EE:
      for (const auto& ev : ordered(a.events, [](const Event& ev) {
             return std::tie(ev.trigger.start, ev.type);
           })) {
        seq.push_back(StructToken::of(TokenKind::Rec));
        push_name(seq, ev.type);
        seq.push_back(sep);
        push_mention(seq, ev.trigger);
        for (const auto& arg : ev.args) {
          seq.push_back(StructToken::of(TokenKind::Arg));
          push_name(seq, arg.role);
          seq.push_back(sep);
          push_mention(seq, arg.mention);
        }
      }
      break;
  }
  seq.push_back(StructToken::of(TokenKind::Eos));
  return seq;
}

std::optional<Mention> locate_mention(std::string_view source_text,
                                      const std::vector<std::string>& tokens, bool* ambiguous) {
  if (ambiguous) *ambiguous = false;
  if (tokens.empty()) return std::nullopt;
  const auto src = tokenize_with_offsets(source_text);
  std::optional<Mention> found;
  for (std::size_t i = 0; i + tokens.size() <= src.size(); ++i) {
    bool match = true;
    for (std::size_t k = 0; k < tokens.size() && match; ++k) match = src[i + k].text == tokens[k];
    if (!match) continue;
    if (found) {
      if (ambiguous) *ambiguous = true;
      break;
    }
    const std::size_t start = src[i].start;
    const std::size_t end = src[i + tokens.size() - 1].end;
    found = Mention{*utf8_substr(source_text, start, end), static_cast<std::int64_t>(start),
                    static_cast<std::int64_t>(end)};
  }
  return found;
}

namespace {

using Segment = std::vector<std::string>;

struct RecordParser {
  Task task;
  const SchemaGraph& schema;
  std::string_view source;
  Delinearized& out;

  bool label_ok(const Segment& name, Role role) const {
    const SchemaNode* n = schema.label_by_name(join(name));
    return n && n->role == role && n->level != Level::Root;
  }

  std::optional<Mention> mention(const Segment& toks) const {
    bool ambiguous = false;
    auto m = locate_mention(source, toks, &ambiguous);
    if (!m) {
      out.diagnostics.push_back("mention not found in source: " + join(toks));
      return Mention{join(toks), -1, -1};
    }
    if (ambiguous) out.diagnostics.push_back("ambiguous mention, first occurrence used: " + join(toks));
    return m;
  }

  void drop(const Segment& name) const {
    out.diagnostics.push_back("out-of-schema type: " + join(name));
  }

  // `body` holds the record's tokens after [rec]; segments are split on [sep]
  // and, for events, on [arg].
  void parse(const LinearSequence& body) {
    std::vector<std::vector<Segment>> groups(1);
    groups.back().emplace_back();
    for (const auto& t : body) {
      if (t.kind == TokenKind::Word) {
        groups.back().back().push_back(t.surface);
      } else if (t.kind == TokenKind::Sep) {
        groups.back().emplace_back();
      } else if (t.kind == TokenKind::Arg && task == Task::EE) {
        groups.emplace_back();
        groups.back().emplace_back();
      } else {
        out.diagnostics.push_back("malformed record: unexpected " + std::string(t.text()));
        return;
      }
    }
    auto well_formed = [](const std::vector<Segment>& g, std::size_t n) {
      return g.size() == n &&
             std::all_of(g.begin(), g.end(), [](const Segment& s) { return !s.empty(); });
    };
    const auto& head = groups.front();
    switch (task) {
      case Task::NER: {
        if (groups.size() != 1 || !well_formed(head, 2)) {
          out.diagnostics.push_back("malformed record");
          return;
        }
        if (!label_ok(head[0], Role::EntityType)) return drop(head[0]);
        out.annotations.entities.push_back({*mention(head[1]), join(head[0])});
        return;
      }
      case Task::RE: {
        if (groups.size() != 1 || !well_formed(head, 5)) {
          out.diagnostics.push_back("malformed record");
          return;
        }
        if (!label_ok(head[0], Role::EntityType)) return drop(head[0]);
        if (!label_ok(head[2], Role::Relation)) return drop(head[2]);
        if (!label_ok(head[3], Role::EntityType)) return drop(head[3]);
        out.annotations.relations.push_back(
            {*mention(head[1]), join(head[0]), join(head[2]), *mention(head[4]), join(head[3])});
        return;
      }
      case Task::EE: {
        if (!well_formed(head, 2)) {
          out.diagnostics.push_back("malformed record");
          return;
        }
        if (!label_ok(head[0], Role::EventType)) return drop(head[0]);
        Event ev{*mention(head[1]), join(head[0]), {}};
        for (std::size_t g = 1; g < groups.size(); ++g) {
          if (!well_formed(groups[g], 2)) {
            out.diagnostics.push_back("malformed argument");
            continue;
          }
          if (!label_ok(groups[g][0], Role::ArgRole)) {
            drop(groups[g][0]);
            continue;
          }
          ev.args.push_back({*mention(groups[g][1]), join(groups[g][0])});
        }
        out.annotations.events.push_back(std::move(ev));
        return;
      }
    }
  }
};

}  // namespace

Delinearized delinearize(const LinearSequence& seq, Task task, const SchemaGraph& schema,
                         std::string_view source_text) {
  Delinearized out;
  RecordParser parser{task, schema, source_text, out};
  std::size_t i = 0;
  if (i < seq.size() && seq[i].kind == TokenKind::Bos) {
    ++i;
  } else {
    out.diagnostics.push_back("missing [bos]");
  }
  bool terminated = false;
  while (i < seq.size()) {
    const auto& t = seq[i];
    if (t.kind == TokenKind::Eos) {
      terminated = true;
      ++i;
      break;
    }
    if (t.kind != TokenKind::Rec) {
      out.diagnostics.push_back("unexpected token outside a record: " + std::string(t.text()));
      ++i;
      continue;
    }
    ++i;
    LinearSequence body;
    while (i < seq.size() && seq[i].kind != TokenKind::Rec && seq[i].kind != TokenKind::Eos) {
      body.push_back(seq[i++]);
    }
    parser.parse(body);
  }
  if (!terminated) out.diagnostics.push_back("unterminated");
  for (; i < seq.size(); ++i) {
    if (seq[i].kind != TokenKind::Pad) {
      out.diagnostics.push_back("trailing tokens after [eos]");
      break;
    }
  }
  canonicalize(out.annotations);
  return out;
}

LinearSequence schema_prompt(const SchemaGraph& schema) {
  std::vector<std::vector<std::string>> entries;
  if (schema.task() == Task::RE) {
    std::set<std::tuple<std::string, std::string, std::string>> triples;
    for (const auto& c : schema.re_constraints()) {
      triples.emplace(schema.name_of(c.head), schema.name_of(c.relation), schema.name_of(c.tail));
    }
    for (const auto& [h, r, t] : triples) entries.push_back({h, r, t});
  } else {
    const Role role = primary_role(schema.task());
    std::vector<const SchemaNode*> types = schema.labels(role);
    std::sort(types.begin(), types.end(), [](const SchemaNode* a, const SchemaNode* b) {
      return a->name_key() < b->name_key();
    });
    for (const SchemaNode* n : types) {
      std::vector<std::string> entry{n->name_key()};
      if (schema.task() == Task::EE) {
        auto it = schema.ee_roles().find(n->id);
        if (it != schema.ee_roles().end()) {
          for (const auto& r : it->second) entry.push_back(schema.name_of(r));
        }
      }
      entries.push_back(std::move(entry));
    }
  }
  LinearSequence seq;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (i) seq.push_back(StructToken::of(TokenKind::Sep));
    for (const auto& name : entries[i]) {
      for (const auto& tok : split_ws(name)) seq.push_back(StructToken::word(tok));
    }
  }
  return seq;
}

LinearSequence build_schema_prompt(const SchemaGraph& schema, std::size_t pad_len) {
  LinearSequence seq = schema_prompt(schema);
  if (seq.size() > pad_len) {
    throw DataError("schema prompt needs " + std::to_string(seq.size()) + " tokens, pad_len is " +
                    std::to_string(pad_len));
  }
  seq.resize(pad_len, StructToken::of(TokenKind::Pad));
  return seq;
}

}  // namespace evokg
