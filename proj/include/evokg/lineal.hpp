#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evokg/corpus.hpp"
#include "evokg/schema.hpp"

namespace evokg {

enum class TokenKind { Bos, Eos, Rec, Sep, Arg, Pad, Word };

std::string_view reserved_surface(TokenKind kind);  // "" for Word

struct StructToken {
  TokenKind kind = TokenKind::Word;
  std::string surface;  // word tokens only

  static StructToken word(std::string s) { return {TokenKind::Word, std::move(s)}; }
  static StructToken of(TokenKind k) { return {k, {}}; }
  /// Reserved surfaces map to their kind, anything else is a word.
  static StructToken parse(std::string_view surface);

  std::string_view text() const { return kind == TokenKind::Word ? surface : reserved_surface(kind); }
  bool operator==(const StructToken&) const = default;
};

using LinearSequence = std::vector<StructToken>;

std::string to_line(const LinearSequence& seq);
LinearSequence parse_line(std::string_view line);

/// Task grammar:
///   NER  [rec] T [sep] E
///   RE   [rec] Th [sep] Eh [sep] R [sep] Tt [sep] Et
///   EE   [rec] Tevt [sep] trigger ([arg] role [sep] mention)*
/// wrapped in [bos] ... [eos]. Records are ordered by start offset, then type
/// name. Only the task's own category is emitted (entities for NER, and so on).
/// Throws DataError on empty mentions or reserved surfaces.
LinearSequence linearize(const Annotations& annotations, Task task);

struct Delinearized {
  Annotations annotations;
  std::vector<std::string> diagnostics;
};

/// Total inverse of linearize. Records whose types are not labels of `schema`
/// are dropped ("out-of-schema type"); a missing [eos] is reported as
/// "unterminated". Mention offsets are recovered from `source_text`.
Delinearized delinearize(const LinearSequence& seq, Task task, const SchemaGraph& schema,
                         std::string_view source_text);

/// Finds a mention given as whitespace tokens in the source text, matching whole
/// tokens. The first match wins; `ambiguous` is set when there are several.
/// nullopt when the tokens do not occur.
std::optional<Mention> locate_mention(std::string_view source_text,
                                      const std::vector<std::string>& tokens,
                                      bool* ambiguous = nullptr);

/// Schema prompt without padding: RE constraints "h r t" sorted by name triple;
/// NER and EE type names sorted (EE names followed by their role names);
/// entries joined by [sep].
LinearSequence schema_prompt(const SchemaGraph& schema);

/// schema_prompt padded with [pad] to exactly pad_len tokens. Throws DataError
/// naming the required length when pad_len is too small.
LinearSequence build_schema_prompt(const SchemaGraph& schema, std::size_t pad_len);

}  // namespace evokg
