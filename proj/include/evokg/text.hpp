#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace evokg {

/// Splits on ASCII whitespace, dropping empty pieces.
std::vector<std::string> split_ws(std::string_view text);

struct SourceToken {
  std::string text;
  std::size_t start = 0;  // code points, end exclusive
  std::size_t end = 0;
};

/// Whitespace tokens of `text` with their code-point spans.
std::vector<SourceToken> tokenize_with_offsets(std::string_view text);

std::string to_lower(std::string_view text);

std::string join(const std::vector<std::string>& parts, std::string_view sep = " ");

/// Lowercased whitespace tokens of a type name ("Trial  Hearing" -> {"trial","hearing"}).
std::vector<std::string> normalize_name(std::string_view name);

/// normalize_name joined back with single spaces.
std::string canonical_name(std::string_view name);

// UTF-8 helpers. Mention offsets count Unicode code points, not bytes.

std::size_t utf8_length(std::string_view text);

/// Byte offset of code point `cp`; nullopt when past the end.
std::optional<std::size_t> utf8_byte_offset(std::string_view text, std::size_t cp);

std::size_t utf8_cp_offset(std::string_view text, std::size_t byte);

/// Substring by code-point range [start, end); nullopt when out of range.
std::optional<std::string> utf8_substr(std::string_view text, std::size_t start, std::size_t end);

/// True for the structural token surfaces "[bos]", "[eos]", "[rec]", "[sep]",
/// "[arg]" and "[pad]"; they may never occur as ordinary words.
bool is_reserved_surface(std::string_view token);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace evokg
