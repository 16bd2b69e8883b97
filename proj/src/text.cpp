#include "evokg/text.hpp"

#include <fstream>
#include <sstream>

#include "evokg/error.hpp"

namespace evokg {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

}  // namespace

std::vector<std::string> split_ws(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<SourceToken> tokenize_with_offsets(std::string_view text) {
  std::vector<SourceToken> out;
  std::size_t i = 0;
  std::size_t cp = 0;  // code points consumed up to byte i
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) {
      ++i;
      ++cp;
    }
    std::size_t j = i;
    std::size_t cp_end = cp;
    while (j < text.size() && !is_space(text[j])) {
      if (!is_continuation(static_cast<unsigned char>(text[j]))) ++cp_end;
      ++j;
    }
    if (j > i) out.push_back({std::string(text.substr(i, j - i)), cp, cp_end});
    i = j;
    cp = cp_end;
  }
  return out;
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::vector<std::string> normalize_name(std::string_view name) { return split_ws(to_lower(name)); }

std::string canonical_name(std::string_view name) { return join(normalize_name(name)); }

std::size_t utf8_length(std::string_view text) {
  std::size_t n = 0;
  for (char c : text) {
    if (!is_continuation(static_cast<unsigned char>(c))) ++n;
  }
  return n;
}

std::optional<std::size_t> utf8_byte_offset(std::string_view text, std::size_t cp) {
  std::size_t seen = 0;
  for (std::size_t b = 0; b < text.size(); ++b) {
    if (is_continuation(static_cast<unsigned char>(text[b]))) continue;
    if (seen == cp) return b;
    ++seen;
  }
  if (seen == cp) return text.size();
  return std::nullopt;
}

std::size_t utf8_cp_offset(std::string_view text, std::size_t byte) {
  return utf8_length(text.substr(0, std::min(byte, text.size())));
}

std::optional<std::string> utf8_substr(std::string_view text, std::size_t start, std::size_t end) {
  if (start > end) return std::nullopt;
  auto b = utf8_byte_offset(text, start);
  auto e = utf8_byte_offset(text, end);
  if (!b || !e) return std::nullopt;
  return std::string(text.substr(*b, *e - *b));
}

bool is_reserved_surface(std::string_view token) {
  return token == "[bos]" || token == "[eos]" || token == "[rec]" || token == "[sep]" ||
         token == "[arg]" || token == "[pad]";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write file: " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw DataError("write failed: " + path);
}

}  // namespace evokg
