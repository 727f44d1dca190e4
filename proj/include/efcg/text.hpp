#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 decoding and Unicode character classes used by the tokenizer.
// Classification follows the C.UTF-8 locale tables, so results do not
// depend on the process locale.
namespace efcg::text {

struct CodePoint {
  char32_t value;
  std::size_t offset;  // byte offset in the source
  std::size_t length;  // encoded length in bytes
};

// Invalid sequences decode to U+FFFD one byte at a time.
std::vector<CodePoint> decode_utf8(std::string_view s);
void append_utf8(std::string& out, char32_t cp);

bool is_space(char32_t cp);
// Punctuation and symbol characters (ASCII punctuation included).
bool is_punct(char32_t cp);
bool is_upper(char32_t cp);
bool is_lower(char32_t cp);
char32_t to_lower(char32_t cp);

std::string to_lower(std::string_view s);

// Lowercased, with leading and trailing punctuation removed. May be empty.
std::string normalize_word(std::string_view word);

bool has_non_space(std::string_view s);
std::string_view trim_right(std::string_view s);
std::string_view trim(std::string_view s);
std::vector<std::string_view> split_whitespace(std::string_view s);

std::size_t count_code_points(std::string_view s);

}  // namespace efcg::text
