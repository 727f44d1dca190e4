#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "efcg/types.hpp"

namespace efcg {

struct TextSpan {
  std::size_t begin = 0;  // byte offsets into TokenizedText::raw
  std::size_t end = 0;
};

struct Word {
  TextSpan span;
  std::string normalized;  // lowercased, outer punctuation stripped
};

struct Paragraph {
  TextSpan span;
  std::size_t first_word = 0;
  std::size_t word_count = 0;
};

// Tokenization rules:
//  * words are maximal runs of non-whitespace (Unicode whitespace);
//  * paragraphs are separated by runs of two or more '\n', and segments
//    without any word are dropped;
//  * a sentence ends at '.', '!' or '?' followed by whitespace or the end
//    of the text; a trailing unterminated segment counts if it holds a word.
// Sentence splitting does not know about abbreviations ("Dr. Smith" is two
// sentences). Hyphenated compounds are a single word.
struct TokenizedText {
  std::string raw;
  std::vector<Word> words;
  std::vector<TextSpan> sentences;
  std::vector<Paragraph> paragraphs;
  std::size_t uppercase_letters = 0;
  std::size_t lowercase_letters = 0;

  std::string_view word_text(std::size_t i) const;
  std::string_view span_text(TextSpan s) const;
};

TokenizedText tokenize(std::string text);

struct VerifierOptions {
  // "around N" accepts |count - N| <= max(around_min_tolerance,
  // round(N * around_tolerance_percent / 100)), rounding half up.
  std::int64_t around_tolerance_percent = 10;
  std::int64_t around_min_tolerance = 1;
};

std::int64_t around_tolerance(std::int64_t n, const VerifierOptions& opts = {});

// Precondition: validate_constraint(c) succeeds.
VerificationResult verify(const HardConstraint& c, const TokenizedText& text,
                          std::string attribute_id = {}, const VerifierOptions& opts = {});
VerificationResult verify(const HardConstraint& c, std::string_view text,
                          std::string attribute_id = {}, const VerifierOptions& opts = {});

// One result per hard attribute in set order; the text is tokenized once.
// Throws Error{NoHardConstraints} if the set holds no hard attribute.
std::vector<VerificationResult> verify_all(const AttributeSet& set, std::string_view text,
                                           const VerifierOptions& opts = {});

// Word-sequence matching shared with the extraction module. `needle` is
// split on whitespace and every piece normalized like a word.
std::vector<std::string> normalize_phrase(std::string_view needle);
std::size_t count_matches(const TokenizedText& text, const std::vector<std::string>& needle);
// Index of the first word of the first match, or npos.
std::size_t first_match(const TokenizedText& text, const std::vector<std::string>& needle);

}  // namespace efcg
