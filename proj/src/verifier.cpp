#include "efcg/verifier.hpp"

#include <algorithm>
#include <cstdlib>
#include <utility>

#include <fmt/format.h>

#include "efcg/error.hpp"
#include "efcg/text.hpp"

namespace efcg {

std::string_view TokenizedText::word_text(std::size_t i) const { return span_text(words.at(i).span); }

std::string_view TokenizedText::span_text(TextSpan s) const {
  return std::string_view(raw).substr(s.begin, s.end - s.begin);
}

TokenizedText tokenize(std::string text) {
  TokenizedText out;
  out.raw = std::move(text);
  const std::string_view raw = out.raw;
  const auto cps = text::decode_utf8(raw);

  // Words and letter case.
  std::size_t word_start = std::string_view::npos;
  for (const auto& c : cps) {
    if (text::is_upper(c.value)) ++out.uppercase_letters;
    if (text::is_lower(c.value)) ++out.lowercase_letters;
    if (text::is_space(c.value)) {
      if (word_start != std::string_view::npos) {
        out.words.push_back({{word_start, c.offset}, {}});
        word_start = std::string_view::npos;
      }
    } else if (word_start == std::string_view::npos) {
      word_start = c.offset;
    }
  }
  if (word_start != std::string_view::npos) out.words.push_back({{word_start, raw.size()}, {}});
  for (auto& w : out.words) w.normalized = text::normalize_word(out.span_text(w.span));

  // Sentences: cut after a terminator that is followed by whitespace or EOT.
  std::size_t seg_start = 0;
  bool seg_has_content = false;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t v = cps[i].value;
    if (!text::is_space(v)) seg_has_content = true;
    const bool terminator = v == U'.' || v == U'!' || v == U'?';
    if (terminator && (i + 1 == cps.size() || text::is_space(cps[i + 1].value))) {
      const std::size_t end = cps[i].offset + cps[i].length;
      out.sentences.push_back({seg_start, end});
      seg_start = end;
      seg_has_content = false;
    }
  }
  if (seg_has_content) out.sentences.push_back({seg_start, raw.size()});

  // Paragraphs: segments between runs of >= 2 newlines, keeping only
  // segments that contain a word.
  std::size_t w = 0;
  auto close_paragraph = [&](std::size_t begin, std::size_t end) {
    Paragraph p{{begin, end}, w, 0};
    while (w < out.words.size() && out.words[w].span.begin < end) {
      ++p.word_count;
      ++w;
    }
    if (p.word_count > 0) out.paragraphs.push_back(p);
  };
  std::size_t para_start = 0;
  std::size_t i = 0;
  while (i < raw.size()) {
    if (raw[i] == '\n') {
      std::size_t j = i;
      while (j < raw.size() && raw[j] == '\n') ++j;
      if (j - i >= 2) {
        close_paragraph(para_start, i);
        para_start = j;
      }
      i = j;
    } else {
      ++i;
    }
  }
  close_paragraph(para_start, raw.size());
  return out;
}

std::int64_t around_tolerance(std::int64_t n, const VerifierOptions& opts) {
  const std::int64_t scaled = (n * opts.around_tolerance_percent + 50) / 100;
  return std::max(opts.around_min_tolerance, scaled);
}

std::vector<std::string> normalize_phrase(std::string_view needle) {
  std::vector<std::string> out;
  for (auto piece : text::split_whitespace(needle)) out.push_back(text::normalize_word(piece));
  return out;
}

namespace {

bool all_empty(const std::vector<std::string>& needle) {
  for (const auto& s : needle) {
    if (!s.empty()) return false;
  }
  return true;
}

bool matches_at(const TokenizedText& text, const std::vector<std::string>& needle,
                std::size_t at) {
  if (at + needle.size() > text.words.size()) return false;
  for (std::size_t k = 0; k < needle.size(); ++k) {
    if (text.words[at + k].normalized != needle[k]) return false;
  }
  return true;
}

}  // namespace

std::size_t count_matches(const TokenizedText& text, const std::vector<std::string>& needle) {
  if (needle.empty() || all_empty(needle)) return 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < text.words.size(); ++i) n += matches_at(text, needle, i) ? 1 : 0;
  return n;
}

std::size_t first_match(const TokenizedText& text, const std::vector<std::string>& needle) {
  if (needle.empty() || all_empty(needle)) return std::string_view::npos;
  for (std::size_t i = 0; i < text.words.size(); ++i) {
    if (matches_at(text, needle, i)) return i;
  }
  return std::string_view::npos;
}

namespace {

bool compare(Relation r, std::int64_t count, std::int64_t n, std::int64_t tol) {
  switch (r) {
    case Relation::AtLeast: return count >= n;
    case Relation::AtMost: return count <= n;
    case Relation::Around: return std::abs(count - n) <= tol;
  }
  return false;
}

std::string describe_requirement(Relation r, std::int64_t n, std::int64_t tol) {
  switch (r) {
    case Relation::AtLeast: return fmt::format("at least {}", n);
    case Relation::AtMost: return fmt::format("at most {}", n);
    case Relation::Around: return fmt::format("around {} (+/-{})", n, tol);
  }
  return {};
}

struct Checker {
  const TokenizedText& text;
  const VerifierOptions& opts;

  std::pair<bool, std::string> operator()(const constraint::IncludeKeyword& c) const {
    const auto found = first_match(text, normalize_phrase(c.keyword));
    if (found == std::string_view::npos) {
      return {false, fmt::format("keyword '{}' not found", c.keyword)};
    }
    return {true, fmt::format("keyword '{}' found at word {}", c.keyword, found + 1)};
  }

  std::pair<bool, std::string> operator()(const constraint::KeywordFrequency& c) const {
    const auto count = static_cast<std::int64_t>(count_matches(text, normalize_phrase(c.word)));
    return {count == c.n,
            fmt::format("word '{}' appears {} times; required {}", c.word, count, c.n)};
  }

  std::pair<bool, std::string> operator()(const constraint::NumParagraphs& c) const {
    const auto count = static_cast<std::int64_t>(text.paragraphs.size());
    return {count == c.n, fmt::format("found {} paragraphs; required {}", count, c.n)};
  }

  std::pair<bool, std::string> operator()(const constraint::NumWords& c) const {
    const auto count = static_cast<std::int64_t>(text.words.size());
    const auto tol = around_tolerance(c.n, opts);
    return {compare(c.relation, count, c.n, tol),
            fmt::format("found {} words; required {}", count,
                        describe_requirement(c.relation, c.n, tol))};
  }

  std::pair<bool, std::string> operator()(const constraint::NumSentences& c) const {
    const auto count = static_cast<std::int64_t>(text.sentences.size());
    const auto tol = around_tolerance(c.n, opts);
    return {compare(c.relation, count, c.n, tol),
            fmt::format("found {} sentences; required {}", count,
                        describe_requirement(c.relation, c.n, tol))};
  }

  std::pair<bool, std::string> operator()(const constraint::AllUppercase&) const {
    const bool ok = text.uppercase_letters > 0 && text.lowercase_letters == 0;
    return {ok, fmt::format("{} uppercase and {} lowercase letters", text.uppercase_letters,
                            text.lowercase_letters)};
  }

  std::pair<bool, std::string> operator()(const constraint::AllLowercase&) const {
    const bool ok = text.lowercase_letters > 0 && text.uppercase_letters == 0;
    return {ok, fmt::format("{} lowercase and {} uppercase letters", text.lowercase_letters,
                            text.uppercase_letters)};
  }

  std::pair<bool, std::string> operator()(const constraint::EndPhrase& c) const {
    const auto trimmed = text::trim_right(text.raw);
    const bool ok = trimmed.size() >= c.phrase.size() &&
                    trimmed.substr(trimmed.size() - c.phrase.size()) == c.phrase;
    if (ok) return {true, fmt::format("text ends with '{}'", c.phrase)};
    return {false, fmt::format("text does not end with '{}'", c.phrase)};
  }

  std::pair<bool, std::string> operator()(const constraint::WordAtPosition& c) const {
    const auto target = text::normalize_word(text::trim(c.word));
    const auto idx = static_cast<std::size_t>(c.k - 1);
    if (idx >= text.words.size()) {
      return {false, fmt::format("text has only {} words; word {} must be '{}'",
                                 text.words.size(), c.k, c.word)};
    }
    const bool ok = !target.empty() && text.words[idx].normalized == target;
    return {ok, fmt::format("word {} is '{}'; required '{}'", c.k, text.word_text(idx), c.word)};
  }

  std::pair<bool, std::string> operator()(const constraint::WordOrder& c) const {
    constexpr auto npos = std::string_view::npos;
    const auto a = first_match(text, normalize_phrase(c.first));
    const auto b = first_match(text, normalize_phrase(c.second));
    if (a == npos || b == npos) {
      return {false, fmt::format("'{}' {}; '{}' {}", c.first, a == npos ? "missing" : "present",
                                 c.second, b == npos ? "missing" : "present")};
    }
    return {a < b, fmt::format("'{}' first at word {}; '{}' first at word {}", c.first, a + 1,
                               c.second, b + 1)};
  }
};

}  // namespace

VerificationResult verify(const HardConstraint& c, const TokenizedText& text,
                          std::string attribute_id, const VerifierOptions& opts) {
  auto [ok, detail] = std::visit(Checker{text, opts}, c);
  return {std::move(attribute_id), ok, std::move(detail)};
}

VerificationResult verify(const HardConstraint& c, std::string_view text,
                          std::string attribute_id, const VerifierOptions& opts) {
  return verify(c, tokenize(std::string(text)), std::move(attribute_id), opts);
}

std::vector<VerificationResult> verify_all(const AttributeSet& set, std::string_view text,
                                           const VerifierOptions& opts) {
  if (set.hard_count() == 0) {
    throw Error(ErrorCode::NoHardConstraints,
                fmt::format("attribute set '{}' has no hard attributes", set.id));
  }
  const auto tokens = tokenize(std::string(text));
  std::vector<VerificationResult> out;
  out.reserve(set.hard_count());
  for (const auto& a : set.attributes) {
    if (a.is_hard()) out.push_back(verify(a.constraint(), tokens, a.id, opts));
  }
  return out;
}

}  // namespace efcg
