#include "efcg/prompts.hpp"

#include <set>

#include <fmt/format.h>

#include "efcg/error.hpp"
#include "efcg/text.hpp"

namespace efcg {

namespace {

constexpr std::string_view kGenerationTemplate =
    "You are an expert at generating text that matches given attributes. Your task is to "
    "generate a text that satisfies as many of the provided attributes as possible.\n"
    "\n"
    "### Hard Attributes:\n"
    "{hard_attributes}\n"
    "\n"
    "### Soft Attributes:\n"
    "{soft_attributes}";

constexpr std::string_view kJudgeTemplate =
    "You are a binary evaluator. Given a text and several attributes, determine if the text "
    "fulfills each attribute.\n"
    "\n"
    "Your task is simple:\n"
    "- Score 0 if the text does NOT fulfill the attribute or the attribute is not directly "
    "mentioned\n"
    "- Score 1 if and only if the text directly fulfills the attribute\n"
    "\n"
    "Text to evaluate:\n"
    "{text}\n"
    "\n"
    "Attributes to evaluate:\n"
    "{attributes}\n"
    "\n"
    "Provide exactly {num_attributes} scores, one per line, using this format:\n"
    "Score: 0 or 1\n"
    "\n"
    "- Scores should correspond to attributes in order\n"
    "- Only provide the scores, no additional explanation";

constexpr std::string_view kDecomposeTemplate =
    "### Requirements\n"
    "For the following paragraph, propose attributes that capture its overall characteristics. "
    "Focus on what makes this text unique and distinctive, rather than using predefined "
    "categories. Your analysis should:\n"
    "- Identify the most prominent and defining features of the text\n"
    "- Use clear, specific descriptions rather than vague terms\n"
    "- Base attributes solely on what is explicitly present in the text\n"
    "- Describe each attribute with enough detail to be meaningful\n"
    "Avoid:\n"
    "- Overly broad or generic attributes\n"
    "- Speculative interpretations\n"
    "- Attributes not clearly supported by the text\n"
    "- Complex or academic jargon\n"
    "\n"
    "Output each attribute on a separate line, separated by a single newline, with no line "
    "breaks within each attribute.\n"
    "\n"
    "Now, analyze the following paragraph and summarize its key attributes:\n"
    "\n"
    "### Text\n"
    "{text}\n"
    "\n"
    "### Attributes";

// Single-pass substitution, so placeholder-like text inside a value is left
// alone.
std::string fill(std::string_view tmpl,
                 std::initializer_list<std::pair<std::string_view, std::string_view>> values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    bool replaced = false;
    if (tmpl[i] == '{') {
      for (const auto& [key, value] : values) {
        if (tmpl.compare(i + 1, key.size(), key) == 0 && i + 1 + key.size() < tmpl.size() &&
            tmpl[i + 1 + key.size()] == '}') {
          out += value;
          i += key.size() + 2;
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out += tmpl[i++];
  }
  return out;
}

std::string_view relation_phrase(Relation r) {
  switch (r) {
    case Relation::AtLeast: return "at least";
    case Relation::Around: return "around";
    case Relation::AtMost: return "at most";
  }
  return "";
}

std::string ordinal(std::int64_t k) {
  const auto mod100 = k % 100;
  std::string_view suffix = "th";
  if (mod100 < 11 || mod100 > 13) {
    switch (k % 10) {
      case 1: suffix = "st"; break;
      case 2: suffix = "nd"; break;
      case 3: suffix = "rd"; break;
      default: break;
    }
  }
  return fmt::format("{}{}", k, suffix);
}

std::vector<std::string_view> lines_of(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto nl = s.find('\n', start);
    const auto end = nl == std::string_view::npos ? s.size() : nl;
    auto line = s.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return out;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Strips "- ", "* ", "+ ", "• " and "12. " / "12) " prefixes.
std::string_view strip_list_marker(std::string_view s) {
  s = text::trim(s);
  if (s == "-" || s == "*" || s == "+" || s == "•") return {};
  for (std::string_view bullet : {"- ", "* ", "+ ", "• "}) {
    if (s.substr(0, bullet.size()) == bullet) return text::trim(s.substr(bullet.size()));
  }
  std::size_t i = 0;
  while (i < s.size() && is_digit(s[i])) ++i;
  if (i > 0 && i + 1 < s.size() && (s[i] == '.' || s[i] == ')') && s[i + 1] == ' ') {
    return text::trim(s.substr(i + 2));
  }
  return s;
}

std::string_view strip_emphasis(std::string_view s) {
  while (!s.empty() && (s.front() == '*' || s.front() == '_')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == '*' || s.back() == '_')) s.remove_suffix(1);
  return text::trim(s);
}

bool iequals_prefix(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    const char a = s[i] >= 'A' && s[i] <= 'Z' ? static_cast<char>(s[i] - 'A' + 'a') : s[i];
    if (a != prefix[i]) return false;
  }
  return true;
}

// "0" or "1", optionally followed by trailing punctuation.
std::optional<bool> bare_score(std::string_view s) {
  s = strip_emphasis(s);
  if (s.empty() || (s[0] != '0' && s[0] != '1')) return std::nullopt;
  for (char c : s.substr(1)) {
    if (c != '.' && c != ' ' && c != '*') return std::nullopt;
  }
  return s[0] == '1';
}

}  // namespace

std::string single_line(std::string_view s) {
  std::string out;
  const auto chars = text::decode_utf8(s);
  std::size_t i = 0;
  while (i < chars.size()) {
    if (!text::is_space(chars[i].value)) {
      out.append(s.substr(chars[i].offset, chars[i].length));
      ++i;
      continue;
    }
    std::size_t j = i;
    bool has_break = false;
    while (j < chars.size() && text::is_space(chars[j].value)) {
      const char32_t c = chars[j].value;
      has_break = has_break || c == U'\n' || c == U'\r' || c == U'\u2028' || c == U'\u2029' ||
                  c == U'\u0085';
      ++j;
    }
    if (has_break) {
      out += ' ';
    } else {
      const auto begin = chars[i].offset;
      out.append(s.substr(begin, chars[j - 1].offset + chars[j - 1].length - begin));
    }
    i = j;
  }
  return std::string(text::trim(out));
}

std::string render_constraint(const HardConstraint& c) {
  using namespace constraint;
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, IncludeKeyword>) {
          return fmt::format("Include keywords {} in your response", x.keyword);
        } else if constexpr (std::is_same_v<T, KeywordFrequency>) {
          return fmt::format("In your response, the word {} should appear {} times.", x.word, x.n);
        } else if constexpr (std::is_same_v<T, NumParagraphs>) {
          return fmt::format(
              "Your response should contain {} paragraphs. You separate paragraphs using \\n\\n",
              x.n);
        } else if constexpr (std::is_same_v<T, NumWords>) {
          return fmt::format("Answer with {} {} words.", relation_phrase(x.relation), x.n);
        } else if constexpr (std::is_same_v<T, NumSentences>) {
          return fmt::format("Answer with {} {} sentences.", relation_phrase(x.relation), x.n);
        } else if constexpr (std::is_same_v<T, AllUppercase>) {
          return "Your entire response should be in English, capital letters only.";
        } else if constexpr (std::is_same_v<T, AllLowercase>) {
          return "Your entire response should be in English, and in all lowercase letters. No "
                 "capital letters are allowed.";
        } else if constexpr (std::is_same_v<T, EndPhrase>) {
          return fmt::format(
              "Finish your response with this exact phrase {}. No other words should follow this "
              "phrase.",
              x.phrase);
        } else if constexpr (std::is_same_v<T, WordAtPosition>) {
          return fmt::format("The {} word in the text must be {}.", ordinal(x.k), x.word);
        } else {
          static_assert(std::is_same_v<T, WordOrder>);
          return fmt::format("Word {} must appear before word {}.", x.first, x.second);
        }
      },
      c);
}

std::string render_generation_prompt(const AttributeSet& set) {
  if (set.attributes.empty()) throw Error(ErrorCode::EmptySet, fmt::format("set '{}' is empty", set.id));
  std::string hard;
  std::string soft;
  for (const auto& a : set.attributes) {
    std::string& section = a.is_hard() ? hard : soft;
    if (!section.empty()) section += '\n';
    section += a.is_hard() ? render_constraint(a.constraint()) : single_line(a.soft_text());
  }
  return fill(kGenerationTemplate, {{"hard_attributes", hard}, {"soft_attributes", soft}});
}

std::string render_judge_prompt(std::string_view text, const std::vector<Attribute>& soft) {
  if (soft.empty()) throw Error(ErrorCode::EmptySoftList, "judge prompt needs at least one soft attribute");
  std::string listing;
  for (std::size_t i = 0; i < soft.size(); ++i) {
    if (!soft[i].is_soft()) {
      throw Error(ErrorCode::InvalidAttribute,
                  fmt::format("attribute '{}' is hard; the judge scores soft attributes only",
                              soft[i].id));
    }
    if (i > 0) listing += '\n';
    listing += fmt::format("{}. {}", i + 1, single_line(soft[i].soft_text()));
  }
  const auto count = std::to_string(soft.size());
  return fill(kJudgeTemplate, {{"text", text}, {"attributes", listing}, {"num_attributes", count}});
}

std::string judge_repair_instruction(std::size_t expected) {
  return fmt::format(
      "\n\nYour previous reply did not contain exactly {0} scores. Reply with exactly {0} lines, "
      "each \"Score: 0\" or \"Score: 1\", and nothing else.",
      expected);
}

std::vector<bool> parse_judge_reply(std::string_view reply, std::size_t expected) {
  std::vector<bool> scores;
  for (auto line : lines_of(reply)) {
    auto s = strip_emphasis(strip_list_marker(line));
    if (iequals_prefix(s, "score")) {
      auto rest = strip_emphasis(s.substr(5));
      if (!rest.empty() && (rest.front() == ':' || rest.front() == '=')) rest.remove_prefix(1);
      const auto value = bare_score(text::trim(rest));
      if (!value) {
        throw Error(ErrorCode::MalformedScore, fmt::format("cannot read a 0/1 score from '{}'", line));
      }
      scores.push_back(*value);
    } else if (const auto value = bare_score(s)) {
      scores.push_back(*value);
    }
  }
  if (scores.size() != expected) {
    throw Error(ErrorCode::CountMismatch,
                fmt::format("judge returned {} scores, expected {}", scores.size(), expected));
  }
  return scores;
}

std::string render_decompose_prompt(std::string_view text) {
  if (!text::has_non_space(text)) throw Error(ErrorCode::EmptyText, "document text is empty");
  return fill(kDecomposeTemplate, {{"text", text}});
}

std::vector<Attribute> parse_decomposed_attributes(std::string_view reply, std::string_view id_prefix) {
  std::vector<Attribute> out;
  std::set<std::string, std::less<>> seen;
  for (auto line : lines_of(reply)) {
    const auto s = strip_list_marker(line);
    if (s.empty() || seen.count(s) > 0) continue;
    seen.emplace(s);
    out.push_back(Attribute::soft(fmt::format("{}-s{}", id_prefix, out.size()), std::string(s)));
  }
  if (out.empty()) throw Error(ErrorCode::NoAttributesFound, "reply contains no attribute lines");
  return out;
}

}  // namespace efcg
