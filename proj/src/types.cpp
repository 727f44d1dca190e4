#include "efcg/types.hpp"

#include <set>
#include <utility>

#include <fmt/format.h>

#include "efcg/error.hpp"
#include "efcg/text.hpp"

namespace efcg {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConstraint: return "InvalidConstraint";
    case ErrorCode::InvalidAttribute: return "InvalidAttribute";
    case ErrorCode::NoHardConstraints: return "NoHardConstraints";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ZeroNorm: return "ZeroNorm";
    case ErrorCode::SpaceMismatch: return "SpaceMismatch";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::UnknownSeed: return "UnknownSeed";
    case ErrorCode::MissingVector: return "MissingVector";
    case ErrorCode::PoolTooSmall: return "PoolTooSmall";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::EmptySoftList: return "EmptySoftList";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::MalformedScore: return "MalformedScore";
    case ErrorCode::GeneratorError: return "GeneratorError";
    case ErrorCode::JudgeError: return "JudgeError";
    case ErrorCode::DegenerateSet: return "DegenerateSet";
    case ErrorCode::PositionOutOfRange: return "PositionOutOfRange";
    case ErrorCode::ClientError: return "ClientError";
    case ErrorCode::EmptyText: return "EmptyText";
    case ErrorCode::NoAttributesFound: return "NoAttributesFound";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string to_fraction_string(const Rational& r) {
  const auto num = boost::multiprecision::numerator(r);
  const auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

std::string_view relation_name(Relation r) {
  switch (r) {
    case Relation::AtLeast: return "at_least";
    case Relation::Around: return "around";
    case Relation::AtMost: return "at_most";
  }
  return "at_least";
}

std::optional<Relation> parse_relation(std::string_view name) {
  if (name == "at_least") return Relation::AtLeast;
  if (name == "around") return Relation::Around;
  if (name == "at_most") return Relation::AtMost;
  return std::nullopt;
}

ConstraintType constraint_type(const HardConstraint& c) {
  return static_cast<ConstraintType>(c.index());
}

std::string_view constraint_type_name(ConstraintType t) {
  switch (t) {
    case ConstraintType::IncludeKeyword: return "include_keyword";
    case ConstraintType::KeywordFrequency: return "keyword_frequency";
    case ConstraintType::NumParagraphs: return "num_paragraphs";
    case ConstraintType::NumWords: return "num_words";
    case ConstraintType::NumSentences: return "num_sentences";
    case ConstraintType::AllUppercase: return "all_uppercase";
    case ConstraintType::AllLowercase: return "all_lowercase";
    case ConstraintType::EndPhrase: return "end_phrase";
    case ConstraintType::WordAtPosition: return "word_at_position";
    case ConstraintType::WordOrder: return "word_order";
  }
  return "include_keyword";
}

std::optional<ConstraintType> parse_constraint_type(std::string_view name) {
  for (ConstraintType t : kAllConstraintTypes) {
    if (constraint_type_name(t) == name) return t;
  }
  return std::nullopt;
}

namespace {

void require_text(std::string_view field, const std::string& value) {
  if (!text::has_non_space(value)) {
    throw Error(ErrorCode::InvalidConstraint,
                fmt::format("{} must contain a non-whitespace character", field));
  }
}

void require_at_least(std::string_view field, std::int64_t value, std::int64_t min) {
  if (value < min) {
    throw Error(ErrorCode::InvalidConstraint,
                fmt::format("{} must be >= {}, got {}", field, min, value));
  }
}

struct ConstraintValidator {
  void operator()(const constraint::IncludeKeyword& c) const {
    require_text("include_keyword.keyword", c.keyword);
  }
  void operator()(const constraint::KeywordFrequency& c) const {
    require_text("keyword_frequency.word", c.word);
    require_at_least("keyword_frequency.n", c.n, 0);
  }
  void operator()(const constraint::NumParagraphs& c) const {
    require_at_least("num_paragraphs.n", c.n, 1);
  }
  void operator()(const constraint::NumWords& c) const {
    require_at_least("num_words.n", c.n, 1);
  }
  void operator()(const constraint::NumSentences& c) const {
    require_at_least("num_sentences.n", c.n, 1);
  }
  void operator()(const constraint::AllUppercase&) const {}
  void operator()(const constraint::AllLowercase&) const {}
  void operator()(const constraint::EndPhrase& c) const {
    require_text("end_phrase.phrase", c.phrase);
  }
  void operator()(const constraint::WordAtPosition& c) const {
    if (c.k < 1 || c.k > 5) {
      throw Error(ErrorCode::InvalidConstraint,
                  fmt::format("word_at_position.k must be in [1,5], got {}", c.k));
    }
    require_text("word_at_position.word", c.word);
  }
  void operator()(const constraint::WordOrder& c) const {
    require_text("word_order.first", c.first);
    require_text("word_order.second", c.second);
  }
};

}  // namespace

void validate_constraint(const HardConstraint& c) { std::visit(ConstraintValidator{}, c); }

bool is_valid_constraint(const HardConstraint& c) noexcept {
  try {
    validate_constraint(c);
    return true;
  } catch (const Error&) {
    return false;
  }
}

Attribute Attribute::soft(std::string id, std::string text) {
  Attribute a;
  a.id = std::move(id);
  a.kind = SoftAttribute{std::move(text)};
  return a;
}

Attribute Attribute::hard(std::string id, HardConstraint c) {
  Attribute a;
  a.id = std::move(id);
  a.kind = std::move(c);
  return a;
}

void validate_attribute(const Attribute& a) {
  if (a.id.empty()) {
    throw Error(ErrorCode::InvalidAttribute, "attribute id must be nonempty");
  }
  if (a.is_soft()) {
    if (!text::has_non_space(a.soft_text())) {
      throw Error(ErrorCode::InvalidAttribute,
                  fmt::format("soft attribute '{}' has empty text", a.id));
    }
  } else {
    validate_constraint(a.constraint());
  }
}

std::size_t AttributeSet::hard_count() const {
  std::size_t n = 0;
  for (const auto& a : attributes) n += a.is_hard() ? 1 : 0;
  return n;
}

std::size_t AttributeSet::soft_count() const { return attributes.size() - hard_count(); }

void validate_attribute_set(const AttributeSet& s) {
  std::set<std::string_view> seen;
  for (const auto& a : s.attributes) {
    validate_attribute(a);
    if (!seen.insert(a.id).second) {
      throw Error(ErrorCode::InvalidAttribute,
                  fmt::format("duplicate attribute id '{}' in set '{}'", a.id, s.id));
    }
  }
}

ScoredResponse::ScoredResponse(std::string text, std::vector<VerificationResult> hard_results,
                               Rational hard_score,
                               std::vector<VerificationResult> soft_results)
    : text_(std::move(text)),
      hard_results_(std::move(hard_results)),
      soft_results_(std::move(soft_results)),
      hard_score_(std::move(hard_score)) {
  if (hard_score_ < 0 || hard_score_ > 1) {
    throw Error(ErrorCode::OutOfRange, "hard score outside [0,1]");
  }
  if (!soft_results_.empty()) {
    std::int64_t ok = 0;
    for (const auto& r : soft_results_) ok += r.satisfied ? 1 : 0;
    soft_score_ = Rational(ok, static_cast<std::int64_t>(soft_results_.size()));
  }
  combined_score_ = (soft_score_ + hard_score_) / 2;
}

}  // namespace efcg
