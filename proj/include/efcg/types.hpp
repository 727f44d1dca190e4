#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "efcg/rational.hpp"

namespace efcg {

enum class Relation { AtLeast, Around, AtMost };

std::string_view relation_name(Relation r);  // "at_least" | "around" | "at_most"
std::optional<Relation> parse_relation(std::string_view name);

namespace constraint {

struct IncludeKeyword {
  std::string keyword;
  bool operator==(const IncludeKeyword&) const = default;
};

// n == 0 is legal and means "must not appear".
struct KeywordFrequency {
  std::string word;
  std::int64_t n = 0;
  bool operator==(const KeywordFrequency&) const = default;
};

struct NumParagraphs {
  std::int64_t n = 1;
  bool operator==(const NumParagraphs&) const = default;
};

struct NumWords {
  Relation relation = Relation::AtLeast;
  std::int64_t n = 1;
  bool operator==(const NumWords&) const = default;
};

struct NumSentences {
  Relation relation = Relation::AtLeast;
  std::int64_t n = 1;
  bool operator==(const NumSentences&) const = default;
};

struct AllUppercase {
  bool operator==(const AllUppercase&) const = default;
};

struct AllLowercase {
  bool operator==(const AllLowercase&) const = default;
};

struct EndPhrase {
  std::string phrase;
  bool operator==(const EndPhrase&) const = default;
};

// k is 1-indexed and limited to the first five words.
struct WordAtPosition {
  std::int64_t k = 1;
  std::string word;
  bool operator==(const WordAtPosition&) const = default;
};

struct WordOrder {
  std::string first;
  std::string second;
  bool operator==(const WordOrder&) const = default;
};

}  // namespace constraint

using HardConstraint =
    std::variant<constraint::IncludeKeyword, constraint::KeywordFrequency,
                 constraint::NumParagraphs, constraint::NumWords,
                 constraint::NumSentences, constraint::AllUppercase,
                 constraint::AllLowercase, constraint::EndPhrase,
                 constraint::WordAtPosition, constraint::WordOrder>;

// Index-aligned with the HardConstraint alternatives.
enum class ConstraintType {
  IncludeKeyword,
  KeywordFrequency,
  NumParagraphs,
  NumWords,
  NumSentences,
  AllUppercase,
  AllLowercase,
  EndPhrase,
  WordAtPosition,
  WordOrder,
};

inline constexpr std::size_t kConstraintTypeCount = std::variant_size_v<HardConstraint>;

inline constexpr std::array<ConstraintType, kConstraintTypeCount> kAllConstraintTypes = {
    ConstraintType::IncludeKeyword, ConstraintType::KeywordFrequency,
    ConstraintType::NumParagraphs,  ConstraintType::NumWords,
    ConstraintType::NumSentences,   ConstraintType::AllUppercase,
    ConstraintType::AllLowercase,   ConstraintType::EndPhrase,
    ConstraintType::WordAtPosition, ConstraintType::WordOrder,
};

ConstraintType constraint_type(const HardConstraint& c);
std::string_view constraint_type_name(ConstraintType t);  // snake_case
std::optional<ConstraintType> parse_constraint_type(std::string_view name);

// Throws Error{InvalidConstraint} naming the offending field.
void validate_constraint(const HardConstraint& c);
bool is_valid_constraint(const HardConstraint& c) noexcept;

struct SoftAttribute {
  std::string text;
  bool operator==(const SoftAttribute&) const = default;
};

struct Attribute {
  std::string id;
  std::variant<SoftAttribute, HardConstraint> kind;
  std::optional<std::string> source_doc;
  std::optional<std::string> domain;

  static Attribute soft(std::string id, std::string text);
  static Attribute hard(std::string id, HardConstraint c);

  bool is_soft() const { return std::holds_alternative<SoftAttribute>(kind); }
  bool is_hard() const { return std::holds_alternative<HardConstraint>(kind); }
  const std::string& soft_text() const { return std::get<SoftAttribute>(kind).text; }
  const HardConstraint& constraint() const { return std::get<HardConstraint>(kind); }

  bool operator==(const Attribute&) const = default;
};

void validate_attribute(const Attribute& a);

struct AttributeSet {
  std::string id;
  std::vector<Attribute> attributes;  // order is prompt order
  std::optional<std::int64_t> target_size;

  std::size_t hard_count() const;
  std::size_t soft_count() const;

  bool operator==(const AttributeSet&) const = default;
};

// Checks every member and rejects duplicate ids.
void validate_attribute_set(const AttributeSet& s);

struct VerificationResult {
  std::string attribute_id;
  bool satisfied = false;
  std::string detail;

  bool operator==(const VerificationResult&) const = default;
};

// A candidate text with its per-constraint outcomes. The three scores are
// fixed at construction so that combined == (soft + hard) / 2 always holds.
class ScoredResponse {
 public:
  // soft_score is the plain fraction of satisfied soft results (0 when
  // there are none); hard_score is supplied by the caller (macro accuracy).
  ScoredResponse(std::string text, std::vector<VerificationResult> hard_results,
                 Rational hard_score, std::vector<VerificationResult> soft_results);

  const std::string& text() const { return text_; }
  const std::vector<VerificationResult>& hard_results() const { return hard_results_; }
  const std::vector<VerificationResult>& soft_results() const { return soft_results_; }
  const Rational& soft_score() const { return soft_score_; }
  const Rational& hard_score() const { return hard_score_; }
  const Rational& combined_score() const { return combined_score_; }

 private:
  std::string text_;
  std::vector<VerificationResult> hard_results_;
  std::vector<VerificationResult> soft_results_;
  Rational soft_score_;
  Rational hard_score_;
  Rational combined_score_;
};

}  // namespace efcg
