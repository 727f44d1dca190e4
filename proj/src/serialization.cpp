#include "efcg/serialization.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "efcg/error.hpp"

namespace efcg {
namespace detail {

void reject_unknown_fields(const json& j, std::initializer_list<std::string_view> known,
                           ParseMode mode, std::string_view what) {
  if (!j.is_object()) {
    throw Error(ErrorCode::ParseError, fmt::format("{} must be a JSON object", what));
  }
  if (mode == ParseMode::Lenient) return;
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw Error(ErrorCode::ParseError, fmt::format("unknown field '{}' in {}", key, what));
    }
  }
}

const json& require_field(const json& j, std::string_view key, std::string_view what) {
  const auto it = j.find(key);
  if (it == j.end()) {
    throw Error(ErrorCode::ParseError, fmt::format("missing field '{}' in {}", key, what));
  }
  return *it;
}

std::string require_string(const json& j, std::string_view key, std::string_view what) {
  const auto& v = require_field(j, key, what);
  if (!v.is_string()) {
    throw Error(ErrorCode::ParseError, fmt::format("field '{}' in {} must be a string", key, what));
  }
  return v.get<std::string>();
}

std::int64_t require_int(const json& j, std::string_view key, std::string_view what) {
  const auto& v = require_field(j, key, what);
  if (!v.is_number_integer()) {
    throw Error(ErrorCode::ParseError,
                fmt::format("field '{}' in {} must be an integer", key, what));
  }
  return v.get<std::int64_t>();
}

std::optional<std::string> optional_string(const json& j, std::string_view key,
                                           std::string_view what) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw Error(ErrorCode::ParseError, fmt::format("field '{}' in {} must be a string", key, what));
  }
  return it->get<std::string>();
}

}  // namespace detail

using detail::optional_string;
using detail::reject_unknown_fields;
using detail::require_field;
using detail::require_int;
using detail::require_string;

namespace {

struct ConstraintWriter {
  json operator()(const constraint::IncludeKeyword& c) const {
    return {{"type", "include_keyword"}, {"keyword", c.keyword}};
  }
  json operator()(const constraint::KeywordFrequency& c) const {
    return {{"type", "keyword_frequency"}, {"word", c.word}, {"n", c.n}};
  }
  json operator()(const constraint::NumParagraphs& c) const {
    return {{"type", "num_paragraphs"}, {"n", c.n}};
  }
  json operator()(const constraint::NumWords& c) const {
    return {{"type", "num_words"}, {"relation", relation_name(c.relation)}, {"n", c.n}};
  }
  json operator()(const constraint::NumSentences& c) const {
    return {{"type", "num_sentences"}, {"relation", relation_name(c.relation)}, {"n", c.n}};
  }
  json operator()(const constraint::AllUppercase&) const { return {{"type", "all_uppercase"}}; }
  json operator()(const constraint::AllLowercase&) const { return {{"type", "all_lowercase"}}; }
  json operator()(const constraint::EndPhrase& c) const {
    return {{"type", "end_phrase"}, {"phrase", c.phrase}};
  }
  json operator()(const constraint::WordAtPosition& c) const {
    return {{"type", "word_at_position"}, {"k", c.k}, {"word", c.word}};
  }
  json operator()(const constraint::WordOrder& c) const {
    return {{"type", "word_order"}, {"first", c.first}, {"second", c.second}};
  }
};

Relation require_relation(const json& j, std::string_view what) {
  const auto name = require_string(j, "relation", what);
  const auto r = parse_relation(name);
  if (!r) {
    throw Error(ErrorCode::ParseError, fmt::format("unknown relation '{}' in {}", name, what));
  }
  return *r;
}

}  // namespace

json constraint_to_json(const HardConstraint& c) { return std::visit(ConstraintWriter{}, c); }

HardConstraint constraint_from_json(const json& j, ParseMode mode) {
  if (!j.is_object()) {
    throw Error(ErrorCode::ParseError, "constraint must be a JSON object");
  }
  const auto type_name = require_string(j, "type", "constraint");
  const auto type = parse_constraint_type(type_name);
  if (!type) {
    throw Error(ErrorCode::ParseError, fmt::format("unknown constraint type '{}'", type_name));
  }
  const auto what = fmt::format("{} constraint", type_name);
  HardConstraint c;
  switch (*type) {
    case ConstraintType::IncludeKeyword:
      reject_unknown_fields(j, {"type", "keyword"}, mode, what);
      c = constraint::IncludeKeyword{require_string(j, "keyword", what)};
      break;
    case ConstraintType::KeywordFrequency:
      reject_unknown_fields(j, {"type", "word", "n"}, mode, what);
      c = constraint::KeywordFrequency{require_string(j, "word", what), require_int(j, "n", what)};
      break;
    case ConstraintType::NumParagraphs:
      reject_unknown_fields(j, {"type", "n"}, mode, what);
      c = constraint::NumParagraphs{require_int(j, "n", what)};
      break;
    case ConstraintType::NumWords:
      reject_unknown_fields(j, {"type", "relation", "n"}, mode, what);
      c = constraint::NumWords{require_relation(j, what), require_int(j, "n", what)};
      break;
    case ConstraintType::NumSentences:
      reject_unknown_fields(j, {"type", "relation", "n"}, mode, what);
      c = constraint::NumSentences{require_relation(j, what), require_int(j, "n", what)};
      break;
    case ConstraintType::AllUppercase:
      reject_unknown_fields(j, {"type"}, mode, what);
      c = constraint::AllUppercase{};
      break;
    case ConstraintType::AllLowercase:
      reject_unknown_fields(j, {"type"}, mode, what);
      c = constraint::AllLowercase{};
      break;
    case ConstraintType::EndPhrase:
      reject_unknown_fields(j, {"type", "phrase"}, mode, what);
      c = constraint::EndPhrase{require_string(j, "phrase", what)};
      break;
    case ConstraintType::WordAtPosition:
      reject_unknown_fields(j, {"type", "k", "word"}, mode, what);
      c = constraint::WordAtPosition{require_int(j, "k", what), require_string(j, "word", what)};
      break;
    case ConstraintType::WordOrder:
      reject_unknown_fields(j, {"type", "first", "second"}, mode, what);
      c = constraint::WordOrder{require_string(j, "first", what),
                                require_string(j, "second", what)};
      break;
  }
  validate_constraint(c);
  return c;
}

json attribute_to_json(const Attribute& a) {
  json j;
  j["id"] = a.id;
  if (a.is_soft()) {
    j["kind"] = "soft";
    j["text"] = a.soft_text();
  } else {
    j["kind"] = "hard";
    j["constraint"] = constraint_to_json(a.constraint());
  }
  if (a.source_doc) j["source_doc"] = *a.source_doc;
  if (a.domain) j["domain"] = *a.domain;
  return j;
}

Attribute attribute_from_json(const json& j, ParseMode mode) {
  reject_unknown_fields(j, {"id", "kind", "text", "constraint", "source_doc", "domain"}, mode,
                        "attribute");
  const auto id = require_string(j, "id", "attribute");
  const auto kind = require_string(j, "kind", "attribute");
  Attribute a;
  if (kind == "soft") {
    if (mode == ParseMode::Strict && j.contains("constraint")) {
      throw Error(ErrorCode::ParseError, fmt::format("soft attribute '{}' has a constraint", id));
    }
    a = Attribute::soft(id, require_string(j, "text", "attribute"));
  } else if (kind == "hard") {
    if (mode == ParseMode::Strict && j.contains("text")) {
      throw Error(ErrorCode::ParseError, fmt::format("hard attribute '{}' has a text field", id));
    }
    a = Attribute::hard(id, constraint_from_json(require_field(j, "constraint", "attribute"), mode));
  } else {
    throw Error(ErrorCode::ParseError, fmt::format("unknown attribute kind '{}'", kind));
  }
  a.source_doc = optional_string(j, "source_doc", "attribute");
  a.domain = optional_string(j, "domain", "attribute");
  validate_attribute(a);
  return a;
}

json attribute_set_to_json(const AttributeSet& s) {
  json j;
  j["id"] = s.id;
  j["attributes"] = json::array();
  for (const auto& a : s.attributes) j["attributes"].push_back(attribute_to_json(a));
  if (s.target_size) j["target_size"] = *s.target_size;
  return j;
}

AttributeSet attribute_set_from_json(const json& j, ParseMode mode) {
  reject_unknown_fields(j, {"id", "attributes", "target_size"}, mode, "attribute set");
  AttributeSet s;
  s.id = require_string(j, "id", "attribute set");
  const auto& attrs = require_field(j, "attributes", "attribute set");
  if (!attrs.is_array()) {
    throw Error(ErrorCode::ParseError, "attribute set 'attributes' must be an array");
  }
  for (const auto& a : attrs) s.attributes.push_back(attribute_from_json(a, mode));
  if (const auto it = j.find("target_size"); it != j.end() && !it->is_null()) {
    s.target_size = require_int(j, "target_size", "attribute set");
  }
  validate_attribute_set(s);
  return s;
}

json verification_result_to_json(const VerificationResult& r) {
  return {{"attribute_id", r.attribute_id}, {"satisfied", r.satisfied}, {"detail", r.detail}};
}

VerificationResult verification_result_from_json(const json& j, ParseMode mode) {
  reject_unknown_fields(j, {"attribute_id", "satisfied", "detail"}, mode, "verification result");
  VerificationResult r;
  r.attribute_id = require_string(j, "attribute_id", "verification result");
  const auto& sat = require_field(j, "satisfied", "verification result");
  if (!sat.is_boolean()) {
    throw Error(ErrorCode::ParseError, "verification result 'satisfied' must be a boolean");
  }
  r.satisfied = sat.get<bool>();
  r.detail = optional_string(j, "detail", "verification result").value_or("");
  return r;
}

json scored_response_to_json(const ScoredResponse& r) {
  json j;
  j["text"] = r.text();
  j["soft_score"] = to_double(r.soft_score());
  j["hard_score"] = to_double(r.hard_score());
  j["combined_score"] = to_double(r.combined_score());
  j["hard_results"] = json::array();
  for (const auto& v : r.hard_results()) j["hard_results"].push_back(verification_result_to_json(v));
  j["soft_results"] = json::array();
  for (const auto& v : r.soft_results()) j["soft_results"].push_back(verification_result_to_json(v));
  return j;
}

}  // namespace efcg
