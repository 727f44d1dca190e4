#pragma once

#include <json.hpp>

#include "efcg/types.hpp"

namespace efcg {

using json = nlohmann::json;

// Strict parsing rejects unknown fields; lenient parsing ignores them.
// Malformed or missing required fields are errors in both modes.
enum class ParseMode { Strict, Lenient };

json constraint_to_json(const HardConstraint& c);
HardConstraint constraint_from_json(const json& j, ParseMode mode = ParseMode::Strict);

json attribute_to_json(const Attribute& a);
Attribute attribute_from_json(const json& j, ParseMode mode = ParseMode::Strict);

json attribute_set_to_json(const AttributeSet& s);
AttributeSet attribute_set_from_json(const json& j, ParseMode mode = ParseMode::Strict);

json verification_result_to_json(const VerificationResult& r);
VerificationResult verification_result_from_json(const json& j,
                                                 ParseMode mode = ParseMode::Lenient);

json scored_response_to_json(const ScoredResponse& r);

// Helpers shared by the other record readers.
namespace detail {
void reject_unknown_fields(const json& j, std::initializer_list<std::string_view> known,
                           ParseMode mode, std::string_view what);
const json& require_field(const json& j, std::string_view key, std::string_view what);
std::string require_string(const json& j, std::string_view key, std::string_view what);
std::int64_t require_int(const json& j, std::string_view key, std::string_view what);
std::optional<std::string> optional_string(const json& j, std::string_view key,
                                           std::string_view what);
}  // namespace detail

}  // namespace efcg
