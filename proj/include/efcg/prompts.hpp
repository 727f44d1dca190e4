#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "efcg/types.hpp"

namespace efcg {

// English instruction for a hard constraint, parameters substituted.
std::string render_constraint(const HardConstraint& c);

// Throws EmptySet.
std::string render_generation_prompt(const AttributeSet& set);

// Soft attributes are numbered from 1; newlines inside an attribute text are
// collapsed to single spaces. Throws EmptySoftList or InvalidAttribute for a
// hard attribute.
std::string render_judge_prompt(std::string_view text, const std::vector<Attribute>& soft);

// Appended to the judge prompt when a reply had the wrong number of scores.
std::string judge_repair_instruction(std::size_t expected);

// Reads "Score: 0|1" lines, or bare "0"/"1" lines, in order. List markers
// and surrounding markdown emphasis are tolerated; other lines are ignored.
// Throws MalformedScore for a "Score:" line without a 0/1 value and
// CountMismatch when the number of scores differs from expected.
std::vector<bool> parse_judge_reply(std::string_view reply, std::size_t expected);

// Throws EmptyText.
std::string render_decompose_prompt(std::string_view text);

// Non-blank lines become soft attributes with ids "<id_prefix>-s<index>",
// list markers stripped and repeated lines dropped. Throws NoAttributesFound.
std::vector<Attribute> parse_decomposed_attributes(std::string_view reply,
                                                   std::string_view id_prefix = "attr");

// Collapses every whitespace run containing a line break into one space.
std::string single_line(std::string_view s);

}  // namespace efcg
