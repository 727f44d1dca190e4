#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "efcg/serialization.hpp"
#include "efcg/types.hpp"

namespace efcg {

enum class Split { FineWeb, MultiSource };
std::string_view split_name(Split s);  // "fineweb" | "multi_source"
std::optional<Split> parse_split(std::string_view name);

// One benchmark document: its attribute set and, for FineWeb records, the
// source text the attributes were extracted from.
struct BenchRecord {
  std::string doc_id;
  std::optional<std::string> raw_text;
  AttributeSet attributes;
  Split split = Split::FineWeb;
  std::optional<std::string> domain;

  bool operator==(const BenchRecord&) const = default;
};

// Throws ParseError when a FineWeb record lacks raw_text.
void validate_bench_record(const BenchRecord& r);

json bench_record_to_json(const BenchRecord& r);
BenchRecord bench_record_from_json(const json& j, ParseMode mode = ParseMode::Strict);

}  // namespace efcg
