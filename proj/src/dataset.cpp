#include "efcg/dataset.hpp"

#include <fmt/format.h>

#include "efcg/error.hpp"

namespace efcg {

std::string_view split_name(Split s) { return s == Split::FineWeb ? "fineweb" : "multi_source"; }

std::optional<Split> parse_split(std::string_view name) {
  if (name == "fineweb") return Split::FineWeb;
  if (name == "multi_source") return Split::MultiSource;
  return std::nullopt;
}

void validate_bench_record(const BenchRecord& r) {
  if (r.doc_id.empty()) throw Error(ErrorCode::ParseError, "bench record 'doc_id' must be nonempty");
  if (r.split == Split::FineWeb && !r.raw_text) {
    throw Error(ErrorCode::ParseError,
                fmt::format("fineweb record '{}' must carry raw_text", r.doc_id));
  }
  validate_attribute_set(r.attributes);
}

json bench_record_to_json(const BenchRecord& r) {
  json j = {{"doc_id", r.doc_id},
            {"attributes", attribute_set_to_json(r.attributes)},
            {"split", split_name(r.split)}};
  if (r.raw_text) j["raw_text"] = *r.raw_text;
  if (r.domain) j["domain"] = *r.domain;
  return j;
}

BenchRecord bench_record_from_json(const json& j, ParseMode mode) {
  using namespace detail;
  constexpr std::string_view what = "bench record";
  reject_unknown_fields(j, {"doc_id", "raw_text", "attributes", "split", "domain"}, mode, what);
  BenchRecord r;
  r.doc_id = require_string(j, "doc_id", what);
  r.raw_text = optional_string(j, "raw_text", what);
  r.attributes = attribute_set_from_json(require_field(j, "attributes", what), mode);
  const auto split = require_string(j, "split", what);
  const auto parsed = parse_split(split);
  if (!parsed) throw Error(ErrorCode::ParseError, fmt::format("unknown split '{}'", split));
  r.split = *parsed;
  r.domain = optional_string(j, "domain", what);
  validate_bench_record(r);
  return r;
}

}  // namespace efcg
