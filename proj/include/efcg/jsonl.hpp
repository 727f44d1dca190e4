#pragma once

#include <cstddef>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "efcg/serialization.hpp"

namespace efcg {

// Calls fn(record, line_number) for every non-blank line. A line that is not
// valid JSON raises ParseError naming the source and line. A UTF-8 byte order
// mark on the first line is rejected.
void read_jsonl(std::istream& in, std::string_view source,
                const std::function<void(const json&, std::size_t)>& fn);

// One compact record per line, keys sorted, '\n' terminated.
void write_jsonl_record(std::ostream& out, const json& record);

std::vector<json> read_jsonl_file(const std::string& path);
// Writes through a temporary file and renames it into place.
void write_jsonl_file(const std::string& path, const std::vector<json>& records);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view contents);

}  // namespace efcg
