#include "efcg/jsonl.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "efcg/error.hpp"

namespace efcg {

void read_jsonl(std::istream& in, std::string_view source,
                const std::function<void(const json&, std::size_t)>& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) {
      throw Error(ErrorCode::ParseError, fmt::format("{}: byte order mark not allowed", source));
    }
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, fmt::format("{}:{}: {}", source, line_no, e.what()));
    }
    fn(record, line_no);
  }
}

void write_jsonl_record(std::ostream& out, const json& record) {
  out << record.dump(-1, ' ', false, json::error_handler_t::strict) << '\n';
}

std::vector<json> read_jsonl_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open '{}'", path));
  std::vector<json> out;
  read_jsonl(in, path, [&](const json& j, std::size_t) { out.push_back(j); });
  return out;
}

void write_jsonl_file(const std::string& path, const std::vector<json>& records) {
  std::ostringstream buf;
  for (const auto& r : records) write_jsonl_record(buf, r);
  write_text_file(path, buf.str());
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open '{}'", path));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, std::string_view contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot write '{}'", tmp));
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::IoError, fmt::format("write to '{}' failed", tmp));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, fmt::format("rename to '{}': {}", path, ec.message()));
}

}  // namespace efcg
