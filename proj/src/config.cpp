#include "efcg/config.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <set>

#include <fmt/format.h>

#include "efcg/error.hpp"
#include "efcg/jsonl.hpp"
#include "efcg/text.hpp"

namespace efcg {

namespace {

class TomlParser {
 public:
  TomlParser(std::string_view text, std::string_view source) : text_(text), source_(source) {}

  TomlDocument parse() {
    TomlDocument doc;
    std::string section;
    doc[section];
    std::size_t start = 0;
    while (start <= text_.size()) {
      auto nl = text_.find('\n', start);
      if (nl == std::string_view::npos) nl = text_.size();
      ++line_no_;
      line_ = text_.substr(start, nl - start);
      if (!line_.empty() && line_.back() == '\r') line_.remove_suffix(1);
      pos_ = 0;
      skip_ws();
      if (!at_end() && peek() != '#') {
        if (peek() == '[') {
          section = parse_header();
          if (doc.count(section) > 0 && !section.empty()) fail(fmt::format("duplicate table [{}]", section));
          doc[section];
        } else {
          auto key = parse_key();
          skip_ws();
          expect('=');
          skip_ws();
          auto value = parse_value();
          auto& table = doc[section];
          if (table.count(key) > 0) fail(fmt::format("duplicate key '{}'", key));
          table.emplace(std::move(key), std::move(value));
        }
        skip_ws();
        if (!at_end() && peek() != '#') fail("unexpected trailing characters");
      }
      start = nl + 1;
    }
    return doc;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::ConfigError, fmt::format("{}:{}: {}", source_, line_no_, msg));
  }

  bool at_end() const { return pos_ >= line_.size(); }
  char peek() const { return line_[pos_]; }
  void skip_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }
  void expect(char c) {
    if (at_end() || peek() != c) fail(fmt::format("expected '{}'", c));
    ++pos_;
  }

  static bool bare_key_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
           c == '-';
  }

  std::string parse_key() {
    if (!at_end() && (peek() == '"' || peek() == '\'')) fail("quoted keys are not supported");
    const auto begin = pos_;
    while (!at_end() && bare_key_char(peek())) ++pos_;
    if (pos_ == begin) fail("expected a key");
    if (!at_end() && peek() == '.') fail("dotted keys are not supported");
    return std::string(line_.substr(begin, pos_ - begin));
  }

  std::string parse_header() {
    expect('[');
    if (!at_end() && peek() == '[') fail("arrays of tables are not supported");
    skip_ws();
    auto name = parse_key();
    skip_ws();
    expect(']');
    return name;
  }

  TomlValue parse_value() {
    if (at_end()) fail("missing value");
    if (peek() == '[') {
      ++pos_;
      std::vector<TomlScalar> items;
      skip_ws();
      while (!at_end() && peek() != ']') {
        items.push_back(parse_scalar());
        skip_ws();
        if (!at_end() && peek() == ',') {
          ++pos_;
          skip_ws();
        } else {
          break;
        }
      }
      expect(']');
      return items;
    }
    return std::visit([](auto&& v) -> TomlValue { return v; }, parse_scalar());
  }

  TomlScalar parse_scalar() {
    if (at_end()) fail("missing value");
    const char c = peek();
    if (c == '"') return parse_basic_string();
    if (c == '\'') return parse_literal_string();
    if (c == '{') fail("inline tables are not supported");
    if (c == '[') fail("nested arrays are not supported");
    const auto begin = pos_;
    while (!at_end() && peek() != ',' && peek() != ']' && peek() != '#' && peek() != ' ' &&
           peek() != '\t') {
      ++pos_;
    }
    const auto token = line_.substr(begin, pos_ - begin);
    if (token == "true") return true;
    if (token == "false") return false;
    return parse_number(token);
  }

  TomlScalar parse_number(std::string_view token) {
    std::string clean;
    for (std::size_t i = 0; i < token.size(); ++i) {
      if (token[i] == '_') {
        if (i == 0 || i + 1 == token.size()) fail(fmt::format("invalid number '{}'", token));
        continue;
      }
      clean += token[i];
    }
    if (clean.empty()) fail("missing value");
    const bool is_float = clean.find_first_of(".eE") != std::string::npos || clean.find("inf") != std::string::npos ||
                          clean.find("nan") != std::string::npos;
    if (!is_float) {
      std::int64_t v = 0;
      const char* first = clean.data() + (clean[0] == '+' ? 1 : 0);
      const auto [ptr, ec] = std::from_chars(first, clean.data() + clean.size(), v);
      if (ec != std::errc() || ptr != clean.data() + clean.size()) {
        fail(fmt::format("invalid value '{}'", token));
      }
      return v;
    }
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(clean.c_str(), &end);
    if (end != clean.c_str() + clean.size() || errno == ERANGE) fail(fmt::format("invalid value '{}'", token));
    return v;
  }

  std::string parse_literal_string() {
    ++pos_;
    const auto close = line_.find('\'', pos_);
    if (close == std::string_view::npos) fail("unterminated string");
    auto s = std::string(line_.substr(pos_, close - pos_));
    pos_ = close + 1;
    return s;
  }

  std::string parse_basic_string() {
    ++pos_;
    std::string out;
    while (true) {
      if (at_end()) fail("unterminated string");
      const char c = line_[pos_++];
      if (c == '"') return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (at_end()) fail("unterminated escape");
      const char e = line_[pos_++];
      switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case 'b': out += '\b'; break;
        case 'f': out += '\f'; break;
        case 'u':
        case 'U': {
          const std::size_t len = e == 'u' ? 4 : 8;
          if (pos_ + len > line_.size()) fail("truncated unicode escape");
          std::uint32_t cp = 0;
          const auto hex = line_.substr(pos_, len);
          const auto [ptr, ec] = std::from_chars(hex.data(), hex.data() + len, cp, 16);
          if (ec != std::errc() || ptr != hex.data() + len || cp > 0x10FFFF ||
              (cp >= 0xD800 && cp <= 0xDFFF)) {
            fail("invalid unicode escape");
          }
          text::append_utf8(out, static_cast<char32_t>(cp));
          pos_ += len;
          break;
        }
        default: fail(fmt::format("unknown escape '\\{}'", e));
      }
    }
  }

  std::string_view text_;
  std::string_view source_;
  std::string_view line_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

// Typed reads from one table; every key read is remembered so leftovers can
// be reported.
class Section {
 public:
  Section(const TomlDocument& doc, std::string name) : name_(std::move(name)) {
    if (const auto it = doc.find(name_); it != doc.end()) table_ = &it->second;
  }

  template <typename T>
  bool read(std::string_view key, T& out) {
    const auto* v = find(key);
    if (v == nullptr) return false;
    out = convert<T>(*v, key);
    return true;
  }

  bool read_ms(std::string_view key, std::chrono::milliseconds& out) {
    std::int64_t ms = 0;
    if (!read(key, ms)) return false;
    if (ms <= 0) fail(key, "must be > 0");
    out = std::chrono::milliseconds(ms);
    return true;
  }

  std::vector<TomlScalar> read_array(std::string_view key) {
    const auto* v = find(key);
    if (v == nullptr) return {};
    const auto* arr = std::get_if<std::vector<TomlScalar>>(v);
    if (arr == nullptr) fail(key, "must be an array");
    return *arr;
  }

  bool has(std::string_view key) const { return table_ != nullptr && table_->count(std::string(key)) > 0; }

  void finish() const {
    if (table_ == nullptr) return;
    for (const auto& [key, value] : *table_) {
      if (used_.count(key) == 0) {
        throw Error(ErrorCode::ConfigError, fmt::format("unknown key '{}' in [{}]", key, name_));
      }
    }
  }

  [[noreturn]] void fail(std::string_view key, std::string_view msg) const {
    throw Error(ErrorCode::ConfigError, fmt::format("[{}] {} {}", name_, key, msg));
  }

 private:
  const TomlValue* find(std::string_view key) {
    used_.insert(std::string(key));
    if (table_ == nullptr) return nullptr;
    const auto it = table_->find(std::string(key));
    return it == table_->end() ? nullptr : &it->second;
  }

  template <typename T>
  T convert(const TomlValue& v, std::string_view key) const {
    if constexpr (std::is_same_v<T, std::string>) {
      if (const auto* s = std::get_if<std::string>(&v)) return *s;
      fail(key, "must be a string");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (const auto* b = std::get_if<bool>(&v)) return *b;
      fail(key, "must be a boolean");
    } else if constexpr (std::is_same_v<T, double>) {
      if (const auto* d = std::get_if<double>(&v)) return *d;
      if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
      fail(key, "must be a number");
    } else {
      const auto* i = std::get_if<std::int64_t>(&v);
      if (i == nullptr) fail(key, "must be an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (*i < 0) fail(key, "must be >= 0");
      }
      return static_cast<T>(*i);
    }
  }

  std::string name_;
  const TomlTable* table_ = nullptr;
  std::set<std::string> used_;
};

bool looks_like_secret(std::string_view key) {
  const auto k = text::to_lower(key);
  for (std::string_view bad : {"token", "api_key", "apikey", "secret", "password"}) {
    if (k.size() >= bad.size() && k.compare(k.size() - bad.size(), bad.size(), bad) == 0) return true;
  }
  return false;
}

void read_endpoint(const TomlDocument& doc, const std::string& name, EndpointConfig& cfg) {
  Section s(doc, name);
  s.read("base_url", cfg.base_url);
  s.read("model", cfg.model);
  s.read("temperature", cfg.temperature);
  std::int64_t max_tokens = 0;
  if (s.read("max_tokens", max_tokens)) cfg.max_tokens = max_tokens;
  s.read_ms("timeout_ms", cfg.timeout);
  s.read("max_retries", cfg.max_retries);
  s.read_ms("retry_backoff_ms", cfg.retry_backoff);
  s.read("token_env", cfg.token_env);
  s.finish();
}

}  // namespace

TomlDocument parse_toml(std::string_view text, std::string_view source) {
  return TomlParser(text, source).parse();
}

AppConfig config_from_toml(const TomlDocument& doc) {
  static const std::set<std::string> known = {"generator", "expansion", "judge",    "embedding",
                                              "pairs",     "verifier",  "extraction"};
  for (const auto& [name, table] : doc) {
    if (name.empty()) {
      if (!table.empty()) {
        throw Error(ErrorCode::ConfigError,
                    fmt::format("key '{}' must be inside a section", table.begin()->first));
      }
      continue;
    }
    if (known.count(name) == 0) throw Error(ErrorCode::ConfigError, fmt::format("unknown section [{}]", name));
    for (const auto& [key, value] : table) {
      if (looks_like_secret(key)) {
        throw Error(ErrorCode::ConfigError,
                    fmt::format("[{}] {}: secrets are read from the environment only; set token_env", name, key));
      }
    }
  }

  AppConfig cfg;
  read_endpoint(doc, "generator", cfg.generator);
  read_endpoint(doc, "judge", cfg.judge);

  {
    Section s(doc, "embedding");
    s.read("url", cfg.embedding.url);
    s.read("correlation_url", cfg.correlation_url);
    s.read("batch_size", cfg.embedding.batch_size);
    s.read("max_inflight", cfg.embedding.max_inflight);
    s.read_ms("timeout_ms", cfg.embedding.timeout);
    s.read("token_env", cfg.embedding.token_env);
    s.finish();
  }
  {
    Section s(doc, "expansion");
    auto& e = cfg.expansion;
    s.read("seed_count", e.seed_count);
    s.read("retrieval_k", e.retrieval_k);
    s.read("redundancy_threshold", e.redundancy_threshold);
    s.read("size_min", e.size_min);
    s.read("size_max", e.size_max);
    s.read("rng_seed", e.rng_seed);
    std::string mode;
    if (s.read("redundancy_mode", mode)) {
      const auto m = parse_redundancy_mode(mode);
      if (!m) s.fail("redundancy_mode", fmt::format("has unknown value '{}'", mode));
      e.redundancy_mode = *m;
    }
    s.read("soft_only_candidates", e.soft_only_candidates);
    s.read("max_workers", e.max_workers);
    s.finish();
    validate_expansion_config(e);
  }
  {
    Section s(doc, "verifier");
    s.read("around_tolerance_percent", cfg.verifier.around_tolerance_percent);
    s.read("around_min_tolerance", cfg.verifier.around_min_tolerance);
    s.finish();
    if (cfg.verifier.around_tolerance_percent < 0 || cfg.verifier.around_min_tolerance < 0) {
      throw Error(ErrorCode::ConfigError, "[verifier] tolerances must be >= 0");
    }
  }
  {
    Section s(doc, "pairs");
    s.read("k_candidates", cfg.pairs.k_candidates);
    s.read("min_margin", cfg.pairs.min_margin);
    s.read("candidate_seeds", cfg.pairs.candidate_seeds);
    s.read("max_inflight", cfg.pairs.max_inflight);
    s.finish();
    cfg.pairs.verifier = cfg.verifier;
    validate_pair_config(cfg.pairs);
  }
  {
    Section s(doc, "extraction");
    auto& x = cfg.extraction;
    s.read("count", x.count);
    s.read("rng_seed", x.rng_seed);
    s.read("min_keyword_length", x.min_keyword_length);
    s.read("max_end_phrase_words", x.max_end_phrase_words);
    if (s.has("stopwords")) {
      x.stopwords.clear();
      for (const auto& w : s.read_array("stopwords")) {
        const auto* str = std::get_if<std::string>(&w);
        if (str == nullptr) s.fail("stopwords", "must hold strings");
        x.stopwords.insert(text::normalize_word(*str));
      }
    }
    for (const auto& t : s.read_array("catalog")) {
      const auto* str = std::get_if<std::string>(&t);
      const auto type = str ? parse_constraint_type(*str) : std::nullopt;
      if (!type) s.fail("catalog", "must hold constraint type names");
      x.catalog.push_back(*type);
    }
    s.finish();
    x.verifier = cfg.verifier;
    validate_extraction_config(x);
  }
  return cfg;
}

AppConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::ConfigError, fmt::format("cannot read config: {}", e.what()));
  }
  return config_from_toml(parse_toml(text, path));
}

}  // namespace efcg
