#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "efcg/embedding_client.hpp"
#include "efcg/expansion.hpp"
#include "efcg/extraction.hpp"
#include "efcg/llm.hpp"
#include "efcg/pairs.hpp"
#include "efcg/verifier.hpp"

namespace efcg {

// Parsed TOML subset: [section] tables of key = value, where a value is a
// string, integer, float, boolean or a one-line array of those. Nested
// tables, inline tables, dates and multi-line strings are rejected.
using TomlScalar = std::variant<std::string, std::int64_t, double, bool>;
using TomlValue = std::variant<std::string, std::int64_t, double, bool, std::vector<TomlScalar>>;
using TomlTable = std::map<std::string, TomlValue>;
using TomlDocument = std::map<std::string, TomlTable>;

// Keys before the first header land in the "" table. Throws ConfigError
// with "source:line".
TomlDocument parse_toml(std::string_view text, std::string_view source = "config");

struct AppConfig {
  EndpointConfig generator;
  EndpointConfig judge;
  EmbeddingClientConfig embedding;  // semantic space
  std::string correlation_url;      // correlation space; empty means embedding.url
  ExpansionConfig expansion;
  PairConfig pairs;
  VerifierOptions verifier;
  ExtractionConfig extraction;
};

// Sections: [generator], [judge], [embedding], [expansion], [pairs],
// [verifier], [extraction]. Unknown sections or keys and wrongly typed
// values are ConfigError. Secrets are never read from the file: a key that
// looks like a credential is rejected; set the environment variable named
// by token_env instead. [verifier] is copied into pairs and extraction.
AppConfig config_from_toml(const TomlDocument& doc);
AppConfig load_config(const std::string& path);

}  // namespace efcg
