#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "efcg/serialization.hpp"

namespace efcg {

struct CompletionOptions {
  // Sampling seed forwarded to the server, when set.
  std::optional<std::int64_t> seed;
};

// A text-in, text-out chat model. Implementations must be safe to call
// from several threads at once.
class ChatModel {
 public:
  virtual ~ChatModel() = default;
  // Throws ClientError on failure.
  virtual std::string complete(std::string_view prompt) = 0;
  // Models without per-request options ignore them.
  virtual std::string complete(std::string_view prompt, const CompletionOptions&) { return complete(prompt); }
};

struct EndpointConfig {
  std::string base_url;  // e.g. "http://localhost:8000/v1"
  std::string model;
  double temperature = 0.0;
  std::optional<std::int64_t> max_tokens;
  std::chrono::milliseconds timeout{120000};
  int max_retries = 3;  // extra attempts after the first
  std::chrono::milliseconds retry_backoff{500};
  std::string token_env = "EFCG_LLM_TOKEN";
};

// Throws ConfigError.
void validate_endpoint_config(const EndpointConfig& cfg, std::string_view section);

// OpenAI-compatible chat completions: POST {base_url}/chat/completions,
// reads choices[0].message.content. Connection failures, 429 and 5xx are
// retried with exponential backoff; other statuses fail at once.
class OpenAiChatClient : public ChatModel {
 public:
  explicit OpenAiChatClient(EndpointConfig cfg);
  std::string complete(std::string_view prompt) override;
  std::string complete(std::string_view prompt, const CompletionOptions& opts) override;

  json request_body(std::string_view prompt, const CompletionOptions& opts = {}) const;

 private:
  EndpointConfig cfg_;
  std::string token_;
};

}  // namespace efcg
