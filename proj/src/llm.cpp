#include "efcg/llm.hpp"

#include <thread>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "efcg/error.hpp"
#include "efcg/http.hpp"

namespace efcg {

void validate_endpoint_config(const EndpointConfig& cfg, std::string_view section) {
  auto fail = [&](std::string_view msg) {
    throw Error(ErrorCode::ConfigError, fmt::format("[{}] {}", section, msg));
  };
  if (cfg.base_url.empty()) fail("base_url is required");
  if (cfg.model.empty()) fail("model is required");
  if (cfg.temperature < 0.0) fail("temperature must be >= 0");
  if (cfg.max_retries < 0) fail("max_retries must be >= 0");
  if (cfg.timeout.count() <= 0) fail("timeout must be positive");
  if (cfg.max_tokens && *cfg.max_tokens < 1) fail("max_tokens must be >= 1");
}

OpenAiChatClient::OpenAiChatClient(EndpointConfig cfg)
    : cfg_(std::move(cfg)), token_(env_or_empty(cfg_.token_env.c_str())) {
  validate_endpoint_config(cfg_, "endpoint");
}

json OpenAiChatClient::request_body(std::string_view prompt, const CompletionOptions& opts) const {
  json body = {{"model", cfg_.model},
               {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
               {"temperature", cfg_.temperature}};
  if (cfg_.max_tokens) body["max_tokens"] = *cfg_.max_tokens;
  if (opts.seed) body["seed"] = *opts.seed;
  return body;
}

std::string OpenAiChatClient::complete(std::string_view prompt) { return complete(prompt, CompletionOptions{}); }

std::string OpenAiChatClient::complete(std::string_view prompt, const CompletionOptions& opts) {
  std::string url = cfg_.base_url;
  while (!url.empty() && url.back() == '/') url.pop_back();
  url += "/chat/completions";
  const auto body = request_body(prompt, opts).dump();
  const HttpOptions http{cfg_.timeout, token_};

  std::string last_error;
  for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(cfg_.retry_backoff * (1 << std::min(attempt - 1, 10)));
    }
    HttpResponse res;
    try {
      res = http_post_json(url, body, http);
    } catch (const Error& e) {
      last_error = e.what();
      spdlog::warn("{} (attempt {}/{})", last_error, attempt + 1, cfg_.max_retries + 1);
      continue;
    }
    if (res.status == 429 || res.status >= 500) {
      last_error = fmt::format("{} returned HTTP {}", url, res.status);
      spdlog::warn("{} (attempt {}/{})", last_error, attempt + 1, cfg_.max_retries + 1);
      continue;
    }
    if (res.status < 200 || res.status >= 300) {
      throw Error(ErrorCode::ClientError,
                  fmt::format("{} returned HTTP {}: {}", url, res.status, res.body.substr(0, 200)));
    }
    try {
      const auto j = json::parse(res.body);
      const auto& content = j.at("choices").at(0).at("message").at("content");
      if (!content.is_string()) throw Error(ErrorCode::ClientError, "message content is not a string");
      return content.get<std::string>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ClientError, fmt::format("malformed chat response: {}", e.what()));
    }
  }
  throw Error(ErrorCode::ClientError, fmt::format("giving up after {} attempts: {}",
                                                  cfg_.max_retries + 1, last_error));
}

}  // namespace efcg
