#include "efcg/embedding_client.hpp"

#include <cmath>

#include <fmt/format.h>

#include "efcg/error.hpp"
#include "efcg/http.hpp"
#include "efcg/parallel.hpp"
#include "efcg/serialization.hpp"

namespace efcg {

HttpEmbeddingClient::HttpEmbeddingClient(EmbeddingClientConfig cfg)
    : cfg_(std::move(cfg)), token_(env_or_empty(cfg_.token_env.c_str())) {
  if (cfg_.url.empty()) throw Error(ErrorCode::ConfigError, "[embedding] url is required");
  if (cfg_.batch_size == 0) throw Error(ErrorCode::ConfigError, "[embedding] batch_size must be >= 1");
  if (cfg_.max_inflight == 0) throw Error(ErrorCode::ConfigError, "[embedding] max_inflight must be >= 1");
}

std::vector<std::vector<double>> HttpEmbeddingClient::embed_batch(
    const std::vector<std::string>& texts) const {
  const json body = {{"texts", texts}};
  const auto res = http_post_json(cfg_.url, body.dump(), {cfg_.timeout, token_});
  if (res.status < 200 || res.status >= 300) {
    throw Error(ErrorCode::ClientError, fmt::format("embedding service returned HTTP {}: {}",
                                                    res.status, res.body.substr(0, 200)));
  }
  std::vector<std::vector<double>> out;
  try {
    const auto j = json::parse(res.body);
    const auto& vectors = j.at("vectors");
    if (!vectors.is_array()) throw Error(ErrorCode::ClientError, "'vectors' is not an array");
    for (const auto& v : vectors) {
      auto& row = out.emplace_back();
      for (const auto& x : v) {
        if (!x.is_number()) throw Error(ErrorCode::ClientError, "non-numeric vector component");
        row.push_back(x.get<double>());
        if (!std::isfinite(row.back())) {
          throw Error(ErrorCode::ClientError, "non-finite vector component");
        }
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ClientError, fmt::format("malformed embedding response: {}", e.what()));
  }
  if (out.size() != texts.size()) {
    throw Error(ErrorCode::ClientError, fmt::format("embedding service returned {} vectors for {} texts",
                                                    out.size(), texts.size()));
  }
  return out;
}

std::vector<std::vector<double>> HttpEmbeddingClient::embed(const std::vector<std::string>& texts) {
  const std::size_t batches = (texts.size() + cfg_.batch_size - 1) / cfg_.batch_size;
  std::vector<std::vector<std::vector<double>>> parts(batches);
  parallel_for(batches, cfg_.max_inflight, [&](std::size_t b) {
    const auto begin = texts.begin() + static_cast<std::ptrdiff_t>(b * cfg_.batch_size);
    const auto end = texts.begin() +
                     static_cast<std::ptrdiff_t>(std::min(texts.size(), (b + 1) * cfg_.batch_size));
    parts[b] = embed_batch(std::vector<std::string>(begin, end));
  });
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  for (auto& p : parts) {
    for (auto& v : p) out.push_back(std::move(v));
  }
  return out;
}

}  // namespace efcg
