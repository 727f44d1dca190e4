#pragma once

#include <chrono>
#include <cstddef>
#include <string>
#include <vector>

namespace efcg {

// Turns texts into vectors. Implementations must be thread-safe.
class TextEmbedder {
 public:
  virtual ~TextEmbedder() = default;
  // One vector per input text, in input order. Throws ClientError.
  virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) = 0;
};

struct EmbeddingClientConfig {
  std::string url;  // full endpoint URL
  std::size_t batch_size = 64;
  std::size_t max_inflight = 4;
  std::chrono::milliseconds timeout{120000};
  std::string token_env = "EFCG_EMBED_TOKEN";
};

// POSTs {"texts": [...]} and expects {"vectors": [[...], ...]} of the same
// length. Batches run with at most max_inflight requests outstanding; any
// non-2xx status, length mismatch or non-finite value is a ClientError.
class HttpEmbeddingClient : public TextEmbedder {
 public:
  explicit HttpEmbeddingClient(EmbeddingClientConfig cfg);
  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override;

 private:
  std::vector<std::vector<double>> embed_batch(const std::vector<std::string>& texts) const;

  EmbeddingClientConfig cfg_;
  std::string token_;
};

}  // namespace efcg
