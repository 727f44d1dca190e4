#include "efcg/http.hpp"

#include <cstdlib>

#include <httplib.h>
#include <fmt/format.h>

#include "efcg/error.hpp"

namespace efcg {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw Error(ErrorCode::ConfigError, fmt::format("URL '{}' has no scheme", url));
  }
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorCode::ConfigError, fmt::format("unsupported URL scheme '{}'", scheme));
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string_view::npos) return {std::string(url), "/"};
  return {std::string(url.substr(0, path_start)), std::string(url.substr(path_start))};
}

}  // namespace

HttpResponse http_post_json(std::string_view url, const std::string& body, const HttpOptions& opts) {
  const auto parts = split_url(url);
  httplib::Client client(parts.origin);
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(opts.timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(opts.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());
  httplib::Headers headers;
  if (!opts.bearer_token.empty()) headers.emplace("Authorization", "Bearer " + opts.bearer_token);
  const auto res = client.Post(parts.path, headers, body, "application/json");
  if (!res) {
    throw Error(ErrorCode::ClientError,
                fmt::format("POST {} failed: {}", url, httplib::to_string(res.error())));
  }
  return {res->status, res->body};
}

std::string env_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v == nullptr ? std::string() : std::string(v);
}

}  // namespace efcg
