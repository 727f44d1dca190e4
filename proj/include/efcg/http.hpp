#pragma once

#include <chrono>
#include <map>
#include <string>
#include <string_view>

namespace efcg {

struct HttpResponse {
  int status = 0;
  std::string body;
};

struct HttpOptions {
  std::chrono::milliseconds timeout{120000};
  // Sent as "Authorization: Bearer <token>" when nonempty.
  std::string bearer_token;
};

// POSTs a JSON body to a full URL ("http://host:port/path" or https).
// Each call opens its own connection, so concurrent calls are safe.
// Transport failures throw ClientError; any HTTP status is returned.
HttpResponse http_post_json(std::string_view url, const std::string& body, const HttpOptions& opts);

// Value of an environment variable, or "" when unset.
std::string env_or_empty(const char* name);

}  // namespace efcg
