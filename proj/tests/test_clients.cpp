#include <doctest.h>

#include <atomic>
#include <chrono>
#include <thread>

#include <httplib.h>

#include "efcg/embedding_client.hpp"
#include "efcg/error.hpp"
#include "efcg/llm.hpp"
#include "efcg/serialization.hpp"
#include "support/stub_server.hpp"

using namespace efcg;
using efcg::testing::StubServer;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an efcg::Error");
  return ErrorCode::IoError;
}

EndpointConfig endpoint(const std::string& base) {
  EndpointConfig cfg;
  cfg.base_url = base;
  cfg.model = "stub-model";
  cfg.retry_backoff = std::chrono::milliseconds(1);
  cfg.timeout = std::chrono::milliseconds(5000);
  return cfg;
}

}  // namespace

TEST_CASE("OpenAiChatClient: request shape and reply extraction") {
  json seen;
  std::string auth;
  StubServer server([&](httplib::Server& s) {
    s.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
      seen = json::parse(req.body);
      auth = req.get_header_value("Authorization");
      res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"hello back"}}]})",
                      "application/json");
    });
  });
  setenv("EFCG_TEST_TOKEN", "secret-1", 1);
  auto cfg = endpoint(server.url("/v1/"));
  cfg.token_env = "EFCG_TEST_TOKEN";
  cfg.max_tokens = 64;
  OpenAiChatClient client(cfg);
  CHECK(client.complete("hi there") == "hello back");
  CHECK(seen["model"] == "stub-model");
  CHECK(seen["temperature"] == 0.0);
  CHECK(seen["max_tokens"] == 64);
  CHECK(seen["messages"][0]["role"] == "user");
  CHECK(seen["messages"][0]["content"] == "hi there");
  CHECK(auth == "Bearer secret-1");
  CHECK_FALSE(seen.contains("seed"));

  CHECK(client.complete("again", CompletionOptions{17}) == "hello back");
  CHECK(seen["seed"] == 17);
}

TEST_CASE("OpenAiChatClient: retries 5xx and 429, fails fast on 4xx") {
  std::atomic<int> calls{0};
  StubServer server([&](httplib::Server& s) {
    s.Post("/flaky/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
      const int n = calls++;
      if (n == 0) {
        res.status = 503;
      } else if (n == 1) {
        res.status = 429;
      } else {
        res.set_content(R"({"choices":[{"message":{"content":"ok"}}]})", "application/json");
      }
    });
    s.Post("/bad/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
      ++calls;
      res.status = 400;
    });
    s.Post("/junk/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"choices":[]})", "application/json");
    });
  });
  OpenAiChatClient flaky(endpoint(server.url("/flaky")));
  CHECK(flaky.complete("x") == "ok");
  CHECK(calls == 3);

  calls = 0;
  OpenAiChatClient bad(endpoint(server.url("/bad")));
  CHECK(code_of([&] { bad.complete("x"); }) == ErrorCode::ClientError);
  CHECK(calls == 1);

  OpenAiChatClient junk(endpoint(server.url("/junk")));
  CHECK(code_of([&] { junk.complete("x"); }) == ErrorCode::ClientError);

  auto dead = endpoint("http://127.0.0.1:1");
  dead.max_retries = 1;
  OpenAiChatClient refused(dead);
  CHECK(code_of([&] { refused.complete("x"); }) == ErrorCode::ClientError);

  CHECK(code_of([] { OpenAiChatClient(EndpointConfig{}); }) == ErrorCode::ConfigError);
}

TEST_CASE("HttpEmbeddingClient: batches, order and bounded in-flight requests") {
  std::atomic<int> inflight{0};
  std::atomic<int> peak{0};
  std::atomic<int> requests{0};
  std::string auth;
  StubServer server([&](httplib::Server& s) {
    s.Post("/embed", [&](const httplib::Request& req, httplib::Response& res) {
      const int now = ++inflight;
      int prev = peak.load();
      while (now > prev && !peak.compare_exchange_weak(prev, now)) {
      }
      ++requests;
      auth = req.get_header_value("Authorization");
      const auto body = json::parse(req.body);
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
      json vectors = json::array();
      for (const auto& t : body["texts"]) {
        const auto s = t.get<std::string>();
        vectors.push_back({static_cast<double>(s.size()), std::stod(s.substr(1))});
      }
      --inflight;
      res.set_content(json{{"vectors", vectors}}.dump(), "application/json");
    });
  });
  setenv("EFCG_EMBED_TOKEN", "embed-secret", 1);
  EmbeddingClientConfig cfg;
  cfg.url = server.url("/embed");
  cfg.batch_size = 3;
  cfg.max_inflight = 2;
  HttpEmbeddingClient client(cfg);
  std::vector<std::string> texts;
  for (int i = 0; i < 20; ++i) texts.push_back("t" + std::to_string(i));
  const auto out = client.embed(texts);
  REQUIRE(out.size() == 20);
  for (int i = 0; i < 20; ++i) CHECK(out[static_cast<std::size_t>(i)][1] == i);
  CHECK(requests == 7);
  CHECK(peak <= 2);
  CHECK(auth == "Bearer embed-secret");
  CHECK(client.embed({}).empty());
}

TEST_CASE("HttpEmbeddingClient: length mismatch and HTTP errors") {
  StubServer server([&](httplib::Server& s) {
    s.Post("/short", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"vectors":[[1,2]]})", "application/json");
    });
    s.Post("/fail", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
    s.Post("/nan", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"vectors":[["a"]]})", "application/json");
    });
  });
  for (const char* path : {"/short", "/fail", "/nan"}) {
    EmbeddingClientConfig cfg;
    cfg.url = server.url(path);
    HttpEmbeddingClient client(cfg);
    CHECK(code_of([&] { client.embed({"a", "b"}); }) == ErrorCode::ClientError);
  }
}
