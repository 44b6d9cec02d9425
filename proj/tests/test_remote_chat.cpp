#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "demod/error.hpp"
#include "demod/remote_chat.hpp"

namespace demod {
namespace {

using nlohmann::json;

// Local chat-completions endpoint whose reply is chosen per call.
class FakeEndpoint {
 public:
  using Reply = std::function<void(int call, const httplib::Request&, httplib::Response&)>;

  explicit FakeEndpoint(Reply reply) : reply_(std::move(reply)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                httplib::Response& res) {
      const int n = calls_++;
      {
        std::lock_guard lock(mu_);
        last_body_ = req.body;
        last_auth_ = req.get_header_value("Authorization");
      }
      reply_(n, req, res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }

  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  int calls() const { return calls_; }
  std::string last_body() const {
    std::lock_guard lock(mu_);
    return last_body_;
  }
  std::string last_auth() const {
    std::lock_guard lock(mu_);
    return last_auth_;
  }

 private:
  Reply reply_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<int> calls_{0};
  mutable std::mutex mu_;
  std::string last_body_;
  std::string last_auth_;
};

std::string completion(const std::string& content, const std::string& finish = "stop") {
  return json{{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", content}}},
                                         {"finish_reason", finish}}})}}
      .dump();
}

RemoteChatConfig config_for(const std::string& url, int retries = 2) {
  RemoteChatConfig c;
  c.base_url = url;
  c.model = "test-model";
  c.api_key_env = "DEMOD_TEST_REMOTE_KEY";
  c.timeout_seconds = 5;
  c.max_retries = retries;
  c.backoff_initial_ms = 1;
  return c;
}

const ChatRequest kRequest{"Task: Toxicity detection\nrules", "Sentence to detect: hi",
                           "JSON only", 0.0, "detect", "hi"};

TEST(RemoteChat, WireFormatAndAuth) {
  FakeEndpoint ep([](int, const httplib::Request&, httplib::Response& res) {
    res.set_content(completion("{\"verdict\":\"N\"}"), "application/json");
  });
  ::setenv("DEMOD_TEST_REMOTE_KEY", "sk-test", 1);
  RemoteChat chat(config_for(ep.base_url()));
  EXPECT_EQ(chat.complete(kRequest), "{\"verdict\":\"N\"}");
  ::unsetenv("DEMOD_TEST_REMOTE_KEY");

  EXPECT_EQ(ep.last_auth(), "Bearer sk-test");
  const auto body = json::parse(ep.last_body());
  EXPECT_EQ(body["model"], "test-model");
  EXPECT_EQ(body["temperature"], 0.0);
  ASSERT_EQ(body["messages"].size(), 2u);
  EXPECT_EQ(body["messages"][0]["role"], "system");
  EXPECT_EQ(body["messages"][0]["content"],
            "Task: Toxicity detection\nrules\n\nOutput format: JSON only");
  EXPECT_EQ(body["messages"][1]["role"], "user");
  EXPECT_EQ(body["messages"][1]["content"], "Sentence to detect: hi");
  EXPECT_EQ(ep.last_body().find("\"subject\""), std::string::npos);
}

TEST(RemoteChat, RateLimitedRetriesThenOverloaded) {
  FakeEndpoint ep([](int, const httplib::Request&, httplib::Response& res) {
    res.status = 429;
  });
  RemoteChat chat(config_for(ep.base_url(), 2));
  try {
    chat.complete(kRequest);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Overloaded);
  }
  EXPECT_EQ(ep.calls(), 3);
}

TEST(RemoteChat, RecoversAfterServerError) {
  FakeEndpoint ep([](int n, const httplib::Request&, httplib::Response& res) {
    if (n == 0) {
      res.status = 503;
      return;
    }
    res.set_content(completion("ok"), "application/json");
  });
  RemoteChat chat(config_for(ep.base_url()));
  EXPECT_EQ(chat.complete(kRequest), "ok");
  EXPECT_EQ(ep.calls(), 2);
}

TEST(RemoteChat, RefusalIsNotRetried) {
  FakeEndpoint ep([](int, const httplib::Request&, httplib::Response& res) {
    res.set_content(completion("", "content_filter"), "application/json");
  });
  RemoteChat chat(config_for(ep.base_url()));
  try {
    chat.complete(kRequest);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Refusal);
  }
  EXPECT_EQ(ep.calls(), 1);
}

TEST(RemoteChat, UnreachableEndpointIsTransport) {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  RemoteChat chat(config_for("http://127.0.0.1:" + std::to_string(port) + "/v1", 1));
  try {
    chat.complete(kRequest);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Transport);
    EXPECT_TRUE(e.retriable());
  }
}

TEST(RemoteChat, ParseResponseShapes) {
  EXPECT_EQ(RemoteChat::parse_response(completion("hello")), "hello");
  EXPECT_THROW(RemoteChat::parse_response("<html>"), Error);
  EXPECT_THROW(RemoteChat::parse_response(R"({"choices": []})"), Error);
  try {
    RemoteChat::parse_response(
        R"({"choices":[{"message":{"content":null,"refusal":"no"},"finish_reason":"stop"}]})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Refusal);
  }
}

TEST(RemoteChat, BadBaseUrl) {
  RemoteChatConfig c;
  c.base_url = "localhost:8080";
  EXPECT_THROW(RemoteChat{c}, Error);
}

}  // namespace
}  // namespace demod
