#pragma once

#include <chrono>
#include <deque>
#include <mutex>
#include <semaphore>
#include <string>

#include "demod/providers.hpp"

namespace demod {

struct RemoteChatConfig {
  // e.g. "https://api.openai.com/v1"; requests go to <base_url>/chat/completions
  std::string base_url;
  std::string model;
  // Name of the environment variable holding the API key. The key itself is
  // never read from configuration files.
  std::string api_key_env = "DEMOD_API_KEY";
  double timeout_seconds = 30.0;
  int max_retries = 2;
  int backoff_initial_ms = 500;
  int max_concurrent = 4;
  int requests_per_minute = 60;
};

// OpenAI-compatible chat-completions client. Transport and Overloaded
// failures are retried up to max_retries times with exponential backoff.
class RemoteChat final : public ChatProvider {
 public:
  explicit RemoteChat(RemoteChatConfig config);

  std::string complete(const ChatRequest& request) override;

  // Wire body for a request; exposed for tests.
  std::string request_body(const ChatRequest& request) const;
  // Extracts the assistant text from a response body. Errors: Transport on
  // an unexpected shape, Refusal on empty or filtered content.
  static std::string parse_response(const std::string& body);

  const RemoteChatConfig& config() const noexcept { return config_; }

 private:
  std::string attempt(const std::string& body);
  void acquire_rate_slot();

  RemoteChatConfig config_;
  std::string origin_;       // scheme://host[:port]
  std::string path_prefix_;  // e.g. "/v1"
  std::counting_semaphore<1024> in_flight_;
  std::mutex rate_mu_;
  std::deque<std::chrono::steady_clock::time_point> recent_;
};

}  // namespace demod
