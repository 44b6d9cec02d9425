#include "demod/remote_chat.hpp"

#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "demod/error.hpp"

namespace demod {

using nlohmann::json;

namespace {

struct SemaphoreGuard {
  std::counting_semaphore<1024>& sem;
  explicit SemaphoreGuard(std::counting_semaphore<1024>& s) : sem(s) { sem.acquire(); }
  ~SemaphoreGuard() { sem.release(); }
  SemaphoreGuard(const SemaphoreGuard&) = delete;
  SemaphoreGuard& operator=(const SemaphoreGuard&) = delete;
};

}  // namespace

RemoteChat::RemoteChat(RemoteChatConfig config)
    : config_(std::move(config)),
      in_flight_(std::clamp(config_.max_concurrent, 1, 1024)) {
  const auto scheme_end = config_.base_url.find("://");
  if (config_.base_url.empty() || scheme_end == std::string::npos) {
    throw Error(ErrorCode::InvalidArgument,
                "remote chat base_url must look like scheme://host[:port][/path]");
  }
  const auto path_begin = config_.base_url.find('/', scheme_end + 3);
  origin_ = config_.base_url.substr(0, path_begin);
  if (path_begin != std::string::npos) {
    path_prefix_ = config_.base_url.substr(path_begin);
    while (!path_prefix_.empty() && path_prefix_.back() == '/') path_prefix_.pop_back();
  }
  if (config_.max_retries < 0) config_.max_retries = 0;
}

std::string RemoteChat::request_body(const ChatRequest& request) const {
  std::string system = request.system_text;
  if (!request.output_schema_hint.empty()) {
    system += "\n\nOutput format: " + request.output_schema_hint;
  }
  json body = {
      {"model", config_.model},
      {"temperature", request.temperature},
      {"messages",
       json::array({{{"role", "system"}, {"content", system}},
                    {{"role", "user"}, {"content", request.user_text}}})},
  };
  return body.dump();
}

std::string RemoteChat::parse_response(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception&) {
    throw Error(ErrorCode::Transport, "chat endpoint returned non-JSON body");
  }
  if (!doc.contains("choices") || !doc["choices"].is_array() || doc["choices"].empty()) {
    throw Error(ErrorCode::Transport, "chat response has no choices");
  }
  const auto& choice = doc["choices"][0];
  if (choice.value("finish_reason", "") == "content_filter") {
    throw Error(ErrorCode::Refusal, "chat output blocked by content filter");
  }
  const auto& message = choice.value("message", json::object());
  if (message.contains("refusal") && message["refusal"].is_string() &&
      !message["refusal"].get<std::string>().empty()) {
    throw Error(ErrorCode::Refusal, "model refused: " + message["refusal"].get<std::string>());
  }
  if (!message.contains("content") || !message["content"].is_string() ||
      trim(message["content"].get<std::string>()).empty()) {
    throw Error(ErrorCode::Refusal, "model returned empty content");
  }
  return message["content"].get<std::string>();
}

void RemoteChat::acquire_rate_slot() {
  if (config_.requests_per_minute <= 0) return;
  using clock = std::chrono::steady_clock;
  const auto window = std::chrono::minutes(1);
  std::unique_lock lock(rate_mu_);
  for (;;) {
    const auto now = clock::now();
    while (!recent_.empty() && now - recent_.front() >= window) recent_.pop_front();
    if (recent_.size() < static_cast<std::size_t>(config_.requests_per_minute)) {
      recent_.push_back(now);
      return;
    }
    const auto wait = recent_.front() + window - now;
    lock.unlock();
    std::this_thread::sleep_for(wait);
    lock.lock();
  }
}

std::string RemoteChat::attempt(const std::string& body) {
  acquire_rate_slot();
  SemaphoreGuard guard(in_flight_);

  httplib::Client client(origin_);
  const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));

  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  auto res = client.Post(path_prefix_ + "/chat/completions", headers, body,
                         "application/json");
  if (!res) {
    throw Error(ErrorCode::Transport,
                "chat request failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 429) {
    throw Error(ErrorCode::Overloaded, "chat endpoint rate limited (429)");
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(ErrorCode::Transport,
                "chat endpoint returned HTTP " + std::to_string(res->status));
  }
  return parse_response(res->body);
}

std::string RemoteChat::complete(const ChatRequest& request) {
  validate(request);
  const auto body = request_body(request);
  int delay_ms = config_.backoff_initial_ms;
  for (int retry = 0;; ++retry) {
    try {
      return attempt(body);
    } catch (const Error& e) {
      if (!e.retriable() || retry >= config_.max_retries) throw;
      spdlog::warn("chat attempt {} failed ({}), retrying in {} ms", retry + 1,
                   e.what(), delay_ms);
      std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
      delay_ms *= 2;
    }
  }
}

}  // namespace demod
