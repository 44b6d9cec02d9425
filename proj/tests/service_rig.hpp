#pragma once

#include <atomic>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "demod/app.hpp"
#include "demod/service.hpp"
#include "support.hpp"

namespace demod::testing {

// Service over the bundled fixtures with an in-memory store and a settable clock.
struct ServiceRig {
  std::shared_ptr<std::atomic<Timestamp>> clock = std::make_shared<std::atomic<Timestamp>>(1000);
  std::shared_ptr<MockPlatform> platform = MockPlatform::from_file(fixture("mock_platform.json"));
  std::unique_ptr<Service> service;

  explicit ServiceRig(std::int64_t ttl = 3600, std::string provider = "mock-rules",
                      std::optional<std::filesystem::path> script = std::nullopt) {
    AppConfig config;
    config.base_dir = DEMOD_SOURCE_DIR;
    config.provider = std::move(provider);
    config.script_path = std::move(script);
    auto c = clock;
    service = std::make_unique<Service>(
        Runtime::build(config, std::make_shared<MemoryBackend>(), platform,
                       [c] { return c->load(); }),
        ServiceConfig{ttl});
  }

  HttpResponse post(const std::string& path, nlohmann::json body,
                    const std::string& session = {}) {
    if (!session.empty()) body["session"] = session;
    return service->handle("POST", path, body.dump());
  }
  HttpResponse get(const std::string& path, const std::string& session) {
    return service->handle("GET", path, "", session);
  }

  std::string login(const std::string& ref = "@demo") {
    return post("/login", {{"user_ref", ref}}).body.at("session").get<std::string>();
  }
  std::string login_with(std::set<Scope> scopes, const std::string& ref = "@demo") {
    const auto s = login(ref);
    nlohmann::json list = nlohmann::json::array();
    for (auto sc : scopes) list.push_back(std::string(to_string(sc)));
    post("/authorize", {{"scopes", list}}, s);
    return s;
  }
  Store& store() const { return *service->runtime().store; }
};

inline bool is_error_body(const nlohmann::json& b) {
  return b.is_object() && b.size() == 3 && b.contains("code") && b["code"].is_string() &&
         b.contains("message") && b["message"].is_string() && b.contains("retriable") &&
         b["retriable"].is_boolean();
}

inline const char* kToxicDraft =
    "#FanBullying# Some fans of celebrities bully female artists. I didn't know before, but "
    "now I do. The fans are really repulsive";

}  // namespace demod::testing
