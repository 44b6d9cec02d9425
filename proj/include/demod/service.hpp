#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "demod/app.hpp"

namespace httplib {
class Server;
}

namespace demod {

struct HttpResponse {
  int status = 200;
  nlohmann::json body = nlohmann::json::object();
};

struct ServiceConfig {
  std::int64_t session_ttl_seconds = 24 * 60 * 60;
};

// JSON API over the censorship pipeline. Every failure is answered with
// {"code", "message", "retriable"}; endpoints may be called in any order.
//
//   POST /login           {user_ref}               -> session + consent descriptor
//   POST /authorize       {session, scopes}        -> profile summary
//   POST /detect          {session, raw_text}      -> detection result
//   GET  /roles           ?session= | bearer       -> audience roles
//   POST /simulate        {session, post, role}    -> simulation result
//   POST /modify          {session, post}          -> modification result
//   POST /recensor        {session, text}          -> detection result
//   POST /send            {session, text}          -> hand-off payload
//   POST /revoke          {session}                -> ok
//   POST /pairs/refresh   {session}                -> pair count
//   GET  /health
class Service {
 public:
  Service(Runtime runtime, ServiceConfig config = {});

  // Transport-independent entry point. `bearer` is the Authorization header
  // token (may be empty); `query` holds URL parameters.
  HttpResponse handle(const std::string& method, const std::string& path,
                      const std::string& body, const std::string& bearer = {},
                      const std::map<std::string, std::string>& query = {});

  void bind(httplib::Server& server);

  const Runtime& runtime() const noexcept { return runtime_; }

 private:
  struct Session {
    std::string user_id;
    Timestamp expires_at = 0;
  };

  std::string new_session(const std::string& user_id);
  std::optional<Session> find_session(const std::string& token) const;
  std::string session_user(const nlohmann::json& body, const std::string& bearer,
                           const std::map<std::string, std::string>& query) const;
  AuthGrant grant_for(const std::string& user_id) const;
  UserProfile profile_for(const std::string& user_id) const;
  Post parse_client_post(const nlohmann::json& body, const char* field,
                         const std::string& user_id) const;

  HttpResponse login(const nlohmann::json& body);
  HttpResponse authorize(const std::string& user, const nlohmann::json& body);
  HttpResponse detect(const std::string& user, const nlohmann::json& body);
  HttpResponse roles(const std::string& user);
  HttpResponse simulate(const std::string& user, const nlohmann::json& body);
  HttpResponse modify(const std::string& user, const nlohmann::json& body);
  HttpResponse recensor(const std::string& user, const nlohmann::json& body);
  HttpResponse send(const std::string& user, const nlohmann::json& body);
  HttpResponse revoke(const std::string& user);
  HttpResponse refresh_pairs(const std::string& user);

  Runtime runtime_;
  ServiceConfig config_;
  mutable std::mutex session_mu_;
  std::map<std::string, Session> sessions_;
};

int http_status_for(ErrorCode code);
nlohmann::json error_body(const std::string& code, const std::string& message, bool retriable);

}  // namespace demod
