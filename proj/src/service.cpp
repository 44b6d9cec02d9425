#include "demod/service.hpp"

#include <httplib.h>
#include <openssl/rand.h>
#include <spdlog/spdlog.h>

#include "demod/error.hpp"
#include "demod/json_io.hpp"

namespace demod {

using nlohmann::json;

namespace {

// Request-level failures that do not originate in the pipeline.
struct HttpError {
  int status;
  std::string code;
  std::string message;
};

std::string random_token() {
  static constexpr char kHex[] = "0123456789abcdef";
  unsigned char bytes[16];
  if (RAND_bytes(bytes, sizeof bytes) != 1) {
    throw HttpError{500, "StorageFailure", "cannot generate a session token"};
  }
  std::string out;
  for (unsigned char b : bytes) {
    out += kHex[b >> 4];
    out += kHex[b & 0xF];
  }
  return out;
}

std::string required_string(const json& body, const char* field) {
  const auto it = body.find(field);
  if (it == body.end() || !it->is_string()) {
    throw HttpError{422, "InvalidArgument",
                    std::string("field '") + field + "' must be a string"};
  }
  return it->get<std::string>();
}

HttpResponse ok(json body) { return {200, std::move(body)}; }

}  // namespace

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::TooShort:
    case ErrorCode::MalformedTopic:
    case ErrorCode::EmptyInput:
    case ErrorCode::UnknownRole:
    case ErrorCode::InvalidArgument:
      return 422;
    case ErrorCode::Unauthorized:
      return 403;
    case ErrorCode::UnknownUser:
    case ErrorCode::NotFound:
      return 404;
    case ErrorCode::Transport:
    case ErrorCode::Overloaded:
    case ErrorCode::Refusal:
    case ErrorCode::MalformedModelOutput:
    case ErrorCode::PlatformError:
      return 502;
    default:
      return 500;
  }
}

json error_body(const std::string& code, const std::string& message, bool retriable) {
  return json{{"code", code}, {"message", message}, {"retriable", retriable}};
}

Service::Service(Runtime runtime, ServiceConfig config)
    : runtime_(std::move(runtime)), config_(config) {}

std::string Service::new_session(const std::string& user_id) {
  auto token = random_token();
  std::lock_guard lock(session_mu_);
  sessions_[token] = {user_id, runtime_.store->now() + config_.session_ttl_seconds};
  return token;
}

std::optional<Service::Session> Service::find_session(const std::string& token) const {
  std::lock_guard lock(session_mu_);
  const auto it = sessions_.find(token);
  if (it == sessions_.end() || runtime_.store->now() >= it->second.expires_at) {
    return std::nullopt;
  }
  return it->second;
}

std::string Service::session_user(const json& body, const std::string& bearer,
                                  const std::map<std::string, std::string>& query) const {
  std::string token = bearer;
  if (token.empty() && body.is_object() && body.contains("session") &&
      body["session"].is_string()) {
    token = body["session"].get<std::string>();
  }
  if (token.empty()) {
    if (const auto it = query.find("session"); it != query.end()) token = it->second;
  }
  if (token.empty()) throw HttpError{401, "BadSession", "missing session token"};
  const auto session = find_session(token);
  if (!session) throw HttpError{401, "BadSession", "unknown or expired session"};
  return session->user_id;
}

AuthGrant Service::grant_for(const std::string& user_id) const {
  return runtime_.store->get_grant(user_id).value_or(AuthGrant{user_id, {}, 0, false});
}

UserProfile Service::profile_for(const std::string& user_id) const {
  try {
    return runtime_.store->get_profile(user_id);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotFound) throw;
    UserProfile empty;
    empty.user_id = user_id;
    return empty;
  }
}

Post Service::parse_client_post(const json& body, const char* field,
                                const std::string& user_id) const {
  return parse_post(required_string(body, field), *runtime_.tokenizer, user_id);
}

HttpResponse Service::handle(const std::string& method, const std::string& path,
                             const std::string& body_text, const std::string& bearer,
                             const std::map<std::string, std::string>& query) {
  try {
    json body = json::object();
    if (method == "POST" && !body_text.empty()) {
      body = json::parse(body_text, nullptr, false);
      if (body.is_discarded() || !body.is_object()) {
        throw HttpError{400, "BadRequest", "request body must be a JSON object"};
      }
    }

    if (method == "GET" && path == "/health") return ok({{"status", "ok"}});
    if (method == "POST" && path == "/login") return login(body);

    const auto route = method + " " + path;
    static const std::set<std::string> routes = {
        "POST /authorize", "POST /detect", "GET /roles",   "POST /simulate",
        "POST /modify",    "POST /recensor", "POST /send", "POST /revoke",
        "POST /pairs/refresh"};
    if (!routes.count(route)) {
      throw HttpError{404, "NotFound", "no route for " + route};
    }

    const auto user = session_user(body, bearer, query);
    if (route == "POST /authorize") return authorize(user, body);
    if (route == "POST /detect") return detect(user, body);
    if (route == "GET /roles") return roles(user);
    if (route == "POST /simulate") return simulate(user, body);
    if (route == "POST /modify") return modify(user, body);
    if (route == "POST /recensor") return recensor(user, body);
    if (route == "POST /send") return send(user, body);
    if (route == "POST /revoke") return revoke(user);
    return refresh_pairs(user);
  } catch (const HttpError& e) {
    return {e.status, error_body(e.code, e.message, false)};
  } catch (const Error& e) {
    return {http_status_for(e.code()),
            error_body(std::string(to_string(e.code())), e.what(), e.retriable())};
  } catch (const std::exception& e) {
    spdlog::error("unhandled error on {} {}: {}", method, path, e.what());
    return {500, error_body("Internal", e.what(), false)};
  }
}

HttpResponse Service::login(const json& body) {
  const auto ref = required_string(body, "user_ref");
  const auto consent = runtime_.auth->begin_authorization(ref);
  const auto token = new_session(consent.user_id);
  runtime_.store->append_audit(consent.user_id, "login", json::object());

  json scopes = json::array();
  for (const auto& s : consent.scopes) {
    scopes.push_back({{"scope", std::string(to_string(s.scope))},
                      {"description", s.description}});
  }
  return ok({{"session", token},
             {"user_id", consent.user_id},
             {"display_name", consent.display_name},
             {"expires_in", config_.session_ttl_seconds},
             {"consent", scopes}});
}

HttpResponse Service::authorize(const std::string& user, const json& body) {
  std::set<Scope> accepted;
  if (body.contains("scopes")) {
    if (!body["scopes"].is_array()) {
      throw HttpError{422, "InvalidArgument", "scopes must be an array"};
    }
    for (const auto& s : body["scopes"]) {
      const auto scope = s.is_string() ? scope_from_string(s.get<std::string>()) : std::nullopt;
      if (!scope) throw HttpError{422, "InvalidArgument", "unknown scope " + s.dump()};
      accepted.insert(*scope);
    }
  }
  const auto profile = runtime_.auth->complete_authorization(user, accepted);
  json granted = json::array();
  for (auto s : accepted) granted.push_back(std::string(to_string(s)));
  return ok({{"user_id", profile.user_id},
             {"scopes", granted},
             {"post_count", profile.historical_posts.size()},
             {"connection_count", profile.social_connections.size()},
             {"audience_count", profile.interaction_contexts.size()},
             {"pair_count", profile.pairs.size()}});
}

HttpResponse Service::detect(const std::string& user, const json& body) {
  const auto post = parse_client_post(body, "raw_text", user);
  const auto result = runtime_.detector->detect(post);
  runtime_.store->append_audit(user, "detect",
                               {{"verdict", std::string(to_string(result.verdict()))},
                                {"keywords", result.keywords().size()}});
  json out = result;
  out["post"] = post;
  return ok(std::move(out));
}

HttpResponse Service::roles(const std::string& user) {
  const auto grant = grant_for(user);
  if (!grant.active(Scope::InteractionContexts)) {
    throw Error(ErrorCode::Unauthorized, "interaction_contexts scope has not been granted");
  }
  return ok({{"roles", runtime_.simulator->list_roles(profile_for(user), grant)}});
}

HttpResponse Service::simulate(const std::string& user, const json& body) {
  const auto grant = grant_for(user);
  if (!grant.active(Scope::InteractionContexts)) {
    throw Error(ErrorCode::Unauthorized, "interaction_contexts scope has not been granted");
  }
  const auto post = parse_client_post(body, "post", user);
  const auto role = required_string(body, "role");
  const auto result = runtime_.simulator->simulate(post, role, profile_for(user), grant);
  runtime_.store->append_audit(user, "simulate",
                               {{"role", role}, {"used_context", result.used_context}});
  return ok(result);
}

HttpResponse Service::modify(const std::string& user, const json& body) {
  const auto post = parse_client_post(body, "post", user);
  std::vector<PairExample> pairs;
  if (grant_for(user).active(Scope::HistoricalPosts)) {
    pairs = runtime_.store->get_pairs(user);
  }
  const auto result = runtime_.modifier->modify(post, pairs);
  runtime_.store->append_audit(user, "modify",
                               {{"iterations", result.iterations},
                                {"converged", result.converged},
                                {"pairs_available", pairs.size()}});
  return ok(result);
}

HttpResponse Service::recensor(const std::string& user, const json& body) {
  const auto text = required_string(body, "text");
  if (trim(text).empty()) throw HttpError{422, "EmptyInput", "text is empty"};
  const auto result = runtime_.detector->recheck(text);
  runtime_.store->append_audit(user, "recensor",
                               {{"verdict", std::string(to_string(result.verdict()))}});
  return ok(result);
}

HttpResponse Service::send(const std::string& user, const json& body) {
  const auto payload = runtime_.auth->hand_off(required_string(body, "text"), user);
  return ok({{"user_id", payload.user_id},
             {"text", payload.text},
             {"created_at", payload.created_at},
             {"published", false}});
}

HttpResponse Service::revoke(const std::string& user) {
  runtime_.store->revoke(user);
  runtime_.store->append_audit(user, "revoke", json::object());
  return ok({{"ok", true}});
}

HttpResponse Service::refresh_pairs(const std::string& user) {
  const auto pairs = runtime_.auth->refresh_pairs(user);
  return ok({{"pair_count", pairs.size()}});
}

void Service::bind(httplib::Server& server) {
  auto adapt = [this](const httplib::Request& req, httplib::Response& res) {
    std::string bearer;
    if (const auto auth = req.get_header_value("Authorization");
        auth.rfind("Bearer ", 0) == 0) {
      bearer = auth.substr(7);
    }
    std::map<std::string, std::string> query;
    for (const auto& [k, v] : req.params) query.emplace(k, v);
    const auto out = handle(req.method, req.path, req.body, bearer, query);
    res.status = out.status;
    res.set_content(out.body.dump(), "application/json");
  };
  for (const char* path : {"/login", "/authorize", "/detect", "/simulate", "/modify",
                           "/recensor", "/send", "/revoke", "/pairs/refresh"}) {
    server.Post(path, adapt);
  }
  server.Get("/roles", adapt);
  server.Get("/health", adapt);
  server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (res.body.empty()) {
      res.set_content(error_body("NotFound", "no route for " + req.method + " " + req.path,
                                 false)
                          .dump(),
                      "application/json");
    }
  });
}

}  // namespace demod
