#include "demod/json_io.hpp"

#include "demod/error.hpp"

namespace demod {

using nlohmann::json;

void to_json(json& j, const Span& s) { j = json{{"begin", s.begin}, {"end", s.end}}; }

void to_json(json& j, const Post& p) {
  j = json{{"text", p.text}, {"author_id", p.author_id}};
  j["topic"] = p.topic ? json(*p.topic) : json(nullptr);
}

void from_json(const json& j, Post& p) {
  p.text = j.at("text").get<std::string>();
  p.author_id = j.value("author_id", "");
  if (j.contains("topic") && j["topic"].is_string()) {
    p.topic = j["topic"].get<std::string>();
  } else {
    p.topic.reset();
  }
}

void to_json(json& j, const KeywordSpan& k) {
  j = json{{"text", k.text}, {"begin", k.span.begin}, {"end", k.span.end}};
}

void to_json(json& j, const DetectionResult& d) {
  j = json{{"verdict", std::string(to_string(d.verdict()))},
           {"toxic", d.toxic()},
           {"keywords", d.keywords()},
           {"immediate_explanation", d.immediate_explanation()},
           {"raw_model_output", d.raw_model_output()}};
}

void to_json(json& j, const TokenContribution& c) {
  j = json{{"token", c.token},
           {"index", c.index},
           {"raw_value", c.raw_value},
           {"normalized_value", c.normalized_value}};
}

void to_json(json& j, const Substitution& s) {
  j = json{{"original_token", s.original_token},
           {"toxic_token", s.toxic_token},
           {"position", s.position},
           {"offset", s.offset}};
}

void from_json(const json& j, Substitution& s) {
  s.original_token = j.at("original_token").get<std::string>();
  s.toxic_token = j.at("toxic_token").get<std::string>();
  s.position = j.at("position").get<std::size_t>();
  s.offset = j.at("offset").get<std::size_t>();
}

void to_json(json& j, const PairExample& p) {
  j = json{{"toxic_text", p.toxic_text},
           {"nontoxic_text", p.nontoxic_text},
           {"source_post_id", p.source_post_id},
           {"substitutions", p.substitutions}};
}

void from_json(const json& j, PairExample& p) {
  p.toxic_text = j.at("toxic_text").get<std::string>();
  p.nontoxic_text = j.at("nontoxic_text").get<std::string>();
  p.source_post_id = j.value("source_post_id", "");
  p.substitutions = j.at("substitutions").get<std::vector<Substitution>>();
}

void to_json(json& j, const Comment& c) {
  j = json{{"text", c.text}, {"timestamp", c.timestamp}};
}

void from_json(const json& j, Comment& c) {
  c.text = j.at("text").get<std::string>();
  c.timestamp = j.value("timestamp", Timestamp{0});
}

void to_json(json& j, const UserProfile& p) {
  j = json{{"user_id", p.user_id},
           {"historical_posts", p.historical_posts},
           {"social_connections", p.social_connections},
           {"interaction_contexts", p.interaction_contexts},
           {"pairs", p.pairs},
           {"version", p.version}};
}

void from_json(const json& j, UserProfile& p) {
  p.user_id = j.at("user_id").get<std::string>();
  p.historical_posts = j.value("historical_posts", std::vector<Post>{});
  p.social_connections = j.value("social_connections", std::vector<std::string>{});
  p.interaction_contexts =
      j.value("interaction_contexts", std::map<std::string, std::vector<Comment>>{});
  p.pairs = j.value("pairs", std::vector<PairExample>{});
  p.version = j.value("version", std::uint64_t{0});
}

void to_json(json& j, const AuthGrant& g) {
  json scopes = json::array();
  for (auto s : g.scopes) scopes.push_back(std::string(to_string(s)));
  j = json{{"user_id", g.user_id},
           {"scopes", scopes},
           {"granted_at", g.granted_at},
           {"revoked", g.revoked}};
}

void from_json(const json& j, AuthGrant& g) {
  g.user_id = j.at("user_id").get<std::string>();
  g.scopes.clear();
  for (const auto& s : j.at("scopes")) {
    const auto scope = scope_from_string(s.get<std::string>());
    if (!scope) throw Error(ErrorCode::InvalidArgument, "unknown scope " + s.dump());
    g.scopes.insert(*scope);
  }
  g.granted_at = j.value("granted_at", Timestamp{0});
  g.revoked = j.value("revoked", false);
}

void to_json(json& j, const SimulationResult& s) {
  j = json{{"role", s.role}, {"reply_text", s.reply_text}, {"used_context", s.used_context}};
}

void to_json(json& j, const ModificationResult& m) {
  j = json{{"revised_text", m.revised_text},
           {"iterations", m.iterations},
           {"final_detection", m.final_detection},
           {"converged", m.converged}};
}

json word_space_to_json(const ToxicWordSpace& space) {
  json entries = json::array();
  for (const auto& e : space.entries()) {
    entries.push_back(json{{"token", e.token}, {"vector", e.vector}});
  }
  return json{{"dimension", space.dimension()}, {"entries", entries}};
}

ToxicWordSpace word_space_from_json(const json& j) {
  ToxicWordSpace space(j.at("dimension").get<std::size_t>());
  for (const auto& e : j.at("entries")) {
    space.insert(e.at("token").get<std::string>(),
                 e.at("vector").get<std::vector<double>>());
  }
  return space;
}

}  // namespace demod
