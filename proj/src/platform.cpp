#include "demod/platform.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "demod/error.hpp"
#include "demod/json_io.hpp"

namespace demod {

using nlohmann::json;

MockPlatform::MockPlatform(std::vector<User> users) : users_(std::move(users)) {}

std::shared_ptr<MockPlatform> MockPlatform::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, "bad platform fixture: " + std::string(e.what()));
  }
  auto platform = std::make_shared<MockPlatform>();
  for (const auto& u : doc.at("users")) {
    User user;
    user.id = u.at("id").get<std::string>();
    user.nickname = u.value("nickname", "");
    user.posts = u.value("posts", std::vector<std::string>{});
    user.connections = u.value("connections", std::vector<std::string>{});
    user.comments =
        u.value("comments", std::map<std::string, std::vector<Comment>>{});
    platform->add_user(std::move(user));
  }
  return platform;
}

void MockPlatform::add_user(User user) {
  std::lock_guard lock(mu_);
  users_.push_back(std::move(user));
}

void MockPlatform::set_failing(bool failing) {
  std::lock_guard lock(mu_);
  failing_ = failing;
}

const MockPlatform::User& MockPlatform::user(const std::string& id) const {
  const auto it = std::find_if(users_.begin(), users_.end(),
                               [&](const User& u) { return u.id == id; });
  if (it == users_.end()) throw Error(ErrorCode::UnknownUser, "unknown user '" + id + "'");
  return *it;
}

void MockPlatform::record(std::string operation, const std::string& user_id) {
  calls_.push_back({std::move(operation), user_id});
  if (failing_) throw Error(ErrorCode::PlatformError, "mock platform is failing");
}

std::string MockPlatform::resolve(const std::string& user_ref) const {
  std::lock_guard lock(mu_);
  const auto ref = std::string(trim(user_ref));
  for (const auto& u : users_) {
    if ((ref.size() > 1 && ref[0] == '@' && ref.substr(1) == u.nickname) || ref == u.id) {
      return u.id;
    }
  }
  throw Error(ErrorCode::UnknownUser, "unknown user '" + user_ref + "'");
}

std::string MockPlatform::display_name(const std::string& user_id) const {
  std::lock_guard lock(mu_);
  const auto& u = user(user_id);
  return u.nickname.empty() ? u.id : "@" + u.nickname;
}

std::vector<std::string> MockPlatform::fetch_posts(const std::string& user_id) {
  std::lock_guard lock(mu_);
  record("posts", user_id);
  return user(user_id).posts;
}

std::vector<std::string> MockPlatform::fetch_connections(const std::string& user_id) {
  std::lock_guard lock(mu_);
  record("connections", user_id);
  return user(user_id).connections;
}

std::map<std::string, std::vector<Comment>> MockPlatform::fetch_interaction_contexts(
    const std::string& user_id) {
  std::lock_guard lock(mu_);
  record("interaction_contexts", user_id);
  auto comments = user(user_id).comments;
  for (auto& [role, list] : comments) {
    std::stable_sort(list.begin(), list.end(), [](const Comment& a, const Comment& b) {
      return a.timestamp < b.timestamp;
    });
  }
  return comments;
}

std::vector<MockPlatform::Call> MockPlatform::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

AuthorizationFlow::AuthorizationFlow(std::shared_ptr<PlatformProvider> platform,
                                     std::shared_ptr<Store> store,
                                     std::shared_ptr<const Tokenizer> tokenizer,
                                     PairBatch pair_batch)
    : platform_(std::move(platform)),
      store_(std::move(store)),
      tokenizer_(tokenizer ? std::move(tokenizer) : std::make_shared<DefaultTokenizer>()),
      pair_batch_(std::move(pair_batch)) {
  if (!platform_ || !store_) {
    throw Error(ErrorCode::InvalidArgument, "authorization needs a platform and a store");
  }
}

ConsentDescriptor AuthorizationFlow::begin_authorization(const std::string& user_ref) const {
  ConsentDescriptor d;
  d.user_id = platform_->resolve(user_ref);
  d.display_name = platform_->display_name(d.user_id);
  d.scopes = {
      {Scope::HistoricalPosts,
       "Your public historical posts, used to learn your writing style for "
       "personalized modification suggestions."},
      {Scope::SocialConnections,
       "Your public social connections, shown so you can choose audiences."},
      {Scope::InteractionContexts,
       "Comments you received from your audiences, used to simulate how they "
       "might react to a post."},
  };
  return d;
}

UserProfile AuthorizationFlow::complete_authorization(const std::string& user_ref,
                                                      const std::set<Scope>& accepted) {
  const auto user_id = platform_->resolve(user_ref);

  UserProfile profile;
  profile.user_id = user_id;
  if (accepted.count(Scope::HistoricalPosts)) {
    for (const auto& raw : platform_->fetch_posts(user_id)) {
      try {
        profile.historical_posts.push_back(parse_post(raw, *tokenizer_, user_id, 0));
      } catch (const Error& e) {
        if (e.code() == ErrorCode::MalformedTopic) {
          profile.historical_posts.push_back({std::string(trim(raw)), std::nullopt, user_id});
        } else {
          spdlog::debug("skipping historical post: {}", e.what());
        }
      }
    }
  }
  if (accepted.count(Scope::SocialConnections)) {
    profile.social_connections = platform_->fetch_connections(user_id);
  }
  if (accepted.count(Scope::InteractionContexts)) {
    profile.interaction_contexts = platform_->fetch_interaction_contexts(user_id);
  }

  const AuthGrant grant{user_id, accepted, store_->now(), false};
  store_->record_grant(grant);

  if (accepted.count(Scope::HistoricalPosts) && pair_batch_) {
    try {
      profile.pairs = pair_batch_(profile, grant);
    } catch (const Error& e) {
      spdlog::warn("pair construction for {} failed: {}", user_id, e.what());
      store_->append_audit(user_id, "pairgen_failed", {{"error", e.what()}});
    }
  }
  profile = store_->put_profile(std::move(profile));

  json scopes = json::array();
  for (auto s : accepted) scopes.push_back(std::string(to_string(s)));
  store_->append_audit(user_id, "authorize",
                       {{"scopes", scopes}, {"pairs", profile.pairs.size()}});
  return profile;
}

std::vector<PairExample> AuthorizationFlow::refresh_pairs(const std::string& user_id) {
  const auto grant = store_->get_grant(user_id);
  if (!grant || !grant->active(Scope::HistoricalPosts)) {
    throw Error(ErrorCode::Unauthorized, "historical_posts scope has not been granted");
  }
  auto profile = store_->get_profile(user_id);
  profile.pairs = pair_batch_ ? pair_batch_(profile, *grant) : std::vector<PairExample>{};
  store_->put_pairs(user_id, profile.pairs);
  store_->append_audit(user_id, "refresh_pairs", {{"pairs", profile.pairs.size()}});
  return profile.pairs;
}

HandOffPayload AuthorizationFlow::hand_off(const std::string& post_text,
                                           const std::string& user_id) {
  HandOffPayload payload{user_id, post_text, store_->now()};
  store_->append_audit(user_id, "send", {{"length", post_text.size()}});
  return payload;
}

}  // namespace demod
