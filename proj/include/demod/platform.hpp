#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "demod/domain.hpp"
#include "demod/store.hpp"

namespace demod {

// Social platform adapter. A real deployment wraps the platform's OAuth and
// read APIs; the shipped implementation is MockPlatform.
class PlatformProvider {
 public:
  virtual ~PlatformProvider() = default;
  // "@nickname" or a platform user id. Errors: UnknownUser.
  virtual std::string resolve(const std::string& user_ref) const = 0;
  virtual std::string display_name(const std::string& user_id) const = 0;
  // Errors: PlatformError.
  virtual std::vector<std::string> fetch_posts(const std::string& user_id) = 0;
  virtual std::vector<std::string> fetch_connections(const std::string& user_id) = 0;
  virtual std::map<std::string, std::vector<Comment>> fetch_interaction_contexts(
      const std::string& user_id) = 0;
};

class MockPlatform final : public PlatformProvider {
 public:
  struct User {
    std::string id;
    std::string nickname;
    std::vector<std::string> posts;
    std::vector<std::string> connections;
    std::map<std::string, std::vector<Comment>> comments;
  };

  struct Call {
    std::string operation;  // "posts", "connections", "interaction_contexts"
    std::string user_id;
    bool operator==(const Call&) const = default;
  };

  MockPlatform() = default;
  explicit MockPlatform(std::vector<User> users);

  // {"users": [{"id", "nickname", "posts", "connections", "comments": {role: [...]}}]}
  static std::shared_ptr<MockPlatform> from_file(const std::filesystem::path& path);

  void add_user(User user);
  void set_failing(bool failing);

  std::string resolve(const std::string& user_ref) const override;
  std::string display_name(const std::string& user_id) const override;
  std::vector<std::string> fetch_posts(const std::string& user_id) override;
  std::vector<std::string> fetch_connections(const std::string& user_id) override;
  std::map<std::string, std::vector<Comment>> fetch_interaction_contexts(
      const std::string& user_id) override;

  std::vector<Call> calls() const;

 private:
  const User& user(const std::string& id) const;
  void record(std::string operation, const std::string& user_id);

  mutable std::mutex mu_;
  std::vector<User> users_;
  std::vector<Call> calls_;
  bool failing_ = false;
};

struct ScopeDescription {
  Scope scope;
  std::string description;
};

struct ConsentDescriptor {
  std::string user_id;
  std::string display_name;
  std::vector<ScopeDescription> scopes;
};

struct HandOffPayload {
  std::string user_id;
  std::string text;
  Timestamp created_at = 0;
};

// Step-1 batch run after historical posts are granted. Its result is stored
// as the user's pairs.
using PairBatch =
    std::function<std::vector<PairExample>(const UserProfile&, const AuthGrant&)>;

class AuthorizationFlow {
 public:
  AuthorizationFlow(std::shared_ptr<PlatformProvider> platform,
                    std::shared_ptr<Store> store,
                    std::shared_ptr<const Tokenizer> tokenizer = nullptr,
                    PairBatch pair_batch = {});

  // Side-effect free. Errors: UnknownUser.
  ConsentDescriptor begin_authorization(const std::string& user_ref) const;

  // Fetches only accepted scopes, persists profile and grant, and runs the
  // pair batch when historical posts were accepted. Errors: UnknownUser,
  // PlatformError, StorageFailure.
  UserProfile complete_authorization(const std::string& user_ref,
                                     const std::set<Scope>& accepted);

  // Re-runs the pair batch for a stored profile. Errors: Unauthorized.
  std::vector<PairExample> refresh_pairs(const std::string& user_id);

  // Content for the platform's composer; nothing is published.
  HandOffPayload hand_off(const std::string& post_text, const std::string& user_id);

  void set_pair_batch(PairBatch batch) { pair_batch_ = std::move(batch); }

 private:
  std::shared_ptr<PlatformProvider> platform_;
  std::shared_ptr<Store> store_;
  std::shared_ptr<const Tokenizer> tokenizer_;
  PairBatch pair_batch_;
};

}  // namespace demod
