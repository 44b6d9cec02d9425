#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "demod/domain.hpp"

namespace demod {

using Clock = std::function<Timestamp()>;
Timestamp system_now();

// Byte-string key-value storage with append-only line logs.
class KeyValueBackend {
 public:
  virtual ~KeyValueBackend() = default;
  virtual std::optional<std::string> get(const std::string& key) const = 0;
  virtual void put(const std::string& key, const std::string& value) = 0;
  virtual void erase(const std::string& key) = 0;
  virtual void append_line(const std::string& key, const std::string& line) = 0;
  virtual std::vector<std::string> read_lines(const std::string& key) const = 0;
};

class MemoryBackend final : public KeyValueBackend {
 public:
  std::optional<std::string> get(const std::string& key) const override;
  void put(const std::string& key, const std::string& value) override;
  void erase(const std::string& key) override;
  void append_line(const std::string& key, const std::string& line) override;
  std::vector<std::string> read_lines(const std::string& key) const override;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::string> data_;
};

// One file per key under `root`; keys use '/' as directory separator.
// Values are written to a temporary file and renamed into place.
class FileBackend final : public KeyValueBackend {
 public:
  explicit FileBackend(std::filesystem::path root);

  std::optional<std::string> get(const std::string& key) const override;
  void put(const std::string& key, const std::string& value) override;
  void erase(const std::string& key) override;
  void append_line(const std::string& key, const std::string& line) override;
  std::vector<std::string> read_lines(const std::string& key) const override;

  const std::filesystem::path& root() const noexcept { return root_; }

 private:
  std::filesystem::path path_for(const std::string& key) const;
  std::filesystem::path root_;
  mutable std::mutex append_mu_;
};

struct AuditEvent {
  std::uint64_t sequence = 0;
  Timestamp timestamp = 0;
  std::string user_id;
  std::string operation;
  nlohmann::json detail = nlohmann::json::object();

  bool operator==(const AuditEvent&) const = default;
};

// Profiles, grants, pairs, word spaces and the audit log.
//
// Layout under a FileBackend root:
//   profiles/<user>.json   profile snapshot without pairs
//   pairs/<user>.jsonl     one PairExample per line
//   grants/<user>.json     latest grant (tombstone after revoke)
//   spaces/<name>.json     toxic word space
//   audit.jsonl            append-only event log
// User ids are percent-encoded in file names.
class Store {
 public:
  explicit Store(std::shared_ptr<KeyValueBackend> backend, Clock clock = system_now);

  // Returns the stored value; its version is one past the previous one.
  UserProfile put_profile(UserProfile profile);
  // Errors: NotFound.
  UserProfile get_profile(const std::string& user_id) const;
  bool has_profile(const std::string& user_id) const;

  void put_pairs(const std::string& user_id, const std::vector<PairExample>& pairs);
  std::vector<PairExample> get_pairs(const std::string& user_id) const;

  void record_grant(const AuthGrant& grant);
  std::optional<AuthGrant> get_grant(const std::string& user_id) const;
  bool check_grant(const std::string& user_id, Scope scope) const;
  // Marks the grant revoked and deletes the user's profile data and pairs.
  void revoke(const std::string& user_id);

  void put_word_space(const std::string& name, const ToxicWordSpace& space);
  std::optional<ToxicWordSpace> get_word_space(const std::string& name) const;

  AuditEvent append_audit(const std::string& user_id, const std::string& operation,
                          nlohmann::json detail = nlohmann::json::object());
  // Events in append order, filtered by user and, if given, operation.
  std::vector<AuditEvent> query_audit(const std::optional<std::string>& user_id,
                                      const std::optional<std::string>& operation = {}) const;
  std::string export_audit_csv() const;
  // Drops events older than `before`; returns how many were removed.
  std::size_t prune_audit(Timestamp before);

  Timestamp now() const { return clock_(); }

 private:
  std::mutex& user_mutex(const std::string& user_id) const;
  std::vector<AuditEvent> read_audit() const;

  std::shared_ptr<KeyValueBackend> backend_;
  Clock clock_;
  mutable std::mutex registry_mu_;
  mutable std::map<std::string, std::unique_ptr<std::mutex>> user_mu_;
  mutable std::mutex audit_mu_;
  std::uint64_t next_sequence_ = 0;
};

std::string encode_key_component(std::string_view id);

}  // namespace demod
