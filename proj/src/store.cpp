#include "demod/store.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "demod/csv.hpp"
#include "demod/error.hpp"
#include "demod/json_io.hpp"

namespace demod {

using nlohmann::json;
namespace fs = std::filesystem;

Timestamp system_now() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

std::string encode_key_component(std::string_view id) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : id) {
    const bool safe = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                      (c >= '0' && c <= '9') || c == '-' || c == '_';
    if (safe) {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    }
  }
  if (out.empty()) out = "%";
  return out;
}

namespace {

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> lines;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::string profile_key(const std::string& id) {
  return "profiles/" + encode_key_component(id) + ".json";
}
std::string pairs_key(const std::string& id) {
  return "pairs/" + encode_key_component(id) + ".jsonl";
}
std::string grant_key(const std::string& id) {
  return "grants/" + encode_key_component(id) + ".json";
}
std::string space_key(const std::string& name) {
  return "spaces/" + encode_key_component(name) + ".json";
}
const std::string kAuditKey = "audit.jsonl";

json parse_stored(const std::string& key, const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::StorageFailure, "corrupt record " + key + ": " + e.what());
  }
}

}  // namespace

std::optional<std::string> MemoryBackend::get(const std::string& key) const {
  std::lock_guard lock(mu_);
  const auto it = data_.find(key);
  if (it == data_.end()) return std::nullopt;
  return it->second;
}

void MemoryBackend::put(const std::string& key, const std::string& value) {
  std::lock_guard lock(mu_);
  data_[key] = value;
}

void MemoryBackend::erase(const std::string& key) {
  std::lock_guard lock(mu_);
  data_.erase(key);
}

void MemoryBackend::append_line(const std::string& key, const std::string& line) {
  std::lock_guard lock(mu_);
  data_[key] += line + "\n";
}

std::vector<std::string> MemoryBackend::read_lines(const std::string& key) const {
  const auto v = get(key);
  return v ? split_lines(*v) : std::vector<std::string>{};
}

FileBackend::FileBackend(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) {
    throw Error(ErrorCode::StorageFailure,
                "cannot create data directory " + root_.string() + ": " + ec.message());
  }
}

fs::path FileBackend::path_for(const std::string& key) const { return root_ / key; }

std::optional<std::string> FileBackend::get(const std::string& key) const {
  const auto path = path_for(key);
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!fs::exists(path)) return std::nullopt;
    throw Error(ErrorCode::StorageFailure, "cannot read " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void FileBackend::put(const std::string& key, const std::string& value) {
  const auto path = path_for(key);
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << value;
    out.flush();
    if (!out) throw Error(ErrorCode::StorageFailure, "cannot write " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorCode::StorageFailure,
                "cannot replace " + path.string() + ": " + ec.message());
  }
}

void FileBackend::erase(const std::string& key) {
  std::error_code ec;
  fs::remove(path_for(key), ec);
  if (ec) throw Error(ErrorCode::StorageFailure, "cannot remove " + key + ": " + ec.message());
}

void FileBackend::append_line(const std::string& key, const std::string& line) {
  std::lock_guard lock(append_mu_);
  const auto path = path_for(key);
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::app);
  out << line << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::StorageFailure, "cannot append to " + path.string());
}

std::vector<std::string> FileBackend::read_lines(const std::string& key) const {
  const auto v = get(key);
  return v ? split_lines(*v) : std::vector<std::string>{};
}

Store::Store(std::shared_ptr<KeyValueBackend> backend, Clock clock)
    : backend_(std::move(backend)), clock_(std::move(clock)) {
  if (!backend_) throw Error(ErrorCode::InvalidArgument, "store needs a backend");
  for (const auto& e : read_audit()) next_sequence_ = std::max(next_sequence_, e.sequence + 1);
}

std::mutex& Store::user_mutex(const std::string& user_id) const {
  std::lock_guard lock(registry_mu_);
  auto& slot = user_mu_[user_id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

UserProfile Store::put_profile(UserProfile profile) {
  std::lock_guard lock(user_mutex(profile.user_id));
  std::uint64_t previous = 0;
  if (const auto existing = backend_->get(profile_key(profile.user_id))) {
    previous = parse_stored(profile_key(profile.user_id), *existing).value("version", 0ull);
  }
  profile.version = previous + 1;
  json j = profile;
  j.erase("pairs");
  backend_->put(profile_key(profile.user_id), j.dump());

  std::string lines;
  for (const auto& p : profile.pairs) lines += json(p).dump() + "\n";
  backend_->put(pairs_key(profile.user_id), lines);
  return profile;
}

UserProfile Store::get_profile(const std::string& user_id) const {
  std::lock_guard lock(user_mutex(user_id));
  const auto raw = backend_->get(profile_key(user_id));
  if (!raw) throw Error(ErrorCode::NotFound, "no profile for user '" + user_id + "'");
  UserProfile profile;
  try {
    profile = parse_stored(profile_key(user_id), *raw).get<UserProfile>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::StorageFailure, "corrupt profile for " + user_id + ": " + e.what());
  }
  for (const auto& line : backend_->read_lines(pairs_key(user_id))) {
    profile.pairs.push_back(parse_stored(pairs_key(user_id), line).get<PairExample>());
  }
  return profile;
}

bool Store::has_profile(const std::string& user_id) const {
  return backend_->get(profile_key(user_id)).has_value();
}

void Store::put_pairs(const std::string& user_id, const std::vector<PairExample>& pairs) {
  std::lock_guard lock(user_mutex(user_id));
  std::string lines;
  for (const auto& p : pairs) lines += json(p).dump() + "\n";
  backend_->put(pairs_key(user_id), lines);
}

std::vector<PairExample> Store::get_pairs(const std::string& user_id) const {
  std::lock_guard lock(user_mutex(user_id));
  std::vector<PairExample> out;
  for (const auto& line : backend_->read_lines(pairs_key(user_id))) {
    out.push_back(parse_stored(pairs_key(user_id), line).get<PairExample>());
  }
  return out;
}

void Store::record_grant(const AuthGrant& grant) {
  std::lock_guard lock(user_mutex(grant.user_id));
  backend_->put(grant_key(grant.user_id), json(grant).dump());
}

std::optional<AuthGrant> Store::get_grant(const std::string& user_id) const {
  std::lock_guard lock(user_mutex(user_id));
  const auto raw = backend_->get(grant_key(user_id));
  if (!raw) return std::nullopt;
  try {
    return parse_stored(grant_key(user_id), *raw).get<AuthGrant>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::StorageFailure, "corrupt grant for " + user_id + ": " + e.what());
  }
}

bool Store::check_grant(const std::string& user_id, Scope scope) const {
  const auto grant = get_grant(user_id);
  return grant && grant->active(scope);
}

void Store::revoke(const std::string& user_id) {
  auto grant = get_grant(user_id).value_or(AuthGrant{user_id, {}, now(), false});
  grant.revoked = true;
  std::lock_guard lock(user_mutex(user_id));
  backend_->put(grant_key(user_id), json(grant).dump());
  backend_->erase(profile_key(user_id));
  backend_->erase(pairs_key(user_id));
}

void Store::put_word_space(const std::string& name, const ToxicWordSpace& space) {
  backend_->put(space_key(name), word_space_to_json(space).dump());
}

std::optional<ToxicWordSpace> Store::get_word_space(const std::string& name) const {
  const auto raw = backend_->get(space_key(name));
  if (!raw) return std::nullopt;
  try {
    return word_space_from_json(parse_stored(space_key(name), *raw));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::StorageFailure, "corrupt word space " + name + ": " + e.what());
  }
}

AuditEvent Store::append_audit(const std::string& user_id, const std::string& operation,
                               json detail) {
  std::lock_guard lock(audit_mu_);
  AuditEvent e{next_sequence_++, now(), user_id, operation, std::move(detail)};
  backend_->append_line(kAuditKey, json{{"sequence", e.sequence},
                                        {"timestamp", e.timestamp},
                                        {"user_id", e.user_id},
                                        {"operation", e.operation},
                                        {"detail", e.detail}}
                                       .dump());
  return e;
}

std::vector<AuditEvent> Store::read_audit() const {
  std::vector<AuditEvent> out;
  for (const auto& line : backend_->read_lines(kAuditKey)) {
    const auto j = parse_stored(kAuditKey, line);
    out.push_back({j.value("sequence", 0ull), j.value("timestamp", Timestamp{0}),
                   j.value("user_id", ""), j.value("operation", ""),
                   j.value("detail", json::object())});
  }
  return out;
}

std::vector<AuditEvent> Store::query_audit(const std::optional<std::string>& user_id,
                                           const std::optional<std::string>& operation) const {
  std::lock_guard lock(audit_mu_);
  std::vector<AuditEvent> out;
  for (auto& e : read_audit()) {
    if (user_id && e.user_id != *user_id) continue;
    if (operation && e.operation != *operation) continue;
    out.push_back(std::move(e));
  }
  return out;
}

std::string Store::export_audit_csv() const {
  std::lock_guard lock(audit_mu_);
  std::string out = "sequence,timestamp,user_id,operation,detail\n";
  for (const auto& e : read_audit()) {
    out += csv_row({std::to_string(e.sequence), std::to_string(e.timestamp), e.user_id,
                    e.operation, e.detail.dump()}) +
           "\n";
  }
  return out;
}

std::size_t Store::prune_audit(Timestamp before) {
  std::lock_guard lock(audit_mu_);
  const auto events = read_audit();
  std::string kept;
  std::size_t removed = 0;
  for (const auto& e : events) {
    if (e.timestamp < before) {
      ++removed;
      continue;
    }
    kept += json{{"sequence", e.sequence},
                 {"timestamp", e.timestamp},
                 {"user_id", e.user_id},
                 {"operation", e.operation},
                 {"detail", e.detail}}
                .dump() +
            "\n";
  }
  backend_->put(kAuditKey, kept);
  return removed;
}

}  // namespace demod
