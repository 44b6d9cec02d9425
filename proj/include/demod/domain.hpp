#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "demod/tokenizer.hpp"

namespace demod {

// Unix seconds.
using Timestamp = std::int64_t;

inline constexpr std::size_t kMinPostTokens = 5;

struct Post {
  std::string text;
  std::optional<std::string> topic;
  std::string author_id;

  bool operator==(const Post&) const = default;
};

// Splits "#topic# text" into topic and body. The body must have at least
// `min_tokens` tokenizer units; pass 0 to waive the floor.
Post parse_post(std::string_view raw, const Tokenizer& tokenizer,
                std::string author_id = {},
                std::size_t min_tokens = kMinPostTokens);

std::string render_post(const Post& post);

struct KeywordSpan {
  Span span;
  std::string text;

  bool operator==(const KeywordSpan&) const = default;
};

// Keeps the first occurrence of each candidate that appears verbatim in
// post.text, ordered by position. Everything else is dropped.
std::vector<KeywordSpan> validate_keywords(
    const Post& post, const std::vector<std::string>& candidates);

enum class Verdict { Nontoxic, Toxic };

std::string_view to_string(Verdict v);

class DetectionResult {
 public:
  DetectionResult() = default;

  // Throws InvalidArgument if a span is empty or out of range, or if a
  // nontoxic verdict carries keywords.
  DetectionResult(Verdict verdict, std::vector<KeywordSpan> keywords,
                  std::string immediate_explanation,
                  std::string raw_model_output, std::string_view text);

  Verdict verdict() const noexcept { return verdict_; }
  bool toxic() const noexcept { return verdict_ == Verdict::Toxic; }
  const std::vector<KeywordSpan>& keywords() const noexcept { return keywords_; }
  const std::string& immediate_explanation() const noexcept {
    return immediate_explanation_;
  }
  const std::string& raw_model_output() const noexcept { return raw_model_output_; }

  bool operator==(const DetectionResult&) const = default;

 private:
  Verdict verdict_ = Verdict::Nontoxic;
  std::vector<KeywordSpan> keywords_;
  std::string immediate_explanation_;
  std::string raw_model_output_;
};

struct TokenContribution {
  std::string token;
  std::size_t index = 0;
  double raw_value = 0.0;
  double normalized_value = 0.0;

  bool operator==(const TokenContribution&) const = default;
};

// Token embeddings harvested from toxic-classified posts. Insertion order is
// kept; a repeated token keeps its first vector.
class ToxicWordSpace {
 public:
  struct Entry {
    std::string token;
    std::vector<double> vector;

    bool operator==(const Entry&) const = default;
  };

  explicit ToxicWordSpace(std::size_t dimension);

  // Returns false if the token was already present.
  bool insert(std::string token, std::vector<double> vector);

  bool contains(std::string_view token) const;
  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }

  bool operator==(const ToxicWordSpace& other) const {
    return dimension_ == other.dimension_ && entries_ == other.entries_;
  }

 private:
  std::size_t dimension_;
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct Substitution {
  std::string original_token;
  std::string toxic_token;
  std::size_t position = 0;  // token index in the nontoxic text
  std::size_t offset = 0;    // byte offset of the original token

  bool operator==(const Substitution&) const = default;
};

struct PairExample {
  std::string toxic_text;
  std::string nontoxic_text;
  std::string source_post_id;
  std::vector<Substitution> substitutions;

  bool operator==(const PairExample&) const = default;
};

// Rebuilds the toxic side by applying the recorded edits to nontoxic_text.
std::string apply_substitutions(std::string_view nontoxic_text,
                                const std::vector<Substitution>& subs);

enum class Scope { HistoricalPosts, SocialConnections, InteractionContexts };

std::string_view to_string(Scope s);
std::optional<Scope> scope_from_string(std::string_view s);
const std::vector<Scope>& all_scopes();

struct Comment {
  std::string text;
  Timestamp timestamp = 0;

  bool operator==(const Comment&) const = default;
};

struct UserProfile {
  std::string user_id;
  std::vector<Post> historical_posts;
  std::vector<std::string> social_connections;
  // audience role or peer id -> comments received from that audience, oldest first
  std::map<std::string, std::vector<Comment>> interaction_contexts;
  std::vector<PairExample> pairs;
  std::uint64_t version = 0;

  bool operator==(const UserProfile&) const = default;
};

struct AuthGrant {
  std::string user_id;
  std::set<Scope> scopes;
  Timestamp granted_at = 0;
  bool revoked = false;

  bool active(Scope s) const { return !revoked && scopes.count(s) > 0; }
  bool operator==(const AuthGrant&) const = default;
};

struct SimulationResult {
  std::string role;
  std::string reply_text;
  bool used_context = false;
};

struct ModificationResult {
  std::string revised_text;
  int iterations = 0;
  DetectionResult final_detection;
  bool converged = false;
};

}  // namespace demod
