#include "demod/domain.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

#include "demod/error.hpp"

namespace demod {

Post parse_post(std::string_view raw, const Tokenizer& tokenizer,
                std::string author_id, std::size_t min_tokens) {
  const auto trimmed = trim(raw);
  if (trimmed.empty()) {
    if (min_tokens > 0) throw Error(ErrorCode::TooShort, "post is empty");
    throw Error(ErrorCode::EmptyInput, "post is empty");
  }

  Post post;
  post.author_id = std::move(author_id);

  const auto hashes = std::count(trimmed.begin(), trimmed.end(), '#');
  if (hashes % 2 != 0) {
    throw Error(ErrorCode::MalformedTopic, "unmatched '#' in post");
  }
  if (hashes == 0) {
    post.text = std::string(trimmed);
  } else {
    const auto open = trimmed.find('#');
    const auto close = trimmed.find('#', open + 1);
    const auto topic = trim(trimmed.substr(open + 1, close - open - 1));
    if (topic.empty()) {
      throw Error(ErrorCode::MalformedTopic, "empty topic between '#' signs");
    }
    post.topic = std::string(topic);
    const auto before = trim(trimmed.substr(0, open));
    const auto after = trim(trimmed.substr(close + 1));
    post.text = std::string(before);
    if (!before.empty() && !after.empty()) post.text += ' ';
    post.text += after;
  }

  const auto count = tokenizer.tokenize(post.text).size();
  if (count < min_tokens) {
    throw Error(ErrorCode::TooShort,
                "post text has " + std::to_string(count) +
                    " words, at least " + std::to_string(min_tokens) +
                    " are required (topic excluded)");
  }
  return post;
}

std::string render_post(const Post& post) {
  if (!post.topic) return post.text;
  std::string out = "#" + *post.topic + "#";
  if (!post.text.empty()) out += " " + post.text;
  return out;
}

std::vector<KeywordSpan> validate_keywords(
    const Post& post, const std::vector<std::string>& candidates) {
  std::vector<KeywordSpan> spans;
  std::set<std::string_view> seen;
  for (const auto& c : candidates) {
    if (c.empty() || !seen.insert(c).second) continue;
    const auto pos = post.text.find(c);
    if (pos == std::string::npos) {
      spdlog::debug("dropping keyword not found in post: '{}'", c);
      continue;
    }
    spans.push_back({{pos, pos + c.size()}, c});
  }
  std::stable_sort(spans.begin(), spans.end(),
                   [](const KeywordSpan& a, const KeywordSpan& b) {
                     return a.span.begin < b.span.begin;
                   });
  return spans;
}

std::string_view to_string(Verdict v) {
  return v == Verdict::Toxic ? "toxic" : "nontoxic";
}

DetectionResult::DetectionResult(Verdict verdict,
                                 std::vector<KeywordSpan> keywords,
                                 std::string immediate_explanation,
                                 std::string raw_model_output,
                                 std::string_view text)
    : verdict_(verdict),
      keywords_(std::move(keywords)),
      immediate_explanation_(std::move(immediate_explanation)),
      raw_model_output_(std::move(raw_model_output)) {
  if (verdict_ == Verdict::Nontoxic && !keywords_.empty()) {
    throw Error(ErrorCode::InvalidArgument,
                "nontoxic verdict cannot carry keywords");
  }
  for (const auto& k : keywords_) {
    if (k.span.begin >= k.span.end || k.span.end > text.size() ||
        text.substr(k.span.begin, k.span.size()) != k.text) {
      throw Error(ErrorCode::InvalidArgument,
                  "keyword span does not match post text: '" + k.text + "'");
    }
  }
}

ToxicWordSpace::ToxicWordSpace(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) {
    throw Error(ErrorCode::InvalidArgument, "word space dimension must be positive");
  }
}

bool ToxicWordSpace::insert(std::string token, std::vector<double> vector) {
  if (vector.size() != dimension_) {
    throw Error(ErrorCode::DimensionMismatch,
                "vector for '" + token + "' has dimension " +
                    std::to_string(vector.size()) + ", space has " +
                    std::to_string(dimension_));
  }
  if (index_.count(token)) return false;
  index_.emplace(token, entries_.size());
  entries_.push_back({std::move(token), std::move(vector)});
  return true;
}

bool ToxicWordSpace::contains(std::string_view token) const {
  return index_.count(std::string(token)) > 0;
}

std::string apply_substitutions(std::string_view nontoxic_text,
                                const std::vector<Substitution>& subs) {
  std::vector<const Substitution*> ordered;
  for (const auto& s : subs) ordered.push_back(&s);
  std::sort(ordered.begin(), ordered.end(),
            [](auto* a, auto* b) { return a->offset > b->offset; });

  std::string out(nontoxic_text);
  for (const auto* s : ordered) {
    const auto len = s->original_token.size();
    if (s->offset + len > out.size() ||
        out.compare(s->offset, len, s->original_token) != 0) {
      throw Error(ErrorCode::InvalidArgument,
                  "substitution does not match text at offset " +
                      std::to_string(s->offset));
    }
    out.replace(s->offset, len, s->toxic_token);
  }
  return out;
}

std::string_view to_string(Scope s) {
  switch (s) {
    case Scope::HistoricalPosts: return "historical_posts";
    case Scope::SocialConnections: return "social_connections";
    case Scope::InteractionContexts: return "interaction_contexts";
  }
  return "";
}

std::optional<Scope> scope_from_string(std::string_view s) {
  for (auto scope : all_scopes()) {
    if (to_string(scope) == s) return scope;
  }
  return std::nullopt;
}

const std::vector<Scope>& all_scopes() {
  static const std::vector<Scope> scopes = {
      Scope::HistoricalPosts, Scope::SocialConnections,
      Scope::InteractionContexts};
  return scopes;
}

}  // namespace demod
