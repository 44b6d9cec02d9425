#include "demod/pairgen.hpp"

#include <algorithm>
#include <future>

#include "demod/error.hpp"

namespace demod {

NearestToxic nearest_toxic(std::span<const double> query, const ToxicWordSpace& space) {
  if (space.empty()) throw Error(ErrorCode::EmptySpace, "toxic word space is empty");
  if (query.size() != space.dimension()) {
    throw Error(ErrorCode::DimensionMismatch,
                "query has dimension " + std::to_string(query.size()) +
                    ", space has " + std::to_string(space.dimension()));
  }
  const ToxicWordSpace::Entry* best = nullptr;
  double best_d = 0.0;
  for (const auto& e : space.entries()) {
    double d = 0.0;
    for (std::size_t i = 0; i < query.size(); ++i) {
      const double diff = query[i] - e.vector[i];
      d += diff * diff;
    }
    if (!best || d < best_d || (d == best_d && e.token < best->token)) {
      best = &e;
      best_d = d;
    }
  }
  return {best->token, best_d};
}

PairGenerator::PairGenerator(std::shared_ptr<const ToxicityClassifier> classifier,
                             std::shared_ptr<const EmbeddingTable> embeddings,
                             std::shared_ptr<const Tokenizer> tokenizer,
                             PairgenConfig config)
    : classifier_(std::move(classifier)),
      embeddings_(std::move(embeddings)),
      tokenizer_(tokenizer ? std::move(tokenizer)
                           : std::make_shared<DefaultTokenizer>()),
      config_(config) {
  if (!classifier_ || !embeddings_) {
    throw Error(ErrorCode::InvalidArgument,
                "pair generator needs a classifier and an embedding table");
  }
}

ToxicWordSpace PairGenerator::build_word_space(const std::vector<Post>& corpus) const {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "corpus is empty");

  // Per post: the positive-contribution tokens, in token order.
  auto harvest = [this](const Post& post) {
    std::vector<std::string> out;
    if (post.text.empty() ||
        classifier_->classify(post.text).label != Verdict::Toxic) {
      return out;
    }
    for (auto& c : contributions(post.text, *classifier_, *tokenizer_,
                                 AttributionTarget::Toxic)) {
      if (c.normalized_value > 0.0) out.push_back(std::move(c.token));
    }
    return out;
  };

  std::vector<std::vector<std::string>> per_post(corpus.size());
  const std::size_t workers = std::clamp<std::size_t>(config_.workers, 1, corpus.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < corpus.size(); ++i) per_post[i] = harvest(corpus[i]);
  } else {
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w) {
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < corpus.size(); i += workers) {
          per_post[i] = harvest(corpus[i]);
        }
      }));
    }
    for (auto& j : jobs) j.get();
  }

  ToxicWordSpace space(embeddings_->dimension());
  for (auto& tokens : per_post) {
    for (auto& t : tokens) {
      if (!space.contains(t)) {
        auto v = embeddings_->embed(t);
        space.insert(std::move(t), std::move(v));
      }
    }
  }
  return space;
}

std::vector<NontoxicCandidate> PairGenerator::select_nontoxic_history(
    const UserProfile& profile, const AuthGrant& grant, const Detector& detector) const {
  if (!grant.active(Scope::HistoricalPosts)) {
    throw Error(ErrorCode::Unauthorized, "historical_posts scope has not been granted");
  }
  std::vector<NontoxicCandidate> out;
  for (std::size_t i = 0; i < profile.historical_posts.size(); ++i) {
    const auto& post = profile.historical_posts[i];
    if (tokenizer_->tokenize(post.text).empty()) continue;
    if (detector.detect(post).toxic()) continue;
    if (classifier_->classify(post.text).label == Verdict::Toxic) continue;
    out.push_back({post, i,
                   contributions(post.text, *classifier_, *tokenizer_,
                                 AttributionTarget::Nontoxic)});
  }
  return out;
}

std::optional<PairExample> PairGenerator::make_pair(const NontoxicCandidate& candidate,
                                                    const std::string& source_post_id,
                                                    const ToxicWordSpace& space,
                                                    std::size_t k) const {
  std::vector<const TokenContribution*> ranked;
  for (const auto& c : candidate.contributions) {
    if (c.normalized_value > 0.0) ranked.push_back(&c);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](auto* a, auto* b) {
    return a->normalized_value > b->normalized_value;
  });
  if (ranked.size() > k) ranked.resize(k);

  const auto tokens = tokenizer_->tokenize(candidate.post.text);
  std::vector<Substitution> subs;
  for (const auto* c : ranked) {
    const auto& token = tokens.at(c->index);
    const auto vec = embeddings_->embed(token.text);
    auto nearest = nearest_toxic(vec, space);
    if (nearest.token == token.text) continue;
    subs.push_back({token.text, std::move(nearest.token), c->index, token.span.begin});
  }
  if (subs.empty()) return std::nullopt;
  std::sort(subs.begin(), subs.end(),
            [](const auto& a, const auto& b) { return a.position < b.position; });

  PairExample pair;
  pair.nontoxic_text = candidate.post.text;
  pair.toxic_text = apply_substitutions(pair.nontoxic_text, subs);
  pair.source_post_id = source_post_id;
  pair.substitutions = std::move(subs);
  return pair;
}

std::vector<PairExample> PairGenerator::build_pairs(const UserProfile& profile,
                                                    const AuthGrant& grant,
                                                    const Detector& detector,
                                                    const ToxicWordSpace& space,
                                                    std::size_t k) const {
  if (space.empty()) throw Error(ErrorCode::EmptySpace, "toxic word space is empty");
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be positive");
  std::vector<PairExample> pairs;
  for (const auto& candidate : select_nontoxic_history(profile, grant, detector)) {
    auto pair = make_pair(candidate,
                          profile.user_id + "#" + std::to_string(candidate.history_index),
                          space, k);
    if (pair) pairs.push_back(std::move(*pair));
  }
  return pairs;
}

}  // namespace demod
