#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "demod/detector.hpp"
#include "demod/domain.hpp"
#include "demod/providers.hpp"

namespace demod {

struct NearestToxic {
  std::string token;
  double squared_distance = 0.0;
};

// Exhaustive Euclidean nearest neighbour; ties go to the lexicographically
// smallest token. Errors: EmptySpace, DimensionMismatch.
NearestToxic nearest_toxic(std::span<const double> query, const ToxicWordSpace& space);

struct NontoxicCandidate {
  Post post;
  std::size_t history_index = 0;
  std::vector<TokenContribution> contributions;  // toward the nontoxic decision
};

struct PairgenConfig {
  std::size_t substitutions_per_post = 2;
  std::size_t workers = 1;
};

// Builds nontoxic-toxic pairs from a user's history: toxic word space from a
// labelled-by-classifier corpus, double-gated history selection, and nearest
// toxic substitution of each post's top contribution words.
class PairGenerator {
 public:
  PairGenerator(std::shared_ptr<const ToxicityClassifier> classifier,
                std::shared_ptr<const EmbeddingTable> embeddings,
                std::shared_ptr<const Tokenizer> tokenizer,
                PairgenConfig config = {});

  // Errors: EmptyCorpus.
  ToxicWordSpace build_word_space(const std::vector<Post>& corpus) const;

  // A post passes when the chat detector and the classifier both say
  // nontoxic; the classifier is consulted only after the detector passes.
  // Errors: Unauthorized without historical_posts, provider errors.
  std::vector<NontoxicCandidate> select_nontoxic_history(
      const UserProfile& profile, const AuthGrant& grant,
      const Detector& detector) const;

  // nullopt when the post has no positive contribution word or every
  // substitution would be a no-op.
  std::optional<PairExample> make_pair(const NontoxicCandidate& candidate,
                                       const std::string& source_post_id,
                                       const ToxicWordSpace& space, std::size_t k) const;

  // Errors: EmptySpace, plus those of select_nontoxic_history.
  std::vector<PairExample> build_pairs(const UserProfile& profile,
                                       const AuthGrant& grant,
                                       const Detector& detector,
                                       const ToxicWordSpace& space,
                                       std::size_t k) const;

  const PairgenConfig& config() const noexcept { return config_; }

 private:
  std::shared_ptr<const ToxicityClassifier> classifier_;
  std::shared_ptr<const EmbeddingTable> embeddings_;
  std::shared_ptr<const Tokenizer> tokenizer_;
  PairgenConfig config_;
};

}  // namespace demod
