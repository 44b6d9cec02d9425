#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "demod/domain.hpp"
#include "demod/tokenizer.hpp"

namespace demod {

struct ChatRequest {
  std::string system_text;
  std::string user_text;
  std::string output_schema_hint;
  double temperature = 0.0;
  // Routing tag ("detect", "simulate", "modify"); offline providers key on it.
  std::string tag;
  // The text under review. Never sent over the wire; lets offline providers
  // act on the post without parsing the rendered prompt.
  std::string subject;

  bool operator==(const ChatRequest&) const = default;
};

// Throws InvalidArgument unless system_text and user_text are non-empty and
// temperature is non-negative.
void validate(const ChatRequest& request);

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  // Returns the raw model text. Errors: Transport, Overloaded, Refusal.
  virtual std::string complete(const ChatRequest& request) = 0;
};

struct ClassifierScore {
  double toxic_probability = 0.0;
  Verdict label = Verdict::Nontoxic;
};

class ToxicityClassifier {
 public:
  virtual ~ToxicityClassifier() = default;
  // Errors: EmptyInput.
  virtual ClassifierScore classify(std::string_view text) const = 0;
};

double logistic(double z);

// Signed per-token weights summed with a bias and squashed:
// p = logistic(bias + sum of weight(token)). Toxic iff p > threshold.
class LexiconClassifier final : public ToxicityClassifier {
 public:
  LexiconClassifier(std::unordered_map<std::string, double> weights,
                    double bias, double threshold,
                    std::shared_ptr<const Tokenizer> tokenizer);

  // Lines "token<TAB>weight"; blank lines are skipped.
  static LexiconClassifier from_file(const std::filesystem::path& path,
                                     double bias, double threshold,
                                     std::shared_ptr<const Tokenizer> tokenizer);

  ClassifierScore classify(std::string_view text) const override;

  double weight(std::string_view token) const;
  double bias() const noexcept { return bias_; }
  double threshold() const noexcept { return threshold_; }
  const std::unordered_map<std::string, double>& weights() const noexcept {
    return weights_;
  }

 private:
  std::unordered_map<std::string, double> weights_;
  double bias_;
  double threshold_;
  std::shared_ptr<const Tokenizer> tokenizer_;
};

inline constexpr double kDefaultLexiconBias = -2.0;
inline constexpr double kReferenceThreshold = 0.5;
inline constexpr double kScoreBaselineThreshold = 0.7;

enum class AttributionTarget {
  Toxic,     // raw = p(full) - p(without token)
  Nontoxic,  // raw = p(without token) - p(full)
};

// Leave-one-out occlusion attribution. Each token's span is replaced by a single
// space and the classifier is re-run. Normalized values are
// raw / max |raw|, or all zero when every raw value is zero.
// Errors: EmptyInput when the text has no tokens.
std::vector<TokenContribution> contributions(
    std::string_view text, const ToxicityClassifier& classifier,
    const Tokenizer& tokenizer,
    AttributionTarget target = AttributionTarget::Toxic);

// Exact-match token embeddings with a hashed fallback for unknown tokens.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dimension);

  // Header line with the dimension, then "token<TAB>v1 v2 ... vn".
  static EmbeddingTable from_file(const std::filesystem::path& path);

  void add(std::string token, std::vector<double> vector);

  std::vector<double> embed(std::string_view token) const;
  bool contains(std::string_view token) const;
  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return table_.size(); }

  // Deterministic vector with entries in [-1, 1], derived from FNV-1a hashes.
  static std::vector<double> fallback_vector(std::string_view token,
                                             std::size_t dimension);

 private:
  std::size_t dimension_;
  std::unordered_map<std::string, std::vector<double>> table_;
};

}  // namespace demod
