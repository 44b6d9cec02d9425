#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "demod/error.hpp"
#include "demod/providers.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace demod {
namespace {

using testing::fixture_classifier;
using testing::tokenizer;

LexiconClassifier tiny() {
  return LexiconClassifier({{"nasty", 4.0}, {"pleasant", -1.5}}, kDefaultLexiconBias,
                           kReferenceThreshold, tokenizer());
}

TEST(Lexicon, HandComputedProbabilities) {
  const auto c = tiny();
  // z = -2 + 4
  EXPECT_DOUBLE_EQ(c.classify("today weather nasty").toxic_probability, 1.0 / (1.0 + std::exp(-2.0)));
  EXPECT_EQ(c.classify("today weather nasty").label, Verdict::Toxic);
  // z = -2 - 1.5
  EXPECT_DOUBLE_EQ(c.classify("today weather pleasant").toxic_probability, 1.0 / (1.0 + std::exp(3.5)));
  EXPECT_EQ(c.classify("today weather pleasant").label, Verdict::Nontoxic);
}

TEST(Lexicon, CaseInsensitiveTokens) {
  const auto c = tiny();
  EXPECT_DOUBLE_EQ(c.classify("NASTY").toxic_probability, c.classify("nasty").toxic_probability);
}

TEST(Lexicon, ThresholdIsStrict) {
  // z = 0 gives p = 0.5 exactly, which is not above the threshold.
  const LexiconClassifier c({{"meh", 2.0}}, -2.0, 0.5, tokenizer());
  EXPECT_EQ(c.classify("meh").toxic_probability, 0.5);
  EXPECT_EQ(c.classify("meh").label, Verdict::Nontoxic);
}

TEST(Lexicon, EmptyTextRejected) {
  try {
    tiny().classify("");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyInput);
  }
  // Punctuation only has no tokens but is still classifiable at the bias.
  EXPECT_DOUBLE_EQ(tiny().classify("!!").toxic_probability, logistic(-2.0));
}

TEST(Lexicon, FixtureLabelsDemoPostToxic) {
  const auto c = fixture_classifier();
  EXPECT_EQ(c->classify("Some fans of celebrities bully female artists. I didn't know before, "
                        "but now I do. The fans are really repulsive")
                .label,
            Verdict::Toxic);
  EXPECT_EQ(c->classify("The attitude of some celebrities' fans towards female artists is "
                        "perplexing. I didn't know before, but now I do. The fans are truly "
                        "troubling")
                .label,
            Verdict::Nontoxic);
}

TEST(Attribution, ToxicTargetMatchesOracle) {
  const auto c = tiny();
  const auto got = contributions("today weather nasty", c, *tokenizer());
  const auto want = oracle::occlusion({{"today", 0}, {"weather", 0}, {"nasty", 4.0}}, -2.0,
                                      AttributionTarget::Toxic);
  ASSERT_EQ(got.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(got[i].raw_value, want[i].raw_value);
    EXPECT_EQ(got[i].normalized_value, want[i].normalized_value);
  }
  EXPECT_EQ(got[2].normalized_value, 1.0);
  EXPECT_EQ(got[0].normalized_value, 0.0);
}

TEST(Attribution, NontoxicTargetRanksBenignWordFirst) {
  const auto got =
      contributions("today weather pleasant", tiny(), *tokenizer(), AttributionTarget::Nontoxic);
  ASSERT_EQ(got.size(), 3u);
  EXPECT_EQ(got[2].token, "pleasant");
  EXPECT_EQ(got[2].normalized_value, 1.0);
  EXPECT_GT(got[2].raw_value, 0.0);
}

TEST(Attribution, AllZeroWhenNothingMatters) {
  for (const auto& c : contributions("today weather", tiny(), *tokenizer())) {
    EXPECT_EQ(c.raw_value, 0.0);
    EXPECT_EQ(c.normalized_value, 0.0);
  }
}

TEST(Attribution, OcclusionDoesNotFuseNeighbours) {
  // Occluding "x" must not glue "nas" and "ty" into "nasty".
  const LexiconClassifier c({{"nasty", 4.0}, {"x", 1.0}}, -2.0, 0.5, tokenizer());
  const auto got = contributions("nas x ty", c, *tokenizer());
  ASSERT_EQ(got.size(), 3u);
  EXPECT_EQ(got[1].normalized_value, 1.0);
  EXPECT_EQ(got[0].raw_value, 0.0);
}

TEST(Attribution, NoTokensRejected) {
  try {
    contributions("?!", tiny(), *tokenizer());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyInput);
  }
}

TEST(Attribution, RandomTextsMatchOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const auto words = oracle::random_weighted_words(rng, 12);
    const auto classifier = oracle::classifier_for(words, -2.0, tokenizer());
    const auto got = contributions(oracle::join(words), classifier, *tokenizer());
    const auto want = oracle::occlusion(words, -2.0, AttributionTarget::Toxic);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].raw_value, want[i].raw_value);
      EXPECT_EQ(got[i].normalized_value, want[i].normalized_value);
      EXPECT_LE(std::abs(got[i].normalized_value), 1.0);
    }
  }
}

TEST(Embeddings, FixtureLookupAndFallback) {
  const auto e = testing::fixture_embeddings();
  EXPECT_EQ(e->dimension(), 8u);
  EXPECT_TRUE(e->contains("pleasant"));
  EXPECT_FALSE(e->contains("zyzzyva"));
  const auto v = e->embed("zyzzyva");
  EXPECT_EQ(v, EmbeddingTable::fallback_vector("zyzzyva", 8));
  EXPECT_EQ(v, e->embed("zyzzyva"));
  for (double x : v) {
    EXPECT_GE(x, -1.0);
    EXPECT_LE(x, 1.0);
  }
  EXPECT_NE(v, EmbeddingTable::fallback_vector("zyzzyvb", 8));
}

TEST(Embeddings, FallbackFrozenValues) {
  // Frozen from the FNV-1a oracle in oracles.hpp.
  EXPECT_EQ(EmbeddingTable::fallback_vector("nasty", 4),
            (std::vector<double>{0.67652075843089743, 0.91854887982160993, 0.19246451564947287,
                                 0.43449263704018515}));
  EXPECT_EQ(EmbeddingTable::fallback_vector("蠢", 2),
            (std::vector<double>{-0.64251588185693764, -0.88454400324765015}));
  EXPECT_EQ(EmbeddingTable::fallback_vector("nasty", 4), oracle::fnv_fallback("nasty", 4));
}

TEST(Embeddings, WrongDimensionRejected) {
  EmbeddingTable t(3);
  EXPECT_THROW(t.add("a", {1, 2}), Error);
}

TEST(ChatRequestContract, Validation) {
  ChatRequest r{"sys", "user", "", 0.0, "detect", ""};
  EXPECT_NO_THROW(validate(r));
  r.temperature = -0.1;
  EXPECT_THROW(validate(r), Error);
  r.temperature = 0.2;
  r.user_text.clear();
  EXPECT_THROW(validate(r), Error);
}

}  // namespace
}  // namespace demod
