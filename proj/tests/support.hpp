#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include <unistd.h>

#include "demod/mock_chat.hpp"
#include "demod/providers.hpp"
#include "demod/tokenizer.hpp"

namespace demod::testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(DEMOD_SOURCE_DIR) / "data" / "fixtures" / name;
}

inline std::filesystem::path golden(const std::string& name) {
  return std::filesystem::path(DEMOD_SOURCE_DIR) / "tests" / "golden" / name;
}

inline std::shared_ptr<const Tokenizer> tokenizer() {
  static const auto t = std::make_shared<const DefaultTokenizer>();
  return t;
}

inline std::shared_ptr<const LexiconClassifier> fixture_classifier() {
  static const auto c = std::make_shared<const LexiconClassifier>(
      LexiconClassifier::from_file(fixture("lexicon.tsv"), kDefaultLexiconBias,
                                   kReferenceThreshold, tokenizer()));
  return c;
}

inline std::shared_ptr<const EmbeddingTable> fixture_embeddings() {
  static const auto e =
      std::make_shared<const EmbeddingTable>(EmbeddingTable::from_file(fixture("embeddings.tsv")));
  return e;
}

inline std::shared_ptr<RuleBasedChat> rule_chat(bool detoxify = true) {
  return std::make_shared<RuleBasedChat>(fixture_classifier(),
                                         RuleBasedChat::load_synonyms(fixture("synonyms.tsv")),
                                         detoxify, tokenizer());
}

// Fresh scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("demod-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace demod::testing
