#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "demod/detector.hpp"
#include "demod/mock_chat.hpp"
#include "demod/modifier.hpp"
#include "demod/pairgen.hpp"
#include "demod/platform.hpp"
#include "demod/providers.hpp"
#include "demod/remote_chat.hpp"
#include "demod/simulator.hpp"
#include "demod/store.hpp"

namespace demod {

// Service and CLI configuration. Relative paths resolve against `base_dir`.
struct AppConfig {
  std::filesystem::path base_dir = ".";
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = "demod-data";
  std::int64_t session_ttl_seconds = 24 * 60 * 60;

  // "mock-rules", "mock-never", "mock-scripted" or "remote"
  std::string provider = "mock-rules";
  std::optional<std::filesystem::path> script_path;
  RemoteChatConfig remote;

  std::filesystem::path lexicon_path = "data/fixtures/lexicon.tsv";
  double lexicon_bias = kDefaultLexiconBias;
  double classifier_threshold = kReferenceThreshold;
  std::filesystem::path embeddings_path = "data/fixtures/embeddings.tsv";
  std::filesystem::path synonyms_path = "data/fixtures/synonyms.tsv";
  std::filesystem::path corpus_path = "data/fixtures/corpus_500.csv";
  std::filesystem::path platform_fixture = "data/fixtures/mock_platform.json";

  std::size_t k = 2;
  std::size_t m = 5;
  int max_iters = 3;
  double simulation_temperature = 0.7;

  std::optional<std::filesystem::path> detection_template;
  std::optional<std::filesystem::path> simulation_template;
  std::optional<std::filesystem::path> modification_template;

  std::filesystem::path resolve(const std::filesystem::path& p) const;

  // Unknown keys are rejected. The API key is never read from the file.
  static AppConfig from_json(const nlohmann::json& j,
                             std::filesystem::path base_dir = ".");
  static AppConfig from_file(const std::filesystem::path& path);
};

// Every component wired from one configuration.
struct Runtime {
  AppConfig config;
  std::shared_ptr<const Tokenizer> tokenizer;
  std::shared_ptr<const LexiconClassifier> classifier;
  std::shared_ptr<const EmbeddingTable> embeddings;
  std::shared_ptr<ChatProvider> chat;
  std::shared_ptr<Detector> detector;
  std::shared_ptr<Simulator> simulator;
  std::shared_ptr<Modifier> modifier;
  std::shared_ptr<PairGenerator> pairgen;
  std::shared_ptr<Store> store;
  std::shared_ptr<PlatformProvider> platform;
  std::shared_ptr<AuthorizationFlow> auth;
  std::shared_ptr<const ToxicWordSpace> word_space;

  // Chat provider from a name; see AppConfig::provider.
  static std::shared_ptr<ChatProvider> make_chat(const AppConfig& config,
                                                 std::shared_ptr<const LexiconClassifier> classifier,
                                                 std::shared_ptr<const Tokenizer> tokenizer);

  // `store` and `platform` override the configured ones when given. The word
  // space is loaded from the store or built from the corpus and cached.
  static Runtime build(AppConfig config, std::shared_ptr<KeyValueBackend> backend = nullptr,
                       std::shared_ptr<PlatformProvider> platform = nullptr,
                       Clock clock = system_now);
};

}  // namespace demod
