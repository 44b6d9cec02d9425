#include "demod/app.hpp"

#include <fstream>
#include <set>

#include <spdlog/spdlog.h>

#include "demod/dataset.hpp"
#include "demod/error.hpp"

namespace demod {

using nlohmann::json;
namespace fs = std::filesystem;

fs::path AppConfig::resolve(const fs::path& p) const {
  return p.is_absolute() ? p : base_dir / p;
}

AppConfig AppConfig::from_json(const json& j, fs::path base_dir) {
  static const std::set<std::string> known = {
      "host", "port", "data_dir", "session_ttl_seconds", "provider", "script_path",
      "remote", "lexicon_path", "lexicon_bias", "classifier_threshold",
      "embeddings_path", "synonyms_path", "corpus_path", "platform_fixture", "k", "m",
      "max_iters", "simulation_temperature", "templates"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) {
      throw Error(ErrorCode::InvalidArgument, "unknown configuration key '" + key + "'");
    }
  }

  AppConfig c;
  c.base_dir = std::move(base_dir);
  try {
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);
    c.data_dir = j.value("data_dir", c.data_dir.string());
    c.session_ttl_seconds = j.value("session_ttl_seconds", c.session_ttl_seconds);
    c.provider = j.value("provider", c.provider);
    if (j.contains("script_path")) c.script_path = j["script_path"].get<std::string>();
    if (j.contains("remote")) {
      const auto& r = j["remote"];
      if (r.contains("api_key")) {
        throw Error(ErrorCode::InvalidArgument,
                    "put the API key in the environment variable named by remote.api_key_env");
      }
      c.remote.base_url = r.value("base_url", c.remote.base_url);
      c.remote.model = r.value("model", c.remote.model);
      c.remote.api_key_env = r.value("api_key_env", c.remote.api_key_env);
      c.remote.timeout_seconds = r.value("timeout_seconds", c.remote.timeout_seconds);
      c.remote.max_retries = r.value("max_retries", c.remote.max_retries);
      c.remote.backoff_initial_ms = r.value("backoff_initial_ms", c.remote.backoff_initial_ms);
      c.remote.max_concurrent = r.value("max_concurrent", c.remote.max_concurrent);
      c.remote.requests_per_minute =
          r.value("requests_per_minute", c.remote.requests_per_minute);
    }
    c.lexicon_path = j.value("lexicon_path", c.lexicon_path.string());
    c.lexicon_bias = j.value("lexicon_bias", c.lexicon_bias);
    c.classifier_threshold = j.value("classifier_threshold", c.classifier_threshold);
    c.embeddings_path = j.value("embeddings_path", c.embeddings_path.string());
    c.synonyms_path = j.value("synonyms_path", c.synonyms_path.string());
    c.corpus_path = j.value("corpus_path", c.corpus_path.string());
    c.platform_fixture = j.value("platform_fixture", c.platform_fixture.string());
    c.k = j.value("k", c.k);
    c.m = j.value("m", c.m);
    c.max_iters = j.value("max_iters", c.max_iters);
    c.simulation_temperature = j.value("simulation_temperature", c.simulation_temperature);
    if (j.contains("templates")) {
      const auto& t = j["templates"];
      if (t.contains("detection")) c.detection_template = t["detection"].get<std::string>();
      if (t.contains("simulation")) c.simulation_template = t["simulation"].get<std::string>();
      if (t.contains("modification")) {
        c.modification_template = t["modification"].get<std::string>();
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, std::string("bad configuration: ") + e.what());
  }
  if (c.k == 0) throw Error(ErrorCode::InvalidArgument, "k must be positive");
  if (c.max_iters < 1) throw Error(ErrorCode::InvalidArgument, "max_iters must be >= 1");
  return c;
}

AppConfig AppConfig::from_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, "bad config " + path.string() + ": " + e.what());
  }
  return from_json(j, path.has_parent_path() ? path.parent_path() : fs::path("."));
}

std::shared_ptr<ChatProvider> Runtime::make_chat(
    const AppConfig& config, std::shared_ptr<const LexiconClassifier> classifier,
    std::shared_ptr<const Tokenizer> tokenizer) {
  if (config.provider == "mock-rules" || config.provider == "mock-never") {
    return std::make_shared<RuleBasedChat>(
        std::move(classifier), RuleBasedChat::load_synonyms(config.resolve(config.synonyms_path)),
        config.provider == "mock-rules", std::move(tokenizer));
  }
  if (config.provider == "mock-scripted") {
    if (!config.script_path) {
      throw Error(ErrorCode::InvalidArgument, "mock-scripted provider needs script_path");
    }
    return ScriptedChat::from_file(config.resolve(*config.script_path));
  }
  if (config.provider == "remote") return std::make_shared<RemoteChat>(config.remote);
  throw Error(ErrorCode::InvalidArgument, "unknown provider '" + config.provider + "'");
}

Runtime Runtime::build(AppConfig config, std::shared_ptr<KeyValueBackend> backend,
                       std::shared_ptr<PlatformProvider> platform, Clock clock) {
  Runtime rt;
  rt.config = std::move(config);
  const auto& c = rt.config;
  auto optional_path = [&](const std::optional<fs::path>& p) -> std::optional<fs::path> {
    if (!p) return std::nullopt;
    return c.resolve(*p);
  };

  rt.tokenizer = std::make_shared<DefaultTokenizer>();
  rt.classifier = std::make_shared<LexiconClassifier>(LexiconClassifier::from_file(
      c.resolve(c.lexicon_path), c.lexicon_bias, c.classifier_threshold, rt.tokenizer));
  rt.embeddings =
      std::make_shared<EmbeddingTable>(EmbeddingTable::from_file(c.resolve(c.embeddings_path)));
  rt.chat = make_chat(c, rt.classifier, rt.tokenizer);
  rt.detector = std::make_shared<Detector>(
      rt.chat, rt.tokenizer, DetectorConfig{optional_path(c.detection_template), 2, 0.0});

  SimulatorConfig sim;
  sim.temperature = c.simulation_temperature;
  sim.template_path = optional_path(c.simulation_template);
  rt.simulator = std::make_shared<Simulator>(rt.chat, sim);

  ModifierConfig mod;
  mod.max_pairs = c.m;
  mod.max_iters = c.max_iters;
  mod.template_path = optional_path(c.modification_template);
  rt.modifier = std::make_shared<Modifier>(rt.chat, rt.detector, mod);

  rt.pairgen = std::make_shared<PairGenerator>(rt.classifier, rt.embeddings, rt.tokenizer,
                                               PairgenConfig{c.k, 1});

  if (!backend) backend = std::make_shared<FileBackend>(c.resolve(c.data_dir));
  rt.store = std::make_shared<Store>(std::move(backend), std::move(clock));

  if (!platform) {
    platform = MockPlatform::from_file(c.resolve(c.platform_fixture));
  }
  rt.platform = std::move(platform);

  const std::string space_name = "default";
  if (auto cached = rt.store->get_word_space(space_name);
      cached && cached->dimension() == rt.embeddings->dimension()) {
    rt.word_space = std::make_shared<ToxicWordSpace>(std::move(*cached));
  } else {
    auto space = rt.pairgen->build_word_space(to_posts(load_dataset(c.resolve(c.corpus_path))));
    rt.store->put_word_space(space_name, space);
    rt.word_space = std::make_shared<ToxicWordSpace>(std::move(space));
  }
  spdlog::info("toxic word space: {} tokens, dimension {}", rt.word_space->size(),
               rt.word_space->dimension());

  auto pairgen = rt.pairgen;
  auto detector = rt.detector;
  auto space = rt.word_space;
  const auto k = c.k;
  rt.auth = std::make_shared<AuthorizationFlow>(
      rt.platform, rt.store, rt.tokenizer,
      [pairgen, detector, space, k](const UserProfile& profile, const AuthGrant& grant) {
        if (space->empty()) return std::vector<PairExample>{};
        return pairgen->build_pairs(profile, grant, *detector, *space, k);
      });
  return rt;
}

}  // namespace demod
