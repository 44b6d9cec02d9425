#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <httplib.h>
#include <spdlog/spdlog.h>

#include "demod/app.hpp"
#include "demod/dataset.hpp"
#include "demod/error.hpp"
#include "demod/eval.hpp"
#include "demod/service.hpp"

namespace {

using namespace demod;

struct EvalArgs {
  std::string dataset;
  std::string provider;
  std::string out;
  std::string config;
  std::string script;
  std::size_t workers = 1;
  bool resume = false;
  double threshold = kScoreBaselineThreshold;
};

AppConfig load_config(const std::string& path) {
  return path.empty() ? AppConfig{} : AppConfig::from_file(path);
}

EvalOptions options_for(const EvalArgs& a) {
  EvalOptions o;
  if (!a.out.empty()) o.out_dir = a.out;
  o.workers = a.workers;
  o.resume = a.resume;
  return o;
}

Runtime runtime_for(const EvalArgs& a) {
  auto config = load_config(a.config);
  config.provider = a.provider;
  if (!a.script.empty()) config.script_path = std::filesystem::absolute(a.script);
  return Runtime::build(config, std::make_shared<MemoryBackend>());
}

Post sample_post(const Sample& s) { return {s.text, s.topic, {}}; }

int eval_detect(const EvalArgs& a) {
  const auto samples = load_dataset(a.dataset);
  DetectionMetrics m;
  if (a.provider == "lexicon") {
    const auto config = load_config(a.config);
    auto tokenizer = std::make_shared<DefaultTokenizer>();
    const auto classifier =
        LexiconClassifier::from_file(config.resolve(config.lexicon_path), config.lexicon_bias,
                                     config.classifier_threshold, tokenizer);
    m = eval_detection(
        samples, [&](const Sample& s) { return classifier.classify(s.text).label; },
        options_for(a));
  } else {
    const auto rt = runtime_for(a);
    m = eval_detection(
        samples,
        [&](const Sample& s) {
          return rt.detector->detect(sample_post(s)).toxic() ? Verdict::Toxic : Verdict::Nontoxic;
        },
        options_for(a));
  }
  std::cout << m.table();
  return 0;
}

int eval_modify(const EvalArgs& a) {
  const auto samples = load_dataset(a.dataset);
  const auto rt = runtime_for(a);
  const auto m = eval_modification(
      samples, [&](const Sample& s) { return rt.modifier->modify(sample_post(s), {}); },
      options_for(a));
  std::cout << m.table();
  return 0;
}

int eval_baseline(const EvalArgs& a) {
  const auto samples = load_dataset(a.dataset);
  ScoreProvider scores;
  std::shared_ptr<LexiconClassifier> classifier;
  if (a.provider == "dataset-score") {
    scores = [](const Sample& s) {
      if (!s.score) {
        throw Error(ErrorCode::DatasetParse,
                    "row " + std::to_string(s.index) + " has no score column");
      }
      return *s.score;
    };
  } else if (a.provider == "lexicon") {
    const auto config = load_config(a.config);
    classifier = std::make_shared<LexiconClassifier>(LexiconClassifier::from_file(
        config.resolve(config.lexicon_path), config.lexicon_bias, config.classifier_threshold,
        std::make_shared<DefaultTokenizer>()));
    scores = [classifier](const Sample& s) {
      return classifier->classify(s.text).toxic_probability;
    };
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown baseline provider '" + a.provider + "'");
  }
  const auto report = eval_threshold_baseline(samples, scores, a.threshold, options_for(a));
  std::cout << report.table();
  return 0;
}

int serve(const std::string& config_path) {
  const auto config = load_config(config_path);
  Service service(Runtime::build(config), ServiceConfig{config.session_ttl_seconds});
  httplib::Server server;
  service.bind(server);
  spdlog::info("listening on {}:{} with provider {}", config.host, config.port, config.provider);
  if (!server.listen(config.host, config.port)) {
    spdlog::error("cannot listen on {}:{}", config.host, config.port);
    return 1;
  }
  return 0;
}

Store open_store(const std::string& config_path) {
  const auto config = load_config(config_path);
  return Store(std::make_shared<FileBackend>(config.resolve(config.data_dir)));
}

void add_eval_options(CLI::App* cmd, EvalArgs& a, const std::vector<std::string>& providers) {
  cmd->add_option("--dataset", a.dataset, "CSV with label,text[,topic][,score]")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--provider", a.provider)->required()->check(CLI::IsMember(providers));
  cmd->add_option("--out", a.out, "directory for per-sample records and reports");
  cmd->add_option("--workers", a.workers)->check(CLI::PositiveNumber);
  cmd->add_flag("--resume", a.resume, "skip samples already recorded in --out");
  cmd->add_option("--config", a.config, "JSON configuration file");
  cmd->add_option("--script", a.script, "scripted responses for mock-scripted");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"demod: self-censorship of toxic posts"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose);

  auto* eval = app.add_subcommand("eval", "run an evaluation over a labelled dataset");
  eval->require_subcommand(1);
  EvalArgs detect_args, modify_args, baseline_args;
  auto* detect = eval->add_subcommand("detect", "detection accuracy");
  add_eval_options(detect, detect_args, {"lexicon", "mock-rules", "mock-scripted", "remote"});
  auto* modify = eval->add_subcommand("modify", "detoxification rate on toxic samples");
  add_eval_options(modify, modify_args, {"mock-rules", "mock-never", "mock-scripted", "remote"});
  auto* baseline = eval->add_subcommand("baseline", "score-threshold baseline");
  add_eval_options(baseline, baseline_args, {"dataset-score", "lexicon"});
  baseline->add_option("--threshold", baseline_args.threshold, "toxic iff score > threshold");

  std::string serve_config;
  auto* serve_cmd = app.add_subcommand("serve", "run the HTTP API");
  serve_cmd->add_option("--config", serve_config, "JSON configuration file");

  std::string audit_config;
  std::string export_out;
  Timestamp prune_before = 0;
  auto* audit = app.add_subcommand("audit", "inspect the audit log");
  audit->require_subcommand(1);
  audit->add_option("--config", audit_config, "JSON configuration file");
  auto* audit_export = audit->add_subcommand("export", "write all events as CSV");
  audit_export->add_option("--out", export_out, "output file (default stdout)");
  auto* audit_prune = audit->add_subcommand("prune", "delete events older than a timestamp");
  audit_export->fallthrough();
  audit_prune->fallthrough();
  audit_prune->add_option("--before", prune_before, "unix seconds")->required();

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (*detect) return eval_detect(detect_args);
    if (*modify) return eval_modify(modify_args);
    if (*baseline) return eval_baseline(baseline_args);
    if (*serve_cmd) return serve(serve_config);
    if (*audit_export) {
      const auto csv = open_store(audit_config).export_audit_csv();
      if (export_out.empty()) {
        std::cout << csv;
      } else {
        std::ofstream(export_out) << csv;
      }
      return 0;
    }
    if (*audit_prune) {
      std::cout << open_store(audit_config).prune_audit(prune_before) << " events removed\n";
      return 0;
    }
  } catch (const Error& e) {
    spdlog::error("{}: {}", to_string(e.code()), e.what());
    return 2;
  }
  return 0;
}
