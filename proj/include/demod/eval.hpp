#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "demod/dataset.hpp"
#include "demod/domain.hpp"

namespace demod {

struct EvalOptions {
  std::optional<std::filesystem::path> out_dir;  // per-sample JSON-lines + reports
  std::size_t workers = 1;
  bool resume = false;
};

// ---- detection -----------------------------------------------------------

struct DetectionRecord {
  std::size_t index = 0;
  Verdict label = Verdict::Nontoxic;
  Verdict predicted = Verdict::Nontoxic;
  bool operator==(const DetectionRecord&) const = default;
};

struct DetectionMetrics {
  std::size_t total = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  std::size_t true_toxic = 0;
  std::size_t false_toxic = 0;
  std::size_t true_nontoxic = 0;
  std::size_t false_nontoxic = 0;
  std::size_t labelled_toxic = 0;
  std::size_t labelled_nontoxic = 0;

  bool operator==(const DetectionMetrics&) const = default;
  nlohmann::json to_json() const;
  std::string table() const;
};

DetectionMetrics fold_detection(const std::vector<DetectionRecord>& records);

using SampleDetector = std::function<Verdict(const Sample&)>;

// Errors from the detector propagate after every finished sample before the
// failing one has been persisted, so a resumed run picks up from there.
DetectionMetrics eval_detection(const std::vector<Sample>& samples,
                                const SampleDetector& detector,
                                const EvalOptions& options = {});

std::vector<DetectionRecord> load_detection_records(const std::filesystem::path& path);

// ---- modification --------------------------------------------------------

struct ModificationRecord {
  std::size_t index = 0;
  int iterations = 0;
  bool converged = false;
  bool toxic_after = true;
  std::string revised_text;
  bool operator==(const ModificationRecord&) const = default;
};

struct DetoxMetrics {
  std::size_t toxic_before = 0;
  std::size_t toxic_after = 0;
  double detox_rate = 0.0;  // (before - after) / before
  std::size_t non_converged = 0;
  double mean_iterations = 0.0;

  bool operator==(const DetoxMetrics&) const = default;
  nlohmann::json to_json() const;
  std::string table() const;
};

DetoxMetrics fold_modification(const std::vector<ModificationRecord>& records);

using SampleModifier = std::function<ModificationResult(const Sample&)>;

// Runs over the toxic-labelled samples only.
DetoxMetrics eval_modification(const std::vector<Sample>& samples,
                               const SampleModifier& modifier,
                               const EvalOptions& options = {});

std::vector<ModificationRecord> load_modification_records(const std::filesystem::path& path);

// ---- score-threshold baseline --------------------------------------------

struct BaselineRecord {
  std::size_t index = 0;
  Verdict label = Verdict::Nontoxic;
  double score = 0.0;
  bool operator==(const BaselineRecord&) const = default;
};

inline Verdict threshold_label(double score, double threshold) {
  return score > threshold ? Verdict::Toxic : Verdict::Nontoxic;
}

DetectionMetrics fold_baseline(const std::vector<BaselineRecord>& records, double threshold);

struct BaselineReport {
  double threshold = 0.7;
  DetectionMetrics metrics;
  std::vector<std::pair<double, DetectionMetrics>> sweep;

  nlohmann::json to_json() const;
  std::string table() const;
};

using ScoreProvider = std::function<double(const Sample&)>;

BaselineReport eval_threshold_baseline(const std::vector<Sample>& samples,
                                       const ScoreProvider& scores, double threshold = 0.7,
                                       const EvalOptions& options = {},
                                       std::vector<double> sweep = {0.5, 0.6, 0.7, 0.8, 0.9});

// Writes <name>.json, <name>.txt and <name>.csv into out_dir.
void write_report(const std::filesystem::path& out_dir, const std::string& name,
                  const nlohmann::json& report, const std::string& table);

}  // namespace demod
