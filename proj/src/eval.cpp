#include "demod/eval.hpp"

#include <exception>
#include <fstream>
#include <future>
#include <iomanip>
#include <map>
#include <sstream>

#include "demod/csv.hpp"
#include "demod/error.hpp"

namespace demod {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string verdict_name(Verdict v) { return std::string(to_string(v)); }

Verdict verdict_from(const json& j) {
  return j.get<std::string>() == "toxic" ? Verdict::Toxic : Verdict::Nontoxic;
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::vector<std::string> lines;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) lines.push_back(line);
  }
  return lines;
}

// Runs `fn` over the samples with bounded parallelism, persisting one JSON
// line per finished sample in input order. Previously persisted records are
// reused when resuming.
template <class Record, class Fn, class Encode, class Decode>
std::vector<Record> run_persisted(const std::vector<const Sample*>& samples, Fn fn,
                                  const std::optional<fs::path>& file, std::size_t workers,
                                  bool resume, Encode encode, Decode decode) {
  std::map<std::size_t, Record> done;
  std::ofstream out;
  if (file) {
    fs::create_directories(file->parent_path());
    if (resume && fs::exists(*file)) {
      for (const auto& line : read_lines(*file)) {
        try {
          auto rec = decode(json::parse(line));
          done[rec.index] = std::move(rec);
        } catch (const json::exception&) {
          // A torn last line from an interrupted run.
        }
      }
      out.open(*file, std::ios::app);
    } else {
      out.open(*file, std::ios::trunc);
    }
    if (!out) throw Error(ErrorCode::StorageFailure, "cannot write " + file->string());
  }

  std::vector<const Sample*> pending;
  for (const auto* s : samples) {
    if (!done.count(s->index)) pending.push_back(s);
  }

  workers = std::max<std::size_t>(workers, 1);
  for (std::size_t start = 0; start < pending.size(); start += workers) {
    const auto end = std::min(pending.size(), start + workers);
    std::vector<std::future<Record>> batch;
    for (std::size_t i = start; i < end; ++i) {
      batch.push_back(std::async(workers == 1 ? std::launch::deferred : std::launch::async,
                                 [&fn, s = pending[i]] { return fn(*s); }));
    }
    std::exception_ptr failure;
    for (auto& f : batch) {
      try {
        auto rec = f.get();
        if (failure) continue;
        if (out.is_open()) {
          out << encode(rec).dump() << '\n';
          out.flush();
        }
        done[rec.index] = std::move(rec);
      } catch (...) {
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  }

  std::vector<Record> records;
  for (const auto* s : samples) records.push_back(done.at(s->index));
  return records;
}

std::vector<const Sample*> all_of(const std::vector<Sample>& samples) {
  std::vector<const Sample*> out;
  for (const auto& s : samples) out.push_back(&s);
  return out;
}

json encode_detection(const DetectionRecord& r) {
  return {{"index", r.index},
          {"label", verdict_name(r.label)},
          {"predicted", verdict_name(r.predicted)}};
}

DetectionRecord decode_detection(const json& j) {
  return {j.at("index").get<std::size_t>(), verdict_from(j.at("label")),
          verdict_from(j.at("predicted"))};
}

json encode_modification(const ModificationRecord& r) {
  return {{"index", r.index},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"toxic_after", r.toxic_after},
          {"revised_text", r.revised_text}};
}

ModificationRecord decode_modification(const json& j) {
  return {j.at("index").get<std::size_t>(), j.at("iterations").get<int>(),
          j.at("converged").get<bool>(), j.at("toxic_after").get<bool>(),
          j.value("revised_text", "")};
}

json encode_baseline(const BaselineRecord& r) {
  return {{"index", r.index}, {"label", verdict_name(r.label)}, {"score", r.score}};
}

BaselineRecord decode_baseline(const json& j) {
  return {j.at("index").get<std::size_t>(), verdict_from(j.at("label")),
          j.at("score").get<double>()};
}

void flatten(const json& j, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& rows) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, rows);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      flatten(j[i], prefix + "." + std::to_string(i), rows);
    }
  } else {
    rows.emplace_back(prefix, j.is_string() ? j.get<std::string>() : j.dump());
  }
}

}  // namespace

json DetectionMetrics::to_json() const {
  return {{"total", total},
          {"correct", correct},
          {"accuracy", accuracy},
          {"labelled_toxic", labelled_toxic},
          {"labelled_nontoxic", labelled_nontoxic},
          {"confusion",
           {{"true_toxic", true_toxic},
            {"false_toxic", false_toxic},
            {"true_nontoxic", true_nontoxic},
            {"false_nontoxic", false_nontoxic}}}};
}

std::string DetectionMetrics::table() const {
  std::ostringstream ss;
  ss << "samples   " << total << " (" << labelled_toxic << " toxic, " << labelled_nontoxic
     << " nontoxic)\n"
     << "accuracy  " << fixed(accuracy) << " (" << correct << "/" << total << ")\n"
     << "\n"
     << "                 predicted toxic  predicted nontoxic\n"
     << "label toxic      " << std::setw(15) << true_toxic << "  " << std::setw(18)
     << false_nontoxic << "\n"
     << "label nontoxic   " << std::setw(15) << false_toxic << "  " << std::setw(18)
     << true_nontoxic << "\n";
  return ss.str();
}

DetectionMetrics fold_detection(const std::vector<DetectionRecord>& records) {
  DetectionMetrics m;
  for (const auto& r : records) {
    ++m.total;
    const bool toxic = r.label == Verdict::Toxic;
    const bool predicted_toxic = r.predicted == Verdict::Toxic;
    (toxic ? m.labelled_toxic : m.labelled_nontoxic)++;
    if (toxic && predicted_toxic) ++m.true_toxic;
    if (!toxic && predicted_toxic) ++m.false_toxic;
    if (!toxic && !predicted_toxic) ++m.true_nontoxic;
    if (toxic && !predicted_toxic) ++m.false_nontoxic;
  }
  m.correct = m.true_toxic + m.true_nontoxic;
  m.accuracy = m.total ? static_cast<double>(m.correct) / static_cast<double>(m.total) : 0.0;
  return m;
}

DetectionMetrics eval_detection(const std::vector<Sample>& samples,
                                const SampleDetector& detector, const EvalOptions& options) {
  std::optional<fs::path> file;
  if (options.out_dir) file = *options.out_dir / "detect_results.jsonl";
  const auto records = run_persisted<DetectionRecord>(
      all_of(samples),
      [&](const Sample& s) { return DetectionRecord{s.index, s.label, detector(s)}; }, file,
      options.workers, options.resume, encode_detection, decode_detection);
  const auto metrics = fold_detection(records);
  if (options.out_dir) write_report(*options.out_dir, "detect_report", metrics.to_json(), metrics.table());
  return metrics;
}

std::vector<DetectionRecord> load_detection_records(const fs::path& path) {
  std::vector<DetectionRecord> out;
  for (const auto& line : read_lines(path)) out.push_back(decode_detection(json::parse(line)));
  return out;
}

json DetoxMetrics::to_json() const {
  return {{"toxic_before", toxic_before},
          {"toxic_after", toxic_after},
          {"detox_rate", detox_rate},
          {"non_converged", non_converged},
          {"mean_iterations", mean_iterations}};
}

std::string DetoxMetrics::table() const {
  std::ostringstream ss;
  ss << "toxic before     " << toxic_before << "\n"
     << "toxic after      " << toxic_after << "\n"
     << "detox rate       " << fixed(detox_rate) << "\n"
     << "non-converged    " << non_converged << "\n"
     << "mean iterations  " << fixed(mean_iterations, 2) << "\n";
  return ss.str();
}

DetoxMetrics fold_modification(const std::vector<ModificationRecord>& records) {
  DetoxMetrics m;
  long total_iterations = 0;
  for (const auto& r : records) {
    ++m.toxic_before;
    if (r.toxic_after) ++m.toxic_after;
    if (!r.converged) ++m.non_converged;
    total_iterations += r.iterations;
  }
  if (m.toxic_before) {
    const auto n = static_cast<double>(m.toxic_before);
    m.detox_rate = static_cast<double>(m.toxic_before - m.toxic_after) / n;
    m.mean_iterations = static_cast<double>(total_iterations) / n;
  }
  return m;
}

DetoxMetrics eval_modification(const std::vector<Sample>& samples,
                               const SampleModifier& modifier, const EvalOptions& options) {
  std::vector<const Sample*> toxic;
  for (const auto& s : samples) {
    if (s.label == Verdict::Toxic) toxic.push_back(&s);
  }
  std::optional<fs::path> file;
  if (options.out_dir) file = *options.out_dir / "modify_results.jsonl";
  const auto records = run_persisted<ModificationRecord>(
      toxic,
      [&](const Sample& s) {
        const auto r = modifier(s);
        return ModificationRecord{s.index, r.iterations, r.converged, r.final_detection.toxic(),
                                  r.revised_text};
      },
      file, options.workers, options.resume, encode_modification, decode_modification);
  const auto metrics = fold_modification(records);
  if (options.out_dir) write_report(*options.out_dir, "modify_report", metrics.to_json(), metrics.table());
  return metrics;
}

std::vector<ModificationRecord> load_modification_records(const fs::path& path) {
  std::vector<ModificationRecord> out;
  for (const auto& line : read_lines(path)) {
    out.push_back(decode_modification(json::parse(line)));
  }
  return out;
}

DetectionMetrics fold_baseline(const std::vector<BaselineRecord>& records, double threshold) {
  std::vector<DetectionRecord> detections;
  detections.reserve(records.size());
  for (const auto& r : records) {
    detections.push_back({r.index, r.label, threshold_label(r.score, threshold)});
  }
  return fold_detection(detections);
}

json BaselineReport::to_json() const {
  json sweep_json = json::array();
  for (const auto& [t, m] : sweep) {
    sweep_json.push_back({{"threshold", t}, {"accuracy", m.accuracy}, {"correct", m.correct}});
  }
  return {{"threshold", threshold}, {"metrics", metrics.to_json()}, {"sweep", sweep_json}};
}

std::string BaselineReport::table() const {
  std::ostringstream ss;
  ss << "rule: toxic iff score > " << fixed(threshold, 2) << "\n" << metrics.table() << "\n"
     << "threshold  accuracy\n";
  for (const auto& [t, m] : sweep) ss << fixed(t, 2) << "       " << fixed(m.accuracy) << "\n";
  return ss.str();
}

BaselineReport eval_threshold_baseline(const std::vector<Sample>& samples,
                                       const ScoreProvider& scores, double threshold,
                                       const EvalOptions& options, std::vector<double> sweep) {
  std::optional<fs::path> file;
  if (options.out_dir) file = *options.out_dir / "baseline_results.jsonl";
  const auto records = run_persisted<BaselineRecord>(
      all_of(samples),
      [&](const Sample& s) { return BaselineRecord{s.index, s.label, scores(s)}; }, file,
      options.workers, options.resume, encode_baseline, decode_baseline);

  BaselineReport report;
  report.threshold = threshold;
  report.metrics = fold_baseline(records, threshold);
  for (double t : sweep) report.sweep.emplace_back(t, fold_baseline(records, t));
  if (options.out_dir) {
    write_report(*options.out_dir, "baseline_report", report.to_json(), report.table());
  }
  return report;
}

void write_report(const fs::path& out_dir, const std::string& name, const json& report,
                  const std::string& table) {
  fs::create_directories(out_dir);
  std::ofstream(out_dir / (name + ".json")) << report.dump(2) << '\n';
  std::ofstream(out_dir / (name + ".txt")) << table;
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(report, "", rows);
  std::ofstream csv(out_dir / (name + ".csv"));
  csv << "metric,value\n";
  for (const auto& [k, v] : rows) csv << csv_row({k, v}) << '\n';
}

}  // namespace demod
