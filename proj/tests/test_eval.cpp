#include <gtest/gtest.h>

#include <atomic>
#include <fstream>

#include "demod/csv.hpp"
#include "demod/dataset.hpp"
#include "demod/error.hpp"
#include "demod/eval.hpp"
#include "support.hpp"

namespace demod {
namespace {

using testing::fixture;

TEST(Csv, QuotesCommasAndNewlines) {
  const auto rows = parse_csv("\xEF\xBB\xBFlabel,text\r\n1,\"a, \"\"b\"\"\nc\"\n0,plain\n");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0][0], "label");
  EXPECT_EQ(rows[1][1], "a, \"b\"\nc");
  EXPECT_EQ(rows[2][1], "plain");
  EXPECT_EQ(csv_row({"x", "a,b", "q\""}), "x,\"a,b\",\"q\"\"\"");
  EXPECT_THROW(parse_csv("a,\"open"), Error);
}

TEST(Dataset, LabelsTopicsScores) {
  const auto s = parse_dataset(
      "text,label,topic,score\nhello there,toxic,T,0.9\nbye,N,,\nok,non-offensive,, \n");
  ASSERT_EQ(s.size(), 3u);
  EXPECT_EQ(s[0].label, Verdict::Toxic);
  EXPECT_EQ(s[0].topic, "T");
  EXPECT_EQ(s[0].score, 0.9);
  EXPECT_FALSE(s[1].topic);
  EXPECT_FALSE(s[1].score);
  EXPECT_EQ(s[2].label, Verdict::Nontoxic);
  EXPECT_EQ(s[2].index, 2u);
}

TEST(Dataset, Errors) {
  for (const char* bad : {"", "label,text\n", "label\n1\n", "label,text\nmaybe,x\n",
                          "label,text,score\n1,x,high\n"}) {
    try {
      parse_dataset(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::DatasetParse) << bad;
    }
  }
  EXPECT_THROW(load_dataset("/nonexistent/file.csv"), Error);
}

TEST(Metrics, FoldDetectionHandCounts) {
  const auto T = Verdict::Toxic;
  const auto N = Verdict::Nontoxic;
  const auto m = fold_detection({{0, T, T}, {1, T, N}, {2, N, N}, {3, N, T}, {4, T, T}});
  EXPECT_EQ(m.total, 5u);
  EXPECT_EQ(m.correct, 3u);
  EXPECT_DOUBLE_EQ(m.accuracy, 0.6);
  EXPECT_EQ(m.true_toxic, 2u);
  EXPECT_EQ(m.false_nontoxic, 1u);
  EXPECT_EQ(m.false_toxic, 1u);
  EXPECT_EQ(m.true_nontoxic, 1u);
  EXPECT_EQ(m.labelled_toxic, 3u);
}

TEST(Metrics, DetoxRateFromCounts) {
  // 3211 toxic inputs of which 170 stay toxic.
  std::vector<ModificationRecord> records;
  for (std::size_t i = 0; i < 3211; ++i) records.push_back({i, 1, i >= 170, i < 170, "x"});
  const auto m = fold_modification(records);
  EXPECT_EQ(m.toxic_before, 3211u);
  EXPECT_EQ(m.toxic_after, 170u);
  EXPECT_NEAR(m.detox_rate, 0.9470570, 1e-6);
  EXPECT_EQ(m.non_converged, 170u);
  EXPECT_DOUBLE_EQ(m.mean_iterations, 1.0);
}

TEST(Metrics, EmptyFoldsAreZero) {
  EXPECT_EQ(fold_detection({}).accuracy, 0.0);
  EXPECT_EQ(fold_modification({}).detox_rate, 0.0);
}

TEST(Baseline, ScoredFixtureHandComputed) {
  const auto samples = load_dataset(fixture("scored_10.csv"));
  const auto report = eval_threshold_baseline(
      samples, [](const Sample& s) { return *s.score; }, 0.7);
  // > 0.7 is toxic: 0.95 0.71 0.88 right, 0.70 0.40 missed, 0.75 false alarm.
  EXPECT_EQ(report.metrics.correct, 7u);
  EXPECT_DOUBLE_EQ(report.metrics.accuracy, 0.7);
  EXPECT_EQ(report.metrics.true_toxic, 3u);
  EXPECT_EQ(report.metrics.false_nontoxic, 2u);
  EXPECT_EQ(report.metrics.false_toxic, 1u);
  EXPECT_EQ(report.metrics.true_nontoxic, 4u);
  EXPECT_EQ(threshold_label(0.7, 0.7), Verdict::Nontoxic);
  EXPECT_EQ(report.sweep.size(), 5u);
}

TEST(EvalDetection, PersistsAndRecomputes) {
  testing::TempDir dir("evaldet");
  const auto samples = load_dataset(fixture("detect_60.csv"));
  const auto classifier = testing::fixture_classifier();
  const SampleDetector det = [&](const Sample& s) { return classifier->classify(s.text).label; };
  const auto m = eval_detection(samples, det, {dir.path(), 4, false});
  EXPECT_EQ(m.total, 60u);
  EXPECT_EQ(m.accuracy, 1.0);
  const auto records = load_detection_records(dir.path() / "detect_results.jsonl");
  ASSERT_EQ(records.size(), 60u);
  for (std::size_t i = 0; i < records.size(); ++i) EXPECT_EQ(records[i].index, i);
  EXPECT_EQ(fold_detection(records), m);
  for (const char* ext : {".json", ".txt", ".csv"}) {
    EXPECT_TRUE(std::filesystem::exists(dir.path() / (std::string("detect_report") + ext)));
  }
}

TEST(EvalDetection, ResumeMatchesUninterruptedRun) {
  const auto samples = load_dataset(fixture("detect_60.csv"));
  const auto classifier = testing::fixture_classifier();
  testing::TempDir full("full");
  testing::TempDir part("part");
  const SampleDetector det = [&](const Sample& s) { return classifier->classify(s.text).label; };
  const auto expected = eval_detection(samples, det, {full.path(), 3, false});

  std::atomic<int> seen{0};
  const SampleDetector flaky = [&](const Sample& s) {
    if (s.index == 25) throw Error(ErrorCode::Transport, "connection reset");
    ++seen;
    return det(s);
  };
  EXPECT_THROW(eval_detection(samples, flaky, {part.path(), 1, false}), Error);
  EXPECT_EQ(load_detection_records(part.path() / "detect_results.jsonl").size(), 25u);

  std::atomic<int> resumed_calls{0};
  const SampleDetector counting = [&](const Sample& s) {
    ++resumed_calls;
    return det(s);
  };
  const auto resumed = eval_detection(samples, counting, {part.path(), 3, true});
  EXPECT_EQ(resumed_calls.load(), 35);
  EXPECT_EQ(resumed, expected);
  EXPECT_EQ(load_detection_records(part.path() / "detect_results.jsonl"),
            load_detection_records(full.path() / "detect_results.jsonl"));
}

TEST(EvalModification, OnlyToxicSamples) {
  const auto samples = parse_dataset("label,text\n1,bad one\n0,good one\n1,bad two\n");
  int calls = 0;
  const auto m = eval_modification(samples, [&](const Sample& s) {
    ++calls;
    ModificationResult r;
    r.revised_text = s.text;
    r.iterations = 2;
    r.converged = s.text == "bad one";
    r.final_detection =
        DetectionResult(r.converged ? Verdict::Nontoxic : Verdict::Toxic, {}, "", "", s.text);
    return r;
  });
  EXPECT_EQ(calls, 2);
  EXPECT_EQ(m.toxic_before, 2u);
  EXPECT_EQ(m.toxic_after, 1u);
  EXPECT_DOUBLE_EQ(m.detox_rate, 0.5);
  EXPECT_DOUBLE_EQ(m.mean_iterations, 2.0);
}

}  // namespace
}  // namespace demod
