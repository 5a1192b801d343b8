#include "pestbench/metrics.hpp"

#include <array>
#include <cmath>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "pestbench/errors.hpp"
#include "pestbench/rng.hpp"
#include "support/reported_rows.hpp"

using namespace pestbench;
using pestbench::testutil::kReportedRows;
using pestbench::testutil::ReportedRow;
using nlohmann::json;

namespace {

JudgeScores make_sample(std::optional<int> verdict,
                        std::optional<std::array<double, 6>> quality) {
  JudgeScores scores;
  scores.judge_model = "judge";
  scores.action_verdict = verdict;
  scores.verdict_transcript.parsed = verdict.has_value();
  if (quality.has_value()) {
    QualityScores map;
    for (Dimension dimension : kAllDimensions) {
      map[dimension] = (*quality)[static_cast<std::size_t>(dimension)];
    }
    scores.quality = map;
    scores.quality_transcript.parsed = true;
  }
  return scores;
}

}  // namespace

TEST_CASE("confusion counts the four quadrants") {
  std::vector<int> perfect_verdicts(50, 1);
  std::vector<int> labels(50, 1);
  for (int i = 25; i < 50; ++i) {
    perfect_verdicts[i] = 0;
    labels[i] = 0;
  }
  ConfusionMatrix perfect = confusion(perfect_verdicts, labels);
  CHECK(perfect == ConfusionMatrix{25, 25, 0, 0});

  ConfusionMatrix all_ones = confusion(std::vector<int>(50, 1), labels);
  CHECK(all_ones == ConfusionMatrix{25, 0, 25, 0});

  CHECK(confusion({}, {}) == ConfusionMatrix{0, 0, 0, 0});
  CHECK(confusion({1, 0, 1, 0}, {1, 1, 0, 0}) == ConfusionMatrix{1, 1, 1, 1});
}

TEST_CASE("confusion rejects misaligned vectors") {
  CHECK_THROWS_AS(confusion({1, 0}, {1}), LengthMismatchError);
  CHECK_THROWS_AS(confusion({}, {0}), LengthMismatchError);
}

TEST_CASE("confusion matches a per-sample oracle on random vectors") {
  Rng rng(314159);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = static_cast<std::size_t>(rng.uniform_int(0, 80));
    std::vector<int> verdicts(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      verdicts[i] = static_cast<int>(rng.uniform_int(0, 1));
      labels[i] = static_cast<int>(rng.uniform_int(0, 1));
    }
    ConfusionMatrix oracle;
    for (std::size_t i = 0; i < n; ++i) {
      if (verdicts[i] == 1 && labels[i] == 1) oracle.tp++;
      if (verdicts[i] == 0 && labels[i] == 0) oracle.tn++;
      if (verdicts[i] == 1 && labels[i] == 0) oracle.fp++;
      if (verdicts[i] == 0 && labels[i] == 1) oracle.fn++;
    }
    CHECK(confusion(verdicts, labels) == oracle);
    CHECK(oracle.total() == static_cast<long>(n));
  }
}

TEST_CASE("classification metrics reproduce every reported row after rounding") {
  for (const ReportedRow& row : kReportedRows) {
    CAPTURE(row.model);
    CAPTURE(to_string(row.strategy));
    ClassificationMetrics metrics =
        classification_metrics({row.tp, row.tn, row.fp, row.fn});
    CHECK(round2(metrics.accuracy) == doctest::Approx(row.accuracy).epsilon(1e-12));
    CHECK(round2(metrics.precision) == doctest::Approx(row.precision).epsilon(1e-12));
    CHECK(round2(metrics.recall) == doctest::Approx(row.recall).epsilon(1e-12));
    CHECK(round2(metrics.f1) == doctest::Approx(row.f1).epsilon(1e-12));
  }
}

TEST_CASE("classification metrics apply the zero-denominator conventions") {
  ClassificationMetrics all_negative = classification_metrics({0, 10, 0, 0});
  CHECK(all_negative.accuracy == 1.0);
  CHECK(all_negative.precision == 0.0);
  CHECK(all_negative.recall == 0.0);
  CHECK(all_negative.f1 == 0.0);

  ClassificationMetrics no_positive_verdicts = classification_metrics({0, 5, 0, 5});
  CHECK(no_positive_verdicts.precision == 0.0);
  CHECK(no_positive_verdicts.recall == 0.0);
  CHECK(no_positive_verdicts.f1 == 0.0);

  CHECK_THROWS_AS(classification_metrics({0, 0, 0, 0}), EmptyCellError);
}

TEST_CASE("f1 equals the harmonic-mean formula whenever it is defined") {
  Rng rng(271828);
  for (int trial = 0; trial < 500; ++trial) {
    ConfusionMatrix cm{static_cast<long>(rng.uniform_int(0, 30)),
                       static_cast<long>(rng.uniform_int(0, 30)),
                       static_cast<long>(rng.uniform_int(0, 30)),
                       static_cast<long>(rng.uniform_int(0, 30))};
    if (cm.total() == 0) continue;
    ClassificationMetrics metrics = classification_metrics(cm);
    if (metrics.precision + metrics.recall > 0.0) {
      double harmonic = 2.0 * metrics.precision * metrics.recall /
                        (metrics.precision + metrics.recall);
      CHECK(std::abs(metrics.f1 - harmonic) < 1e-12);
    } else {
      CHECK(metrics.f1 == 0.0);
    }
  }
}

TEST_CASE("round2 rounds half to even") {
  CHECK(round2(0.625) == 0.62);
  CHECK(round2(0.635) == 0.64);
  CHECK(round2(0.65625) == 0.66);
  CHECK(round2(0.5128205128205128) == 0.51);
  CHECK(round2(2.675) == 2.68);  // the float product lands on 267.5; 268 is even
  CHECK(round2(37.22) == 37.22);
  CHECK(round2(0.0) == 0.0);
}

TEST_CASE("weights validate sums and signs") {
  EvalWeights defaults = EvalWeights::defaults();
  CHECK_NOTHROW(defaults.validate());
  CHECK(defaults.accuracy == 0.4);
  for (double weight : defaults.quality) CHECK(weight == 0.1);

  EvalWeights short_sum = defaults;
  short_sum.accuracy = 0.3;
  CHECK_THROWS_AS(short_sum.validate(), WeightSumInvalidError);

  EvalWeights negative = defaults;
  negative.quality[2] = -0.1;
  CHECK_THROWS_AS(negative.validate(), WeightSumInvalidError);

  EvalWeights rebalanced;
  rebalanced.quality = {0.05, 0.05, 0.05, 0.05, 0.05, 0.05};
  rebalanced.accuracy = 0.7;
  CHECK_NOTHROW(rebalanced.validate());

  CHECK_THROWS_AS(
      final_score({5, 5, 5, 5, 5, 5}, 0.5, short_sum), WeightSumInvalidError);
}

TEST_CASE("final score reproduces every reported row") {
  EvalWeights weights = EvalWeights::defaults();
  for (const ReportedRow& row : kReportedRows) {
    CAPTURE(row.model);
    CAPTURE(to_string(row.strategy));
    double accuracy = classification_metrics({row.tp, row.tn, row.fp, row.fn}).accuracy;
    double score = final_score(row.means, accuracy, weights);
    CHECK(std::abs(score - row.final_score) <= 0.01);
    CHECK(round2(score) == doctest::Approx(row.final_score).epsilon(1e-12));
  }
}

TEST_CASE("final score hits its bounds") {
  EvalWeights weights = EvalWeights::defaults();
  CHECK(final_score({10, 10, 10, 10, 10, 10}, 1.0, weights) ==
        doctest::Approx(100.0).epsilon(1e-12));
  CHECK(final_score({0, 0, 0, 0, 0, 0}, 0.0, weights) == 0.0);
}

TEST_CASE("quality contribution is linear in the means") {
  EvalWeights weights = EvalWeights::defaults();
  Rng rng(161803);
  for (int trial = 0; trial < 200; ++trial) {
    std::array<double, 6> means{};
    for (double& mean : means) mean = rng.uniform_real(0.0, 10.0);
    double c = rng.uniform_real(0.0, 1.0);
    std::array<double, 6> scaled = means;
    for (double& mean : scaled) mean *= c;
    double quality_part = final_score(means, 0.0, weights);
    double scaled_part = final_score(scaled, 0.0, weights);
    CHECK(std::abs(scaled_part - c * quality_part) < 1e-9);
  }
}

TEST_CASE("metrics stay inside their ranges on random inputs") {
  Rng rng(141421);
  EvalWeights weights = EvalWeights::defaults();
  for (int trial = 0; trial < 300; ++trial) {
    ConfusionMatrix cm{static_cast<long>(rng.uniform_int(0, 40)),
                       static_cast<long>(rng.uniform_int(0, 40)),
                       static_cast<long>(rng.uniform_int(0, 40)),
                       static_cast<long>(rng.uniform_int(0, 40))};
    if (cm.total() == 0) continue;
    ClassificationMetrics metrics = classification_metrics(cm);
    for (double value : {metrics.accuracy, metrics.precision, metrics.recall, metrics.f1}) {
      CHECK(value >= 0.0);
      CHECK(value <= 1.0);
    }
    std::array<double, 6> means{};
    for (double& mean : means) mean = rng.uniform_real(1.0, 10.0);
    double score = final_score(means, metrics.accuracy, weights);
    CHECK(score >= 0.0);
    CHECK(score <= 100.0 + 1e-9);
  }
}

TEST_CASE("aggregate_cell reproduces a reported row from per-sample scores") {
  EvalWeights weights = EvalWeights::defaults();
  for (const ReportedRow& row : kReportedRows) {
    CAPTURE(row.model);
    CAPTURE(to_string(row.strategy));

    std::vector<JudgeScores> scores;
    std::vector<int> labels;
    auto push = [&](int verdict, int label, long count) {
      for (long i = 0; i < count; ++i) {
        scores.push_back(make_sample(verdict, row.means));
        labels.push_back(label);
      }
    };
    push(1, 1, row.tp);
    push(0, 1, row.fn);
    push(1, 0, row.fp);
    push(0, 0, row.tn);

    RunMetrics metrics = aggregate_cell(row.model, row.strategy, scores, labels, weights);
    CHECK(metrics.cm == ConfusionMatrix{row.tp, row.tn, row.fp, row.fn});
    CHECK(metrics.judged_samples == 50);
    CHECK(metrics.quality_samples == 50);
    CHECK(metrics.excluded_samples == 0);
    CHECK(round2(metrics.accuracy) == doctest::Approx(row.accuracy).epsilon(1e-12));
    CHECK(round2(metrics.precision) == doctest::Approx(row.precision).epsilon(1e-12));
    CHECK(round2(metrics.recall) == doctest::Approx(row.recall).epsilon(1e-12));
    CHECK(round2(metrics.f1) == doctest::Approx(row.f1).epsilon(1e-12));
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(metrics.quality_means[i] == doctest::Approx(row.means[i]).epsilon(1e-12));
    }
    CHECK(std::abs(metrics.final_score - row.final_score) <= 0.01);
  }
}

TEST_CASE("aggregate_cell excludes judge-failed samples from the right sums") {
  EvalWeights weights = EvalWeights::defaults();
  std::array<double, 6> nines = {9, 9, 9, 9, 9, 9};
  std::array<double, 6> fives = {5, 5, 5, 5, 5, 5};

  SUBCASE("two identical samples average to themselves") {
    std::vector<JudgeScores> scores = {make_sample(1, nines), make_sample(1, nines)};
    RunMetrics metrics =
        aggregate_cell("m", Strategy::ZeroShot, scores, {1, 1}, weights);
    for (double mean : metrics.quality_means) CHECK(mean == 9.0);
    CHECK(metrics.accuracy == 1.0);
    CHECK(metrics.excluded_samples == 0);
  }

  SUBCASE("a fully failed sample is excluded everywhere and counted once") {
    std::vector<JudgeScores> scores = {make_sample(1, nines), make_sample(1, fives),
                                       make_sample(std::nullopt, std::nullopt)};
    RunMetrics metrics =
        aggregate_cell("m", Strategy::ZeroShot, scores, {1, 1, 0}, weights);
    CHECK(metrics.excluded_samples == 1);
    CHECK(metrics.judged_samples == 2);
    CHECK(metrics.quality_samples == 2);
    for (double mean : metrics.quality_means) CHECK(mean == 7.0);
    CHECK(metrics.cm == ConfusionMatrix{2, 0, 0, 0});
  }

  SUBCASE("a quality-only failure still feeds the confusion matrix") {
    std::vector<JudgeScores> scores = {make_sample(1, nines),
                                       make_sample(0, std::nullopt)};
    RunMetrics metrics =
        aggregate_cell("m", Strategy::ZeroShot, scores, {1, 0}, weights);
    CHECK(metrics.excluded_samples == 1);
    CHECK(metrics.judged_samples == 2);
    CHECK(metrics.quality_samples == 1);
    CHECK(metrics.cm == ConfusionMatrix{1, 1, 0, 0});
    for (double mean : metrics.quality_means) CHECK(mean == 9.0);
  }

  SUBCASE("a verdict-only failure still feeds the means") {
    std::vector<JudgeScores> scores = {make_sample(1, nines),
                                       make_sample(std::nullopt, fives)};
    RunMetrics metrics =
        aggregate_cell("m", Strategy::ZeroShot, scores, {1, 0}, weights);
    CHECK(metrics.excluded_samples == 1);
    CHECK(metrics.judged_samples == 1);
    CHECK(metrics.quality_samples == 2);
    for (double mean : metrics.quality_means) CHECK(mean == 7.0);
    CHECK(metrics.cm == ConfusionMatrix{1, 0, 0, 0});
  }
}

TEST_CASE("aggregate_cell rejects misalignment and empty cells") {
  EvalWeights weights = EvalWeights::defaults();
  CHECK_THROWS_AS(
      aggregate_cell("m", Strategy::ZeroShot, {make_sample(1, std::nullopt)}, {1, 0},
                     weights),
      LengthMismatchError);
  std::vector<JudgeScores> no_verdicts = {make_sample(std::nullopt, std::nullopt)};
  CHECK_THROWS_AS(aggregate_cell("m", Strategy::ZeroShot, no_verdicts, {1}, weights),
                  EmptyCellError);
}

TEST_CASE("run metrics serialize and parse back") {
  EvalWeights weights = EvalWeights::defaults();
  const ReportedRow& row = kReportedRows[6];
  std::vector<JudgeScores> scores;
  std::vector<int> labels;
  for (long i = 0; i < row.tp; ++i) scores.push_back(make_sample(1, row.means)), labels.push_back(1);
  for (long i = 0; i < row.fn; ++i) scores.push_back(make_sample(0, row.means)), labels.push_back(1);
  for (long i = 0; i < row.fp; ++i) scores.push_back(make_sample(1, row.means)), labels.push_back(0);
  for (long i = 0; i < row.tn; ++i) scores.push_back(make_sample(0, row.means)), labels.push_back(0);

  RunMetrics metrics = aggregate_cell(row.model, row.strategy, scores, labels, weights);
  json encoded = to_json(metrics);
  RunMetrics decoded = run_metrics_from_json(encoded);
  CHECK(decoded.model == metrics.model);
  CHECK(decoded.strategy == metrics.strategy);
  CHECK(decoded.cm == metrics.cm);
  CHECK(decoded.accuracy == metrics.accuracy);
  CHECK(decoded.f1 == metrics.f1);
  CHECK(decoded.quality_means == metrics.quality_means);
  CHECK(decoded.final_score == metrics.final_score);
  CHECK(to_json(decoded) == encoded);

  json missing = encoded;
  missing.erase("confusion");
  CHECK_THROWS_AS(run_metrics_from_json(missing), SchemaError);
  json bad_strategy = encoded;
  bad_strategy["strategy"] = "chain-of-thought";
  CHECK_THROWS_AS(run_metrics_from_json(bad_strategy), SchemaError);
  CHECK_THROWS_AS(run_metrics_from_json(json::array()), SchemaError);
}
