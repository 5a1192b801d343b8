#include "pestbench/metrics.hpp"

#include <cfenv>
#include <cmath>
#include <cstdlib>

#include "pestbench/errors.hpp"
#include "pestbench/text.hpp"

namespace pestbench {

using nlohmann::json;

ConfusionMatrix confusion(const std::vector<int>& verdicts, const std::vector<int>& labels) {
  if (verdicts.size() != labels.size()) {
    throw LengthMismatchError("confusion needs aligned vectors, got " +
                              std::to_string(verdicts.size()) + " verdicts and " +
                              std::to_string(labels.size()) + " labels");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    if (verdicts[i] == 1) {
      (labels[i] == 1 ? cm.tp : cm.fp) += 1;
    } else {
      (labels[i] == 1 ? cm.fn : cm.tn) += 1;
    }
  }
  return cm;
}

ClassificationMetrics classification_metrics(const ConfusionMatrix& cm) {
  long total = cm.total();
  if (total == 0) throw EmptyCellError("classification metrics over an empty cell");
  ClassificationMetrics metrics;
  metrics.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(total);
  metrics.precision = (cm.tp + cm.fp) > 0
                          ? static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp)
                          : 0.0;
  metrics.recall = (cm.tp + cm.fn) > 0
                       ? static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn)
                       : 0.0;
  long f1_denominator = 2 * cm.tp + cm.fp + cm.fn;
  metrics.f1 = f1_denominator > 0
                   ? static_cast<double>(2 * cm.tp) / static_cast<double>(f1_denominator)
                   : 0.0;
  return metrics;
}

EvalWeights EvalWeights::defaults() {
  EvalWeights weights;
  weights.quality.fill(0.1);
  weights.accuracy = 0.4;
  return weights;
}

void EvalWeights::validate() const {
  double sum = accuracy;
  for (double weight : quality) {
    if (weight < 0.0) {
      throw WeightSumInvalidError("quality weight " + format_decimal(weight) +
                                  " is negative");
    }
    sum += weight;
  }
  if (accuracy < 0.0) {
    throw WeightSumInvalidError("accuracy weight " + format_decimal(accuracy) +
                                " is negative");
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw WeightSumInvalidError("weights must sum to 1.0, got " + format_decimal(sum));
  }
}

double final_score(const std::array<double, 6>& quality_means, double accuracy,
                   const EvalWeights& weights) {
  weights.validate();
  double score = weights.accuracy * (accuracy * 100.0);
  for (std::size_t i = 0; i < quality_means.size(); ++i) {
    score += weights.quality[i] * (quality_means[i] * 10.0);
  }
  return score;
}

double round2(double value) {
  std::fesetround(FE_TONEAREST);
  return std::nearbyint(value * 100.0) / 100.0;
}

RunMetrics aggregate_cell(const std::string& model, Strategy strategy,
                          const std::vector<JudgeScores>& scores,
                          const std::vector<int>& labels, const EvalWeights& weights) {
  if (scores.size() != labels.size()) {
    throw LengthMismatchError("aggregate_cell needs aligned vectors, got " +
                              std::to_string(scores.size()) + " scores and " +
                              std::to_string(labels.size()) + " labels");
  }
  weights.validate();

  RunMetrics metrics;
  metrics.model = model;
  metrics.strategy = strategy;

  std::vector<int> verdicts;
  std::vector<int> verdict_labels;
  std::array<double, 6> sums{};
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const JudgeScores& sample = scores[i];
    if (!sample.fully_scored()) metrics.excluded_samples += 1;
    if (sample.action_verdict.has_value()) {
      verdicts.push_back(*sample.action_verdict);
      verdict_labels.push_back(labels[i]);
    }
    if (sample.quality.has_value()) {
      metrics.quality_samples += 1;
      for (const auto& [dimension, value] : *sample.quality) {
        sums[static_cast<std::size_t>(dimension)] += value;
      }
    }
  }

  metrics.cm = confusion(verdicts, verdict_labels);
  metrics.judged_samples = metrics.cm.total();
  ClassificationMetrics classification = classification_metrics(metrics.cm);
  metrics.accuracy = classification.accuracy;
  metrics.precision = classification.precision;
  metrics.recall = classification.recall;
  metrics.f1 = classification.f1;

  if (metrics.quality_samples > 0) {
    for (std::size_t i = 0; i < sums.size(); ++i) {
      metrics.quality_means[i] = sums[i] / static_cast<double>(metrics.quality_samples);
    }
  }

  metrics.final_score = final_score(metrics.quality_means, metrics.accuracy, weights);
  return metrics;
}

json to_json(const RunMetrics& metrics) {
  json quality = json::object();
  for (Dimension dimension : kAllDimensions) {
    quality[std::string(to_string(dimension))] =
        metrics.quality_means[static_cast<std::size_t>(dimension)];
  }
  return json{
      {"accuracy", metrics.accuracy},
      {"confusion",
       json{{"tp", metrics.cm.tp}, {"tn", metrics.cm.tn}, {"fp", metrics.cm.fp},
            {"fn", metrics.cm.fn}}},
      {"excluded_samples", metrics.excluded_samples},
      {"f1", metrics.f1},
      {"final_score", metrics.final_score},
      {"judged_samples", metrics.judged_samples},
      {"model", metrics.model},
      {"precision", metrics.precision},
      {"quality_means", quality},
      {"quality_samples", metrics.quality_samples},
      {"recall", metrics.recall},
      {"strategy", std::string(to_string(metrics.strategy))},
  };
}

RunMetrics run_metrics_from_json(const json& value) {
  if (!value.is_object()) throw SchemaError("run metrics must be an object");
  RunMetrics metrics;
  try {
    metrics.model = value.at("model").get<std::string>();
    metrics.strategy = strategy_from_string(value.at("strategy").get<std::string>());
    const json& cm = value.at("confusion");
    metrics.cm.tp = cm.at("tp").get<long>();
    metrics.cm.tn = cm.at("tn").get<long>();
    metrics.cm.fp = cm.at("fp").get<long>();
    metrics.cm.fn = cm.at("fn").get<long>();
    metrics.accuracy = value.at("accuracy").get<double>();
    metrics.precision = value.at("precision").get<double>();
    metrics.recall = value.at("recall").get<double>();
    metrics.f1 = value.at("f1").get<double>();
    const json& quality = value.at("quality_means");
    for (Dimension dimension : kAllDimensions) {
      metrics.quality_means[static_cast<std::size_t>(dimension)] =
          quality.at(std::string(to_string(dimension))).get<double>();
    }
    metrics.final_score = value.at("final_score").get<double>();
    metrics.excluded_samples = value.at("excluded_samples").get<long>();
    metrics.judged_samples = value.at("judged_samples").get<long>();
    metrics.quality_samples = value.at("quality_samples").get<long>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed run metrics: ") + e.what());
  } catch (const ConfigError& e) {
    throw SchemaError(std::string("malformed run metrics: ") + e.what());
  }
  return metrics;
}

}  // namespace pestbench
