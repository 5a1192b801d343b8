#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "pestbench/judge.hpp"
#include "pestbench/prompts.hpp"

namespace pestbench {

struct ConfusionMatrix {
  long tp = 0;
  long tn = 0;
  long fp = 0;
  long fn = 0;

  long total() const { return tp + tn + fp + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

// Counts verdict/label pairs: tp (1,1), tn (0,0), fp (1,0), fn (0,1).
// Throws LengthMismatchError when the vectors differ in size.
ConfusionMatrix confusion(const std::vector<int>& verdicts, const std::vector<int>& labels);

struct ClassificationMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// accuracy = (tp+tn)/total, precision = tp/(tp+fp), recall = tp/(tp+fn),
// f1 = 2pr/(p+r), each defined as 0 when its denominator is 0 (f1 is
// computed as 2tp/(2tp+fp+fn), the same quantity in exact arithmetic).
// Throws EmptyCellError when the matrix is all zeros.
ClassificationMetrics classification_metrics(const ConfusionMatrix& cm);

struct EvalWeights {
  std::array<double, 6> quality{};  // canonical dimension order
  double accuracy = 0.0;

  static EvalWeights defaults();  // six 0.1 entries and 0.4 for accuracy
  // Throws WeightSumInvalidError unless all weights are >= 0 and the sum
  // is 1 within 1e-9.
  void validate() const;

  bool operator==(const EvalWeights&) const = default;
};

// Sum of w_i * (mean_i * 10) plus w_acc * (accuracy * 100); with default
// weights this is 0.1 * (sum of the six means) * 10 + 0.4 * accuracy * 100.
double final_score(const std::array<double, 6>& quality_means, double accuracy,
                   const EvalWeights& weights);

// Round to 2 decimals with ties to even, the convention behind the
// reported tables (0.625 -> 0.62).
double round2(double value);

struct RunMetrics {
  std::string model;
  Strategy strategy = Strategy::ZeroShot;
  ConfusionMatrix cm;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::array<double, 6> quality_means{};  // canonical dimension order
  double final_score = 0.0;
  long excluded_samples = 0;  // entries with at least one judge-failed side
  long judged_samples = 0;    // entries that fed the confusion matrix
  long quality_samples = 0;   // entries that fed the quality means
};

// Aggregates one model x strategy cell. scores[i] pairs with labels[i];
// entries without a verdict are left out of the confusion matrix and
// entries without quality are left out of the means (0 when no entry has
// quality). Throws LengthMismatchError and EmptyCellError (no verdicts).
RunMetrics aggregate_cell(const std::string& model, Strategy strategy,
                          const std::vector<JudgeScores>& scores,
                          const std::vector<int>& labels, const EvalWeights& weights);

nlohmann::json to_json(const RunMetrics& metrics);
RunMetrics run_metrics_from_json(const nlohmann::json& value);  // throws SchemaError

}  // namespace pestbench
