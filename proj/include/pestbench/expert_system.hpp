#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "pestbench/knowledge_base.hpp"

namespace pestbench {

struct Observation {
  std::string pest;
  std::string crop;
  double density_value = 0.0;
  std::string density_metric;
  bool density_is_percentage = false;

  bool operator==(const Observation&) const = default;
};

// Why no action was or was not needed, reported for the first failing
// condition in the order crop, metric, value.
enum class Rationale { CropNotAffected, MetricMismatch, BelowThreshold, ThresholdMet };

std::string_view to_string(Rationale rationale);

struct Decision {
  bool action_required = false;
  std::string advice;  // non-empty iff action_required
  Rationale rationale = Rationale::CropNotAffected;

  bool operator==(const Decision&) const = default;
};

// The factual oracle: action is required iff the crop is affected by the
// pest, the observed metric matches the threshold's metric, and the observed
// density reaches the threshold. Pure function of its inputs.
// Throws UnknownPestError.
Decision decide(const KnowledgeBase& kb, const Observation& obs);

nlohmann::json to_json(const Decision& decision);

}  // namespace pestbench
