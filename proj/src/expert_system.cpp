#include "pestbench/expert_system.hpp"

#include <algorithm>

#include "pestbench/text.hpp"

namespace pestbench {

std::string_view to_string(Rationale rationale) {
  switch (rationale) {
    case Rationale::CropNotAffected: return "CropNotAffected";
    case Rationale::MetricMismatch: return "MetricMismatch";
    case Rationale::BelowThreshold: return "BelowThreshold";
    case Rationale::ThresholdMet: return "ThresholdMet";
  }
  return "unknown";
}

Decision decide(const KnowledgeBase& kb, const Observation& obs) {
  const PestRecord& record = kb.lookup(obs.pest);

  std::string crop = normalize_name(obs.crop);
  bool affected = std::any_of(record.affected_crops.begin(), record.affected_crops.end(),
                              [&crop](const std::string& c) { return normalize_name(c) == crop; });
  if (!affected) return {false, "", Rationale::CropNotAffected};

  if (obs.density_metric != record.threshold.metric ||
      obs.density_is_percentage != record.threshold.is_percentage) {
    return {false, "", Rationale::MetricMismatch};
  }

  if (obs.density_value < record.threshold.value) {
    return {false, "", Rationale::BelowThreshold};
  }
  return {true, record.management_advice, Rationale::ThresholdMet};
}

nlohmann::json to_json(const Decision& decision) {
  nlohmann::json out;
  out["action_required"] = decision.action_required;
  out["rationale"] = to_string(decision.rationale);
  if (decision.action_required) out["advice"] = decision.advice;
  return out;
}

}  // namespace pestbench
