#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pestbench/expert_system.hpp"
#include "pestbench/knowledge_base.hpp"
#include "pestbench/rng.hpp"

namespace pestbench {

struct Scenario {
  std::string scenario_id;
  std::string pest;
  std::string crop;
  std::string density_text;  // e.g. "12 per plant", "40% of tillers infested"
  Observation observation;
  double temperature_celsius = 0.0;
  double latitude = 0.0;
  int label = 0;  // 1 = action required

  bool operator==(const Scenario&) const;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct IntInterval {
  int lo = 0;
  int hi = 0;
};

struct GenerationConfig {
  std::uint64_t seed = 42;
  int samples_per_pest_per_class = 1;
  Interval temperature_range_celsius{5.0, 30.0};
  Interval latitude_range_degrees{35.0, 60.0};
  IntInterval true_density_offset_range{1, 10};
  IntInterval false_density_offset_range{1, 10};

  void validate() const;  // throws ConfigError
};

struct DensityPair {
  DensityThreshold true_density;   // strictly above the threshold
  DensityThreshold false_density;  // below the threshold, clamped at zero
};

// Draws the true offset, then the false offset, from the given ranges.
DensityPair generate_densities(const DensityThreshold& threshold, Rng& rng,
                               IntInterval true_offset_range = {1, 10},
                               IntInterval false_offset_range = {1, 10});

// Builds the balanced labeled scenario set: per pest, one positive candidate
// (affected crop at the true density) and up to three negative candidates
// (affected crop at the false density, unaffected crop at either density),
// then samples_per_pest_per_class picks per class.
//
// Draw order, per pest in normalized-name order: true offset, false offset,
// affected-crop pick, unaffected-crop pick, negative candidate pick per
// negative sample, then temperature and latitude per scenario (positives
// before negatives). Changing this order invalidates generated fixtures.
// Throws NoUnaffectedCropsError when a pest has no usable negative candidate.
std::vector<Scenario> generate_scenarios(const KnowledgeBase& kb, const GenerationConfig& config);

nlohmann::json to_json(const Scenario& scenario);
Scenario scenario_from_json(const nlohmann::json& doc, const std::string& context);

void write_scenarios(const std::vector<Scenario>& scenarios, const std::string& path);
std::vector<Scenario> read_scenarios(const std::string& path);

}  // namespace pestbench
