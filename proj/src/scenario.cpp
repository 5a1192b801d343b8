#include "pestbench/scenario.hpp"

#include <algorithm>

#include "pestbench/errors.hpp"
#include "pestbench/jsonl.hpp"
#include "pestbench/text.hpp"

namespace pestbench {

namespace {

Scenario make_scenario(const PestRecord& record, const std::string& crop,
                       const DensityThreshold& density, int label, const std::string& scenario_id,
                       Rng& rng, const GenerationConfig& config) {
  Scenario s;
  s.scenario_id = scenario_id;
  s.pest = record.name;
  s.crop = crop;
  s.density_text = render_density(density);
  s.observation = {record.name, crop, density.value, density.metric, density.is_percentage};
  s.temperature_celsius = rng.uniform_real(config.temperature_range_celsius.lo,
                                           config.temperature_range_celsius.hi);
  s.latitude = rng.uniform_real(config.latitude_range_degrees.lo,
                                config.latitude_range_degrees.hi);
  s.label = label;
  return s;
}

}  // namespace

bool Scenario::operator==(const Scenario& other) const {
  return scenario_id == other.scenario_id && pest == other.pest && crop == other.crop &&
         density_text == other.density_text && observation == other.observation &&
         temperature_celsius == other.temperature_celsius && latitude == other.latitude &&
         label == other.label;
}

void GenerationConfig::validate() const {
  if (samples_per_pest_per_class < 1) {
    throw ConfigError("samples_per_pest_per_class must be at least 1");
  }
  if (temperature_range_celsius.lo > temperature_range_celsius.hi) {
    throw ConfigError("temperature range is empty");
  }
  if (latitude_range_degrees.lo > latitude_range_degrees.hi) {
    throw ConfigError("latitude range is empty");
  }
  for (const auto& [name, range] :
       {std::pair{"true", true_density_offset_range}, {"false", false_density_offset_range}}) {
    if (range.lo < 1 || range.lo > range.hi) {
      throw ConfigError(std::string(name) + " density offset range must be positive and non-empty");
    }
  }
}

DensityPair generate_densities(const DensityThreshold& threshold, Rng& rng,
                               IntInterval true_offset_range, IntInterval false_offset_range) {
  DensityPair out;
  int k_true = rng.uniform_int(true_offset_range.lo, true_offset_range.hi);
  int k_false = rng.uniform_int(false_offset_range.lo, false_offset_range.hi);
  out.true_density = {threshold.value + k_true, threshold.metric, threshold.is_percentage};
  out.false_density = {std::max(0.0, threshold.value - k_false), threshold.metric,
                       threshold.is_percentage};
  return out;
}

std::vector<Scenario> generate_scenarios(const KnowledgeBase& kb, const GenerationConfig& config) {
  config.validate();
  Rng rng(config.seed);
  std::vector<Scenario> out;

  for (const auto& [key, record] : kb.records()) {
    DensityPair densities = generate_densities(record.threshold, rng,
                                               config.true_density_offset_range,
                                               config.false_density_offset_range);

    const auto& affected = record.affected_crops;
    std::string affected_pick =
        affected[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(affected.size()) - 1))];

    std::vector<std::string> unaffected;
    for (const auto& crop : kb.all_crops()) {
      bool hit = std::any_of(affected.begin(), affected.end(), [&crop](const std::string& c) {
        return normalize_name(c) == normalize_name(crop);
      });
      if (!hit) unaffected.push_back(crop);
    }
    std::string unaffected_pick;
    if (!unaffected.empty()) {
      unaffected_pick = unaffected[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<int>(unaffected.size()) - 1))];
    }

    struct Candidate {
      const std::string* crop;
      const DensityThreshold* density;
    };
    std::vector<Candidate> negatives;
    if (densities.false_density.value < record.threshold.value) {
      negatives.push_back({&affected_pick, &densities.false_density});
    }
    if (!unaffected.empty()) {
      negatives.push_back({&unaffected_pick, &densities.true_density});
      negatives.push_back({&unaffected_pick, &densities.false_density});
    }
    if (negatives.empty()) {
      throw NoUnaffectedCropsError(
          "pest '" + record.name +
          "' affects every crop in the knowledge base and its below-threshold density equals the "
          "threshold; no negative scenario is possible");
    }

    std::vector<Candidate> negative_picks;
    for (int j = 0; j < config.samples_per_pest_per_class; ++j) {
      negative_picks.push_back(negatives[static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<int>(negatives.size()) - 1))]);
    }

    std::string slug = slugify(record.name);
    for (int j = 0; j < config.samples_per_pest_per_class; ++j) {
      out.push_back(make_scenario(record, affected_pick, densities.true_density, 1,
                                  slug + "-pos-" + std::to_string(j), rng, config));
    }
    for (int j = 0; j < config.samples_per_pest_per_class; ++j) {
      out.push_back(make_scenario(record, *negative_picks[static_cast<std::size_t>(j)].crop,
                                  *negative_picks[static_cast<std::size_t>(j)].density, 0,
                                  slug + "-neg-" + std::to_string(j), rng, config));
    }
  }

  for (const auto& s : out) {
    if (decide(kb, s.observation).action_required != (s.label == 1)) {
      throw Error("generated scenario '" + s.scenario_id + "' contradicts the decision oracle");
    }
  }
  return out;
}

nlohmann::json to_json(const Scenario& scenario) {
  nlohmann::json obs;
  obs["pest"] = scenario.observation.pest;
  obs["crop"] = scenario.observation.crop;
  obs["density_value"] = scenario.observation.density_value;
  obs["density_metric"] = scenario.observation.density_metric;
  obs["density_is_percentage"] = scenario.observation.density_is_percentage;

  nlohmann::json out;
  out["scenario_id"] = scenario.scenario_id;
  out["pest"] = scenario.pest;
  out["crop"] = scenario.crop;
  out["density_text"] = scenario.density_text;
  out["observation"] = std::move(obs);
  out["temperature_celsius"] = scenario.temperature_celsius;
  out["latitude"] = scenario.latitude;
  out["label"] = scenario.label;
  return out;
}

Scenario scenario_from_json(const nlohmann::json& doc, const std::string& context) {
  Scenario s;
  try {
    s.scenario_id = doc.at("scenario_id").get<std::string>();
    s.pest = doc.at("pest").get<std::string>();
    s.crop = doc.at("crop").get<std::string>();
    s.density_text = doc.at("density_text").get<std::string>();
    const auto& obs = doc.at("observation");
    s.observation.pest = obs.at("pest").get<std::string>();
    s.observation.crop = obs.at("crop").get<std::string>();
    s.observation.density_value = obs.at("density_value").get<double>();
    s.observation.density_metric = obs.at("density_metric").get<std::string>();
    s.observation.density_is_percentage = obs.at("density_is_percentage").get<bool>();
    s.temperature_celsius = doc.at("temperature_celsius").get<double>();
    s.latitude = doc.at("latitude").get<double>();
    s.label = doc.at("label").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(context + ": " + e.what());
  }
  if (s.label != 0 && s.label != 1) {
    throw SchemaError(context + ": label must be 0 or 1, got " + std::to_string(s.label));
  }
  if (!is_known_metric(s.observation.density_metric)) {
    throw SchemaError(context + ": unknown metric '" + s.observation.density_metric + "'");
  }
  DensityThreshold reparsed;
  try {
    reparsed = parse_density_text(s.density_text);
  } catch (const UnparsableDensityError& e) {
    throw SchemaError(context + ": " + e.what());
  }
  if (reparsed != DensityThreshold{s.observation.density_value, s.observation.density_metric,
                                   s.observation.density_is_percentage}) {
    throw SchemaError(context + ": density_text '" + s.density_text +
                      "' does not match the observation");
  }
  return s;
}

void write_scenarios(const std::vector<Scenario>& scenarios, const std::string& path) {
  std::string out;
  for (const auto& s : scenarios) {
    out += dump_jsonl_line(to_json(s));
    out += '\n';
  }
  write_text_file(path, out);
}

std::vector<Scenario> read_scenarios(const std::string& path) {
  std::vector<Scenario> out;
  for (const auto& line : read_jsonl_file(path)) {
    out.push_back(scenario_from_json(line.value, path + ":" + std::to_string(line.line_number)));
  }
  return out;
}

}  // namespace pestbench
