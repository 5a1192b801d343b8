#include "pestbench/config.hpp"

#include <filesystem>
#include <set>

#include "pestbench/errors.hpp"

namespace pestbench {

namespace fs = std::filesystem;

namespace {

std::string require_string(const toml::Table& table, const std::string& key,
                           const std::string& context) {
  const toml::Value* value = table.find(key);
  if (value == nullptr) {
    throw ConfigError(context + ": missing required key \"" + key + "\"");
  }
  return value->as_string();
}

Interval parse_interval(const toml::Value& value, const std::string& context) {
  const auto& items = value.as_array();
  if (items.size() != 2) {
    throw ConfigError(context + ": expected a [lo, hi] pair");
  }
  return {items[0].as_double(), items[1].as_double()};
}

IntInterval parse_int_interval(const toml::Value& value, const std::string& context) {
  const auto& items = value.as_array();
  if (items.size() != 2) {
    throw ConfigError(context + ": expected a [lo, hi] pair");
  }
  return {static_cast<int>(items[0].as_int()), static_cast<int>(items[1].as_int())};
}

ModelConfig parse_model(const toml::Table& table, const std::string& context) {
  ModelConfig model;
  model.provider_kind =
      provider_kind_from_string(require_string(table, "provider_kind", context));
  model.model_name = require_string(table, "model_name", context);
  if (model.model_name.empty()) {
    throw ConfigError(context + ": model_name must not be empty");
  }
  model.display_name = table.get_string("display_name", "");
  model.endpoint_url = table.get_string("endpoint_url", "");
  if (model.provider_kind != ProviderKind::Replay && model.endpoint_url.empty()) {
    throw ConfigError(context + ": endpoint_url is required for live providers");
  }
  model.auth_env_var = table.get_string("auth_env_var", "");
  model.sampling.temperature = table.get_double("temperature", 0.0);
  if (model.sampling.temperature < 0.0) {
    throw ConfigError(context + ": temperature must be >= 0");
  }
  model.sampling.max_tokens = static_cast<int>(table.get_int("max_tokens", 1024));
  if (model.sampling.max_tokens <= 0) {
    throw ConfigError(context + ": max_tokens must be positive");
  }
  return model;
}

ModelConfig default_judge() {
  ModelConfig judge;
  judge.provider_kind = ProviderKind::ChatCompletion;
  judge.model_name = "gpt-4-1106-preview";
  judge.endpoint_url = "https://api.openai.com/v1/chat/completions";
  judge.auth_env_var = "OPENAI_API_KEY";
  return judge;
}

}  // namespace

void RunConfig::validate() const {
  if (kb.affected_crops.empty() || kb.thresholds.empty() || kb.management.empty()) {
    throw ConfigError("config must name the three knowledge-base inputs");
  }
  generation.validate();
  if (strategies.empty()) throw ConfigError("strategies must not be empty");
  std::set<Strategy> seen_strategies(strategies.begin(), strategies.end());
  if (seen_strategies.size() != strategies.size()) {
    throw ConfigError("strategies must not repeat");
  }
  try {
    weights.validate();
  } catch (const WeightSumInvalidError& e) {
    throw ConfigError(std::string("invalid weights: ") + e.what());
  }
  std::set<std::string> labels;
  for (const ModelConfig& model : models) {
    if (!labels.insert(model.label()).second) {
      throw ConfigError("duplicate model label: \"" + model.label() + "\"");
    }
  }
}

RunConfig run_config_from_document(const toml::Document& doc,
                                   const std::string& source_name) {
  RunConfig config;
  config.judge = default_judge();

  const toml::Table* kb = doc.table("kb");
  if (kb == nullptr) throw ConfigError(source_name + ": missing [kb] section");
  config.kb.affected_crops = require_string(*kb, "affected_crops", source_name + ": [kb]");
  config.kb.thresholds = require_string(*kb, "thresholds", source_name + ": [kb]");
  config.kb.management = require_string(*kb, "management", source_name + ": [kb]");
  config.kb.descriptions = kb->get_string("descriptions", "");

  if (const toml::Table* generation = doc.table("generation")) {
    config.generation.seed =
        static_cast<std::uint64_t>(generation->get_int("seed", 42));
    config.generation.samples_per_pest_per_class = static_cast<int>(
        generation->get_int("samples_per_pest_per_class", 1));
    if (const toml::Value* value = generation->find("temperature_range_celsius")) {
      config.generation.temperature_range_celsius =
          parse_interval(*value, source_name + ": temperature_range_celsius");
    }
    if (const toml::Value* value = generation->find("latitude_range_degrees")) {
      config.generation.latitude_range_degrees =
          parse_interval(*value, source_name + ": latitude_range_degrees");
    }
    if (const toml::Value* value = generation->find("true_density_offset_range")) {
      config.generation.true_density_offset_range =
          parse_int_interval(*value, source_name + ": true_density_offset_range");
    }
    if (const toml::Value* value = generation->find("false_density_offset_range")) {
      config.generation.false_density_offset_range =
          parse_int_interval(*value, source_name + ": false_density_offset_range");
    }
  }

  if (const toml::Table* run = doc.table("run")) {
    config.templates_dir = run->get_string("templates_dir", config.templates_dir);
    config.out_dir = run->get_string("out_dir", config.out_dir);
    config.gateway.cache_dir = run->get_string("cache_dir", config.gateway.cache_dir);
    config.gateway.replay = run->get_bool("replay", config.gateway.replay);
    config.gateway.max_retries =
        static_cast<int>(run->get_int("max_retries", config.gateway.max_retries));
    config.gateway.backoff_base_ms =
        static_cast<int>(run->get_int("backoff_base_ms", config.gateway.backoff_base_ms));
    config.gateway.max_concurrency =
        static_cast<int>(run->get_int("max_concurrency", config.gateway.max_concurrency));
    config.gateway.max_requests = run->get_int("max_requests", config.gateway.max_requests);
    if (const toml::Value* value = run->find("strategies")) {
      config.strategies.clear();
      for (const toml::Value& item : value->as_array()) {
        config.strategies.push_back(strategy_from_string(item.as_string()));
      }
    }
  }

  if (const toml::Table* weights = doc.table("weights")) {
    if (const toml::Value* quality = weights->find("quality")) {
      if (quality->type() == toml::Value::Type::Array) {
        const auto& items = quality->as_array();
        if (items.size() != config.weights.quality.size()) {
          throw ConfigError(source_name + ": weights.quality needs six entries");
        }
        for (std::size_t i = 0; i < items.size(); ++i) {
          config.weights.quality[i] = items[i].as_double();
        }
      } else {
        config.weights.quality.fill(quality->as_double());
      }
    }
    config.weights.accuracy = weights->get_double("accuracy", config.weights.accuracy);
  }

  if (const toml::Table* judge = doc.table("judge")) {
    config.judge = parse_model(*judge, source_name + ": [judge]");
  }

  if (const std::vector<toml::Table>* models = doc.array_of_tables("models")) {
    int index = 0;
    for (const toml::Table& table : *models) {
      config.models.push_back(
          parse_model(table, source_name + ": [[models]] #" + std::to_string(index)));
      ++index;
    }
  }

  config.validate();
  return config;
}

RunConfig load_run_config(const std::string& path) {
  RunConfig config = run_config_from_document(toml::parse_file(path), path);

  fs::path base = fs::path(path).parent_path();
  auto resolve = [&base](std::string& value) {
    if (value.empty()) return;
    fs::path p(value);
    if (p.is_absolute()) return;
    value = (base / p).lexically_normal().string();
  };
  resolve(config.kb.affected_crops);
  resolve(config.kb.thresholds);
  resolve(config.kb.management);
  resolve(config.kb.descriptions);
  resolve(config.templates_dir);
  resolve(config.out_dir);
  resolve(config.gateway.cache_dir);
  return config;
}

}  // namespace pestbench
