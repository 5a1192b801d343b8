#pragma once

#include <string>
#include <vector>

#include "pestbench/gateway.hpp"
#include "pestbench/metrics.hpp"
#include "pestbench/prompts.hpp"
#include "pestbench/scenario.hpp"
#include "pestbench/toml_lite.hpp"

namespace pestbench {

struct KbPaths {
  std::string affected_crops;
  std::string thresholds;
  std::string management;
  std::string descriptions;  // optional, empty when absent
};

struct RunConfig {
  KbPaths kb;
  GenerationConfig generation;
  std::string templates_dir = "templates";
  std::string out_dir = "runs";
  std::vector<Strategy> strategies{kAllStrategies.begin(), kAllStrategies.end()};
  GatewayOptions gateway;
  EvalWeights weights = EvalWeights::defaults();
  ModelConfig judge;
  std::vector<ModelConfig> models;

  void validate() const;  // throws ConfigError
};

// Interprets a parsed document; relative paths stay as written.
RunConfig run_config_from_document(const toml::Document& doc,
                                   const std::string& source_name);

// Parses the file and resolves every relative path in it against the
// file's own directory, so a config works from any working directory.
RunConfig load_run_config(const std::string& path);

}  // namespace pestbench
