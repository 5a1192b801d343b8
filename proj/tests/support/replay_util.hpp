#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "pestbench/config.hpp"
#include "pestbench/gateway.hpp"
#include "pestbench/judge.hpp"
#include "pestbench/knowledge_base.hpp"
#include "pestbench/metrics.hpp"
#include "pestbench/prompts.hpp"
#include "pestbench/run.hpp"
#include "pestbench/scenario.hpp"

#include "test_util.hpp"

namespace pestbench::testutil {

// Plants a canned completion so a replay-mode gateway will serve it.
inline std::string seed_reply(const ResponseCache& cache, const ModelConfig& config,
                              const std::string& prompt, const std::string& reply) {
  std::string fp = fingerprint(config.model_name, prompt, config.sampling);
  CacheEntry entry;
  entry.request = nlohmann::json{
      {"max_tokens", config.sampling.max_tokens},
      {"model", config.model_name},
      {"prompt", prompt},
      {"temperature", config.sampling.temperature},
  };
  entry.response_text = reply;
  entry.metadata = nlohmann::json::object();
  cache.write(fp, entry);
  return fp;
}

inline ModelConfig replay_model(const std::string& model_name,
                                const std::string& display_name = "") {
  ModelConfig config;
  config.provider_kind = ProviderKind::Replay;
  config.model_name = model_name;
  config.display_name = display_name;
  return config;
}

// A replay-mode run configuration over the bundled KB fixtures and prompt
// templates, with scenarios and base prompts precomputed exactly as
// run_matrix computes them.
struct MatrixFixture {
  RunConfig config;
  KnowledgeBase kb;
  TemplateSet templates;
  std::vector<Scenario> scenarios;
  std::vector<BasePrompts> base;

  ResponseCache cache() const { return ResponseCache(config.gateway.cache_dir); }
};

inline MatrixFixture make_matrix_fixture(
    const std::string& root, std::vector<ModelConfig> models,
    std::vector<Strategy> strategies = {kAllStrategies.begin(), kAllStrategies.end()}) {
  MatrixFixture fx;
  fx.config.kb.affected_crops = fixture_path("fixtures/kb/pest_to_affected_crop.json");
  fx.config.kb.thresholds = fixture_path("fixtures/kb/thresholds.csv");
  fx.config.kb.management = fixture_path("fixtures/kb/pest_to_management.csv");
  fx.config.kb.descriptions = fixture_path("fixtures/kb/pest_to_threshold.json");
  fx.config.templates_dir = fixture_path("templates");
  fx.config.out_dir = root + "/runs";
  fx.config.strategies = std::move(strategies);
  fx.config.gateway.cache_dir = root + "/cache";
  fx.config.gateway.replay = true;
  fx.config.judge = replay_model("judge-replay", "Judge");
  fx.config.models = std::move(models);
  fx.config.validate();

  LoadResult loaded =
      load_knowledge_base(fx.config.kb.affected_crops, fx.config.kb.thresholds,
                          fx.config.kb.management, fx.config.kb.descriptions);
  fx.kb = std::move(loaded.kb);
  fx.templates = load_templates(fx.config.templates_dir);
  fx.scenarios = generate_scenarios(fx.kb, fx.config.generation);
  fx.base = build_base_prompts(fx.scenarios, fx.kb, fx.templates,
                               fx.config.generation.seed);
  return fx;
}

// Per-scenario seeded material for one model, indexed by strategy ordinal.
struct SeededResponses {
  std::array<std::string, 4> prompt;
  std::array<std::string, 4> text;
  std::array<std::string, 4> fp;
};

// Seeds the four completions per scenario the way run_matrix requests them:
// the three base prompts, then self-consistency synthesized from those
// responses and their request fingerprints.
inline std::vector<SeededResponses> seed_responses(const MatrixFixture& fx,
                                                   const ResponseCache& cache,
                                                   const ModelConfig& model) {
  std::vector<SeededResponses> all;
  all.reserve(fx.scenarios.size());
  for (std::size_t i = 0; i < fx.scenarios.size(); ++i) {
    const Scenario& scenario = fx.scenarios[i];
    SeededResponses r;
    for (std::size_t s = 0; s < 3; ++s) {
      const PromptBundle& bundle = s == 0   ? fx.base[i].zero_shot
                                   : s == 1 ? fx.base[i].few_shot
                                            : fx.base[i].instruction;
      r.prompt[s] = bundle.text;
      r.text[s] = "Advice from " + model.label() + " via " +
                  std::string(to_string(kAllStrategies[s])) + " for " +
                  scenario.scenario_id + ".";
      r.fp[s] = seed_reply(cache, model, r.prompt[s], r.text[s]);
    }
    PromptBundle sc = build_self_consistency(scenario, {r.text[0], r.text[1], r.text[2]},
                                             {r.fp[0], r.fp[1], r.fp[2]}, fx.templates);
    r.prompt[3] = sc.text;
    r.text[3] = "Advice from " + model.label() + " via " +
                std::string(to_string(Strategy::SelfConsistency)) + " for " +
                scenario.scenario_id + ".";
    r.fp[3] = seed_reply(cache, model, r.prompt[3], r.text[3]);
    all.push_back(std::move(r));
  }
  return all;
}

// n integer scores in [1,10] whose mean is exactly `mean` (mean*n must be
// integral): the first (mean*n mod n) entries sit one above the rest.
inline std::vector<int> score_schedule(double mean, std::size_t n) {
  long target = std::lround(mean * static_cast<double>(n));
  long base = target / static_cast<long>(n);
  long rem = target % static_cast<long>(n);
  std::vector<int> scores(n, static_cast<int>(base));
  for (long i = 0; i < rem; ++i) scores[static_cast<std::size_t>(i)] = static_cast<int>(base) + 1;
  return scores;
}

// Per-scenario verdicts realizing the target quadrant counts: the first tp
// positives and first fp negatives get verdict 1.
inline std::vector<int> verdict_schedule(const std::vector<Scenario>& scenarios,
                                         const ConfusionMatrix& cm) {
  long tp_left = cm.tp;
  long fp_left = cm.fp;
  std::vector<int> verdicts;
  verdicts.reserve(scenarios.size());
  for (const Scenario& scenario : scenarios) {
    if (scenario.label == 1) {
      verdicts.push_back(tp_left > 0 ? 1 : 0);
      if (tp_left > 0) --tp_left;
    } else {
      verdicts.push_back(fp_left > 0 ? 1 : 0);
      if (fp_left > 0) --fp_left;
    }
  }
  return verdicts;
}

inline std::string quality_reply(const std::array<int, 6>& scores) {
  std::string reply;
  for (std::size_t d = 0; d < 6; ++d) {
    reply += std::string(to_string(kAllDimensions[d])) + ": " +
             std::to_string(scores[d]) + "\n";
  }
  return reply;
}

// Target quadrant counts and dimension means for one (model, strategy) cell.
struct CellPlan {
  ConfusionMatrix cm;
  std::array<double, 6> means{};
};

// Seeds both judge calls for every scenario of one cell so the aggregated
// metrics land exactly on the plan.
inline void seed_cell_judgements(const MatrixFixture& fx, const ResponseCache& cache,
                                 Strategy strategy,
                                 const std::vector<SeededResponses>& responses,
                                 const CellPlan& plan) {
  std::vector<int> verdicts = verdict_schedule(fx.scenarios, plan.cm);
  std::array<std::vector<int>, 6> schedules;
  for (std::size_t d = 0; d < 6; ++d) {
    schedules[d] = score_schedule(plan.means[d], fx.scenarios.size());
  }
  std::size_t s = static_cast<std::size_t>(strategy);
  for (std::size_t i = 0; i < fx.scenarios.size(); ++i) {
    const SeededResponses& r = responses[i];
    seed_reply(cache, fx.config.judge,
               build_accuracy_judge_prompt(fx.templates, r.prompt[s], r.text[s]),
               verdicts[i] != 0 ? "1" : "0");
    std::array<int, 6> row{};
    for (std::size_t d = 0; d < 6; ++d) row[d] = schedules[d][i];
    seed_reply(cache, fx.config.judge,
               build_quality_judge_prompt(fx.templates, r.prompt[s], r.text[s]),
               quality_reply(row));
  }
}

}  // namespace pestbench::testutil
