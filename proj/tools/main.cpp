#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pestbench/config.hpp"
#include "pestbench/errors.hpp"
#include "pestbench/expert_system.hpp"
#include "pestbench/gateway.hpp"
#include "pestbench/judge.hpp"
#include "pestbench/knowledge_base.hpp"
#include "pestbench/metrics.hpp"
#include "pestbench/prompts.hpp"
#include "pestbench/run.hpp"
#include "pestbench/scenario.hpp"
#include "pestbench/text.hpp"
#include "pestbench/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pestbench;

namespace {

struct GlobalFlags {
  std::string config_path;
  std::string kb_dir;
  std::optional<std::uint64_t> seed;
  bool replay = false;
  std::string out_dir;
};

KbPaths kb_paths_from_dir(const std::string& dir) {
  KbPaths kb;
  kb.affected_crops = dir + "/pest_to_affected_crop.json";
  kb.thresholds = dir + "/thresholds.csv";
  kb.management = dir + "/pest_to_management.csv";
  std::string descriptions = dir + "/pest_to_threshold.json";
  std::error_code ec;
  if (fs::exists(descriptions, ec)) kb.descriptions = descriptions;
  return kb;
}

// An unreadable configuration is a configuration error, whatever the
// filesystem says.
RunConfig load_config_file(const std::string& path) {
  try {
    return load_run_config(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
}

// --config wins; otherwise --kb-dir provides the KB with defaults for the
// rest; otherwise ./pestbench.toml.
RunConfig resolve_config(const GlobalFlags& flags) {
  RunConfig config;
  if (!flags.config_path.empty()) {
    config = load_config_file(flags.config_path);
  } else if (!flags.kb_dir.empty()) {
    config.kb = kb_paths_from_dir(flags.kb_dir);
  } else {
    std::error_code ec;
    if (!fs::exists("pestbench.toml", ec)) {
      throw ConfigError("no --config given and ./pestbench.toml not found");
    }
    config = load_config_file("pestbench.toml");
  }
  if (flags.seed.has_value()) config.generation.seed = *flags.seed;
  if (flags.replay) config.gateway.replay = true;
  if (!flags.out_dir.empty()) config.out_dir = flags.out_dir;
  return config;
}

KnowledgeBase load_kb(const RunConfig& config) {
  LoadResult loaded = load_knowledge_base(config.kb.affected_crops, config.kb.thresholds,
                                          config.kb.management, config.kb.descriptions);
  for (const std::string& warning : loaded.summary.warnings) {
    std::cerr << "pestbench: warning: " << warning << "\n";
  }
  return std::move(loaded.kb);
}

int cmd_generate(const GlobalFlags& flags, const std::string& out_path) {
  RunConfig config = resolve_config(flags);
  KnowledgeBase kb = load_kb(config);
  std::vector<Scenario> scenarios = generate_scenarios(kb, config.generation);
  write_scenarios(scenarios, out_path);
  std::cout << "wrote " << scenarios.size() << " scenarios (seed "
            << config.generation.seed << ") to " << out_path << "\n";
  return 0;
}

int cmd_run(const GlobalFlags& flags, long max_requests) {
  RunConfig config = resolve_config(flags);
  if (max_requests >= 0) config.gateway.max_requests = max_requests;
  config.validate();
  RunOutcome outcome = run_matrix(config);
  std::cout << "run " << outcome.manifest.run_id << " -> " << outcome.run_dir << "\n"
            << "records: " << outcome.completed_records << " ("
            << outcome.resumed_records << " resumed)\n";
  for (const RunMetrics& cell : outcome.cells) {
    std::cout << cell.model << " / " << to_string(cell.strategy)
              << ": final=" << format_fixed2(cell.final_score)
              << " accuracy=" << format_fixed2(cell.accuracy)
              << " excluded=" << cell.excluded_samples << "\n";
  }
  if (outcome.judge_failed_samples > 0) {
    std::cerr << "pestbench: " << outcome.judge_failed_samples
              << " sample(s) excluded after judge retries; see the report's "
                 "exclusions section\n";
    return 4;
  }
  return 0;
}

int cmd_judge(const GlobalFlags& flags, const std::string& in_path,
              const std::string& out_path) {
  RunConfig config = resolve_config(flags);
  TemplateSet templates = load_templates(config.templates_dir);
  ModelGateway gateway(config.gateway);

  std::ifstream in(in_path);
  if (!in) throw IoError("cannot open responses file: " + in_path);
  std::ofstream out(out_path);
  if (!out) throw IoError("cannot open output file: " + out_path);

  long failed = 0;
  long total = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::exception& e) {
      throw SchemaError(in_path + ": line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("prompt") || !doc["prompt"].is_string() ||
        !doc.contains("response") || !doc["response"].is_string()) {
      throw SchemaError(in_path + ": line " + std::to_string(line_no) +
                        ": each line needs string fields prompt and response");
    }
    JudgeScores scores =
        judge_response(gateway, config.judge, templates, doc["prompt"].get<std::string>(),
                       doc["response"].get<std::string>());
    if (!scores.fully_scored()) ++failed;
    ++total;
    doc["judge"] = to_json(scores);
    out << doc.dump() << "\n";
  }
  std::cout << "judged " << total << " response(s) to " << out_path << "\n";
  if (failed > 0) {
    std::cerr << "pestbench: " << failed << " sample(s) failed judging after retry\n";
    return 4;
  }
  return 0;
}

int cmd_score(const GlobalFlags& flags, const std::string& run_dir) {
  EvalWeights weights = EvalWeights::defaults();
  if (!flags.config_path.empty()) weights = load_config_file(flags.config_path).weights;
  weights.validate();

  std::string records_path = run_dir + "/records.jsonl";
  std::error_code ec;
  if (!fs::exists(records_path, ec)) {
    throw IoError("records file not found: " + records_path);
  }
  std::ifstream in(records_path);
  if (!in) throw IoError("cannot open records file: " + records_path);

  struct Cell {
    std::string model;
    Strategy strategy;
    std::vector<JudgeScores> scores;
    std::vector<int> labels;
  };
  std::vector<Cell> cells;
  std::string run_id;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    RunRecord record;
    try {
      record = run_record_from_json(json::parse(line));
    } catch (const json::exception& e) {
      throw SchemaError(records_path + ": line " + std::to_string(line_no) + ": " +
                        e.what());
    }
    if (run_id.empty()) {
      run_id = record.run_id;
    } else if (record.run_id != run_id) {
      throw SchemaError(records_path + ": line " + std::to_string(line_no) +
                        ": record belongs to run " + record.run_id + ", expected " +
                        run_id);
    }
    Cell* cell = nullptr;
    for (Cell& candidate : cells) {
      if (candidate.model == record.model && candidate.strategy == record.strategy) {
        cell = &candidate;
        break;
      }
    }
    if (cell == nullptr) {
      cells.push_back(Cell{record.model, record.strategy, {}, {}});
      cell = &cells.back();
    }
    cell->scores.push_back(record.judge);
    cell->labels.push_back(record.label);
  }
  if (cells.empty()) throw SchemaError(records_path + ": no records");

  std::vector<RunMetrics> metrics;
  long excluded = 0;
  for (const Cell& cell : cells) {
    RunMetrics aggregated =
        aggregate_cell(cell.model, cell.strategy, cell.scores, cell.labels, weights);
    excluded += aggregated.excluded_samples;
    metrics.push_back(std::move(aggregated));
  }
  write_metrics_file(run_dir + "/metrics.json", metrics, run_id);
  std::cout << "scored " << metrics.size() << " cell(s) to " << run_dir
            << "/metrics.json\n";
  if (excluded > 0) {
    std::cerr << "pestbench: " << excluded << " judge-failed sample(s) excluded\n";
    return 4;
  }
  return 0;
}

int cmd_report(const std::string& run_dir) {
  render_report(run_dir);
  std::cout << "wrote " << run_dir << "/report.md, report_quality.csv, "
            << "report_performance.csv\n";
  return 0;
}

int cmd_decide(const GlobalFlags& flags, const std::string& pest, const std::string& crop,
               const std::string& density) {
  RunConfig config = resolve_config(flags);
  KnowledgeBase kb = load_kb(config);
  DensityThreshold parsed = parse_density_text(density);
  Observation obs;
  obs.pest = pest;
  obs.crop = crop;
  obs.density_value = parsed.value;
  obs.density_metric = parsed.metric;
  obs.density_is_percentage = parsed.is_percentage;
  Decision decision = decide(kb, obs);
  std::cout << to_json(decision).dump(2) << "\n";
  return 0;
}

int cmd_render(const GlobalFlags& flags, const std::string& strategy_id,
               const std::string& scenario_id, const std::string& scenarios_path) {
  RunConfig config = resolve_config(flags);
  Strategy strategy = strategy_from_string(strategy_id);
  if (strategy == Strategy::SelfConsistency) {
    throw ConfigError(
        "self-consistency prompts depend on a model's three prior responses; "
        "inspect them in a run directory's records.jsonl instead");
  }
  KnowledgeBase kb = load_kb(config);
  std::vector<Scenario> scenarios = scenarios_path.empty()
                                        ? generate_scenarios(kb, config.generation)
                                        : read_scenarios(scenarios_path);
  TemplateSet templates = load_templates(config.templates_dir);
  std::vector<BasePrompts> base =
      build_base_prompts(scenarios, kb, templates, config.generation.seed);

  bool found = false;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    if (!scenario_id.empty() && scenarios[i].scenario_id != scenario_id) continue;
    const PromptBundle& bundle = strategy == Strategy::ZeroShot  ? base[i].zero_shot
                                 : strategy == Strategy::FewShot ? base[i].few_shot
                                                                 : base[i].instruction;
    if (scenario_id.empty()) {
      std::cout << "=== " << scenarios[i].scenario_id << " ===\n";
    }
    std::cout << bundle.text << "\n";
    found = true;
  }
  if (!found) throw ConfigError("no scenario with id \"" + scenario_id + "\"");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark LLM pest-management advice against a rule-based expert system"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  GlobalFlags flags;
  app.add_option("--config", flags.config_path,
                 "Run configuration file (default: ./pestbench.toml)");
  app.add_option("--kb-dir", flags.kb_dir,
                 "Directory holding the knowledge-base files (alternative to --config)");
  app.add_option("--seed", flags.seed, "Master seed override");
  app.add_flag("--replay", flags.replay, "Serve every request from the response cache");
  app.add_option("--out-dir", flags.out_dir, "Run artifact directory override");

  auto* generate = app.add_subcommand("generate", "Write the labeled scenario set");
  generate->fallthrough();
  std::string generate_out = "scenarios.jsonl";
  generate->add_option("--out", generate_out, "Output JSONL path");

  auto* run = app.add_subcommand("run", "Execute the model x strategy matrix");
  run->fallthrough();
  long max_requests = -1;
  run->add_option("--max-requests", max_requests,
                  "Abort once this many live requests have been attempted");

  auto* judge = app.add_subcommand("judge", "Judge a JSONL file of prompt/response pairs");
  judge->fallthrough();
  std::string judge_in;
  std::string judge_out;
  judge->add_option("--in", judge_in, "Input JSONL with prompt and response fields")
      ->required();
  judge->add_option("--out", judge_out, "Output JSONL path")->required();

  auto* score = app.add_subcommand("score", "Aggregate a run's records into metrics.json");
  score->fallthrough();
  std::string score_run_dir;
  score->add_option("--run-dir", score_run_dir, "Run directory")->required();

  auto* report = app.add_subcommand("report", "Render report files from metrics.json");
  report->fallthrough();
  std::string report_run_dir;
  report->add_option("--run-dir", report_run_dir, "Run directory")->required();

  auto* decide_cmd = app.add_subcommand("decide", "Expert-system decision for one observation");
  decide_cmd->fallthrough();
  std::string pest;
  std::string crop;
  std::string density;
  decide_cmd->add_option("--pest", pest, "Pest name")->required();
  decide_cmd->add_option("--crop", crop, "Crop name")->required();
  decide_cmd->add_option("--density", density, "Observed density, e.g. \"6 per plant\"")
      ->required();

  auto* render = app.add_subcommand("render", "Print a strategy's prompt for inspection");
  render->fallthrough();
  std::string render_strategy = "zero-shot";
  std::string render_scenario;
  std::string render_scenarios_path;
  render->add_option("--strategy", render_strategy,
                     "zero-shot, few-shot, or instruction-based");
  render->add_option("--scenario-id", render_scenario, "Only this scenario");
  render->add_option("--scenarios", render_scenarios_path,
                     "Existing scenarios.jsonl (default: regenerate from the config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(generate)) return cmd_generate(flags, generate_out);
    if (app.got_subcommand(run)) return cmd_run(flags, max_requests);
    if (app.got_subcommand(judge)) return cmd_judge(flags, judge_in, judge_out);
    if (app.got_subcommand(score)) return cmd_score(flags, score_run_dir);
    if (app.got_subcommand(report)) return cmd_report(report_run_dir);
    if (app.got_subcommand(decide_cmd)) return cmd_decide(flags, pest, crop, density);
    if (app.got_subcommand(render)) {
      return cmd_render(flags, render_strategy, render_scenario, render_scenarios_path);
    }
  } catch (const ConfigError& e) {
    std::cerr << "pestbench: " << e.what() << "\n";
    return 2;
  } catch (const AuthError& e) {
    std::cerr << "pestbench: " << e.what() << "\n";
    return 3;
  } catch (const RateLimitedError& e) {
    std::cerr << "pestbench: " << e.what() << "\n";
    return 3;
  } catch (const ProviderError& e) {
    std::cerr << "pestbench: " << e.what() << "\n";
    return 3;
  } catch (const CacheMissError& e) {
    std::cerr << "pestbench: " << e.what() << "\n";
    return 3;
  } catch (const RequestBudgetError& e) {
    std::cerr << "pestbench: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "pestbench: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "pestbench: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
