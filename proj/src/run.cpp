#include "pestbench/run.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <thread>

#include "pestbench/csv.hpp"
#include "pestbench/errors.hpp"
#include "pestbench/hash.hpp"
#include "pestbench/jsonl.hpp"
#include "pestbench/rng.hpp"
#include "pestbench/text.hpp"
#include "pestbench/version.hpp"

namespace pestbench {

namespace fs = std::filesystem;
using nlohmann::json;

json to_json(const ModelConfig& config) {
  return json{
      {"auth_env_var", config.auth_env_var},
      {"display_name", config.display_name},
      {"endpoint_url", config.endpoint_url},
      {"max_tokens", config.sampling.max_tokens},
      {"model_name", config.model_name},
      {"provider_kind", std::string(to_string(config.provider_kind))},
      {"temperature", config.sampling.temperature},
  };
}

namespace {

json manifest_core(const RunManifest& manifest) {
  return json{
      {"judge", manifest.judge},
      {"kb_fingerprints", manifest.kb_fingerprints},
      {"models", manifest.models},
      {"seed", manifest.seed},
      {"strategies", manifest.strategies},
      {"template_hashes", manifest.template_hashes},
      {"tool_version", manifest.tool_version},
      {"weights", manifest.weights},
  };
}

std::string iso8601_utc_now() {
  std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

// Canonical strategy iteration: the fixed zero-shot, few-shot,
// instruction-based, self-consistency order filtered by the configured set.
std::vector<Strategy> canonical_strategies(const std::vector<Strategy>& configured) {
  std::set<Strategy> wanted(configured.begin(), configured.end());
  std::vector<Strategy> ordered;
  for (Strategy strategy : kAllStrategies) {
    if (wanted.count(strategy) != 0) ordered.push_back(strategy);
  }
  return ordered;
}

// Ordered parallel map with a bounded worker count; the first exception
// wins and is rethrown after all workers stop.
template <typename In, typename Fn>
auto parallel_map(const std::vector<In>& inputs, int workers, Fn fn)
    -> std::vector<decltype(fn(inputs[0]))> {
  using Out = decltype(fn(inputs[0]));
  std::vector<Out> outputs(inputs.size());
  if (inputs.empty()) return outputs;
  int thread_count = std::max(1, std::min<int>(workers, static_cast<int>(inputs.size())));
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&] {
    while (true) {
      std::size_t index = next.fetch_add(1);
      if (index >= inputs.size()) return;
      try {
        outputs[index] = fn(inputs[index]);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int i = 0; i < thread_count; ++i) pool.emplace_back(work);
  for (std::thread& thread : pool) thread.join();
  if (first_error) std::rethrow_exception(first_error);
  return outputs;
}

template <typename E>
[[noreturn]] void rethrow_with(const E& error, const std::string& context) {
  throw E(context + ": " + error.what());
}

template <typename Fn>
auto with_context(const std::string& context, Fn fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const AuthError& e) {
    rethrow_with(e, context);
  } catch (const RateLimitedError& e) {
    rethrow_with(e, context);
  } catch (const CacheMissError& e) {
    rethrow_with(e, context);
  } catch (const RequestBudgetError& e) {
    rethrow_with(e, context);
  } catch (const ProviderError& e) {
    rethrow_with(e, context);
  } catch (const ConfigError& e) {
    rethrow_with(e, context);
  } catch (const SchemaError& e) {
    rethrow_with(e, context);
  } catch (const Error& e) {
    throw Error(context + ": " + e.what());
  }
}

}  // namespace

json to_json(const RunManifest& manifest) {
  json doc = manifest_core(manifest);
  doc["created_at"] = manifest.created_at;
  doc["run_id"] = manifest.run_id;
  return doc;
}

std::string compute_run_id(const RunManifest& manifest) {
  return sha256_hex(manifest_core(manifest).dump()).substr(0, 12);
}

json to_json(const RunRecord& record) {
  return json{
      {"exemplar_ids", record.exemplar_ids},
      {"judge", to_json(record.judge)},
      {"label", record.label},
      {"model", record.model},
      {"prompt_fingerprint", record.prompt_fingerprint},
      {"response_text", record.response_text},
      {"run_id", record.run_id},
      {"scenario_id", record.scenario_id},
      {"source_response_ids", record.source_response_ids},
      {"strategy", std::string(to_string(record.strategy))},
  };
}

RunRecord run_record_from_json(const json& value) {
  if (!value.is_object()) throw SchemaError("run record must be an object");
  RunRecord record;
  try {
    record.run_id = value.at("run_id").get<std::string>();
    record.scenario_id = value.at("scenario_id").get<std::string>();
    record.model = value.at("model").get<std::string>();
    record.strategy = strategy_from_string(value.at("strategy").get<std::string>());
    record.prompt_fingerprint = value.at("prompt_fingerprint").get<std::string>();
    record.response_text = value.at("response_text").get<std::string>();
    record.exemplar_ids = value.at("exemplar_ids").get<std::vector<std::string>>();
    record.source_response_ids =
        value.at("source_response_ids").get<std::vector<std::string>>();
    record.judge = judge_scores_from_json(value.at("judge"));
    record.label = value.at("label").get<int>();
    if (record.label != 0 && record.label != 1) {
      throw SchemaError("record label must be 0 or 1");
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed run record: ") + e.what());
  } catch (const ConfigError& e) {
    throw SchemaError(std::string("malformed run record: ") + e.what());
  }
  return record;
}

std::vector<BasePrompts> build_base_prompts(const std::vector<Scenario>& scenarios,
                                            const KnowledgeBase& kb,
                                            const TemplateSet& templates,
                                            std::uint64_t seed) {
  std::vector<BasePrompts> prompts;
  prompts.reserve(scenarios.size());
  for (const Scenario& scenario : scenarios) {
    BasePrompts base;
    base.zero_shot = build_zero_shot(scenario, templates);
    Rng rng(derive_seed(seed, "few-shot/" + scenario.scenario_id));
    base.few_shot = build_few_shot(scenario, scenarios, kb, rng, templates);
    base.instruction = build_instruction(scenario, kb, templates);
    prompts.push_back(std::move(base));
  }
  return prompts;
}

std::string format_fixed2(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", round2(value));
  return buf;
}

void write_metrics_file(const std::string& path, const std::vector<RunMetrics>& cells,
                        const std::string& run_id) {
  json doc{{"cells", json::array()}, {"run_id", run_id}};
  for (const RunMetrics& cell : cells) doc["cells"].push_back(to_json(cell));
  write_text_file(path, doc.dump(2) + "\n");
}

std::vector<RunMetrics> read_metrics_file(const std::string& path, std::string& run_id) {
  std::error_code ec;
  if (!fs::exists(path, ec)) {
    throw MissingMetricsError("metrics file not found: " + path);
  }
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw SchemaError(path + ": malformed metrics file: " + e.what());
  }
  if (!doc.is_object() || !doc.contains("cells") || !doc["cells"].is_array() ||
      !doc.contains("run_id") || !doc["run_id"].is_string()) {
    throw SchemaError(path + ": metrics file needs run_id and cells");
  }
  run_id = doc["run_id"].get<std::string>();
  std::vector<RunMetrics> cells;
  for (const json& cell : doc["cells"]) cells.push_back(run_metrics_from_json(cell));
  return cells;
}

namespace {

const char* kQualityHeader =
    "| Model | Strategy | Coherence | Logical Consistency | Fluency | Relevance "
    "| Comprehensibility | Exhaustiveness |";

std::string quality_row(const RunMetrics& cell) {
  std::string row = "| " + cell.model + " | " + std::string(to_string(cell.strategy));
  for (double mean : cell.quality_means) row += " | " + format_fixed2(mean);
  return row + " |";
}

const char* kPerformanceHeader =
    "| Model | Strategy | TP | TN | FP | FN | Accuracy | Precision | Recall "
    "| F1 Score | Final Score |";

std::string performance_row(const RunMetrics& cell) {
  std::string row = "| " + cell.model + " | " + std::string(to_string(cell.strategy));
  for (long count : {cell.cm.tp, cell.cm.tn, cell.cm.fp, cell.cm.fn}) {
    row += " | " + std::to_string(count);
  }
  for (double value : {cell.accuracy, cell.precision, cell.recall, cell.f1}) {
    row += " | " + format_fixed2(value);
  }
  return row + " | " + format_fixed2(cell.final_score) + " |";
}

std::string table_rule(int columns) {
  std::string rule = "|";
  for (int i = 0; i < columns; ++i) rule += "---|";
  return rule;
}

}  // namespace

void render_report(const std::string& run_dir) {
  std::string run_id;
  std::vector<RunMetrics> cells = read_metrics_file(run_dir + "/metrics.json", run_id);

  std::string md;
  md += "# Pest-management advice benchmark\n\n";
  md += "Run `" + run_id + "`.\n\n";
  md += "## Linguistic quality (judge means, 1-10 scale)\n\n";
  md += std::string(kQualityHeader) + "\n" + table_rule(8) + "\n";
  for (const RunMetrics& cell : cells) md += quality_row(cell) + "\n";
  md += "\n## Performance\n\n";
  md += std::string(kPerformanceHeader) + "\n" + table_rule(11) + "\n";
  for (const RunMetrics& cell : cells) md += performance_row(cell) + "\n";
  md += "\n## Judge exclusions\n\n";
  bool any_excluded = false;
  for (const RunMetrics& cell : cells) any_excluded |= cell.excluded_samples > 0;
  if (any_excluded) {
    md += "| Model | Strategy | Excluded samples | Judged samples |\n" + table_rule(4) +
          "\n";
    for (const RunMetrics& cell : cells) {
      if (cell.excluded_samples == 0) continue;
      md += "| " + cell.model + " | " + std::string(to_string(cell.strategy)) + " | " +
            std::to_string(cell.excluded_samples) + " | " +
            std::to_string(cell.judged_samples) + " |\n";
    }
  } else {
    md += "No judge-failed samples.\n";
  }
  write_text_file(run_dir + "/report.md", md);

  std::string quality_csv =
      "model,strategy,coherence,logical_consistency,fluency,relevance,"
      "comprehensibility,exhaustiveness\n";
  for (const RunMetrics& cell : cells) {
    quality_csv += csv_escape(cell.model) + "," + std::string(to_string(cell.strategy));
    for (double mean : cell.quality_means) quality_csv += "," + format_fixed2(mean);
    quality_csv += "\n";
  }
  write_text_file(run_dir + "/report_quality.csv", quality_csv);

  std::string performance_csv =
      "model,strategy,tp,tn,fp,fn,accuracy,precision,recall,f1,final_score,"
      "excluded_samples\n";
  for (const RunMetrics& cell : cells) {
    performance_csv +=
        csv_escape(cell.model) + "," + std::string(to_string(cell.strategy));
    for (long count : {cell.cm.tp, cell.cm.tn, cell.cm.fp, cell.cm.fn}) {
      performance_csv += "," + std::to_string(count);
    }
    for (double value : {cell.accuracy, cell.precision, cell.recall, cell.f1}) {
      performance_csv += "," + format_fixed2(value);
    }
    performance_csv += "," + format_fixed2(cell.final_score) + "," +
                       std::to_string(cell.excluded_samples) + "\n";
  }
  write_text_file(run_dir + "/report_performance.csv", performance_csv);
}

namespace {

struct ResumeState {
  // (scenario_id, model label, strategy id) -> record
  std::map<std::string, RunRecord> records;
};

std::string record_key(const std::string& scenario_id, const std::string& model,
                       Strategy strategy) {
  return scenario_id + "\x1f" + model + "\x1f" + std::string(to_string(strategy));
}

// Loads records.jsonl for resume. A malformed or foreign-run trailing line
// is treated as a crash artifact and truncated away; anywhere else it is an
// error.
ResumeState load_existing_records(const std::string& path, const std::string& run_id) {
  ResumeState state;
  std::error_code ec;
  if (!fs::exists(path, ec)) return state;
  std::string raw = read_text_file(path);
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < raw.size()) {
    std::size_t end = raw.find('\n', start);
    if (end == std::string::npos) {
      lines.push_back(raw.substr(start));
      break;
    }
    lines.push_back(raw.substr(start, end - start));
    start = end + 1;
  }
  std::string kept;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    bool last = i + 1 == lines.size();
    RunRecord record;
    try {
      record = run_record_from_json(json::parse(lines[i]));
      if (record.run_id != run_id) {
        throw SchemaError("record belongs to run " + record.run_id);
      }
    } catch (const Error& e) {
      if (last) break;  // interrupted write; drop and regenerate
      throw SchemaError(path + ": line " + std::to_string(i + 1) + ": " + e.what());
    } catch (const json::exception& e) {
      if (last) break;
      throw SchemaError(path + ": line " + std::to_string(i + 1) + ": " + e.what());
    }
    std::string key = record_key(record.scenario_id, record.model, record.strategy);
    if (state.records.count(key) != 0) {
      throw SchemaError(path + ": duplicate record for " + record.scenario_id + " / " +
                        record.model + " / " + std::string(to_string(record.strategy)));
    }
    kept += lines[i] + "\n";
    state.records.emplace(std::move(key), std::move(record));
  }
  write_text_file(path, kept);
  return state;
}

struct ScenarioResponses {
  LlmResponse zero_shot;
  LlmResponse few_shot;
  LlmResponse instruction;
  LlmResponse self_consistency;
  PromptBundle self_consistency_prompt;
};

}  // namespace

RunOutcome run_matrix(const RunConfig& config) {
  if (config.models.empty()) {
    throw ConfigError("run requires at least one [[models]] entry");
  }

  LoadResult loaded = load_knowledge_base(config.kb.affected_crops, config.kb.thresholds,
                                          config.kb.management, config.kb.descriptions);
  TemplateSet templates = load_templates(config.templates_dir);
  std::vector<Scenario> scenarios = generate_scenarios(loaded.kb, config.generation);
  std::vector<Strategy> strategies = canonical_strategies(config.strategies);

  RunManifest manifest;
  manifest.seed = config.generation.seed;
  manifest.kb_fingerprints = json{
      {"affected_crops", sha256_file_hex(config.kb.affected_crops)},
      {"descriptions",
       config.kb.descriptions.empty() ? "" : sha256_file_hex(config.kb.descriptions)},
      {"management", sha256_file_hex(config.kb.management)},
      {"thresholds", sha256_file_hex(config.kb.thresholds)},
  };
  manifest.models = json::array();
  for (const ModelConfig& model : config.models) manifest.models.push_back(to_json(model));
  manifest.judge = to_json(config.judge);
  for (Strategy strategy : strategies) {
    manifest.strategies.emplace_back(to_string(strategy));
  }
  manifest.template_hashes = json{
      {"few_shot", sha256_hex(templates.few_shot)},
      {"instruction", sha256_hex(templates.instruction)},
      {"judge_accuracy", sha256_hex(templates.judge_accuracy)},
      {"judge_quality", sha256_hex(templates.judge_quality)},
      {"self_consistency", sha256_hex(templates.self_consistency)},
      {"zero_shot", sha256_hex(templates.zero_shot)},
  };
  json weight_list = json::array();
  for (double weight : config.weights.quality) weight_list.push_back(weight);
  manifest.weights = json{{"accuracy", config.weights.accuracy}, {"quality", weight_list}};
  manifest.tool_version = kToolVersion;
  manifest.run_id = compute_run_id(manifest);
  manifest.created_at = config.gateway.replay ? "" : iso8601_utc_now();

  std::string run_dir = config.out_dir + "/" + manifest.run_id;
  fs::create_directories(run_dir);
  write_text_file(run_dir + "/manifest.json", to_json(manifest).dump(2) + "\n");
  write_scenarios(scenarios, run_dir + "/scenarios.jsonl");

  std::string records_path = run_dir + "/records.jsonl";
  ResumeState existing = load_existing_records(records_path, manifest.run_id);

  std::vector<BasePrompts> base_prompts =
      build_base_prompts(scenarios, loaded.kb, templates, config.generation.seed);

  auto needs = [&](Strategy strategy) {
    return std::count(strategies.begin(), strategies.end(), strategy) > 0;
  };
  // Self-consistency synthesizes from the three base responses, so it pulls
  // them in even when their strategies are not configured.
  bool need_self_consistency = needs(Strategy::SelfConsistency);
  bool need_zero_shot = need_self_consistency || needs(Strategy::ZeroShot);
  bool need_few_shot = need_self_consistency || needs(Strategy::FewShot);
  bool need_instruction = need_self_consistency || needs(Strategy::InstructionBased);

  ModelGateway gateway(config.gateway);
  std::ofstream records_out(records_path, std::ios::app);
  if (!records_out) throw IoError("cannot open for append: " + records_path);

  std::vector<std::size_t> indexes(scenarios.size());
  for (std::size_t i = 0; i < indexes.size(); ++i) indexes[i] = i;

  RunOutcome outcome;
  outcome.run_dir = run_dir;
  outcome.manifest = manifest;
  outcome.resumed_records = static_cast<long>(existing.records.size());

  for (const ModelConfig& model : config.models) {
    // Phase A: acquire every response for this model, scenario-parallel.
    // Self-consistency waits on its scenario's three base responses by
    // construction: the worker completes them first.
    std::vector<ScenarioResponses> responses = parallel_map(
        indexes, config.gateway.max_concurrency, [&](std::size_t index) {
          const Scenario& scenario = scenarios[index];
          const BasePrompts& base = base_prompts[index];
          std::string context = "scenario " + scenario.scenario_id + ", model " +
                                model.label();
          return with_context(context, [&] {
            ScenarioResponses out;
            if (need_zero_shot) out.zero_shot = gateway.complete(model, base.zero_shot.text);
            if (need_few_shot) out.few_shot = gateway.complete(model, base.few_shot.text);
            if (need_instruction) {
              out.instruction = gateway.complete(model, base.instruction.text);
            }
            if (need_self_consistency) {
              out.self_consistency_prompt = build_self_consistency(
                  scenario,
                  {out.zero_shot.text, out.few_shot.text, out.instruction.text},
                  {out.zero_shot.request_fingerprint, out.few_shot.request_fingerprint,
                   out.instruction.request_fingerprint},
                  templates);
              out.self_consistency =
                  gateway.complete(model, out.self_consistency_prompt.text);
            }
            return out;
          });
        });

    // Phase B: judge and record, strategy by strategy in canonical order.
    for (Strategy strategy : strategies) {
      std::vector<RunRecord> slice = parallel_map(
          indexes, config.gateway.max_concurrency, [&](std::size_t index) {
            const Scenario& scenario = scenarios[index];
            std::string key = record_key(scenario.scenario_id, model.label(), strategy);
            auto found = existing.records.find(key);
            if (found != existing.records.end()) return found->second;

            const BasePrompts& base = base_prompts[index];
            const ScenarioResponses& response_set = responses[index];
            const PromptBundle* prompt = nullptr;
            const LlmResponse* response = nullptr;
            switch (strategy) {
              case Strategy::ZeroShot:
                prompt = &base.zero_shot;
                response = &response_set.zero_shot;
                break;
              case Strategy::FewShot:
                prompt = &base.few_shot;
                response = &response_set.few_shot;
                break;
              case Strategy::InstructionBased:
                prompt = &base.instruction;
                response = &response_set.instruction;
                break;
              case Strategy::SelfConsistency:
                prompt = &response_set.self_consistency_prompt;
                response = &response_set.self_consistency;
                break;
            }

            std::string context = "scenario " + scenario.scenario_id + ", model " +
                                  model.label() + ", strategy " +
                                  std::string(to_string(strategy));
            return with_context(context, [&] {
              RunRecord record;
              record.run_id = manifest.run_id;
              record.scenario_id = scenario.scenario_id;
              record.model = model.label();
              record.strategy = strategy;
              record.prompt_fingerprint = response->request_fingerprint;
              record.response_text = response->text;
              record.exemplar_ids = prompt->exemplar_ids;
              record.source_response_ids = prompt->source_response_ids;
              record.label = scenario.label;
              record.judge = judge_response(gateway, config.judge, templates,
                                            prompt->text, response->text);
              return record;
            });
          });

      for (std::size_t index = 0; index < slice.size(); ++index) {
        const RunRecord& record = slice[index];
        std::string key = record_key(record.scenario_id, record.model, record.strategy);
        if (existing.records.count(key) == 0) {
          records_out << dump_jsonl_line(to_json(record)) << "\n";
          records_out.flush();
          existing.records.emplace(key, record);
        }
      }

      // Aggregate this cell from the slice, which is in scenario order.
      std::vector<JudgeScores> scores;
      std::vector<int> labels;
      for (const RunRecord& record : slice) {
        scores.push_back(record.judge);
        labels.push_back(record.label);
      }
      RunMetrics cell =
          aggregate_cell(model.label(), strategy, scores, labels, config.weights);
      outcome.judge_failed_samples += cell.excluded_samples;
      outcome.cells.push_back(std::move(cell));
    }
  }

  records_out.close();
  outcome.completed_records = static_cast<long>(existing.records.size());
  write_metrics_file(run_dir + "/metrics.json", outcome.cells, manifest.run_id);
  render_report(run_dir);
  return outcome;
}

}  // namespace pestbench
