#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "pestbench/config.hpp"
#include "pestbench/gateway.hpp"
#include "pestbench/judge.hpp"
#include "pestbench/knowledge_base.hpp"
#include "pestbench/metrics.hpp"
#include "pestbench/prompts.hpp"
#include "pestbench/scenario.hpp"

namespace pestbench {

struct RunManifest {
  std::string run_id;
  std::uint64_t seed = 0;
  nlohmann::json kb_fingerprints;   // file digests of the KB inputs
  nlohmann::json models;            // model configs as written to disk
  nlohmann::json judge;
  std::vector<std::string> strategies;
  nlohmann::json template_hashes;   // digest per template resource
  nlohmann::json weights;
  std::string created_at;           // wall clock; empty in replay mode
  std::string tool_version;
};

struct RunRecord {
  std::string run_id;
  std::string scenario_id;
  std::string model;  // display label
  Strategy strategy = Strategy::ZeroShot;
  std::string prompt_fingerprint;
  std::string response_text;
  std::vector<std::string> exemplar_ids;         // few-shot provenance
  std::vector<std::string> source_response_ids;  // self-consistency siblings
  JudgeScores judge;
  int label = 0;
};

nlohmann::json to_json(const ModelConfig& config);
nlohmann::json to_json(const RunManifest& manifest);
nlohmann::json to_json(const RunRecord& record);
RunRecord run_record_from_json(const nlohmann::json& value);  // throws SchemaError

// The manifest identity: a digest over everything that determines the run's
// outputs (seed, KB digests, models, judge, strategies, templates, weights,
// tool version) — never the wall clock. Equal inputs, equal run_id.
std::string compute_run_id(const RunManifest& manifest);

// The zero-shot, few-shot, and instruction prompts for every scenario,
// shared across models so each model answers identical prompts. Few-shot
// exemplars draw from a per-scenario seed derived from the master seed.
struct BasePrompts {
  PromptBundle zero_shot;
  PromptBundle few_shot;
  PromptBundle instruction;
};
std::vector<BasePrompts> build_base_prompts(const std::vector<Scenario>& scenarios,
                                            const KnowledgeBase& kb,
                                            const TemplateSet& templates,
                                            std::uint64_t seed);

struct RunOutcome {
  std::string run_dir;
  RunManifest manifest;
  std::vector<RunMetrics> cells;   // model order x canonical strategy order
  long judge_failed_samples = 0;   // sum of excluded samples over cells
  long completed_records = 0;
  long resumed_records = 0;        // records found on disk and kept
};

// Executes the full matrix: generate scenarios, build prompts, complete
// responses (self-consistency waits on its scenario's three base
// responses), judge, aggregate, and render reports. Artifacts land under
// <out_dir>/<run_id>/ as manifest.json, scenarios.jsonl, records.jsonl,
// metrics.json, and the report files. Resuming skips records already on
// disk; a half-written trailing line is discarded. Errors carry
// (scenario, model, strategy) context.
RunOutcome run_matrix(const RunConfig& config);

// Reads metrics.json and writes report.md, report_quality.csv, and
// report_performance.csv. Throws MissingMetricsError when metrics.json is
// absent.
void render_report(const std::string& run_dir);

void write_metrics_file(const std::string& path, const std::vector<RunMetrics>& cells,
                        const std::string& run_id);
// Returns the cells and fills run_id. Throws MissingMetricsError when the
// file is absent, SchemaError when malformed.
std::vector<RunMetrics> read_metrics_file(const std::string& path, std::string& run_id);

// Two decimals, fixed: the table-rendering convention.
std::string format_fixed2(double value);

}  // namespace pestbench
