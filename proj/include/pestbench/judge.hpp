#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pestbench/gateway.hpp"
#include "pestbench/prompts.hpp"

namespace pestbench {

enum class Dimension {
  Coherence,
  LogicalConsistency,
  Fluency,
  Relevance,
  Comprehensibility,
  Exhaustiveness,
};

inline constexpr std::array<Dimension, 6> kAllDimensions = {
    Dimension::Coherence,       Dimension::LogicalConsistency,
    Dimension::Fluency,         Dimension::Relevance,
    Dimension::Comprehensibility, Dimension::Exhaustiveness};

// Display name, also the key in judge outputs and records.
std::string_view to_string(Dimension dimension);
Dimension dimension_from_string(std::string_view name);  // throws ConfigError

// Keyed by enum, so iteration follows the canonical dimension order.
using QualityScores = std::map<Dimension, double>;

struct JudgeTranscript {
  std::string request_fingerprint;       // of the final judge call
  std::vector<std::string> raw_outputs;  // one entry per attempt
  bool parsed = false;
};

struct JudgeScores {
  std::optional<int> action_verdict;      // empty when the verdict judge failed
  std::optional<QualityScores> quality;   // empty when the quality judge failed
  std::string judge_model;
  JudgeTranscript verdict_transcript;
  JudgeTranscript quality_transcript;

  bool fully_scored() const { return action_verdict.has_value() && quality.has_value(); }
};

std::string build_accuracy_judge_prompt(const TemplateSet& templates,
                                        std::string_view prompt_text,
                                        std::string_view response_text);

std::string build_quality_judge_prompt(const TemplateSet& templates,
                                       std::string_view prompt_text,
                                       std::string_view response_text);

// Accepts "0" or "1" after trimming, or a leading 0/1 token followed only
// by punctuation. Throws UnparsableVerdictError with the raw output.
int parse_accuracy_verdict(std::string_view judge_output);

// Extracts one score per dimension by finding the dimension name in a line
// (case-insensitive) and reading the first number after it (after a colon
// when one follows the name). Throws MissingDimensionError,
// DuplicateDimensionError, or OutOfRangeScoreError.
QualityScores parse_quality_scores(std::string_view judge_output);

// One completion plus one retry on an unparsable output; the retry refreshes
// the cache entry for live providers. Every raw output lands in transcript.
// Throws JudgeFailedError when the retry is also unparsable.
int judge_verdict(ModelGateway& gateway, const ModelConfig& judge_config,
                  const TemplateSet& templates, std::string_view prompt_text,
                  std::string_view response_text, JudgeTranscript& transcript);

QualityScores judge_quality(ModelGateway& gateway, const ModelConfig& judge_config,
                            const TemplateSet& templates, std::string_view prompt_text,
                            std::string_view response_text, JudgeTranscript& transcript);

// Runs both judgements independently: a failed side is recorded as an empty
// optional with its transcript kept, and never voids the other side.
// Gateway errors (auth, provider, budget, cache miss) propagate.
JudgeScores judge_response(ModelGateway& gateway, const ModelConfig& judge_config,
                           const TemplateSet& templates, std::string_view prompt_text,
                           std::string_view response_text);

nlohmann::json to_json(const JudgeTranscript& transcript);
nlohmann::json to_json(const JudgeScores& scores);
JudgeTranscript judge_transcript_from_json(const nlohmann::json& value);  // throws SchemaError
JudgeScores judge_scores_from_json(const nlohmann::json& value);          // throws SchemaError

}  // namespace pestbench
