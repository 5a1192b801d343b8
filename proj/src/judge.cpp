#include "pestbench/judge.hpp"

#include <cctype>
#include <cstdlib>

#include "pestbench/errors.hpp"
#include "pestbench/text.hpp"

namespace pestbench {

using nlohmann::json;

std::string_view to_string(Dimension dimension) {
  switch (dimension) {
    case Dimension::Coherence: return "Coherence";
    case Dimension::LogicalConsistency: return "Logical Consistency";
    case Dimension::Fluency: return "Fluency";
    case Dimension::Relevance: return "Relevance";
    case Dimension::Comprehensibility: return "Comprehensibility";
    case Dimension::Exhaustiveness: return "Exhaustiveness";
  }
  return "Coherence";
}

Dimension dimension_from_string(std::string_view name) {
  for (Dimension dimension : kAllDimensions) {
    if (iequals(name, to_string(dimension))) return dimension;
  }
  throw ConfigError("unknown quality dimension: \"" + std::string(name) + "\"");
}

std::string build_accuracy_judge_prompt(const TemplateSet& templates,
                                        std::string_view prompt_text,
                                        std::string_view response_text) {
  return render_template(templates.judge_accuracy,
                         {{"Prompt", std::string(prompt_text)},
                          {"Response", std::string(response_text)}});
}

std::string build_quality_judge_prompt(const TemplateSet& templates,
                                       std::string_view prompt_text,
                                       std::string_view response_text) {
  return render_template(templates.judge_quality,
                         {{"Prompt", std::string(prompt_text)},
                          {"Response", std::string(response_text)}});
}

namespace {

std::string excerpt(std::string_view text) {
  constexpr std::size_t kMax = 200;
  std::string out(text.substr(0, kMax));
  if (text.size() > kMax) out += "...";
  return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

// First number after `start`, skipping to just past a colon when one
// follows. Understands an optional leading minus and a decimal part.
std::optional<double> first_number_after(std::string_view line, std::size_t start) {
  std::string_view rest = line.substr(start);
  std::size_t colon = rest.find(':');
  if (colon != std::string_view::npos) rest = rest.substr(colon + 1);

  for (std::size_t i = 0; i < rest.size(); ++i) {
    unsigned char c = static_cast<unsigned char>(rest[i]);
    bool digit_here = std::isdigit(c) != 0;
    bool minus_then_digit = rest[i] == '-' && i + 1 < rest.size() &&
                            std::isdigit(static_cast<unsigned char>(rest[i + 1])) != 0;
    if (!digit_here && !minus_then_digit) continue;

    std::size_t end = i + (minus_then_digit ? 1 : 0);
    while (end < rest.size() && std::isdigit(static_cast<unsigned char>(rest[end])) != 0) ++end;
    if (end < rest.size() && rest[end] == '.' && end + 1 < rest.size() &&
        std::isdigit(static_cast<unsigned char>(rest[end + 1])) != 0) {
      ++end;
      while (end < rest.size() && std::isdigit(static_cast<unsigned char>(rest[end])) != 0) ++end;
    }
    return std::strtod(std::string(rest.substr(i, end - i)).c_str(), nullptr);
  }
  return std::nullopt;
}

}  // namespace

int parse_accuracy_verdict(std::string_view judge_output) {
  std::size_t i = 0;
  while (i < judge_output.size() &&
         std::isspace(static_cast<unsigned char>(judge_output[i])) != 0) {
    ++i;
  }
  if (i < judge_output.size() && (judge_output[i] == '0' || judge_output[i] == '1')) {
    int verdict = judge_output[i] - '0';
    bool clean = true;
    for (++i; i < judge_output.size(); ++i) {
      unsigned char c = static_cast<unsigned char>(judge_output[i]);
      if (std::isspace(c) == 0 && std::ispunct(c) == 0) {
        clean = false;
        break;
      }
    }
    if (clean) return verdict;
  }
  throw UnparsableVerdictError("unparsable action verdict: \"" + excerpt(judge_output) + "\"");
}

QualityScores parse_quality_scores(std::string_view judge_output) {
  std::vector<std::string_view> lines = split_lines(judge_output);
  QualityScores scores;
  for (Dimension dimension : kAllDimensions) {
    std::string_view name = to_string(dimension);
    std::optional<double> value;
    for (std::string_view line : lines) {
      std::size_t pos = ifind(line, name);
      if (pos == std::string_view::npos) continue;
      std::optional<double> parsed = first_number_after(line, pos + name.size());
      if (!parsed.has_value()) continue;
      if (value.has_value()) {
        throw DuplicateDimensionError("dimension " + std::string(name) +
                                      " scored more than once in judge output: \"" +
                                      excerpt(judge_output) + "\"");
      }
      value = parsed;
    }
    if (!value.has_value()) {
      throw MissingDimensionError("dimension " + std::string(name) +
                                  " missing from judge output: \"" + excerpt(judge_output) +
                                  "\"");
    }
    if (*value < 1.0 || *value > 10.0) {
      throw OutOfRangeScoreError("dimension " + std::string(name) + " scored " +
                                 format_decimal(*value) + ", outside [1,10]");
    }
    scores[dimension] = *value;
  }
  return scores;
}

namespace {

template <typename Parser>
auto judge_side(ModelGateway& gateway, const ModelConfig& judge_config,
                const std::string& judge_prompt, JudgeTranscript& transcript,
                std::string_view side_name, Parser parse) {
  std::string last_error;
  for (int attempt = 0; attempt < 2; ++attempt) {
    LlmResponse response = gateway.complete(judge_config, judge_prompt, attempt > 0);
    transcript.request_fingerprint = response.request_fingerprint;
    transcript.raw_outputs.push_back(response.text);
    try {
      auto value = parse(response.text);
      transcript.parsed = true;
      return value;
    } catch (const UnparsableVerdictError& e) {
      last_error = e.what();
    } catch (const MissingDimensionError& e) {
      last_error = e.what();
    } catch (const OutOfRangeScoreError& e) {
      last_error = e.what();
    } catch (const DuplicateDimensionError& e) {
      last_error = e.what();
    }
  }
  throw JudgeFailedError(std::string(side_name) + " judgement failed after retry: " +
                         last_error);
}

}  // namespace

int judge_verdict(ModelGateway& gateway, const ModelConfig& judge_config,
                  const TemplateSet& templates, std::string_view prompt_text,
                  std::string_view response_text, JudgeTranscript& transcript) {
  std::string judge_prompt =
      build_accuracy_judge_prompt(templates, prompt_text, response_text);
  return judge_side(gateway, judge_config, judge_prompt, transcript, "verdict",
                    [](const std::string& text) { return parse_accuracy_verdict(text); });
}

QualityScores judge_quality(ModelGateway& gateway, const ModelConfig& judge_config,
                            const TemplateSet& templates, std::string_view prompt_text,
                            std::string_view response_text, JudgeTranscript& transcript) {
  std::string judge_prompt =
      build_quality_judge_prompt(templates, prompt_text, response_text);
  return judge_side(gateway, judge_config, judge_prompt, transcript, "quality",
                    [](const std::string& text) { return parse_quality_scores(text); });
}

JudgeScores judge_response(ModelGateway& gateway, const ModelConfig& judge_config,
                           const TemplateSet& templates, std::string_view prompt_text,
                           std::string_view response_text) {
  JudgeScores scores;
  scores.judge_model = judge_config.model_name;
  try {
    scores.action_verdict = judge_verdict(gateway, judge_config, templates, prompt_text,
                                          response_text, scores.verdict_transcript);
  } catch (const JudgeFailedError&) {
  }
  try {
    scores.quality = judge_quality(gateway, judge_config, templates, prompt_text,
                                   response_text, scores.quality_transcript);
  } catch (const JudgeFailedError&) {
  }
  return scores;
}

json to_json(const JudgeTranscript& transcript) {
  return json{
      {"parsed", transcript.parsed},
      {"raw_outputs", transcript.raw_outputs},
      {"request_fingerprint", transcript.request_fingerprint},
  };
}

json to_json(const JudgeScores& scores) {
  json quality = nullptr;
  if (scores.quality.has_value()) {
    quality = json::object();
    for (const auto& [dimension, value] : *scores.quality) {
      quality[std::string(to_string(dimension))] = value;
    }
  }
  return json{
      {"action_verdict",
       scores.action_verdict.has_value() ? json(*scores.action_verdict) : json(nullptr)},
      {"judge_model", scores.judge_model},
      {"quality", quality},
      {"quality_transcript", to_json(scores.quality_transcript)},
      {"verdict_transcript", to_json(scores.verdict_transcript)},
  };
}

JudgeTranscript judge_transcript_from_json(const json& value) {
  if (!value.is_object() || !value.contains("parsed") || !value.contains("raw_outputs") ||
      !value.contains("request_fingerprint")) {
    throw SchemaError("malformed judge transcript: " + value.dump());
  }
  JudgeTranscript transcript;
  try {
    transcript.parsed = value.at("parsed").get<bool>();
    transcript.raw_outputs = value.at("raw_outputs").get<std::vector<std::string>>();
    transcript.request_fingerprint = value.at("request_fingerprint").get<std::string>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed judge transcript: ") + e.what());
  }
  return transcript;
}

JudgeScores judge_scores_from_json(const json& value) {
  if (!value.is_object()) throw SchemaError("judge scores must be an object");
  JudgeScores scores;
  try {
    const json& verdict = value.at("action_verdict");
    if (!verdict.is_null()) {
      int parsed = verdict.get<int>();
      if (parsed != 0 && parsed != 1) {
        throw SchemaError("action_verdict must be 0 or 1, got " + verdict.dump());
      }
      scores.action_verdict = parsed;
    }
    const json& quality = value.at("quality");
    if (!quality.is_null()) {
      if (!quality.is_object()) throw SchemaError("quality must be an object or null");
      QualityScores parsed;
      for (const auto& [key, score] : quality.items()) {
        Dimension dimension = dimension_from_string(key);
        if (parsed.contains(dimension)) {
          throw SchemaError("duplicate quality dimension: " + key);
        }
        double number = score.get<double>();
        if (number < 1.0 || number > 10.0) {
          throw SchemaError("quality score out of [1,10]: " + key + " = " + score.dump());
        }
        parsed[dimension] = number;
      }
      if (parsed.size() != kAllDimensions.size()) {
        throw SchemaError("quality map must contain exactly the six dimensions");
      }
      scores.quality = std::move(parsed);
    }
    scores.judge_model = value.at("judge_model").get<std::string>();
    scores.verdict_transcript = judge_transcript_from_json(value.at("verdict_transcript"));
    scores.quality_transcript = judge_transcript_from_json(value.at("quality_transcript"));
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed judge scores: ") + e.what());
  } catch (const ConfigError& e) {
    throw SchemaError(std::string("malformed judge scores: ") + e.what());
  }
  return scores;
}

}  // namespace pestbench
