#pragma once

#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pestbench/knowledge_base.hpp"
#include "pestbench/rng.hpp"
#include "pestbench/scenario.hpp"

namespace pestbench {

enum class Strategy { ZeroShot, FewShot, InstructionBased, SelfConsistency };

inline constexpr std::array<Strategy, 4> kAllStrategies = {
    Strategy::ZeroShot, Strategy::FewShot, Strategy::InstructionBased,
    Strategy::SelfConsistency};

// Stable identifier used in config files, records, and CLI flags.
std::string_view to_string(Strategy strategy);
Strategy strategy_from_string(std::string_view id);  // throws ConfigError

struct TemplateSet {
  std::string zero_shot;
  std::string few_shot;
  std::string instruction;
  std::string self_consistency;
  std::string judge_accuracy;
  std::string judge_quality;
};

// Loads the six template files from a directory, trimming the single
// trailing newline a text editor leaves on each.
TemplateSet load_templates(const std::string& dir);

// Replaces every "{Key}" occurrence for each provided (Key, value) pair.
std::string render_template(std::string_view text,
                            const std::vector<std::pair<std::string, std::string>>& values);

struct PromptBundle {
  Strategy strategy = Strategy::ZeroShot;
  std::string text;
  std::string scenario_id;
  std::vector<std::string> exemplar_ids;         // FewShot: exactly three
  std::vector<std::string> source_response_ids;  // SelfConsistency: exactly three
};

// The shared question sentence; temperature renders as "18.4°C" and
// location as "latitude 52.3°".
std::string zero_shot_question(const Scenario& scenario, const TemplateSet& templates);

PromptBundle build_zero_shot(const Scenario& scenario, const TemplateSet& templates);

// Picks three exemplars with label 1 and a pest different from the target,
// drawing indexes into the remaining eligible list in pool order.
// Throws InsufficientExemplarsError when fewer than three qualify.
PromptBundle build_few_shot(const Scenario& scenario, const std::vector<Scenario>& pool,
                            const KnowledgeBase& kb, Rng& rng, const TemplateSet& templates);

// Throws UnknownPestError when the scenario's pest is not in the KB.
PromptBundle build_instruction(const Scenario& scenario, const KnowledgeBase& kb,
                               const TemplateSet& templates);

// responses must be the scenario's zero-shot, few-shot, and
// instruction-based responses, in that order; ids identify them.
PromptBundle build_self_consistency(const Scenario& scenario,
                                    const std::array<std::string, 3>& responses,
                                    const std::array<std::string, 3>& source_response_ids,
                                    const TemplateSet& templates);

}  // namespace pestbench
