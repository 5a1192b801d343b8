#include "pestbench/prompts.hpp"

#include "pestbench/errors.hpp"
#include "pestbench/text.hpp"

namespace pestbench {

namespace {

constexpr const char* kDegree = "\xC2\xB0";  // UTF-8 degree sign

std::string load_template_file(const std::string& dir, const std::string& name) {
  std::string text = read_text_file(dir + "/" + name);
  if (!text.empty() && text.back() == '\n') text.pop_back();
  return text;
}

}  // namespace

std::string_view to_string(Strategy strategy) {
  switch (strategy) {
    case Strategy::ZeroShot: return "zero-shot";
    case Strategy::FewShot: return "few-shot";
    case Strategy::InstructionBased: return "instruction-based";
    case Strategy::SelfConsistency: return "self-consistency";
  }
  return "unknown";
}

Strategy strategy_from_string(std::string_view id) {
  for (Strategy s : kAllStrategies) {
    if (to_string(s) == id) return s;
  }
  throw ConfigError("unknown strategy '" + std::string(id) +
                    "' (expected zero-shot, few-shot, instruction-based or self-consistency)");
}

TemplateSet load_templates(const std::string& dir) {
  TemplateSet t;
  t.zero_shot = load_template_file(dir, "zero_shot.txt");
  t.few_shot = load_template_file(dir, "few_shot.txt");
  t.instruction = load_template_file(dir, "instruction.txt");
  t.self_consistency = load_template_file(dir, "self_consistency.txt");
  t.judge_accuracy = load_template_file(dir, "judge_accuracy.txt");
  t.judge_quality = load_template_file(dir, "judge_quality.txt");
  return t;
}

std::string render_template(std::string_view text,
                            const std::vector<std::pair<std::string, std::string>>& values) {
  std::string out(text);
  for (const auto& [key, value] : values) {
    std::string marker = "{" + key + "}";
    std::size_t pos = 0;
    while ((pos = out.find(marker, pos)) != std::string::npos) {
      out.replace(pos, marker.size(), value);
      pos += value.size();
    }
  }
  return out;
}

std::string zero_shot_question(const Scenario& scenario, const TemplateSet& templates) {
  return render_template(
      templates.zero_shot,
      {{"Pest", scenario.pest},
       {"Crop", scenario.crop},
       {"Density", scenario.density_text},
       {"Temperature", format_fixed1(scenario.temperature_celsius) + kDegree + "C"},
       {"Location", "latitude " + format_fixed1(scenario.latitude) + kDegree}});
}

PromptBundle build_zero_shot(const Scenario& scenario, const TemplateSet& templates) {
  PromptBundle bundle;
  bundle.strategy = Strategy::ZeroShot;
  bundle.scenario_id = scenario.scenario_id;
  bundle.text = zero_shot_question(scenario, templates);
  return bundle;
}

PromptBundle build_few_shot(const Scenario& scenario, const std::vector<Scenario>& pool,
                            const KnowledgeBase& kb, Rng& rng, const TemplateSet& templates) {
  std::vector<const Scenario*> eligible;
  for (const auto& candidate : pool) {
    if (candidate.label == 1 &&
        normalize_name(candidate.pest) != normalize_name(scenario.pest)) {
      eligible.push_back(&candidate);
    }
  }
  if (eligible.size() < 3) {
    throw InsufficientExemplarsError(
        "need 3 exemplars with label 1 and a pest other than '" + scenario.pest + "', found " +
        std::to_string(eligible.size()));
  }

  std::array<const Scenario*, 3> picks{};
  for (int i = 0; i < 3; ++i) {
    auto idx = static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<int>(eligible.size()) - 1));
    picks[static_cast<std::size_t>(i)] = eligible[idx];
    eligible.erase(eligible.begin() + static_cast<std::ptrdiff_t>(idx));
  }

  PromptBundle bundle;
  bundle.strategy = Strategy::FewShot;
  bundle.scenario_id = scenario.scenario_id;
  std::vector<std::pair<std::string, std::string>> values;
  for (int i = 0; i < 3; ++i) {
    const Scenario& exemplar = *picks[static_cast<std::size_t>(i)];
    std::string n = std::to_string(i + 1);
    values.emplace_back("Question " + n, zero_shot_question(exemplar, templates));
    values.emplace_back("Answer " + n, kb.lookup(exemplar.pest).management_advice);
    bundle.exemplar_ids.push_back(exemplar.scenario_id);
  }
  values.emplace_back("Question", zero_shot_question(scenario, templates));
  bundle.text = render_template(templates.few_shot, values);
  return bundle;
}

PromptBundle build_instruction(const Scenario& scenario, const KnowledgeBase& kb,
                               const TemplateSet& templates) {
  const PestRecord& record = kb.lookup(scenario.pest);
  std::string crops;
  for (std::size_t i = 0; i < record.affected_crops.size(); ++i) {
    if (i > 0) crops += ", ";
    crops += record.affected_crops[i];
  }

  PromptBundle bundle;
  bundle.strategy = Strategy::InstructionBased;
  bundle.scenario_id = scenario.scenario_id;
  bundle.text = render_template(templates.instruction,
                                {{"Pest", scenario.pest},
                                 {"Affected Crops", crops},
                                 {"Threshold", render_density(record.threshold)},
                                 {"Non-chemical control solutions", record.management_advice},
                                 {"Question", zero_shot_question(scenario, templates)}});
  return bundle;
}

PromptBundle build_self_consistency(const Scenario& scenario,
                                    const std::array<std::string, 3>& responses,
                                    const std::array<std::string, 3>& source_response_ids,
                                    const TemplateSet& templates) {
  PromptBundle bundle;
  bundle.strategy = Strategy::SelfConsistency;
  bundle.scenario_id = scenario.scenario_id;
  bundle.source_response_ids.assign(source_response_ids.begin(), source_response_ids.end());
  bundle.text = render_template(templates.self_consistency,
                                {{"Response 1", responses[0]},
                                 {"Response 2", responses[1]},
                                 {"Response 3", responses[2]},
                                 {"Question", zero_shot_question(scenario, templates)}});
  return bundle;
}

}  // namespace pestbench
