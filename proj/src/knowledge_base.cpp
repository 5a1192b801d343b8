#include "pestbench/knowledge_base.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>

#include "pestbench/csv.hpp"
#include "pestbench/errors.hpp"
#include "pestbench/text.hpp"

namespace pestbench {

namespace {

using nlohmann::json;

std::string_view strip_relational_operator(std::string_view s) {
  for (std::string_view op : {"<=", ">=", "≤", "≥", "<", ">", "="}) {
    if (s.substr(0, op.size()) == op) return s.substr(op.size());
  }
  return s;
}

// Parses a JSON object file while rejecting duplicate top-level keys, which
// the DOM parser would otherwise silently collapse.
json parse_json_object(const std::string& path, std::string_view what) {
  std::string text = read_text_file(path);
  std::set<std::string> seen;
  json::parser_callback_t watch_keys = [&](int depth, json::parse_event_t event, json& parsed) {
    if (event == json::parse_event_t::key && depth == 1) {
      std::string key = normalize_name(parsed.get<std::string>());
      if (!seen.insert(key).second) {
        throw DuplicatePestError(path + ": pest '" + key + "' appears more than once");
      }
    }
    return true;
  };
  json doc = json::parse(text, watch_keys, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw MalformedFileError(path + ": expected a JSON object mapping pest name to " +
                             std::string(what));
  }
  return doc;
}

struct CropsEntry {
  std::string display_name;
  std::vector<std::string> crops;
};

std::map<std::string, CropsEntry> load_affected_crops(const std::string& path) {
  json doc = parse_json_object(path, "an array of crop names");
  std::map<std::string, CropsEntry> out;
  for (const auto& [pest, crops] : doc.items()) {
    std::string display = trim(pest);
    if (display.empty()) throw MalformedFileError(path + ": empty pest name");
    if (!crops.is_array() || crops.empty()) {
      throw MalformedFileError(path + ": pest '" + display +
                               "': expected a non-empty array of crop names");
    }
    CropsEntry entry;
    entry.display_name = display;
    std::set<std::string> seen_crops;
    for (const auto& crop : crops) {
      if (!crop.is_string() || trim(crop.get<std::string>()).empty()) {
        throw MalformedFileError(path + ": pest '" + display + "': crop names must be non-empty strings");
      }
      std::string crop_name = trim(crop.get<std::string>());
      if (seen_crops.insert(normalize_name(crop_name)).second) {
        entry.crops.push_back(crop_name);
      }
    }
    out.emplace(normalize_name(display), std::move(entry));
  }
  return out;
}

struct ThresholdEntry {
  DensityThreshold threshold;
};

std::map<std::string, ThresholdEntry> load_thresholds(const std::string& path,
                                                      LoadSummary& summary) {
  auto rows = read_csv_file(path);
  if (rows.empty()) throw MalformedFileError(path + ": empty file");
  const auto& header = rows.front();
  if (header.size() != kDensityMetrics.size() + 1 || trim(header[0]) != "pest") {
    throw MalformedFileError(path + ": header must be 'pest' followed by the twelve metric phrases");
  }
  for (std::size_t i = 0; i < kDensityMetrics.size(); ++i) {
    if (trim(header[i + 1]) != kDensityMetrics[i]) {
      throw MalformedFileError(path + ": column " + std::to_string(i + 2) + " header is '" +
                               header[i + 1] + "', expected '" +
                               std::string(kDensityMetrics[i]) + "'");
    }
  }

  std::map<std::string, ThresholdEntry> out;
  std::set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    std::string row_ref = path + ": row " + std::to_string(r + 1);
    if (row.size() != header.size()) {
      throw MalformedFileError(row_ref + ": expected " + std::to_string(header.size()) +
                               " fields, got " + std::to_string(row.size()));
    }
    std::string pest = trim(row[0]);
    if (pest.empty()) throw MalformedFileError(row_ref + ": empty pest name");
    std::string key = normalize_name(pest);
    if (!seen.insert(key).second) {
      throw DuplicatePestError(row_ref + ": pest '" + pest + "' appears more than once");
    }

    // The first non-empty cell in canonical column order decides the
    // threshold; an unparsable or absent cell drops the row with a warning
    // rather than aborting the load.
    bool had_cell = false;
    for (std::size_t i = 0; i < kDensityMetrics.size(); ++i) {
      std::string cell = trim(row[i + 1]);
      if (cell.empty()) continue;
      had_cell = true;
      try {
        out.emplace(key, ThresholdEntry{parse_density_cell(cell, kDensityMetrics[i])});
      } catch (const UnparsableDensityError&) {
        summary.warnings.push_back("skipped pest '" + pest + "': unparsable threshold cell '" +
                                   cell + "' in column '" + std::string(kDensityMetrics[i]) + "'");
      }
      break;
    }
    if (!had_cell) {
      summary.warnings.push_back("skipped pest '" + pest + "': no threshold value");
    }
  }
  return out;
}

std::map<std::string, std::string> load_management(const std::string& path) {
  auto rows = read_csv_file(path);
  if (rows.empty()) throw MalformedFileError(path + ": empty file");
  const auto& header = rows.front();
  if (header.size() != 2 || trim(header[0]) != "pest" ||
      trim(header[1]) != "non_chemical_control") {
    throw MalformedFileError(path + ": header must be 'pest,non_chemical_control'");
  }
  std::map<std::string, std::string> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    std::string row_ref = path + ": row " + std::to_string(r + 1);
    if (row.size() != 2) throw MalformedFileError(row_ref + ": expected 2 fields");
    std::string pest = trim(row[0]);
    std::string advice = trim(row[1]);
    if (pest.empty()) throw MalformedFileError(row_ref + ": empty pest name");
    if (advice.empty()) throw MalformedFileError(row_ref + ": empty management advice");
    if (!out.emplace(normalize_name(pest), advice).second) {
      throw DuplicatePestError(row_ref + ": pest '" + pest + "' appears more than once");
    }
  }
  return out;
}

std::map<std::string, std::string> load_descriptions(const std::string& path) {
  json doc = parse_json_object(path, "a threshold description");
  std::map<std::string, std::string> out;
  for (const auto& [pest, description] : doc.items()) {
    if (!description.is_string()) {
      throw MalformedFileError(path + ": pest '" + pest + "': description must be a string");
    }
    out[normalize_name(pest)] = description.get<std::string>();
  }
  return out;
}

}  // namespace

bool is_known_metric(std::string_view metric) {
  return std::find(kDensityMetrics.begin(), kDensityMetrics.end(), metric) !=
         kDensityMetrics.end();
}

const PestRecord& KnowledgeBase::lookup(std::string_view pest_name) const {
  auto it = records_.find(normalize_name(pest_name));
  if (it == records_.end()) {
    throw UnknownPestError("unknown pest '" + trim(pest_name) + "'");
  }
  return it->second;
}

bool KnowledgeBase::contains(std::string_view pest_name) const {
  return records_.count(normalize_name(pest_name)) != 0;
}

void KnowledgeBase::add_record(PestRecord record) {
  std::string key = normalize_name(record.name);
  if (!records_.emplace(key, std::move(record)).second) {
    throw DuplicatePestError("pest '" + key + "' appears more than once");
  }
  std::set<std::string> seen;
  for (const auto& crop : all_crops_) seen.insert(normalize_name(crop));
  for (const auto& crop : records_.at(key).affected_crops) {
    if (seen.insert(normalize_name(crop)).second) all_crops_.push_back(crop);
  }
  std::sort(all_crops_.begin(), all_crops_.end(), [](const auto& a, const auto& b) {
    return normalize_name(a) < normalize_name(b);
  });
}

LoadResult load_knowledge_base(const std::string& affected_crops_path,
                               const std::string& thresholds_path,
                               const std::string& management_path,
                               const std::string& threshold_descriptions_path) {
  LoadResult result;
  auto crops = load_affected_crops(affected_crops_path);
  auto thresholds = load_thresholds(thresholds_path, result.summary);
  auto management = load_management(management_path);
  std::map<std::string, std::string> descriptions;
  if (!threshold_descriptions_path.empty()) {
    descriptions = load_descriptions(threshold_descriptions_path);
  }

  result.summary.affected_crops_pests = crops.size();
  result.summary.threshold_pests = thresholds.size();
  result.summary.management_pests = management.size();

  std::set<std::string> all_names;
  for (const auto& [key, _] : crops) all_names.insert(key);
  for (const auto& [key, _] : thresholds) all_names.insert(key);
  for (const auto& [key, _] : management) all_names.insert(key);

  for (const auto& key : all_names) {
    bool in_crops = crops.count(key) != 0;
    bool in_thresholds = thresholds.count(key) != 0;
    bool in_management = management.count(key) != 0;
    if (in_crops && in_thresholds && in_management) {
      PestRecord record;
      record.name = crops.at(key).display_name;
      record.affected_crops = crops.at(key).crops;
      record.threshold = thresholds.at(key).threshold;
      record.management_advice = management.at(key);
      auto desc = descriptions.find(key);
      if (desc != descriptions.end()) record.threshold_description = desc->second;
      result.kb.add_record(std::move(record));
    } else {
      std::vector<std::string> missing;
      if (!in_crops) missing.push_back("affected-crops");
      if (!in_thresholds) missing.push_back("thresholds");
      if (!in_management) missing.push_back("management");
      std::string note = "excluded pest '" + key + "': missing from ";
      for (std::size_t i = 0; i < missing.size(); ++i) {
        if (i > 0) note += ", ";
        note += missing[i];
      }
      result.summary.excluded.push_back(note);
    }
  }

  if (result.kb.records().empty()) {
    throw EmptyIntersectionError("no pest appears in all three knowledge files (" +
                                 std::to_string(crops.size()) + " with crops, " +
                                 std::to_string(thresholds.size()) + " with thresholds, " +
                                 std::to_string(management.size()) + " with advice)");
  }
  return result;
}

DensityThreshold parse_density_cell(std::string_view raw, std::string_view metric) {
  std::string cleaned = trim(raw);
  if (cleaned.empty()) throw UnparsableDensityError("empty density cell");
  cleaned = trim(strip_relational_operator(cleaned));

  DensityThreshold out;
  out.metric = std::string(metric);
  if (!cleaned.empty() && cleaned.back() == '%') {
    out.is_percentage = true;
    cleaned = trim(cleaned.substr(0, cleaned.size() - 1));
  }
  char* end = nullptr;
  out.value = std::strtod(cleaned.c_str(), &end);
  if (cleaned.empty() || end != cleaned.c_str() + cleaned.size() || out.value < 0.0) {
    throw UnparsableDensityError("cannot parse density from '" + std::string(trim(raw)) + "'");
  }
  return out;
}

std::string render_density(const DensityThreshold& threshold) {
  return render_density(threshold.value, threshold.metric, threshold.is_percentage);
}

std::string render_density(double value, std::string_view metric, bool is_percentage) {
  std::string out = format_decimal(value);
  if (is_percentage) out += "%";
  out += " ";
  out += metric;
  return out;
}

DensityThreshold parse_density_text(std::string_view text) {
  std::string cleaned = trim(text);
  std::vector<std::string_view> by_length(kDensityMetrics.begin(), kDensityMetrics.end());
  std::sort(by_length.begin(), by_length.end(),
            [](auto a, auto b) { return a.size() > b.size(); });
  for (std::string_view metric : by_length) {
    if (cleaned.size() <= metric.size()) continue;
    if (std::string_view(cleaned).substr(cleaned.size() - metric.size()) != metric) continue;
    std::string head = trim(cleaned.substr(0, cleaned.size() - metric.size()));
    if (head.empty()) continue;
    return parse_density_cell(head, metric);
  }
  throw UnparsableDensityError("no metric phrase found in '" + cleaned + "'");
}

nlohmann::json to_canonical_json(const KnowledgeBase& kb) {
  json pests = json::object();
  for (const auto& [_, record] : kb.records()) {
    json entry;
    entry["affected_crops"] = record.affected_crops;
    entry["threshold"] = {{"value", record.threshold.value},
                          {"metric", record.threshold.metric},
                          {"is_percentage", record.threshold.is_percentage}};
    entry["management_advice"] = record.management_advice;
    if (!record.threshold_description.empty()) {
      entry["threshold_description"] = record.threshold_description;
    }
    pests[record.name] = std::move(entry);
  }
  return json{{"pests", std::move(pests)}};
}

KnowledgeBase knowledge_base_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("pests") || !doc.at("pests").is_object()) {
    throw SchemaError("knowledge base JSON must be an object with a 'pests' object");
  }
  KnowledgeBase kb;
  for (const auto& [name, entry] : doc.at("pests").items()) {
    PestRecord record;
    record.name = name;
    try {
      record.affected_crops = entry.at("affected_crops").get<std::vector<std::string>>();
      const auto& threshold = entry.at("threshold");
      record.threshold.value = threshold.at("value").get<double>();
      record.threshold.metric = threshold.at("metric").get<std::string>();
      record.threshold.is_percentage = threshold.at("is_percentage").get<bool>();
      record.management_advice = entry.at("management_advice").get<std::string>();
      if (entry.contains("threshold_description")) {
        record.threshold_description = entry.at("threshold_description").get<std::string>();
      }
    } catch (const json::exception& e) {
      throw SchemaError("knowledge base JSON: pest '" + name + "': " + e.what());
    }
    if (!is_known_metric(record.threshold.metric)) {
      throw SchemaError("knowledge base JSON: pest '" + name + "': unknown metric '" +
                        record.threshold.metric + "'");
    }
    kb.add_record(std::move(record));
  }
  return kb;
}

}  // namespace pestbench
