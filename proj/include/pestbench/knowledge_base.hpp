#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace pestbench {

// Canonical metric column order. Threshold tables list these twelve phrases
// as column headers; when a pest has several non-empty cells the first one
// in this order wins.
inline constexpr std::array<std::string_view, 12> kDensityMetrics = {
    "per square meter",
    "per plant",
    "leaf area eaten",
    "per trap",
    "of petioles damaged",
    "of plants are infested",
    "of tillers infested",
    "per pheromone trap",
    "per ear",
    "per trap on two consecutive occasions",
    "per yellow sticky trap",
    "per gram of soil",
};

bool is_known_metric(std::string_view metric);

struct DensityThreshold {
  double value = 0.0;
  std::string metric;
  bool is_percentage = false;

  bool operator==(const DensityThreshold&) const = default;
};

struct PestRecord {
  std::string name;
  std::vector<std::string> affected_crops;  // source order, deduplicated
  DensityThreshold threshold;
  std::string management_advice;
  std::string threshold_description;  // empty when the optional file has none

  bool operator==(const PestRecord&) const = default;
};

class KnowledgeBase {
 public:
  // Throws UnknownPestError. Matching is case-insensitive and trimmed.
  const PestRecord& lookup(std::string_view pest_name) const;
  bool contains(std::string_view pest_name) const;

  // Keyed by normalized pest name.
  const std::map<std::string, PestRecord>& records() const { return records_; }

  // Every crop appearing in any record, sorted, deduplicated by
  // normalized form.
  const std::vector<std::string>& all_crops() const { return all_crops_; }

  void add_record(PestRecord record);  // throws DuplicatePestError

  bool operator==(const KnowledgeBase& other) const { return records_ == other.records_; }

 private:
  std::map<std::string, PestRecord> records_;
  std::vector<std::string> all_crops_;
};

struct LoadSummary {
  std::size_t affected_crops_pests = 0;
  std::size_t threshold_pests = 0;
  std::size_t management_pests = 0;
  std::vector<std::string> excluded;  // pests outside the intersection, with the reason
  std::vector<std::string> warnings;  // rows skipped for unparsable thresholds
};

struct LoadResult {
  KnowledgeBase kb;
  LoadSummary summary;
};

// Builds the knowledge base from the three mandatory files plus the optional
// threshold-description file. Records are exactly the pests present in all
// three mandatory files; everything else lands in the summary.
// Throws MalformedFileError, DuplicatePestError, EmptyIntersectionError,
// IoError.
LoadResult load_knowledge_base(const std::string& affected_crops_path,
                               const std::string& thresholds_path,
                               const std::string& management_path,
                               const std::string& threshold_descriptions_path = "");

// Parses one raw threshold cell: strips a leading relational operator
// (<, >, <=, >=, ≤, ≥, =) and a trailing percent sign, then reads the
// decimal. The metric phrase of the originating column is attached as-is.
// Throws UnparsableDensityError.
DensityThreshold parse_density_cell(std::string_view raw, std::string_view metric);

// Renders a threshold the way scenarios phrase densities: "5 per ear",
// "10% of plants are infested".
std::string render_density(const DensityThreshold& threshold);
std::string render_density(double value, std::string_view metric, bool is_percentage);

// Inverse of render_density, for CLI input. Throws UnparsableDensityError.
DensityThreshold parse_density_text(std::string_view text);

// Canonical JSON form; reloading it yields an equal KnowledgeBase.
nlohmann::json to_canonical_json(const KnowledgeBase& kb);
KnowledgeBase knowledge_base_from_json(const nlohmann::json& doc);

}  // namespace pestbench
