#pragma once

#include <array>

#include "pestbench/prompts.hpp"

namespace pestbench::testutil {

// The twelve published model x strategy rows: six quality means, the
// confusion counts, the four classification metrics as reported (2
// decimals), and the weighted final score.
struct ReportedRow {
  const char* model;
  Strategy strategy;
  std::array<double, 6> means;
  long tp, tn, fp, fn;
  double accuracy, precision, recall, f1;
  double final_score;
};

inline constexpr std::array<ReportedRow, 12> kReportedRows = {{
    {"FLAN-T5-XL", Strategy::ZeroShot, {2.52, 2.52, 3.30, 2.36, 2.76, 2.96},
     20, 6, 19, 5, 0.52, 0.51, 0.80, 0.62, 37.22},
    {"FLAN-T5-XL", Strategy::FewShot, {2.68, 3.00, 3.42, 2.44, 3.32, 3.46},
     10, 10, 15, 15, 0.40, 0.40, 0.40, 0.40, 34.32},
    {"FLAN-T5-XL", Strategy::InstructionBased, {3.70, 3.92, 4.84, 5.06, 5.04, 4.36},
     14, 14, 11, 11, 0.56, 0.56, 0.56, 0.56, 49.32},
    {"FLAN-T5-XL", Strategy::SelfConsistency, {2.64, 3.22, 4.04, 1.94, 3.92, 3.18},
     24, 1, 24, 1, 0.50, 0.50, 0.96, 0.66, 38.94},
    {"GPT-3.5", Strategy::ZeroShot, {8.82, 8.24, 9.90, 8.74, 9.54, 7.54},
     25, 4, 21, 0, 0.58, 0.54, 1.00, 0.70, 75.98},
    {"GPT-3.5", Strategy::FewShot, {8.14, 8.24, 9.86, 9.26, 8.36, 6.28},
     17, 8, 17, 8, 0.50, 0.50, 0.68, 0.58, 70.14},
    {"GPT-3.5", Strategy::InstructionBased, {8.28, 8.20, 9.60, 8.92, 9.14, 6.92},
     24, 12, 13, 1, 0.72, 0.65, 0.96, 0.77, 79.86},
    {"GPT-3.5", Strategy::SelfConsistency, {7.98, 8.00, 9.80, 7.70, 9.44, 7.16},
     25, 0, 25, 0, 0.50, 0.50, 1.00, 0.67, 70.08},
    {"GPT-4", Strategy::ZeroShot, {9.14, 8.88, 10.00, 9.86, 9.38, 8.74},
     24, 4, 21, 1, 0.56, 0.53, 0.96, 0.69, 78.40},
    {"GPT-4", Strategy::FewShot, {8.32, 8.46, 9.98, 9.46, 8.92, 7.14},
     21, 7, 18, 4, 0.56, 0.54, 0.84, 0.66, 74.68},
    {"GPT-4", Strategy::InstructionBased, {8.62, 8.76, 9.64, 9.46, 9.32, 7.68},
     24, 9, 16, 1, 0.66, 0.60, 0.96, 0.74, 79.88},
    {"GPT-4", Strategy::SelfConsistency, {8.72, 8.90, 10.00, 9.30, 9.88, 8.14},
     25, 0, 25, 0, 0.50, 0.50, 1.00, 0.67, 74.94},
}};

}  // namespace pestbench::testutil
