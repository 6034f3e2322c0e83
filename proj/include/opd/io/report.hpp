#pragma once

#include <optional>
#include <string>
#include <vector>

#include "opd/metrics/evaluate.hpp"

namespace opd::io {

// A small rectangular table rendered either as CSV or as aligned text.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
  std::string to_text() const;
};

// Fixed-precision cells. Missing values print as "-".
std::string percent_cell(const std::optional<double>& fraction);  // 0.5 -> "50.0"
std::string fixed_cell(const std::optional<double>& value, int decimals = 2);

// Part- and motion-averaged mAP: average | PDet | +M | +MA | +MAO.
Table map_table(const EvalReport& report);
// No AO accuracy | Single PDet, +MAO | Multiple PDet, +MAO.
Table ao_table(const EvalReport& report);
// drawer, door, lid, each with PDet | +M | +MA | +MAO.
Table category_table(const EvalReport& report);
// Rotation MedErr, Acc | translation MedErr, Acc.
Table pose_table(const PoseMetrics& pose, const MetricConfig& config);
// Axis consistency per threshold, then type consistency.
Table consistency_table(const ConsistencyReport& report);

// Dataset statistics: frames with none/single/multiple AO and parts/frame.
Table ao_count_table(const DatasetStats& stats);
// Frames with 0, 1, 2, 3, 4+ parts.
Table part_count_table(const DatasetStats& stats);
// Part and motion type counts.
Table part_type_table(const DatasetStats& stats);

}  // namespace opd::io
