#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "opd/core/annotation.hpp"

namespace opd {

struct ConsistencyItem {
  ObjectId object_id = 0;
  PartLabel label = PartLabel::kDoor;
  MotionParams motion;
};

struct ConsistencyReport {
  std::vector<double> thresholds_deg;
  // Per threshold: frame-averaged fraction of within-object axis pairs that
  // are parallel or perpendicular. nullopt when no frame has a pair.
  std::vector<std::optional<double>> axis;
  // Frame-averaged fraction of same-label within-object pairs with equal
  // motion type.
  std::optional<double> type;
  std::size_t axis_frames = 0;
  std::size_t type_frames = 0;
};

inline const std::vector<double> kDefaultConsistencyThresholds = {1.0, 5.0, 10.0};

// Axis pairs are compared with the sign-insensitive angle u in [0, 90] and
// count as consistent at threshold t when min(u, 90 - u) <= t.
ConsistencyReport consistency_report(const std::vector<std::vector<ConsistencyItem>>& frames,
                                     const std::vector<double>& thresholds_deg =
                                         kDefaultConsistencyThresholds);

// Non-ignored GT parts of a frame.
std::vector<ConsistencyItem> consistency_items(const Frame& gt);

// Resolved predictions that matched a non-ignored GT part with confidence at
// or above the config threshold; they inherit the GT object id.
std::vector<ConsistencyItem> consistency_items(const std::vector<PredictionInstance>& resolved,
                                               const Frame& gt, const MetricConfig& config);

}  // namespace opd
