#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "opd/core/types.hpp"
#include "opd/geometry/pose.hpp"

namespace opd {

struct PosePair {
  RigidPose predicted;
  RigidPose gt;
  std::optional<double> gt_diagonal;
};

struct PoseMetrics {
  std::optional<double> rotation_median_deg;
  std::optional<double> rotation_accuracy;
  std::optional<double> translation_median;
  std::optional<double> translation_accuracy;
  std::size_t pairs = 0;
  std::size_t skipped = 0;  // pairs without a GT diagonal
  std::size_t denominator = 0;
};

// Median of the values; the mean of the two middle values for even sizes.
std::optional<double> median(std::vector<double> values);

// Rotation error in degrees and translation error as a fraction of the GT
// object diagonal, summarized as medians and accuracies. With the all-GT
// denominator, `gt_total` (non-ignored GT parts) divides the accuracy counts.
PoseMetrics pose_metrics(std::span<const PosePair> pairs, std::size_t gt_total,
                         const MetricConfig& config);

}  // namespace opd
