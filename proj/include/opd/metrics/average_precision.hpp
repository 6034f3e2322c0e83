#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "opd/metrics/matching.hpp"

namespace opd {

enum class MetricLevel { kPDet = 0, kM = 1, kMA = 2, kMAO = 3 };

inline constexpr std::array<MetricLevel, 4> kAllLevels = {MetricLevel::kPDet, MetricLevel::kM,
                                                          MetricLevel::kMA, MetricLevel::kMAO};

std::string_view to_string(MetricLevel level);

// True positive at `level`: matched a non-ignored GT and passes every nested
// motion check up to that level.
bool is_true_positive(const MatchRecord& r, MetricLevel level);

// A match record tagged with the position of its frame in the evaluation
// order, which breaks confidence ties deterministically.
struct RankedRecord {
  std::size_t frame_order = 0;
  MatchRecord record;
};

// 101-point interpolated AP (configurable sample count) over detections of
// one category. Ignored matches are dropped. Returns nullopt when gt_count is
// zero so the category can be left out of averages.
std::optional<double> average_precision(std::span<const RankedRecord> records,
                                        std::size_t gt_count, MetricLevel level,
                                        const MetricConfig& config);

}  // namespace opd
