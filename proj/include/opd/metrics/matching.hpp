#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "opd/core/annotation.hpp"

namespace opd {

struct MotionFlags {
  bool type_ok = false;
  bool axis_ok = false;
  bool origin_ok = false;
};

// One prediction after greedy matching within a frame.
struct MatchRecord {
  std::size_t prediction_index = 0;  // index into the frame's prediction list
  std::size_t rank = 0;              // position in the frame's processing order
  std::optional<std::size_t> gt_index;
  double iou = 0;
  double confidence = 0;
  bool label_ok = false;
  MotionFlags flags;
  // Matched only an ignored GT: neither TP nor FP.
  bool ignored_match = false;

  // Builds a record with nested flags: axis needs type, origin needs axis.
  static MatchRecord make(std::size_t prediction_index, std::size_t rank,
                          std::optional<std::size_t> gt_index, double iou, double confidence,
                          bool label_ok, MotionFlags flags, bool ignored_match);
};

// Which attribute plays the role of the detection class.
enum class CategoryKey { kPartLabel, kMotionType };

// Type, axis and origin agreement for a matched pair. Both motions must be in
// the camera frame. `gt_diagonal` normalizes the origin error when present.
MotionFlags motion_flags(const MotionParams& pred, const MotionParams& gt,
                         std::optional<double> gt_diagonal, const MetricConfig& config);

inline MotionFlags motion_flags(const PredictionInstance& pred, const PartAnnotation& gt,
                                const MetricConfig& config) {
  return motion_flags(pred.motion, gt.motion, gt.object_diagonal, config);
}

// Greedy confidence-ordered matching of resolved (camera-frame) predictions.
// Each prediction takes the unmatched same-category non-ignored GT with the
// highest IoU >= threshold; failing that, an ignored GT with IoU >= threshold
// absorbs it. Records come back in processing order.
std::vector<MatchRecord> match_frame(const std::vector<PredictionInstance>& preds,
                                     const std::vector<PartAnnotation>& gts,
                                     const MetricConfig& config,
                                     CategoryKey key = CategoryKey::kPartLabel);

}  // namespace opd
