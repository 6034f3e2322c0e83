#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <vector>

#include "opd/metrics/average_precision.hpp"
#include "opd/metrics/consistency.hpp"
#include "opd/metrics/pose_metrics.hpp"
#include "opd/pipeline/dataset.hpp"

namespace opd {

using LevelValues = std::array<std::optional<double>, 4>;

struct CategoryScores {
  LevelValues ap;
  std::size_t gt_count = 0;
  std::size_t detections = 0;
};

struct ApBlock {
  std::size_t frames = 0;
  std::map<PartLabel, CategoryScores> per_label;
  std::map<MotionType, CategoryScores> per_motion;
  // Means over categories with at least one non-ignored GT.
  LevelValues part_averaged;
  LevelValues motion_averaged;
};

struct EvalReport {
  ApBlock overall;
  std::map<AoClass, ApBlock> by_ao;
  std::optional<double> no_ao_accuracy;
  std::size_t no_ao_frames = 0;
  PoseMetrics pose;
  std::size_t predictions = 0;
  std::size_t confident_predictions = 0;
};

// Fraction of GT frames without non-ignored parts for which no prediction
// reaches the confidence threshold. nullopt when there is no such frame.
std::optional<double> no_ao_accuracy(const std::vector<PredictionFrame>& preds,
                                     const std::vector<Frame>& gts, const MetricConfig& config);

// Full evaluation. Frames are paired by id (one-to-one, otherwise InputError)
// and processed in sorted id order, so the input order never changes the
// result. Matching runs on `threads` workers.
EvalReport evaluate(const std::vector<PredictionFrame>& preds, const std::vector<Frame>& gts,
                    const MetricConfig& config, int threads = 1);

// Consistency of confident matched predictions, grouped by the object of the
// GT part they matched.
ConsistencyReport prediction_consistency(
    const std::vector<PredictionFrame>& preds, const std::vector<Frame>& gts,
    const MetricConfig& config,
    const std::vector<double>& thresholds_deg = kDefaultConsistencyThresholds);

// Consistency of the non-ignored GT parts themselves.
ConsistencyReport gt_consistency(
    const std::vector<Frame>& gts,
    const std::vector<double>& thresholds_deg = kDefaultConsistencyThresholds);

// Pairs frames by id; throws InputError on duplicates or missing partners.
// Returned pairs are sorted by frame id.
std::vector<std::pair<const PredictionFrame*, const Frame*>> pair_frames(
    const std::vector<PredictionFrame>& preds, const std::vector<Frame>& gts);

}  // namespace opd
