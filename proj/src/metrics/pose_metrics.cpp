#include "opd/metrics/pose_metrics.hpp"

#include <algorithm>

#include "opd/geometry/errors.hpp"

namespace opd {

std::optional<double> median(std::vector<double> values) {
  if (values.empty()) return std::nullopt;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

PoseMetrics pose_metrics(std::span<const PosePair> pairs, std::size_t gt_total,
                         const MetricConfig& config) {
  PoseMetrics out;
  std::vector<double> rot, trans;
  std::size_t rot_hits = 0, trans_hits = 0;
  for (const auto& p : pairs) {
    if (!p.gt_diagonal || !(*p.gt_diagonal > 0.0)) {
      ++out.skipped;
      continue;
    }
    const double r = rotation_geodesic_deg(p.predicted.rotation, p.gt.rotation);
    const double t = translation_error(p.predicted.translation, p.gt.translation, *p.gt_diagonal);
    rot.push_back(r);
    trans.push_back(t);
    if (r <= config.rotation_accuracy_deg) ++rot_hits;
    if (t <= config.translation_accuracy) ++trans_hits;
  }
  out.pairs = rot.size();
  out.rotation_median_deg = median(rot);
  out.translation_median = median(trans);
  out.denominator =
      config.pose_denominator == PoseAccuracyDenominator::kAllGtParts ? gt_total : out.pairs;
  if (out.denominator > 0) {
    out.rotation_accuracy = static_cast<double>(rot_hits) / out.denominator;
    out.translation_accuracy = static_cast<double>(trans_hits) / out.denominator;
  }
  return out;
}

}  // namespace opd
