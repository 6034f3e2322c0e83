#include "opd/metrics/consistency.hpp"

#include <algorithm>

#include "opd/geometry/errors.hpp"
#include "opd/metrics/matching.hpp"

namespace opd {

ConsistencyReport consistency_report(const std::vector<std::vector<ConsistencyItem>>& frames,
                                     const std::vector<double>& thresholds_deg) {
  ConsistencyReport out;
  out.thresholds_deg = thresholds_deg;
  const std::size_t nt = thresholds_deg.size();
  std::vector<double> axis_sum(nt, 0.0);
  double type_sum = 0.0;

  for (const auto& items : frames) {
    std::size_t axis_pairs = 0, type_pairs = 0, type_hits = 0;
    std::vector<std::size_t> axis_hits(nt, 0);
    for (std::size_t i = 0; i < items.size(); ++i) {
      for (std::size_t j = i + 1; j < items.size(); ++j) {
        if (items[i].object_id != items[j].object_id) continue;
        ++axis_pairs;
        const double u = axis_angle_deg(items[i].motion.axis, items[j].motion.axis, false);
        const double off = std::min(u, 90.0 - u);
        for (std::size_t t = 0; t < nt; ++t) {
          if (off <= thresholds_deg[t]) ++axis_hits[t];
        }
        if (items[i].label == items[j].label) {
          ++type_pairs;
          if (items[i].motion.type == items[j].motion.type) ++type_hits;
        }
      }
    }
    if (axis_pairs > 0) {
      ++out.axis_frames;
      for (std::size_t t = 0; t < nt; ++t) {
        axis_sum[t] += static_cast<double>(axis_hits[t]) / static_cast<double>(axis_pairs);
      }
    }
    if (type_pairs > 0) {
      ++out.type_frames;
      type_sum += static_cast<double>(type_hits) / static_cast<double>(type_pairs);
    }
  }

  out.axis.resize(nt);
  if (out.axis_frames > 0) {
    for (std::size_t t = 0; t < nt; ++t) out.axis[t] = axis_sum[t] / out.axis_frames;
  }
  if (out.type_frames > 0) out.type = type_sum / out.type_frames;
  return out;
}

std::vector<ConsistencyItem> consistency_items(const Frame& gt) {
  std::vector<ConsistencyItem> items;
  for (const auto& p : gt.parts) {
    if (!p.ignored) items.push_back({p.object_id, p.label, p.motion});
  }
  return items;
}

std::vector<ConsistencyItem> consistency_items(const std::vector<PredictionInstance>& resolved,
                                               const Frame& gt, const MetricConfig& config) {
  std::vector<ConsistencyItem> items;
  for (const auto& r : match_frame(resolved, gt.parts, config)) {
    if (!r.gt_index || r.ignored_match) continue;
    const auto& pred = resolved[r.prediction_index];
    if (pred.confidence < config.confidence_threshold) continue;
    items.push_back({gt.parts[*r.gt_index].object_id, pred.label, pred.motion});
  }
  return items;
}

}  // namespace opd
