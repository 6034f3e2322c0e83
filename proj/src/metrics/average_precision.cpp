#include "opd/metrics/average_precision.hpp"

#include <algorithm>
#include <vector>

namespace opd {

std::string_view to_string(MetricLevel level) {
  switch (level) {
    case MetricLevel::kPDet:
      return "PDet";
    case MetricLevel::kM:
      return "+M";
    case MetricLevel::kMA:
      return "+MA";
    case MetricLevel::kMAO:
      return "+MAO";
  }
  return "?";
}

bool is_true_positive(const MatchRecord& r, MetricLevel level) {
  if (!r.gt_index || r.ignored_match || !r.label_ok) return false;
  switch (level) {
    case MetricLevel::kPDet:
      return true;
    case MetricLevel::kM:
      return r.flags.type_ok;
    case MetricLevel::kMA:
      return r.flags.axis_ok;
    case MetricLevel::kMAO:
      return r.flags.origin_ok;
  }
  return false;
}

std::optional<double> average_precision(std::span<const RankedRecord> records,
                                        std::size_t gt_count, MetricLevel level,
                                        const MetricConfig& config) {
  if (gt_count == 0) return std::nullopt;

  std::vector<const RankedRecord*> dets;
  dets.reserve(records.size());
  for (const auto& r : records) {
    if (!r.record.ignored_match) dets.push_back(&r);
  }
  std::sort(dets.begin(), dets.end(), [](const RankedRecord* a, const RankedRecord* b) {
    if (a->record.confidence != b->record.confidence) {
      return a->record.confidence > b->record.confidence;
    }
    if (a->frame_order != b->frame_order) return a->frame_order < b->frame_order;
    return a->record.rank < b->record.rank;
  });

  const std::size_t n = dets.size();
  std::vector<double> precision(n), recall(n);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (is_true_positive(dets[i]->record, level)) ++tp;
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    recall[i] = static_cast<double>(tp) / static_cast<double>(gt_count);
  }
  // Precision envelope, right to left.
  for (std::size_t i = n; i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);

  const int samples = config.recall_samples;
  double sum = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double r = static_cast<double>(s) / static_cast<double>(samples - 1);
    const auto it = std::lower_bound(recall.begin(), recall.end(), r);
    if (it != recall.end()) sum += precision[static_cast<std::size_t>(it - recall.begin())];
  }
  return sum / samples;
}

}  // namespace opd
