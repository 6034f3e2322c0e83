#include "opd/metrics/matching.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "opd/core/error.hpp"
#include "opd/geometry/errors.hpp"

namespace opd {

MatchRecord MatchRecord::make(std::size_t prediction_index, std::size_t rank,
                              std::optional<std::size_t> gt_index, double iou, double confidence,
                              bool label_ok, MotionFlags flags, bool ignored_match) {
  MatchRecord r;
  r.prediction_index = prediction_index;
  r.rank = rank;
  r.gt_index = gt_index;
  r.iou = iou;
  r.confidence = confidence;
  r.label_ok = label_ok;
  r.ignored_match = ignored_match;
  const bool matched = gt_index.has_value() && label_ok;
  r.flags.type_ok = matched && flags.type_ok;
  r.flags.axis_ok = r.flags.type_ok && flags.axis_ok;
  r.flags.origin_ok = r.flags.axis_ok && flags.origin_ok;
  return r;
}

MotionFlags motion_flags(const MotionParams& pred, const MotionParams& gt,
                         std::optional<double> gt_diagonal, const MetricConfig& config) {
  if (pred.frame != CoordFrame::kCamera || gt.frame != CoordFrame::kCamera) {
    throw GeometryError("motion comparison requires both motions in the camera frame");
  }
  MotionFlags f;
  f.type_ok = pred.type == gt.type;
  f.axis_ok = f.type_ok &&
              axis_angle_deg(pred.axis, gt.axis, config.axis_orientation_aware) <=
                  config.axis_threshold_deg;
  if (!f.axis_ok) return f;
  if (gt.type == MotionType::kPrismatic) {
    f.origin_ok = true;
    return f;
  }
  if (!pred.origin) throw GeometryError("revolute prediction without origin");
  const double err = origin_error(*pred.origin, gt, gt_diagonal, config.origin_mode);
  f.origin_ok = err <= config.origin_threshold;
  return f;
}

namespace {

bool same_category(const PredictionInstance& p, const PartAnnotation& g, CategoryKey key) {
  return key == CategoryKey::kPartLabel ? p.label == g.label : p.motion.type == g.motion.type;
}

double overlap(const PredictionInstance& p, const PartAnnotation& g, const MetricConfig& config) {
  if (config.match_geometry == MatchGeometry::kBox) return bbox_iou(p.bbox, g.bbox);
  return mask_iou(p.mask, g.mask);
}

}  // namespace

std::vector<MatchRecord> match_frame(const std::vector<PredictionInstance>& preds,
                                     const std::vector<PartAnnotation>& gts,
                                     const MetricConfig& config, CategoryKey key) {
  const std::size_t np = preds.size();
  const std::size_t ng = gts.size();
  // Dimension checks run even in box mode so bad files fail loudly.
  for (std::size_t g = 1; g < ng; ++g) {
    if (gts[g].mask.width() != gts[0].mask.width() ||
        gts[g].mask.height() != gts[0].mask.height()) {
      throw DimensionError("GT masks in one frame have different sizes");
    }
  }
  for (const auto& p : preds) {
    if (ng > 0 && (p.mask.width() != gts[0].mask.width() ||
                   p.mask.height() != gts[0].mask.height())) {
      throw DimensionError(fmt::format("prediction mask {}x{} does not match frame {}x{}",
                                       p.mask.width(), p.mask.height(), gts[0].mask.width(),
                                       gts[0].mask.height()));
    }
  }

  // IoU table restricted to same-category pairs; other pairs never match.
  std::vector<double> iou(np * ng, 0.0);
  std::vector<double> best_candidate(np, 0.0);
  for (std::size_t p = 0; p < np; ++p) {
    for (std::size_t g = 0; g < ng; ++g) {
      if (!same_category(preds[p], gts[g], key)) continue;
      iou[p * ng + g] = overlap(preds[p], gts[g], config);
      best_candidate[p] = std::max(best_candidate[p], iou[p * ng + g]);
    }
  }

  std::vector<std::size_t> order(np);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (preds[a].confidence != preds[b].confidence) {
      return preds[a].confidence > preds[b].confidence;
    }
    return best_candidate[a] > best_candidate[b];
  });

  std::vector<bool> taken(ng, false);
  std::vector<MatchRecord> out;
  out.reserve(np);
  for (std::size_t rank = 0; rank < np; ++rank) {
    const std::size_t p = order[rank];
    std::optional<std::size_t> best;
    double best_iou = -1.0;
    for (std::size_t g = 0; g < ng; ++g) {
      if (gts[g].ignored || taken[g] || !same_category(preds[p], gts[g], key)) continue;
      const double v = iou[p * ng + g];
      if (v >= config.iou_threshold && v > best_iou) {
        best = g;
        best_iou = v;
      }
    }
    if (best) {
      taken[*best] = true;
      const MotionFlags flags = motion_flags(preds[p], gts[*best], config);
      out.push_back(MatchRecord::make(p, rank, best, best_iou, preds[p].confidence, true, flags,
                                      false));
      continue;
    }
    std::optional<std::size_t> ignored;
    double ignored_iou = -1.0;
    for (std::size_t g = 0; g < ng; ++g) {
      if (!gts[g].ignored || !same_category(preds[p], gts[g], key)) continue;
      const double v = iou[p * ng + g];
      if (v >= config.iou_threshold && v > ignored_iou) {
        ignored = g;
        ignored_iou = v;
      }
    }
    if (ignored) {
      out.push_back(MatchRecord::make(p, rank, ignored, ignored_iou, preds[p].confidence, true,
                                      {}, true));
    } else {
      out.push_back(MatchRecord::make(p, rank, std::nullopt, best_candidate[p],
                                      preds[p].confidence, false, {}, false));
    }
  }
  return out;
}

}  // namespace opd
