#include "opd/metrics/evaluate.hpp"

#include <algorithm>
#include <unordered_map>

#include <fmt/format.h>

#include "opd/core/error.hpp"
#include "opd/core/parallel.hpp"

namespace opd {

std::vector<std::pair<const PredictionFrame*, const Frame*>> pair_frames(
    const std::vector<PredictionFrame>& preds, const std::vector<Frame>& gts) {
  std::unordered_map<std::string_view, const PredictionFrame*> pred_by_id;
  for (const auto& p : preds) {
    if (!pred_by_id.emplace(p.frame_id, &p).second) {
      throw InputError(fmt::format("duplicate prediction frame '{}'", p.frame_id));
    }
  }
  std::vector<std::pair<const PredictionFrame*, const Frame*>> out;
  out.reserve(gts.size());
  std::unordered_map<std::string_view, bool> gt_seen;
  for (const auto& g : gts) {
    if (!gt_seen.emplace(g.frame_id, true).second) {
      throw InputError(fmt::format("duplicate GT frame '{}'", g.frame_id));
    }
    auto it = pred_by_id.find(g.frame_id);
    if (it == pred_by_id.end()) {
      throw InputError(fmt::format("GT frame '{}' has no prediction entry", g.frame_id));
    }
    out.emplace_back(it->second, &g);
  }
  for (const auto& p : preds) {
    if (!gt_seen.contains(p.frame_id)) {
      throw InputError(fmt::format("prediction frame '{}' has no GT frame", p.frame_id));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.second->frame_id < b.second->frame_id; });
  return out;
}

std::optional<double> no_ao_accuracy(const std::vector<PredictionFrame>& preds,
                                     const std::vector<Frame>& gts, const MetricConfig& config) {
  std::size_t frames = 0, correct = 0;
  for (const auto& [pred, gt] : pair_frames(preds, gts)) {
    if (classify_frame_ao(*gt) != AoClass::kNone) continue;
    ++frames;
    const bool any_confident =
        std::any_of(pred->instances.begin(), pred->instances.end(),
                    [&](const auto& p) { return p.confidence >= config.confidence_threshold; });
    if (!any_confident) ++correct;
  }
  if (frames == 0) return std::nullopt;
  return static_cast<double>(correct) / frames;
}

namespace {

struct FrameResult {
  const Frame* gt = nullptr;
  std::vector<PredictionInstance> resolved;
  std::vector<MatchRecord> by_label;
  std::vector<MatchRecord> by_motion;
  AoClass ao = AoClass::kNone;
};

std::optional<double> mean_present(const std::vector<std::optional<double>>& values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

template <typename Key, typename PredKey, typename GtKey>
CategoryScores score_category(const std::vector<FrameResult>& results,
                              const std::vector<std::size_t>& subset, Key category,
                              bool motion_matching, PredKey pred_key, GtKey gt_key,
                              const MetricConfig& config) {
  CategoryScores scores;
  std::vector<RankedRecord> records;
  for (std::size_t order = 0; order < subset.size(); ++order) {
    const FrameResult& fr = results[subset[order]];
    for (const auto& part : fr.gt->parts) {
      if (!part.ignored && gt_key(part) == category) ++scores.gt_count;
    }
    const auto& recs = motion_matching ? fr.by_motion : fr.by_label;
    for (const auto& r : recs) {
      if (pred_key(fr.resolved[r.prediction_index]) != category) continue;
      if (!r.ignored_match) ++scores.detections;
      records.push_back({order, r});
    }
  }
  for (auto level : kAllLevels) {
    scores.ap[static_cast<std::size_t>(level)] =
        average_precision(records, scores.gt_count, level, config);
  }
  return scores;
}

ApBlock score_block(const std::vector<FrameResult>& results,
                    const std::vector<std::size_t>& subset, const MetricConfig& config) {
  ApBlock block;
  block.frames = subset.size();
  auto pred_label = [](const PredictionInstance& p) { return p.label; };
  auto gt_label = [](const PartAnnotation& g) { return g.label; };
  auto pred_motion = [](const PredictionInstance& p) { return p.motion.type; };
  auto gt_motion = [](const PartAnnotation& g) { return g.motion.type; };
  for (auto label : kAllPartLabels) {
    block.per_label[label] =
        score_category(results, subset, label, false, pred_label, gt_label, config);
  }
  for (auto type : kAllMotionTypes) {
    block.per_motion[type] =
        score_category(results, subset, type, true, pred_motion, gt_motion, config);
  }
  for (std::size_t l = 0; l < 4; ++l) {
    std::vector<std::optional<double>> parts, motions;
    for (const auto& [_, s] : block.per_label) parts.push_back(s.ap[l]);
    for (const auto& [_, s] : block.per_motion) motions.push_back(s.ap[l]);
    block.part_averaged[l] = mean_present(parts);
    block.motion_averaged[l] = mean_present(motions);
  }
  return block;
}

}  // namespace

EvalReport evaluate(const std::vector<PredictionFrame>& preds, const std::vector<Frame>& gts,
                    const MetricConfig& config, int threads) {
  config.validate();
  const auto pairs = pair_frames(preds, gts);

  std::vector<FrameResult> results(pairs.size());
  parallel_for(pairs.size(), threads, [&](std::size_t i) {
    const auto& [pred, gt] = pairs[i];
    validate_frame(*gt);
    FrameResult& fr = results[i];
    fr.gt = gt;
    fr.resolved.reserve(pred->instances.size());
    for (const auto& inst : pred->instances) {
      if (inst.mask.width() != gt->width || inst.mask.height() != gt->height) {
        throw DimensionError(fmt::format("frame {}: prediction mask is {}x{}, frame is {}x{}",
                                         gt->frame_id, inst.mask.width(), inst.mask.height(),
                                         gt->width, gt->height));
      }
      fr.resolved.push_back(resolve_prediction(inst));
    }
    fr.by_label = match_frame(fr.resolved, gt->parts, config, CategoryKey::kPartLabel);
    fr.by_motion = match_frame(fr.resolved, gt->parts, config, CategoryKey::kMotionType);
    fr.ao = classify_frame_ao(*gt);
  });

  EvalReport report;
  std::vector<std::size_t> all(results.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  report.overall = score_block(results, all, config);
  for (auto ao : {AoClass::kNone, AoClass::kSingle, AoClass::kMultiple}) {
    std::vector<std::size_t> subset;
    for (std::size_t i = 0; i < results.size(); ++i) {
      if (results[i].ao == ao) subset.push_back(i);
    }
    report.by_ao[ao] = score_block(results, subset, config);
  }

  std::size_t no_ao_correct = 0;
  std::size_t gt_total = 0;
  std::vector<PosePair> pose_pairs;
  for (const auto& fr : results) {
    std::size_t confident = 0;
    for (const auto& p : fr.resolved) {
      if (p.confidence >= config.confidence_threshold) ++confident;
    }
    report.predictions += fr.resolved.size();
    report.confident_predictions += confident;
    if (fr.ao == AoClass::kNone) {
      ++report.no_ao_frames;
      if (confident == 0) ++no_ao_correct;
    }
    for (const auto& part : fr.gt->parts) {
      if (!part.ignored) ++gt_total;
    }
    for (const auto& r : fr.by_label) {
      if (!r.gt_index || r.ignored_match) continue;
      const auto& pred = fr.resolved[r.prediction_index];
      const auto& gt = fr.gt->parts[*r.gt_index];
      if (pred.pose_scope != PoseScope::kPerPart || !pred.predicted_pose || !gt.object_pose) {
        continue;
      }
      pose_pairs.push_back({*pred.predicted_pose, *gt.object_pose, gt.object_diagonal});
    }
  }
  if (report.no_ao_frames > 0) {
    report.no_ao_accuracy = static_cast<double>(no_ao_correct) / report.no_ao_frames;
  }
  report.pose = pose_metrics(pose_pairs, gt_total, config);
  return report;
}

ConsistencyReport prediction_consistency(const std::vector<PredictionFrame>& preds,
                                         const std::vector<Frame>& gts,
                                         const MetricConfig& config,
                                         const std::vector<double>& thresholds_deg) {
  config.validate();
  std::vector<std::vector<ConsistencyItem>> items;
  for (const auto& [pred, gt] : pair_frames(preds, gts)) {
    validate_frame(*gt);
    std::vector<PredictionInstance> resolved;
    resolved.reserve(pred->instances.size());
    for (const auto& inst : pred->instances) resolved.push_back(resolve_prediction(inst));
    items.push_back(consistency_items(resolved, *gt, config));
  }
  return consistency_report(items, thresholds_deg);
}

ConsistencyReport gt_consistency(const std::vector<Frame>& gts,
                                 const std::vector<double>& thresholds_deg) {
  std::vector<std::vector<ConsistencyItem>> items;
  items.reserve(gts.size());
  for (const auto& gt : gts) items.push_back(consistency_items(gt));
  return consistency_report(items, thresholds_deg);
}

}  // namespace opd
