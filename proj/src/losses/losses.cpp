#include "opd/losses/losses.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "opd/core/error.hpp"

namespace opd {

void LossWeights::validate() const {
  for (double w : {ce, dice, cls_matched, cls_unmatched, motion_type, axis, origin, pose}) {
    if (!(w >= 0.0)) throw Error("loss weights must be non-negative");
  }
  if (!(smooth_l1_beta > 0.0)) throw Error("smooth L1 beta must be positive");
}

double smooth_l1(std::span<const double> residual, double beta) {
  if (!(beta > 0.0)) throw Error("smooth L1 beta must be positive");
  if (residual.empty()) return 0.0;
  double sum = 0.0;
  for (double x : residual) {
    const double a = std::abs(x);
    sum += a < beta ? 0.5 * x * x / beta : a - 0.5 * beta;
  }
  return sum / static_cast<double>(residual.size());
}

namespace {

void check_same_size(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size()) {
    throw DimensionError(fmt::format("{}: prediction has {} entries, target has {}", what,
                                     a.size(), b.size()));
  }
}

double clamp_prob(double p) { return std::clamp(p, kProbabilityFloor, 1.0 - kProbabilityFloor); }

}  // namespace

double dice_loss(std::span<const double> probs, std::span<const double> target) {
  check_same_size(probs, target, "dice loss");
  double inter = 0.0, sp = 0.0, sg = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    inter += probs[i] * target[i];
    sp += probs[i];
    sg += target[i];
  }
  return 1.0 - 2.0 * inter / (sp + sg + kDiceEpsilon);
}

double bce_loss(std::span<const double> probs, std::span<const double> target) {
  check_same_size(probs, target, "binary cross-entropy");
  if (probs.empty()) throw DimensionError("binary cross-entropy of an empty mask");
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double p = clamp_prob(probs[i]);
    sum -= target[i] * std::log(p) + (1.0 - target[i]) * std::log(1.0 - p);
  }
  return sum / static_cast<double>(probs.size());
}

double ce_loss(std::span<const double> class_probs, std::size_t gt_class) {
  if (gt_class >= class_probs.size()) {
    throw DimensionError(fmt::format("class index {} out of range for {} classes", gt_class,
                                     class_probs.size()));
  }
  return -std::log(clamp_prob(class_probs[gt_class]));
}

double matching_cost(const LossPrediction& pred, const LossTarget& target,
                     const LossWeights& weights) {
  if (target.class_index >= pred.class_probs.size()) {
    throw DimensionError("target class index out of range");
  }
  return weights.cls_matched * -pred.class_probs[target.class_index] +
         weights.ce * bce_loss(pred.mask_probs, target.mask) +
         weights.dice * dice_loss(pred.mask_probs, target.mask);
}

const LossTerm& LossBreakdown::term(const std::string& name) const {
  for (const auto& t : terms) {
    if (t.name == name) return t;
  }
  throw Error(fmt::format("no loss term named '{}'", name));
}

LossBreakdown total_loss(std::span<const MatchedPair> matched,
                         std::span<const LossPrediction> unmatched, const LossWeights& weights) {
  weights.validate();
  double bce = 0, dice = 0, cls_m = 0, cls_u = 0, type = 0, axis = 0, origin = 0, pose = 0;
  std::size_t pose_pairs = 0;
  for (const auto& [pred, target] : matched) {
    bce += bce_loss(pred.mask_probs, target.mask);
    dice += dice_loss(pred.mask_probs, target.mask);
    cls_m += ce_loss(pred.class_probs, target.class_index);
    if (pred.motion_type_probs.size() != 2) {
      throw DimensionError("motion type probabilities need 2 entries");
    }
    type += ce_loss(pred.motion_type_probs, target.motion_type == MotionType::kRevolute ? 1 : 0);
    const Vec3 da = pred.axis - target.axis;
    axis += smooth_l1(std::span<const double>(da.data(), 3), weights.smooth_l1_beta);
    if (target.motion_type == MotionType::kRevolute) {
      if (!target.origin) throw Error("revolute target without origin");
      const Vec3 d = pred.origin - *target.origin;
      origin += smooth_l1(std::span<const double>(d.data(), 3), weights.smooth_l1_beta);
    }
    if (pred.pose && target.pose) {
      if (pred.pose->size() != 12 || target.pose->size() != 12) {
        throw DimensionError("pose vectors need 12 entries");
      }
      std::vector<double> d(12);
      for (std::size_t i = 0; i < 12; ++i) d[i] = (*pred.pose)[i] - (*target.pose)[i];
      pose += smooth_l1(d, weights.smooth_l1_beta);
      ++pose_pairs;
    }
  }
  for (const auto& pred : unmatched) {
    if (pred.class_probs.empty()) throw DimensionError("class probabilities are empty");
    cls_u += ce_loss(pred.class_probs, pred.class_probs.size() - 1);
  }
  const double nm = static_cast<double>(matched.size());
  auto mean = [](double sum, double n) { return n > 0 ? sum / n : 0.0; };

  LossBreakdown out;
  auto add = [&](std::string name, double value, double weight) {
    out.terms.push_back({std::move(name), value, weight, weight * value});
    out.total += weight * value;
  };
  add("mask_bce", mean(bce, nm), weights.ce);
  add("mask_dice", mean(dice, nm), weights.dice);
  add("class_matched", mean(cls_m, nm), weights.cls_matched);
  add("class_unmatched", mean(cls_u, static_cast<double>(unmatched.size())),
      weights.cls_unmatched);
  add("motion_type", mean(type, nm), weights.motion_type);
  add("axis", mean(axis, nm), weights.axis);
  add("origin", mean(origin, nm), weights.origin);
  add("pose", mean(pose, static_cast<double>(pose_pairs)), weights.pose);
  return out;
}

MatchedLoss match_and_score(std::span<const LossPrediction> preds,
                            std::span<const LossTarget> targets, const LossWeights& weights) {
  Eigen::MatrixXd cost(static_cast<Eigen::Index>(preds.size()),
                       static_cast<Eigen::Index>(targets.size()));
  for (std::size_t i = 0; i < preds.size(); ++i) {
    for (std::size_t j = 0; j < targets.size(); ++j) {
      cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          matching_cost(preds[i], targets[j], weights);
    }
  }
  MatchedLoss out;
  out.assignment = hungarian_match(cost);
  std::vector<MatchedPair> matched;
  std::vector<bool> used(preds.size(), false);
  for (const auto& [i, j] : out.assignment.pairs) {
    matched.push_back({preds[i], targets[j]});
    used[i] = true;
  }
  std::vector<LossPrediction> unmatched;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (!used[i]) unmatched.push_back(preds[i]);
  }
  out.breakdown = total_loss(matched, unmatched, weights);
  return out;
}

}  // namespace opd
