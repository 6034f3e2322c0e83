#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "opd/core/types.hpp"
#include "opd/losses/hungarian.hpp"

namespace opd {

struct LossWeights {
  double ce = 5.0;
  double dice = 5.0;
  double cls_matched = 2.0;
  double cls_unmatched = 0.1;
  double motion_type = 2.0;
  double axis = 16.0;
  double origin = 16.0;
  double pose = 30.0;
  double smooth_l1_beta = 1.0;

  void validate() const;
};

inline constexpr double kProbabilityFloor = 1e-7;
inline constexpr double kDiceEpsilon = 1e-8;

// Mean over components of 0.5 x^2 / beta (|x| < beta) or |x| - 0.5 beta.
double smooth_l1(std::span<const double> residual, double beta = 1.0);

// 1 - 2 sum(p g) / (sum p + sum g + 1e-8).
double dice_loss(std::span<const double> probs, std::span<const double> target);

// Mean binary cross-entropy with probabilities clamped to [1e-7, 1 - 1e-7].
double bce_loss(std::span<const double> probs, std::span<const double> target);

// -log of the clamped probability of the true class.
double ce_loss(std::span<const double> class_probs, std::size_t gt_class);

// Per-query network outputs, all as probabilities. class_probs has one entry
// per part class plus a trailing "no object" entry.
struct LossPrediction {
  std::vector<double> class_probs;
  std::vector<double> mask_probs;
  std::vector<double> motion_type_probs;  // [prismatic, revolute]
  Vec3 axis = Vec3::Zero();
  Vec3 origin = Vec3::Zero();
  std::optional<std::vector<double>> pose;  // 9 rotation (row-major) + 3 translation
};

struct LossTarget {
  std::size_t class_index = 0;
  std::vector<double> mask;
  MotionType motion_type = MotionType::kRevolute;
  Vec3 axis = Vec3::UnitY();
  std::optional<Vec3> origin;
  std::optional<std::vector<double>> pose;
};

// Hungarian cost entry: cls_matched * (-p[class]) + ce * bce + dice * dice.
double matching_cost(const LossPrediction& pred, const LossTarget& target,
                     const LossWeights& weights);

struct LossTerm {
  std::string name;
  double value = 0;   // unweighted
  double weight = 0;
  double weighted = 0;
};

struct LossBreakdown {
  std::vector<LossTerm> terms;
  double total = 0;

  const LossTerm& term(const std::string& name) const;
};

struct MatchedPair {
  LossPrediction prediction;
  LossTarget target;
};

// Segmentation + motion + pose objective. Matched-pair terms are averaged
// over matched pairs (origin over all matched pairs, prismatic contributing
// 0); the unmatched class term is averaged over unmatched queries, whose
// target is the trailing "no object" class.
LossBreakdown total_loss(std::span<const MatchedPair> matched,
                         std::span<const LossPrediction> unmatched, const LossWeights& weights);

struct MatchedLoss {
  Assignment assignment;
  LossBreakdown breakdown;
};

// Builds the cost matrix, assigns with hungarian_match and scores the result.
MatchedLoss match_and_score(std::span<const LossPrediction> preds,
                            std::span<const LossTarget> targets, const LossWeights& weights);

}  // namespace opd
