#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "opd/pipeline/dataset.hpp"

namespace opd {

struct IntRange {
  int min = 1;
  int max = 1;
};

struct RealRange {
  double min = 0;
  double max = 0;
};

// Exact perturbations applied to ground truth when deriving predictions.
struct PerturbationSpec {
  double axis_noise_deg = 0;            // every predicted axis is this far from GT
  double origin_noise_fraction = 0;     // revolute origin offset, fraction of diagonal
  double pose_rotation_noise_deg = 0;   // geodesic distance of predicted pose
  double pose_translation_fraction = 0; // translation offset, fraction of diagonal
  RealRange confidence{0.85, 1.0};      // uniform per prediction
  double drop_rate = 0;                 // probability a GT part gets no prediction
  double false_positive_rate = 0;       // probability of one extra box per frame
};

struct SynthSpec {
  std::uint64_t seed = 0;
  int scenes = 3;
  int frames_per_scene = 4;
  IntRange objects_per_scene{1, 3};
  IntRange parts_per_object{1, 3};
  // Relative label frequencies. Drawers slide, doors and lids rotate.
  double drawer_weight = 1;
  double door_weight = 1;
  double lid_weight = 1;
  // Fraction of frames whose camera faces away from every object.
  double empty_frame_fraction = 0.2;
  RealRange camera_distance{1.4, 2.2};
  RealRange camera_height{0.3, 0.8};  // above the target object's top
  RealRange camera_yaw_deg{-25, 25};
  double object_yaw_jitter_deg = 10;
  int width = 128;
  int height = 96;
  double focal_scale = 0.9;  // fx = fy = focal_scale * width
  std::vector<std::string> splits{"val"};
  PoseScope prediction_scope = PoseScope::kPerPart;
  PerturbationSpec perturbation;

  // Throws Error on empty or inverted ranges and out-of-range rates.
  void validate() const;
};

struct SplitPredictions {
  std::string split;
  std::vector<PredictionFrame> frames;
};

struct SynthOutput {
  std::vector<SceneModel> scenes;
  std::vector<CameraTrajectory> trajectories;
  std::vector<SplitFrames> gt;
  std::vector<SplitPredictions> predictions;  // same split order as gt
};

// Deterministic in `spec`. Ground truth goes through build_dataset; the
// predictions copy its non-ignored parts with exactly the requested
// perturbations. Object-frame axes are +X, +Y or +Z, so axes within an object
// are parallel or orthogonal.
SynthOutput synth_generate(const SynthSpec& spec, int threads = 1);

// Derives predictions from ground-truth frames. Exposed so tests can perturb
// hand-built fixtures the same way.
std::vector<PredictionFrame> synth_predictions(const std::vector<Frame>& gt,
                                               const PerturbationSpec& perturbation,
                                               PoseScope scope, std::uint64_t seed);

}  // namespace opd
