#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opd/core/mask.hpp"
#include "opd/core/types.hpp"
#include "opd/geometry/pose.hpp"

namespace opd {

using PartId = std::int32_t;
using ObjectId = std::int32_t;

inline constexpr double kSmallPartThreshold = 0.05;

struct PartAnnotation {
  PartId part_id = 0;
  ObjectId object_id = 0;
  PartLabel label = PartLabel::kDoor;
  BinaryMask mask;
  BBox bbox;
  MotionParams motion;
  std::optional<RigidPose> object_pose;  // camera<-object
  std::optional<double> object_diagonal;
  double coverage_ratio = 0;
  bool ignored = false;
};

// Fills bbox, coverage_ratio and ignored from the mask. A part is ignored
// when it covers strictly less than `small_part_threshold` of the frame.
PartAnnotation make_part_annotation(PartId part_id, ObjectId object_id, PartLabel label,
                                    BinaryMask mask, MotionParams motion,
                                    double small_part_threshold = kSmallPartThreshold);

enum class PoseScope { kNone, kGlobal, kPerPart };

std::string_view to_string(PoseScope s);
PoseScope parse_pose_scope(std::string_view s);

struct PredictionInstance {
  PartLabel label = PartLabel::kDoor;
  double confidence = 0;
  BinaryMask mask;
  BBox bbox;
  MotionParams motion;
  std::optional<RigidPose> predicted_pose;  // camera<-object (per part) or camera<-scene (global)
  PoseScope pose_scope = PoseScope::kNone;
};

struct Frame {
  std::string frame_id;
  int width = 0;
  int height = 0;
  Intrinsics intrinsics;
  RigidPose camera_pose;  // world<-camera
  std::vector<PartAnnotation> parts;
  std::optional<RigidPose> global_pose;  // camera<-scene

  std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

struct PredictionFrame {
  std::string frame_id;
  std::vector<PredictionInstance> instances;
};

// Checks that every part mask matches the frame size and bbox = tight_bbox.
void validate_frame(const Frame& frame);

// Brings prediction motion into the camera frame using its predicted pose and
// sanitizes the predicted rotation. Predictions already in camera frame are
// returned with only the rotation sanitized.
PredictionInstance resolve_prediction(const PredictionInstance& pred);

}  // namespace opd
