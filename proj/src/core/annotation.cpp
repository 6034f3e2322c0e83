#include "opd/core/annotation.hpp"

#include <fmt/format.h>

#include "opd/core/error.hpp"

namespace opd {

PartAnnotation make_part_annotation(PartId part_id, ObjectId object_id, PartLabel label,
                                    BinaryMask mask, MotionParams motion,
                                    double small_part_threshold) {
  motion.validate();
  PartAnnotation part;
  part.part_id = part_id;
  part.object_id = object_id;
  part.label = label;
  part.bbox = tight_bbox(mask);
  const double pixels = static_cast<double>(mask.width()) * mask.height();
  part.coverage_ratio = static_cast<double>(mask.area()) / pixels;
  part.ignored = part.coverage_ratio < small_part_threshold;
  part.mask = std::move(mask);
  part.motion = std::move(motion);
  return part;
}

std::string_view to_string(PoseScope s) {
  switch (s) {
    case PoseScope::kNone:
      return "none";
    case PoseScope::kGlobal:
      return "global";
    case PoseScope::kPerPart:
      return "per_part";
  }
  return "?";
}

PoseScope parse_pose_scope(std::string_view s) {
  if (s == "none") return PoseScope::kNone;
  if (s == "global") return PoseScope::kGlobal;
  if (s == "per_part") return PoseScope::kPerPart;
  throw InputError(fmt::format("unknown pose scope '{}'", s));
}

void validate_frame(const Frame& frame) {
  if (frame.width <= 0 || frame.height <= 0) {
    throw DimensionError(fmt::format("frame {} has non-positive size", frame.frame_id));
  }
  for (const auto& p : frame.parts) {
    if (p.mask.width() != frame.width || p.mask.height() != frame.height) {
      throw DimensionError(fmt::format("part {} in frame {} has a {}x{} mask, frame is {}x{}",
                                       p.part_id, frame.frame_id, p.mask.width(), p.mask.height(),
                                       frame.width, frame.height));
    }
    if (!p.mask.empty() && !(tight_bbox(p.mask) == p.bbox)) {
      throw DimensionError(fmt::format("part {} in frame {}: bbox is not the tight mask bounds",
                                       p.part_id, frame.frame_id));
    }
    p.motion.validate();
  }
}

PredictionInstance resolve_prediction(const PredictionInstance& pred) {
  PredictionInstance out = pred;
  if (out.predicted_pose) {
    out.predicted_pose->rotation = sanitize_rotation(out.predicted_pose->rotation);
  }
  if (out.motion.frame == CoordFrame::kCamera) return out;
  if (out.pose_scope == PoseScope::kNone) {
    throw GeometryError("prediction without pose scope must be expressed in the camera frame");
  }
  if (!out.predicted_pose) {
    throw GeometryError(fmt::format("prediction motion is in the {} frame but carries no pose",
                                    to_string(out.motion.frame)));
  }
  const CoordFrame expected =
      out.pose_scope == PoseScope::kGlobal ? CoordFrame::kScene : CoordFrame::kObject;
  if (out.motion.frame != expected) {
    throw GeometryError(fmt::format("{} pose scope expects motion in the {} frame, got {}",
                                    to_string(out.pose_scope), to_string(expected),
                                    to_string(out.motion.frame)));
  }
  out.motion = apply_pose_to_motion(out.motion, *out.predicted_pose, expected);
  return out;
}

}  // namespace opd
