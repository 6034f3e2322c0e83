#include "opd/core/types.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "opd/core/error.hpp"

namespace opd {

std::string_view to_string(MotionType t) {
  return t == MotionType::kPrismatic ? "prismatic" : "revolute";
}

std::string_view to_string(PartLabel l) {
  switch (l) {
    case PartLabel::kDrawer:
      return "drawer";
    case PartLabel::kDoor:
      return "door";
    case PartLabel::kLid:
      return "lid";
  }
  return "?";
}

std::string_view to_string(CoordFrame f) {
  switch (f) {
    case CoordFrame::kCamera:
      return "camera";
    case CoordFrame::kObject:
      return "object";
    case CoordFrame::kScene:
      return "scene";
  }
  return "?";
}

MotionType parse_motion_type(std::string_view s) {
  if (s == "prismatic") return MotionType::kPrismatic;
  if (s == "revolute") return MotionType::kRevolute;
  throw InputError(fmt::format("unknown motion type '{}'", s));
}

PartLabel parse_part_label(std::string_view s) {
  if (s == "drawer") return PartLabel::kDrawer;
  if (s == "door") return PartLabel::kDoor;
  if (s == "lid") return PartLabel::kLid;
  throw InputError(fmt::format("unknown part label '{}'", s));
}

CoordFrame parse_coord_frame(std::string_view s) {
  if (s == "camera") return CoordFrame::kCamera;
  if (s == "object") return CoordFrame::kObject;
  if (s == "scene") return CoordFrame::kScene;
  throw InputError(fmt::format("unknown coordinate frame '{}'", s));
}

namespace {

Vec3 unit_axis(const Vec3& axis) {
  const double n = axis.norm();
  if (!std::isfinite(n) || n < kAxisEpsilon) {
    throw GeometryError("motion axis is shorter than 1e-8 or not finite");
  }
  // Dividing a unit vector by its norm can move the last bits; keeping it as
  // is makes serialization round trips exact.
  if (std::abs(n - 1.0) <= 4 * std::numeric_limits<double>::epsilon()) return axis;
  return axis / n;
}

}  // namespace

MotionParams MotionParams::prismatic(const Vec3& axis, CoordFrame frame) {
  return {MotionType::kPrismatic, unit_axis(axis), std::nullopt, frame};
}

MotionParams MotionParams::revolute(const Vec3& axis, const Vec3& origin, CoordFrame frame) {
  if (!origin.allFinite()) throw GeometryError("revolute origin is not finite");
  return {MotionType::kRevolute, unit_axis(axis), origin, frame};
}

void MotionParams::validate() const {
  if (!axis.allFinite() || std::abs(axis.norm() - 1.0) > kUnitTolerance) {
    throw GeometryError("motion axis must have unit length");
  }
  if (type == MotionType::kRevolute && !origin) {
    throw GeometryError("revolute motion requires an origin");
  }
  if (type == MotionType::kPrismatic && origin) {
    throw GeometryError("prismatic motion must not carry an origin");
  }
}

void MetricConfig::validate() const {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw Error("iou_threshold must lie in (0, 1]");
  }
  if (!(axis_threshold_deg > 0) || !(origin_threshold > 0) || !(confidence_threshold > 0) ||
      !(rotation_accuracy_deg > 0) || !(translation_accuracy > 0)) {
    throw Error("metric thresholds must be positive");
  }
  if (recall_samples < 2) throw Error("recall_samples must be at least 2");
}

}  // namespace opd
