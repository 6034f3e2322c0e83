#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace opd {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class MotionType { kPrismatic, kRevolute };
enum class PartLabel { kDrawer, kDoor, kLid };
enum class CoordFrame { kCamera, kObject, kScene };

inline constexpr std::array<PartLabel, 3> kAllPartLabels = {
    PartLabel::kDrawer, PartLabel::kDoor, PartLabel::kLid};
inline constexpr std::array<MotionType, 2> kAllMotionTypes = {
    MotionType::kPrismatic, MotionType::kRevolute};

std::string_view to_string(MotionType t);
std::string_view to_string(PartLabel l);
std::string_view to_string(CoordFrame f);

// Parsers throw InputError on unknown names.
MotionType parse_motion_type(std::string_view s);
PartLabel parse_part_label(std::string_view s);
CoordFrame parse_coord_frame(std::string_view s);

inline constexpr double kUnitTolerance = 1e-9;
inline constexpr double kAxisEpsilon = 1e-8;

// Motion of one openable part. Origin is present iff the joint is revolute.
struct MotionParams {
  MotionType type = MotionType::kRevolute;
  Vec3 axis = Vec3::UnitY();
  std::optional<Vec3> origin;
  CoordFrame frame = CoordFrame::kCamera;

  // Both factories normalize the axis and reject axes shorter than 1e-8.
  static MotionParams prismatic(const Vec3& axis, CoordFrame frame);
  static MotionParams revolute(const Vec3& axis, const Vec3& origin, CoordFrame frame);

  // Throws GeometryError when an invariant does not hold.
  void validate() const;
};

// Half-open pixel box [x_min, x_max) x [y_min, y_max).
struct BBox {
  double x_min = 0;
  double y_min = 0;
  double x_max = 0;
  double y_max = 0;

  double width() const { return x_max > x_min ? x_max - x_min : 0.0; }
  double height() const { return y_max > y_min ? y_max - y_min : 0.0; }
  double area() const { return width() * height(); }
  bool operator==(const BBox&) const = default;
};

struct Intrinsics {
  double fx = 1;
  double fy = 1;
  double cx = 0;
  double cy = 0;
};

enum class OriginErrorMode { kPointToLine, kPointToPoint };
enum class PoseAccuracyDenominator { kAllGtParts, kMatchedPairs };
enum class MatchGeometry { kMask, kBox };

struct MetricConfig {
  double iou_threshold = 0.5;
  double axis_threshold_deg = 10.0;
  // Fraction of the GT object diagonal.
  double origin_threshold = 0.25;
  double confidence_threshold = 0.8;
  int recall_samples = 101;

  bool axis_orientation_aware = true;
  OriginErrorMode origin_mode = OriginErrorMode::kPointToLine;
  PoseAccuracyDenominator pose_denominator = PoseAccuracyDenominator::kAllGtParts;
  MatchGeometry match_geometry = MatchGeometry::kMask;
  double rotation_accuracy_deg = 5.0;
  double translation_accuracy = 0.1;

  // Throws Error when a threshold is out of range.
  void validate() const;
};

}  // namespace opd
