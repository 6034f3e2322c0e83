#pragma once

#include <utility>

#include "opd/core/types.hpp"

namespace opd {

// Rigid transform x' = R x + t. The naming convention "a<-b" in comments
// means the pose maps coordinates in frame b into frame a.
struct RigidPose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidPose identity() { return {}; }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Vec3 apply_direction(const Vec3& d) const { return rotation * d; }

  // (this * other).apply(p) == this->apply(other.apply(p))
  RigidPose operator*(const RigidPose& other) const {
    return {rotation * other.rotation, rotation * other.translation + translation};
  }
};

struct Quaternion {
  double w = 1;
  double x = 0;
  double y = 0;
  double z = 0;

  double norm() const;
  Quaternion normalized() const;
  double dot(const Quaternion& o) const { return w * o.w + x * o.x + y * o.y + z * o.z; }
};

// Oriented box. basis columns are the box axes: column 1 (+Y) is up and
// column 2 (+Z) is the front.
struct OrientedBoundingBox {
  Vec3 center = Vec3::Zero();
  Vec3 half_extents = Vec3::Ones();
  Mat3 basis = Mat3::Identity();

  double diagonal() const { return 2.0 * half_extents.norm(); }
};

// Shepperd-style extraction: branches on the largest of trace and the three
// diagonal entries so the divisor never approaches zero. Works on any 3x3,
// the result is normalized.
Quaternion quaternion_from_matrix(const Mat3& m);
Mat3 rotation_from_quaternion(const Quaternion& q);

std::pair<Quaternion, Mat3> quat_roundtrip(const Mat3& rotation);

inline constexpr double kDefaultSanitizeGuard = 0.5;

// Projects a near-rotation onto SO(3) by going through a unit quaternion.
// Rejects inputs with det <= 0 or farther than `guard` (Frobenius) from the
// nearest rotation.
Mat3 sanitize_rotation(const Mat3& raw, double guard = kDefaultSanitizeGuard);

bool is_rotation(const Mat3& r, double tol = 1e-9);

RigidPose invert_pose(const RigidPose& pose);

// Moves motion parameters from `source` (object or scene) into the camera
// frame using pose camera<-source.
MotionParams apply_pose_to_motion(const MotionParams& m, const RigidPose& camera_from_source,
                                  CoordFrame source);

// Inverse direction: camera-frame motion into `target` using pose camera<-target.
MotionParams motion_from_camera(const MotionParams& m, const RigidPose& camera_from_target,
                                CoordFrame target);

// camera<-object pose for an OBB, given the camera pose world<-camera.
RigidPose derive_object_pose(const OrientedBoundingBox& obb, const RigidPose& world_from_camera);

// Rotation of `angle_rad` about `axis` (normalized internally).
Mat3 axis_angle_rotation(const Vec3& axis, double angle_rad);

}  // namespace opd
