#include "opd/geometry/pose.hpp"

#include <cmath>

#include <Eigen/Geometry>
#include <Eigen/SVD>
#include <fmt/format.h>

#include "opd/core/error.hpp"

namespace opd {

double Quaternion::norm() const { return std::sqrt(dot(*this)); }

Quaternion Quaternion::normalized() const {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw GeometryError("cannot normalize a zero quaternion");
  return {w / n, x / n, y / n, z / n};
}

Quaternion quaternion_from_matrix(const Mat3& m) {
  if (!m.allFinite()) throw GeometryError("rotation matrix has non-finite entries");
  const double tr = m.trace();
  const double d0 = m(0, 0), d1 = m(1, 1), d2 = m(2, 2);
  Quaternion q;
  if (tr >= d0 && tr >= d1 && tr >= d2) {
    const double s = 2.0 * std::sqrt(1.0 + tr);
    q = {0.25 * s, (m(2, 1) - m(1, 2)) / s, (m(0, 2) - m(2, 0)) / s, (m(1, 0) - m(0, 1)) / s};
  } else if (d0 >= d1 && d0 >= d2) {
    const double s = 2.0 * std::sqrt(1.0 + d0 - d1 - d2);
    q = {(m(2, 1) - m(1, 2)) / s, 0.25 * s, (m(0, 1) + m(1, 0)) / s, (m(0, 2) + m(2, 0)) / s};
  } else if (d1 >= d2) {
    const double s = 2.0 * std::sqrt(1.0 + d1 - d0 - d2);
    q = {(m(0, 2) - m(2, 0)) / s, (m(0, 1) + m(1, 0)) / s, 0.25 * s, (m(1, 2) + m(2, 1)) / s};
  } else {
    const double s = 2.0 * std::sqrt(1.0 + d2 - d0 - d1);
    q = {(m(1, 0) - m(0, 1)) / s, (m(0, 2) + m(2, 0)) / s, (m(1, 2) + m(2, 1)) / s, 0.25 * s};
  }
  if (!std::isfinite(q.w) || !std::isfinite(q.x) || !std::isfinite(q.y) || !std::isfinite(q.z)) {
    throw GeometryError("matrix is too far from a rotation to extract a quaternion");
  }
  q = q.normalized();
  // Canonical hemisphere.
  if (q.w < 0.0) q = {-q.w, -q.x, -q.y, -q.z};
  return q;
}

Mat3 rotation_from_quaternion(const Quaternion& q_in) {
  const Quaternion q = q_in.normalized();
  const double w = q.w, x = q.x, y = q.y, z = q.z;
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),  //
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),   //
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

std::pair<Quaternion, Mat3> quat_roundtrip(const Mat3& rotation) {
  const Quaternion q = quaternion_from_matrix(rotation);
  return {q, rotation_from_quaternion(q)};
}

bool is_rotation(const Mat3& r, double tol) {
  if (!r.allFinite()) return false;
  const Mat3 e = r.transpose() * r - Mat3::Identity();
  return e.cwiseAbs().maxCoeff() <= tol && std::abs(r.determinant() - 1.0) <= tol;
}

Mat3 sanitize_rotation(const Mat3& raw, double guard) {
  if (!raw.allFinite()) throw GeometryError("rotation matrix has non-finite entries");
  const double det = raw.determinant();
  if (!(det > 0.0)) {
    throw GeometryError(fmt::format("matrix is singular or reflective (det = {:.3g})", det));
  }
  Eigen::JacobiSVD<Mat3> svd(raw, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3 nearest = svd.matrixU() * svd.matrixV().transpose();
  const double distance = (raw - nearest).norm();
  if (distance > guard) {
    throw GeometryError(fmt::format(
        "matrix is {:.3g} (Frobenius) from the nearest rotation, guard is {:.3g}", distance, guard));
  }
  return quat_roundtrip(raw).second;
}

RigidPose invert_pose(const RigidPose& pose) {
  const Mat3 rt = pose.rotation.transpose();
  return {rt, -(rt * pose.translation)};
}

namespace {

MotionParams transform_motion(const MotionParams& m, const RigidPose& pose, CoordFrame to) {
  Vec3 axis = pose.apply_direction(m.axis);
  axis.normalize();
  if (m.type == MotionType::kRevolute) {
    if (!m.origin) throw GeometryError("revolute motion without origin");
    return {m.type, axis, pose.apply(*m.origin), to};
  }
  return {m.type, axis, std::nullopt, to};
}

}  // namespace

MotionParams apply_pose_to_motion(const MotionParams& m, const RigidPose& camera_from_source,
                                  CoordFrame source) {
  if (source == CoordFrame::kCamera) {
    throw GeometryError("pose source frame must be object or scene");
  }
  if (m.frame != source) {
    throw GeometryError(fmt::format("motion is expressed in the {} frame but the pose maps from {}",
                                    to_string(m.frame), to_string(source)));
  }
  return transform_motion(m, camera_from_source, CoordFrame::kCamera);
}

MotionParams motion_from_camera(const MotionParams& m, const RigidPose& camera_from_target,
                                CoordFrame target) {
  if (m.frame != CoordFrame::kCamera) throw GeometryError("motion is not in the camera frame");
  if (target == CoordFrame::kCamera) throw GeometryError("target frame must be object or scene");
  return transform_motion(m, invert_pose(camera_from_target), target);
}

RigidPose derive_object_pose(const OrientedBoundingBox& obb, const RigidPose& world_from_camera) {
  if (!is_rotation(obb.basis, 1e-6)) {
    throw GeometryError("oriented bounding box basis is not a proper rotation");
  }
  if (!(obb.half_extents.minCoeff() > 0.0)) {
    throw GeometryError("oriented bounding box half extents must be positive");
  }
  const RigidPose world_from_object{obb.basis, obb.center};
  return invert_pose(world_from_camera) * world_from_object;
}

Mat3 axis_angle_rotation(const Vec3& axis, double angle_rad) {
  const double n = axis.norm();
  if (!(n >= kAxisEpsilon)) throw GeometryError("rotation axis is degenerate");
  return Eigen::AngleAxisd(angle_rad, axis / n).toRotationMatrix();
}

}  // namespace opd
