#include "opd/geometry/errors.hpp"

#include <cmath>
#include <numbers>

#include "opd/core/error.hpp"

namespace opd {

double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }
double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

namespace {

Vec3 normalized_or_throw(const Vec3& v) {
  const double n = v.norm();
  if (!std::isfinite(n) || n < kAxisEpsilon) throw GeometryError("axis is shorter than 1e-8");
  return v / n;
}

}  // namespace

double axis_angle_deg(const Vec3& a, const Vec3& b, bool orientation_aware) {
  // atan2 of (|a x b|, a.b) equals arccos(a.b) but keeps full precision near 0 and 180.
  const Vec3 ua = normalized_or_throw(a);
  const Vec3 ub = normalized_or_throw(b);
  double c = ua.dot(ub);
  if (!orientation_aware) c = std::abs(c);
  return rad_to_deg(std::atan2(ua.cross(ub).norm(), c));
}

double origin_error(const Vec3& pred_origin, const MotionParams& gt,
                    std::optional<double> normalizer, OriginErrorMode mode) {
  if (gt.type != MotionType::kRevolute || !gt.origin) {
    throw GeometryError("origin error needs a revolute GT with an origin");
  }
  const Vec3 d = pred_origin - *gt.origin;
  double dist = 0.0;
  if (mode == OriginErrorMode::kPointToPoint) {
    dist = d.norm();
  } else {
    const Vec3 a = normalized_or_throw(gt.axis);
    dist = (d - d.dot(a) * a).norm();
  }
  if (normalizer) {
    if (!(*normalizer > 0.0)) throw GeometryError("origin normalizer must be positive");
    dist /= *normalizer;
  }
  return dist;
}

double rotation_geodesic_deg(const Mat3& r1, const Mat3& r2) {
  // Same angle as arccos((tr - 1) / 2), computed from both sin and cos.
  const Mat3 rel = r1.transpose() * r2;
  const double c = (rel.trace() - 1.0) / 2.0;
  const Vec3 s{rel(2, 1) - rel(1, 2), rel(0, 2) - rel(2, 0), rel(1, 0) - rel(0, 1)};
  return rad_to_deg(std::atan2(0.5 * s.norm(), c));
}

double translation_error(const Vec3& t1, const Vec3& t2, double diagonal) {
  if (!(diagonal > 0.0)) throw GeometryError("object diagonal must be positive");
  return (t1 - t2).norm() / diagonal;
}

}  // namespace opd
