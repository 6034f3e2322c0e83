#pragma once

#include <optional>

#include "opd/core/types.hpp"

namespace opd {

// Angle between two directions in degrees. Orientation-aware mode returns
// [0, 180]; otherwise a and -a are equivalent and the range is [0, 90].
double axis_angle_deg(const Vec3& a, const Vec3& b, bool orientation_aware = true);

// Distance from a predicted origin to the GT hinge line (or the GT origin in
// point-to-point mode), optionally divided by a normalizer such as the
// object diagonal. Throws when gt is not revolute.
double origin_error(const Vec3& pred_origin, const MotionParams& gt,
                    std::optional<double> normalizer = std::nullopt,
                    OriginErrorMode mode = OriginErrorMode::kPointToLine);

// Angle of R1^T R2 in degrees, in [0, 180].
double rotation_geodesic_deg(const Mat3& r1, const Mat3& r2);

// |t1 - t2| / diagonal. Throws when diagonal <= 0.
double translation_error(const Vec3& t1, const Vec3& t2, double diagonal);

double rad_to_deg(double rad);
double deg_to_rad(double deg);

}  // namespace opd
