#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "opd/pipeline/scene.hpp"

namespace opd {

inline constexpr double kNearPlane = 1e-4;

// Pixel coordinates (u right, v down) and positive depth along the viewing
// direction. The camera looks down its -Z axis with +Y up.
struct Projection {
  double u = 0;
  double v = 0;
  double depth = 0;
};

// world -> pixel. Returns nullopt when the point is at or behind the near plane.
std::optional<Projection> project_point(const Vec3& world_point, const RigidPose& world_from_camera,
                                        const Intrinsics& intrinsics);

// Per-pixel part id, row-major.
struct LabelImage {
  static constexpr PartId kBackground = -1;

  int width = 0;
  int height = 0;
  std::vector<PartId> labels;

  PartId at(int x, int y) const { return labels[static_cast<std::size_t>(y) * width + x]; }
};

// Z-buffered rasterization of every part mesh (and static occluders) into a
// label image. One sample at each pixel center, top-left fill rule, 8 bits of
// subpixel precision. Triangles are two-sided.
LabelImage rasterize_labels(const SceneModel& scene, const CameraEntry& camera);

}  // namespace opd
