#include "opd/pipeline/scene.hpp"

#include <set>

#include <fmt/format.h>

#include "opd/core/error.hpp"

namespace opd {

void Mesh::validate() const {
  const int n = static_cast<int>(vertices.size());
  for (const auto& v : vertices) {
    if (!v.allFinite()) throw GeometryError("mesh vertex is not finite");
  }
  for (const auto& t : triangles) {
    for (int i : t) {
      if (i < 0 || i >= n) {
        throw GeometryError(fmt::format("triangle index {} out of range [0, {})", i, n));
      }
    }
  }
}

void SceneModel::validate() const {
  std::set<PartId> seen;
  for (const auto& obj : objects) {
    for (const auto& part : obj.parts) {
      if (part.part_id < 0) {
        throw GeometryError(fmt::format("scene {}: part id {} is negative", scene_id, part.part_id));
      }
      if (!seen.insert(part.part_id).second) {
        throw GeometryError(fmt::format("scene {}: duplicate part id {}", scene_id, part.part_id));
      }
      if (part.motion.frame != CoordFrame::kObject) {
        throw GeometryError(
            fmt::format("scene {}: part {} motion must be in the object frame", scene_id,
                        part.part_id));
      }
      part.motion.validate();
      part.mesh.validate();
    }
  }
  if (static_geometry) static_geometry->validate();
}

void CameraEntry::validate() const {
  if (width <= 0 || height <= 0) {
    throw DimensionError(fmt::format("frame {}: image size {}x{} is empty", frame_id, width, height));
  }
  if (!(intrinsics.fx > 0) || !(intrinsics.fy > 0)) {
    throw GeometryError(fmt::format("frame {}: focal lengths must be positive", frame_id));
  }
  if (!is_rotation(camera_pose.rotation, 1e-6)) {
    throw GeometryError(fmt::format("frame {}: camera rotation is not a rotation", frame_id));
  }
}

}  // namespace opd
