#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "opd/core/annotation.hpp"
#include "opd/geometry/pose.hpp"

namespace opd {

// Triangle mesh, world frame, meters.
struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;

  void validate() const;
};

struct ScenePart {
  PartId part_id = 0;
  PartLabel label = PartLabel::kDoor;
  Mesh mesh;
  MotionParams motion;  // object frame
};

struct SceneObject {
  ObjectId object_id = 0;
  OrientedBoundingBox obb;
  std::vector<ScenePart> parts;
};

struct SceneModel {
  std::string scene_id;
  std::vector<SceneObject> objects;
  std::optional<Mesh> static_geometry;

  // Unique non-negative part ids, unit axes in the object frame, valid meshes.
  void validate() const;
};

struct CameraEntry {
  std::string frame_id;
  RigidPose camera_pose;  // world<-camera
  Intrinsics intrinsics;
  int width = 0;
  int height = 0;

  void validate() const;
};

struct CameraTrajectory {
  std::string scene_id;
  std::string split;
  std::vector<CameraEntry> frames;
};

}  // namespace opd
