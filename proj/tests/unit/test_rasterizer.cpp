#include <set>

#include <doctest.h>

#include "opd/pipeline/rasterizer.hpp"
#include "test_support.hpp"

using namespace opd;
using opd::testing::add_quad;

namespace {

// Camera at the world origin looking down -Z.
CameraEntry straight_camera(int w, int h, double f) {
  CameraEntry cam;
  cam.frame_id = "c";
  cam.width = w;
  cam.height = h;
  cam.intrinsics = {f, f, 0.5 * w, 0.5 * h};
  return cam;
}

SceneModel single_part_scene(const Mesh& mesh) {
  SceneModel scene;
  scene.scene_id = "s";
  SceneObject obj;
  ScenePart part;
  part.part_id = 0;
  part.mesh = mesh;
  part.motion = MotionParams::prismatic(Vec3::UnitZ(), CoordFrame::kObject);
  obj.parts.push_back(part);
  scene.objects.push_back(obj);
  return scene;
}

std::set<std::pair<int, int>> covered(const LabelImage& img, PartId id) {
  std::set<std::pair<int, int>> out;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      if (img.at(x, y) == id) out.emplace(x, y);
    }
  }
  return out;
}

struct Agreement {
  double fraction = 0;
  int interior_mismatches = 0;
};

Agreement compare_to_reference(const SceneModel& scene, const CameraEntry& cam) {
  const LabelImage img = rasterize_labels(scene, cam);
  const auto ref = opd::testing::supersample(scene, cam);
  int match = 0, interior_bad = 0;
  for (int y = 0; y < cam.height; ++y) {
    for (int x = 0; x < cam.width; ++x) {
      const auto& px = ref[static_cast<std::size_t>(y) * cam.width + x];
      const PartId got = img.at(x, y);
      const bool ok = std::find(px.majority.begin(), px.majority.end(), got) != px.majority.end();
      match += ok;
      if (px.interior && !ok) ++interior_bad;
    }
  }
  return {static_cast<double>(match) / (cam.width * cam.height), interior_bad};
}

}  // namespace

TEST_CASE("project_point follows the pinhole model with the camera looking down -Z") {
  const CameraEntry cam = straight_camera(100, 80, 50);
  const auto p = project_point(Vec3(1, 1, -2), cam.camera_pose, cam.intrinsics);
  REQUIRE(p.has_value());
  CHECK(p->u == doctest::Approx(50 + 50 * 0.5));
  CHECK(p->v == doctest::Approx(40 - 50 * 0.5));
  CHECK(p->depth == doctest::Approx(2));
  CHECK_FALSE(project_point(Vec3(0, 0, 1), cam.camera_pose, cam.intrinsics).has_value());
  CHECK_FALSE(project_point(Vec3(0, 0, 0), cam.camera_pose, cam.intrinsics).has_value());
}

TEST_CASE("triangles sharing an edge cover each pixel exactly once") {
  const CameraEntry cam = straight_camera(8, 8, 8);
  const Vec3 a(-0.25, -0.25, -1), b(0.25, -0.25, -1), c(0.25, 0.25, -1), d(-0.25, 0.25, -1);
  Mesh t1, t2;
  t1.vertices = {a, b, c};
  t1.triangles = {{0, 1, 2}};
  t2.vertices = {a, c, d};
  t2.triangles = {{0, 1, 2}};
  const auto s1 = covered(rasterize_labels(single_part_scene(t1), cam), 0);
  const auto s2 = covered(rasterize_labels(single_part_scene(t2), cam), 0);
  std::set<std::pair<int, int>> both;
  for (const auto& p : s1) {
    if (s2.contains(p)) both.insert(p);
  }
  CHECK(both.empty());
  std::set<std::pair<int, int>> all = s1;
  all.insert(s2.begin(), s2.end());
  CHECK(all.size() == 16);
  for (int y = 2; y < 6; ++y) {
    for (int x = 2; x < 6; ++x) CHECK(all.contains({x, y}));
  }
}

TEST_CASE("winding order does not matter") {
  const CameraEntry cam = straight_camera(16, 16, 16);
  Mesh fwd, rev;
  fwd.vertices = {Vec3(-0.3, -0.2, -1), Vec3(0.35, -0.1, -1), Vec3(0.0, 0.3, -1)};
  fwd.triangles = {{0, 1, 2}};
  rev = fwd;
  rev.triangles = {{0, 2, 1}};
  CHECK(rasterize_labels(single_part_scene(fwd), cam).labels ==
        rasterize_labels(single_part_scene(rev), cam).labels);
}

TEST_CASE("the nearer surface wins regardless of draw order") {
  const CameraEntry cam = straight_camera(16, 16, 16);
  for (bool near_first : {true, false}) {
    SceneModel scene;
    scene.scene_id = "z";
    SceneObject obj;
    for (int i = 0; i < 2; ++i) {
      const bool is_near = (i == 0) == near_first;
      const double z = is_near ? -1.0 : -2.0;
      const double s = 0.4 * -z;  // same image footprint
      ScenePart part;
      part.part_id = is_near ? 7 : 9;
      part.motion = MotionParams::prismatic(Vec3::UnitZ(), CoordFrame::kObject);
      add_quad(part.mesh, Vec3(-s, -s, z), Vec3(s, -s, z), Vec3(s, s, z), Vec3(-s, s, z));
      obj.parts.push_back(part);
    }
    scene.objects.push_back(obj);
    const LabelImage img = rasterize_labels(scene, cam);
    CHECK(covered(img, 9).empty());
    CHECK(covered(img, 7).size() > 100);
  }
}

TEST_CASE("static geometry occludes parts behind it") {
  const CameraEntry cam = straight_camera(16, 16, 16);
  Mesh part_mesh;
  add_quad(part_mesh, Vec3(-1, -1, -3), Vec3(1, -1, -3), Vec3(1, 1, -3), Vec3(-1, 1, -3));
  SceneModel scene = single_part_scene(part_mesh);
  Mesh wall;
  add_quad(wall, Vec3(0, -1, -1), Vec3(1, -1, -1), Vec3(1, 1, -1), Vec3(0, 1, -1));
  scene.static_geometry = wall;
  const LabelImage img = rasterize_labels(scene, cam);
  CHECK(img.at(4, 8) == 0);
  CHECK(img.at(12, 8) == LabelImage::kBackground);
}

TEST_CASE("triangles crossing the camera plane are clipped, not dropped or mirrored") {
  const CameraEntry cam = straight_camera(32, 32, 16);
  Mesh floor;
  // A floor strip running from behind the camera into the distance.
  add_quad(floor, Vec3(-1, -0.5, 2), Vec3(1, -0.5, 2), Vec3(1, -0.5, -6), Vec3(-1, -0.5, -6));
  const SceneModel scene = single_part_scene(floor);
  const LabelImage img = rasterize_labels(scene, cam);
  // Nothing above the horizon.
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 32; ++x) CHECK(img.at(x, y) == LabelImage::kBackground);
  }
  const Agreement a = compare_to_reference(scene, cam);
  CHECK(a.interior_mismatches == 0);
  CHECK(a.fraction >= 0.99);
}

TEST_CASE("unit cube matches the supersampled ray-cast reference") {
  const SceneModel cube = opd::testing::unit_cube_scene();
  for (const Vec3& eye : {Vec3(2.0, 1.5, 2.5), Vec3(-1.8, -1.2, 2.2), Vec3(0.3, 2.6, 0.4),
                          Vec3(0.0, 0.0, 3.0)}) {
    const CameraEntry cam = opd::testing::look_at_origin(eye, 64, 64, 60);
    const Agreement a = compare_to_reference(cube, cam);
    CHECK(a.interior_mismatches == 0);
    CHECK(a.fraction >= 0.99);
  }
}

TEST_CASE("rasterization is deterministic") {
  const SceneModel cube = opd::testing::unit_cube_scene();
  const CameraEntry cam = opd::testing::look_at_origin(Vec3(2, 1, 2), 64, 48, 50);
  CHECK(rasterize_labels(cube, cam).labels == rasterize_labels(cube, cam).labels);
}
