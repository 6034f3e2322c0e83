#include "opd/pipeline/rasterizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <tuple>

#include "opd/core/error.hpp"

namespace opd {

std::optional<Projection> project_point(const Vec3& world_point, const RigidPose& world_from_camera,
                                        const Intrinsics& k) {
  const Vec3 p = invert_pose(world_from_camera).apply(world_point);
  const double depth = -p.z();
  if (depth <= kNearPlane) return std::nullopt;
  return Projection{k.cx + k.fx * p.x() / depth, k.cy - k.fy * p.y() / depth, depth};
}

namespace {

constexpr int kSubpixelBits = 8;
constexpr std::int64_t kSubpixelScale = std::int64_t{1} << kSubpixelBits;
constexpr std::int64_t kHalfPixel = kSubpixelScale / 2;

// Screen-space vertex; inv_depth is affine in (u, v) so it can be
// interpolated linearly after projection.
struct ScreenVertex {
  double u;
  double v;
  double inv_depth;
};

// Interpolation with endpoints in a fixed order so a shared edge clipped from
// either triangle yields the same point.
template <typename T, typename Key, typename Lerp>
T canonical_intersection(const T& a, const T& b, Key key, Lerp lerp) {
  const bool swap = key(b) < key(a);
  const T& p = swap ? b : a;
  const T& q = swap ? a : b;
  return lerp(p, q);
}

std::vector<Vec3> clip_near(const std::array<Vec3, 3>& tri) {
  auto depth = [](const Vec3& p) { return -p.z(); };
  auto key = [](const Vec3& p) { return std::make_tuple(p.x(), p.y(), p.z()); };
  auto lerp = [&](const Vec3& p, const Vec3& q) {
    const double t = (kNearPlane - depth(p)) / (depth(q) - depth(p));
    return Vec3(p + t * (q - p));
  };
  std::vector<Vec3> out;
  out.reserve(4);
  for (std::size_t i = 0; i < 3; ++i) {
    const Vec3& a = tri[i];
    const Vec3& b = tri[(i + 1) % 3];
    const bool a_in = depth(a) >= kNearPlane;
    const bool b_in = depth(b) >= kNearPlane;
    if (a_in) out.push_back(a);
    if (a_in != b_in) out.push_back(canonical_intersection(a, b, key, lerp));
  }
  return out;
}

// Sutherland-Hodgman against one axis-aligned screen boundary.
std::vector<ScreenVertex> clip_screen(const std::vector<ScreenVertex>& poly, bool use_u,
                                      double limit, bool keep_below) {
  auto coord = [&](const ScreenVertex& s) { return use_u ? s.u : s.v; };
  auto inside = [&](const ScreenVertex& s) {
    return keep_below ? coord(s) <= limit : coord(s) >= limit;
  };
  auto key = [](const ScreenVertex& s) { return std::make_tuple(s.u, s.v, s.inv_depth); };
  auto lerp = [&](const ScreenVertex& p, const ScreenVertex& q) {
    const double t = (limit - coord(p)) / (coord(q) - coord(p));
    return ScreenVertex{p.u + t * (q.u - p.u), p.v + t * (q.v - p.v),
                        p.inv_depth + t * (q.inv_depth - p.inv_depth)};
  };
  std::vector<ScreenVertex> out;
  out.reserve(poly.size() + 1);
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % poly.size()];
    const bool a_in = inside(a);
    const bool b_in = inside(b);
    if (a_in) out.push_back(a);
    if (a_in != b_in) out.push_back(canonical_intersection(a, b, key, lerp));
  }
  return out;
}

struct FixedVertex {
  std::int64_t x;
  std::int64_t y;
  double inv_depth;
};

std::int64_t edge(const FixedVertex& a, const FixedVertex& b, std::int64_t px, std::int64_t py) {
  return (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
}

// With positive-area winding in a y-down raster, the interior lies on the
// positive side of each edge. Top edges are horizontal with dx > 0, left
// edges have dy < 0.
bool is_top_left(const FixedVertex& a, const FixedVertex& b) {
  const std::int64_t dx = b.x - a.x;
  const std::int64_t dy = b.y - a.y;
  return (dy == 0 && dx > 0) || dy < 0;
}

class Target {
 public:
  Target(int w, int h)
      : width_(w),
        height_(h),
        depth_(static_cast<std::size_t>(w) * h, 0.0),
        labels_(static_cast<std::size_t>(w) * h, LabelImage::kBackground) {}

  void draw(const std::array<Vec3, 3>& cam_tri, const Intrinsics& k, PartId label) {
    const std::vector<Vec3> near_clipped = clip_near(cam_tri);
    if (near_clipped.size() < 3) return;
    std::vector<ScreenVertex> poly;
    poly.reserve(near_clipped.size());
    for (const auto& p : near_clipped) {
      const double d = -p.z();
      poly.push_back({k.cx + k.fx * p.x() / d, k.cy - k.fy * p.y() / d, 1.0 / d});
    }
    // Guard band keeps fixed-point products far from overflow.
    const double guard = std::max(width_, height_);
    poly = clip_screen(poly, true, -guard, false);
    poly = clip_screen(poly, true, width_ + guard, true);
    poly = clip_screen(poly, false, -guard, false);
    poly = clip_screen(poly, false, height_ + guard, true);
    if (poly.size() < 3) return;

    std::vector<FixedVertex> fixed;
    fixed.reserve(poly.size());
    for (const auto& s : poly) {
      fixed.push_back({std::llround(s.u * kSubpixelScale), std::llround(s.v * kSubpixelScale),
                       s.inv_depth});
    }
    for (std::size_t i = 1; i + 1 < fixed.size(); ++i) {
      fill(fixed[0], fixed[i], fixed[i + 1], label);
    }
  }

  LabelImage finish() && { return {width_, height_, std::move(labels_)}; }

 private:
  void fill(FixedVertex v0, FixedVertex v1, FixedVertex v2, PartId label) {
    std::int64_t area = edge(v0, v1, v2.x, v2.y);
    if (area == 0) return;
    if (area < 0) {
      std::swap(v1, v2);
      area = -area;
    }
    const std::int64_t min_x = std::min({v0.x, v1.x, v2.x});
    const std::int64_t max_x = std::max({v0.x, v1.x, v2.x});
    const std::int64_t min_y = std::min({v0.y, v1.y, v2.y});
    const std::int64_t max_y = std::max({v0.y, v1.y, v2.y});
    // Pixel x covers sample position x * scale + half.
    auto first_pixel = [](std::int64_t lo) {
      const std::int64_t n = lo - kHalfPixel;
      return n <= 0 ? -((-n) / kSubpixelScale) : (n + kSubpixelScale - 1) / kSubpixelScale;
    };
    auto last_pixel = [](std::int64_t hi) {
      const std::int64_t n = hi - kHalfPixel;
      return n >= 0 ? n / kSubpixelScale : -((-n + kSubpixelScale - 1) / kSubpixelScale);
    };
    const std::int64_t x0 = std::max<std::int64_t>(0, first_pixel(min_x));
    const std::int64_t x1 = std::min<std::int64_t>(width_ - 1, last_pixel(max_x));
    const std::int64_t y0 = std::max<std::int64_t>(0, first_pixel(min_y));
    const std::int64_t y1 = std::min<std::int64_t>(height_ - 1, last_pixel(max_y));
    if (x0 > x1 || y0 > y1) return;

    const bool tl0 = is_top_left(v1, v2);
    const bool tl1 = is_top_left(v2, v0);
    const bool tl2 = is_top_left(v0, v1);
    const double inv_area = 1.0 / static_cast<double>(area);
    for (std::int64_t y = y0; y <= y1; ++y) {
      const std::int64_t py = y * kSubpixelScale + kHalfPixel;
      for (std::int64_t x = x0; x <= x1; ++x) {
        const std::int64_t px = x * kSubpixelScale + kHalfPixel;
        const std::int64_t e0 = edge(v1, v2, px, py);
        const std::int64_t e1 = edge(v2, v0, px, py);
        const std::int64_t e2 = edge(v0, v1, px, py);
        if (e0 < 0 || e1 < 0 || e2 < 0) continue;
        if ((e0 == 0 && !tl0) || (e1 == 0 && !tl1) || (e2 == 0 && !tl2)) continue;
        const double inv_depth = (static_cast<double>(e0) * v0.inv_depth +
                                  static_cast<double>(e1) * v1.inv_depth +
                                  static_cast<double>(e2) * v2.inv_depth) *
                                 inv_area;
        const std::size_t idx = static_cast<std::size_t>(y) * width_ + static_cast<std::size_t>(x);
        if (inv_depth > depth_[idx]) {
          depth_[idx] = inv_depth;
          labels_[idx] = label;
        }
      }
    }
  }

  int width_;
  int height_;
  std::vector<double> depth_;  // 1 / depth, 0 = empty
  std::vector<PartId> labels_;
};

void draw_mesh(Target& target, const Mesh& mesh, const RigidPose& camera_from_world,
               const Intrinsics& k, PartId label) {
  std::vector<Vec3> cam;
  cam.reserve(mesh.vertices.size());
  for (const auto& v : mesh.vertices) cam.push_back(camera_from_world.apply(v));
  for (const auto& t : mesh.triangles) {
    target.draw({cam[t[0]], cam[t[1]], cam[t[2]]}, k, label);
  }
}

}  // namespace

LabelImage rasterize_labels(const SceneModel& scene, const CameraEntry& camera) {
  if (camera.width <= 0 || camera.height <= 0) {
    throw DimensionError("cannot rasterize into a zero-area image");
  }
  const RigidPose camera_from_world = invert_pose(camera.camera_pose);
  Target target(camera.width, camera.height);
  if (scene.static_geometry) {
    draw_mesh(target, *scene.static_geometry, camera_from_world, camera.intrinsics,
              LabelImage::kBackground);
  }
  for (const auto& obj : scene.objects) {
    for (const auto& part : obj.parts) {
      draw_mesh(target, part.mesh, camera_from_world, camera.intrinsics, part.part_id);
    }
  }
  return std::move(target).finish();
}

}  // namespace opd
