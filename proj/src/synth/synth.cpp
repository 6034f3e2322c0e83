#include "opd/synth/synth.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "opd/core/error.hpp"
#include "opd/geometry/errors.hpp"

namespace opd {

namespace {

// mt19937_64 output is fixed by the standard; distributions are not, so the
// conversions to doubles and integers are done by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double uniform(const RealRange& r) { return uniform(r.min, r.max); }
  int integer(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }
  bool chance(double p) { return uniform() < p; }

  Vec3 unit_vector() {
    const double z = uniform(-1.0, 1.0);
    const double phi = uniform(0.0, 2.0 * std::numbers::pi);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
  }

  Vec3 perpendicular(const Vec3& axis) {
    const Vec3 a = axis.normalized();
    const Vec3 helper = std::abs(a.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    const Vec3 e1 = a.cross(helper).normalized();
    const Vec3 e2 = a.cross(e1);
    const double phi = uniform(0.0, 2.0 * std::numbers::pi);
    return (std::cos(phi) * e1 + std::sin(phi) * e2).normalized();
  }

 private:
  std::mt19937_64 engine_;
};

void check_range(const RealRange& r, const char* name) {
  if (!std::isfinite(r.min) || !std::isfinite(r.max) || r.min > r.max) {
    throw Error(fmt::format("synth: {} range [{}, {}] is empty", name, r.min, r.max));
  }
}

void check_range(const IntRange& r, const char* name) {
  if (r.min < 1 || r.min > r.max) {
    throw Error(fmt::format("synth: {} range [{}, {}] is empty or non-positive", name, r.min,
                            r.max));
  }
}

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(fmt::format("synth: {} must lie in [0, 1]", name));
}

void add_quad(Mesh& mesh, const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const int base = static_cast<int>(mesh.vertices.size());
  mesh.vertices.insert(mesh.vertices.end(), {a, b, c, d});
  mesh.triangles.push_back({base, base + 1, base + 2});
  mesh.triangles.push_back({base, base + 2, base + 3});
}

void add_box(Mesh& mesh, const OrientedBoundingBox& box) {
  auto corner = [&](int sx, int sy, int sz) {
    const Vec3 local(sx * box.half_extents.x(), sy * box.half_extents.y(),
                     sz * box.half_extents.z());
    return Vec3(box.center + box.basis * local);
  };
  add_quad(mesh, corner(-1, -1, 1), corner(1, -1, 1), corner(1, 1, 1), corner(-1, 1, 1));
  add_quad(mesh, corner(1, -1, -1), corner(-1, -1, -1), corner(-1, 1, -1), corner(1, 1, -1));
  add_quad(mesh, corner(-1, -1, -1), corner(-1, -1, 1), corner(-1, 1, 1), corner(-1, 1, -1));
  add_quad(mesh, corner(1, -1, 1), corner(1, -1, -1), corner(1, 1, -1), corner(1, 1, 1));
  add_quad(mesh, corner(-1, 1, 1), corner(1, 1, 1), corner(1, 1, -1), corner(-1, 1, -1));
  add_quad(mesh, corner(-1, -1, -1), corner(1, -1, -1), corner(1, -1, 1), corner(-1, -1, 1));
}

Mat3 yaw_rotation(double deg) { return axis_angle_rotation(Vec3::UnitY(), deg_to_rad(deg)); }

PartLabel sample_label(Rng& rng, const SynthSpec& spec) {
  const double total = spec.drawer_weight + spec.door_weight + spec.lid_weight;
  const double u = rng.uniform() * total;
  if (u < spec.drawer_weight) return PartLabel::kDrawer;
  if (u < spec.drawer_weight + spec.door_weight) return PartLabel::kDoor;
  return PartLabel::kLid;
}

// Parts are thin quads floating slightly in front of the body faces so the
// depth test never ties with the body.
constexpr double kPartOffset = 0.01;
constexpr double kPartMargin = 0.03;

SceneObject make_object(Rng& rng, const SynthSpec& spec, ObjectId id, double& cursor_x,
                        PartId& next_part, Mesh& statics) {
  SceneObject obj;
  obj.object_id = id;
  const Vec3 half(rng.uniform(0.3, 0.5), rng.uniform(0.3, 0.55), rng.uniform(0.2, 0.3));
  obj.obb.half_extents = half;
  obj.obb.basis = yaw_rotation(rng.uniform(-spec.object_yaw_jitter_deg, spec.object_yaw_jitter_deg));
  obj.obb.center = Vec3(cursor_x + half.x(), half.y(), 0.0);
  cursor_x += 2.0 * half.x() + rng.uniform(0.2, 0.5);
  add_box(statics, obj.obb);

  const int n_parts = rng.integer(spec.parts_per_object.min, spec.parts_per_object.max);
  std::vector<PartLabel> front, top;
  for (int i = 0; i < n_parts; ++i) {
    const PartLabel label = sample_label(rng, spec);
    (label == PartLabel::kLid ? top : front).push_back(label);
  }

  auto to_world = [&](const Vec3& local) { return Vec3(obj.obb.center + obj.obb.basis * local); };
  auto add_part = [&](PartLabel label, const std::array<Vec3, 4>& local, MotionParams motion) {
    ScenePart part;
    part.part_id = next_part++;
    part.label = label;
    part.motion = motion;
    add_quad(part.mesh, to_world(local[0]), to_world(local[1]), to_world(local[2]),
             to_world(local[3]));
    obj.parts.push_back(std::move(part));
  };

  // Front face: vertical strips along X.
  const double zf = half.z() + kPartOffset;
  for (std::size_t i = 0; i < front.size(); ++i) {
    const double w = 2.0 * half.x() / static_cast<double>(front.size());
    const double x0 = -half.x() + w * static_cast<double>(i) + kPartMargin;
    const double x1 = x0 + w - 2.0 * kPartMargin;
    const double y0 = -half.y() + kPartMargin, y1 = half.y() - kPartMargin;
    const MotionParams motion =
        front[i] == PartLabel::kDrawer
            ? MotionParams::prismatic(Vec3::UnitZ(), CoordFrame::kObject)
            : MotionParams::revolute(Vec3::UnitY(), Vec3(x0, 0.0, zf), CoordFrame::kObject);
    add_part(front[i], {Vec3(x0, y0, zf), Vec3(x1, y0, zf), Vec3(x1, y1, zf), Vec3(x0, y1, zf)},
             motion);
  }
  // Top face: strips along X hinged at the back edge.
  const double yt = half.y() + kPartOffset;
  for (std::size_t i = 0; i < top.size(); ++i) {
    const double w = 2.0 * half.x() / static_cast<double>(top.size());
    const double x0 = -half.x() + w * static_cast<double>(i) + kPartMargin;
    const double x1 = x0 + w - 2.0 * kPartMargin;
    const double z0 = -half.z() + kPartMargin, z1 = half.z() - kPartMargin;
    add_part(PartLabel::kLid,
             {Vec3(x0, yt, z1), Vec3(x1, yt, z1), Vec3(x1, yt, z0), Vec3(x0, yt, z0)},
             MotionParams::revolute(Vec3::UnitX(), Vec3(0.0, yt, z0), CoordFrame::kObject));
  }
  return obj;
}

// world<-camera for a camera at `eye` looking at `target` with world +Y up.
RigidPose look_at(const Vec3& eye, const Vec3& target) {
  const Vec3 forward = (target - eye).normalized();
  const Vec3 right = forward.cross(Vec3::UnitY()).normalized();
  const Vec3 up = right.cross(forward);
  RigidPose pose;
  pose.rotation.col(0) = right;
  pose.rotation.col(1) = up;
  pose.rotation.col(2) = -forward;
  pose.translation = eye;
  return pose;
}

CameraTrajectory make_trajectory(Rng& rng, const SynthSpec& spec, const SceneModel& scene,
                                 const std::string& split) {
  CameraTrajectory traj;
  traj.scene_id = scene.scene_id;
  traj.split = split;
  const Intrinsics k{spec.focal_scale * spec.width, spec.focal_scale * spec.width,
                     0.5 * spec.width, 0.5 * spec.height};
  for (int f = 0; f < spec.frames_per_scene; ++f) {
    const auto& obj = scene.objects[static_cast<std::size_t>(
        rng.integer(0, static_cast<int>(scene.objects.size()) - 1))];
    const Vec3 front = obj.obb.basis.col(2);
    const Vec3 dir = yaw_rotation(rng.uniform(spec.camera_yaw_deg)) * front;
    const Vec3 eye = obj.obb.center + rng.uniform(spec.camera_distance) * dir +
                     Vec3(0.0, obj.obb.half_extents.y() + rng.uniform(spec.camera_height), 0.0);
    const bool empty = rng.chance(spec.empty_frame_fraction);
    // An empty frame looks straight away from the whole row of objects.
    const Vec3 target = empty ? Vec3(eye + Vec3(0.0, 0.0, 1.0)) : obj.obb.center;
    traj.frames.push_back({fmt::format("{}_f{:03d}", scene.scene_id, f), look_at(eye, target), k,
                           spec.width, spec.height});
  }
  return traj;
}

}  // namespace

void SynthSpec::validate() const {
  if (scenes < 1) throw Error("synth: scenes must be positive");
  if (frames_per_scene < 1) throw Error("synth: frames_per_scene must be positive");
  check_range(objects_per_scene, "objects_per_scene");
  check_range(parts_per_object, "parts_per_object");
  check_range(camera_distance, "camera_distance");
  check_range(camera_height, "camera_height");
  check_range(camera_yaw_deg, "camera_yaw_deg");
  check_range(perturbation.confidence, "confidence");
  if (camera_distance.min <= 0.5) throw Error("synth: camera_distance must exceed 0.5");
  if (camera_height.min < 0) throw Error("synth: camera_height must be non-negative");
  if (std::abs(camera_yaw_deg.min) >= 80 || std::abs(camera_yaw_deg.max) >= 80) {
    throw Error("synth: camera_yaw_deg must stay within (-80, 80)");
  }
  for (double w : {drawer_weight, door_weight, lid_weight}) {
    if (!(w >= 0)) throw Error("synth: label weights must be non-negative");
  }
  if (!(drawer_weight + door_weight + lid_weight > 0)) {
    throw Error("synth: at least one label weight must be positive");
  }
  check_probability(empty_frame_fraction, "empty_frame_fraction");
  check_probability(perturbation.drop_rate, "drop_rate");
  check_probability(perturbation.false_positive_rate, "false_positive_rate");
  if (perturbation.confidence.min < 0 || perturbation.confidence.max > 1) {
    throw Error("synth: confidence range must lie in [0, 1]");
  }
  if (!(object_yaw_jitter_deg >= 0 && object_yaw_jitter_deg < 45)) {
    throw Error("synth: object_yaw_jitter_deg must lie in [0, 45)");
  }
  for (double v : {perturbation.axis_noise_deg, perturbation.pose_rotation_noise_deg}) {
    if (!(v >= 0 && v <= 180)) throw Error("synth: angular noise must lie in [0, 180]");
  }
  for (double v : {perturbation.origin_noise_fraction, perturbation.pose_translation_fraction}) {
    if (!(v >= 0 && std::isfinite(v))) throw Error("synth: fractional noise must be >= 0");
  }
  if (width < 8 || height < 8 || width > 4096 || height > 4096) {
    throw Error("synth: image size must lie in [8, 4096]");
  }
  if (!(focal_scale > 0)) throw Error("synth: focal_scale must be positive");
  if (splits.empty()) throw Error("synth: at least one split is required");
}

std::vector<PredictionFrame> synth_predictions(const std::vector<Frame>& gt,
                                               const PerturbationSpec& p, PoseScope scope,
                                               std::uint64_t seed) {
  Rng rng(seed);
  const double axis_angle = deg_to_rad(p.axis_noise_deg);
  const double pose_angle = deg_to_rad(p.pose_rotation_noise_deg);
  std::vector<PredictionFrame> out;
  out.reserve(gt.size());
  for (const auto& frame : gt) {
    PredictionFrame pf;
    pf.frame_id = frame.frame_id;
    for (const auto& part : frame.parts) {
      // Ignored parts are outside the evaluation, so a perfect predictor
      // leaves them alone.
      if (part.ignored) continue;
      // Draw every random number even for dropped parts so that the drop rate
      // does not shift the perturbations of the remaining parts.
      const bool dropped = rng.chance(p.drop_rate);
      const double confidence = rng.uniform(p.confidence);
      const Vec3 axis_tilt = rng.perpendicular(part.motion.axis);
      const Vec3 origin_dir = rng.perpendicular(part.motion.axis);
      const Vec3 pose_axis = rng.unit_vector();
      const Vec3 pose_shift = rng.unit_vector();
      if (dropped) continue;

      const double diagonal = part.object_diagonal.value_or(1.0);
      const Vec3 axis = axis_angle > 0
                            ? Vec3(axis_angle_rotation(axis_tilt, axis_angle) * part.motion.axis)
                            : part.motion.axis;
      MotionParams motion = part.motion;
      motion.axis = axis.normalized();
      if (motion.origin) *motion.origin += p.origin_noise_fraction * diagonal * origin_dir;

      PredictionInstance inst;
      inst.label = part.label;
      inst.confidence = confidence;
      inst.mask = part.mask;
      inst.bbox = part.bbox;
      inst.pose_scope = scope;
      if (scope == PoseScope::kPerPart && part.object_pose) {
        RigidPose pose = *part.object_pose;
        if (pose_angle > 0) pose.rotation = pose.rotation * axis_angle_rotation(pose_axis, pose_angle);
        pose.translation += p.pose_translation_fraction * diagonal * pose_shift;
        inst.predicted_pose = pose;
        inst.motion = motion_from_camera(motion, pose, CoordFrame::kObject);
      } else if (scope == PoseScope::kGlobal && frame.global_pose) {
        inst.predicted_pose = frame.global_pose;
        inst.motion = motion_from_camera(motion, *frame.global_pose, CoordFrame::kScene);
      } else {
        inst.pose_scope = PoseScope::kNone;
        inst.motion = motion;
      }
      pf.instances.push_back(std::move(inst));
    }

    // False positive: a random rectangle with a random revolute motion.
    const bool add_fp = rng.chance(p.false_positive_rate);
    const double fx0 = rng.uniform(0.0, 0.7), fy0 = rng.uniform(0.0, 0.7);
    const double fw = rng.uniform(0.1, 0.3), fh = rng.uniform(0.1, 0.3);
    const double fp_conf = rng.uniform(p.confidence);
    const int fp_label = rng.integer(0, 2);
    const Vec3 fp_axis = rng.unit_vector();
    if (add_fp) {
      const int x0 = static_cast<int>(fx0 * frame.width), y0 = static_cast<int>(fy0 * frame.height);
      const int x1 = std::max(x0 + 1, static_cast<int>((fx0 + fw) * frame.width));
      const int y1 = std::max(y0 + 1, static_cast<int>((fy0 + fh) * frame.height));
      PredictionInstance inst;
      inst.label = kAllPartLabels[static_cast<std::size_t>(fp_label)];
      inst.confidence = fp_conf;
      inst.mask = rle_encode_columns(frame.width, frame.height, [&](int x, int y) {
        return x >= x0 && x < x1 && y >= y0 && y < y1;
      });
      inst.bbox = tight_bbox(inst.mask);
      inst.motion = MotionParams::revolute(fp_axis, Vec3(0.0, 0.0, -2.0), CoordFrame::kCamera);
      pf.instances.push_back(std::move(inst));
    }
    out.push_back(std::move(pf));
  }
  return out;
}

SynthOutput synth_generate(const SynthSpec& spec, int threads) {
  spec.validate();
  Rng rng(spec.seed);
  SynthOutput out;
  for (int s = 0; s < spec.scenes; ++s) {
    SceneModel scene;
    scene.scene_id = fmt::format("scene_{:03d}", s);
    Mesh statics;
    double cursor_x = 0.0;
    PartId next_part = 0;
    const int n_objects = rng.integer(spec.objects_per_scene.min, spec.objects_per_scene.max);
    for (int o = 0; o < n_objects; ++o) {
      scene.objects.push_back(make_object(rng, spec, o, cursor_x, next_part, statics));
    }
    scene.static_geometry = std::move(statics);
    scene.validate();
    const std::string& split = spec.splits[static_cast<std::size_t>(s) % spec.splits.size()];
    out.trajectories.push_back(make_trajectory(rng, spec, scene, split));
    out.scenes.push_back(std::move(scene));
  }
  out.gt = build_dataset(out.scenes, out.trajectories, kSmallPartThreshold, threads);
  // Predictions use their own stream so scene layout does not depend on the
  // perturbation settings and vice versa.
  std::uint64_t pred_seed = spec.seed ^ 0x9e3779b97f4a7c15ULL;
  for (const auto& split : out.gt) {
    out.predictions.push_back(
        {split.split,
         synth_predictions(split.frames, spec.perturbation, spec.prediction_scope, pred_seed++)});
  }
  return out;
}

}  // namespace opd
