#include "opd/io/json_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "opd/core/error.hpp"

namespace opd::io {

// ---------------------------------------------------------------------------
// JsonView

bool JsonView::has(const char* key) const {
  return json_->is_object() && json_->contains(key) && !(*json_)[key].is_null();
}

JsonView JsonView::at(const char* key) const {
  if (!json_->is_object()) fail("expected an object");
  auto it = json_->find(key);
  if (it == json_->end()) fail(fmt::format("missing field '{}'", key));
  return {*it, path_.empty() ? std::string(key) : path_ + "." + key};
}

JsonView JsonView::at(std::size_t index) const {
  if (!json_->is_array()) fail("expected an array");
  if (index >= json_->size()) fail(fmt::format("index {} out of range", index));
  return {(*json_)[index], fmt::format("{}[{}]", path_, index)};
}

std::size_t JsonView::size() const {
  if (!json_->is_array()) fail("expected an array");
  return json_->size();
}

double JsonView::number() const {
  if (!json_->is_number()) fail("expected a number");
  return json_->get<double>();
}

long long JsonView::integer() const {
  if (!json_->is_number_integer()) fail("expected an integer");
  return json_->get<long long>();
}

bool JsonView::boolean() const {
  if (!json_->is_boolean()) fail("expected true or false");
  return json_->get<bool>();
}

std::string JsonView::string() const {
  if (!json_->is_string()) fail("expected a string");
  return json_->get<std::string>();
}

std::vector<double> JsonView::numbers() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(i).number();
  return out;
}

Vec3 JsonView::vec3() const {
  if (size() != 3) fail(fmt::format("expected 3 numbers, got {}", size()));
  return {at(std::size_t{0}).number(), at(1).number(), at(2).number()};
}

void JsonView::fail(const std::string& message) const {
  throw InputError(fmt::format("{}: {}", path_.empty() ? "<root>" : path_, message));
}

namespace {

// Runs a domain constructor and re-labels its errors with the JSON path.
template <typename Fn>
auto with_path(const JsonView& v, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const InputError&) {
    throw;
  } catch (const Error& e) {
    v.fail(e.what());
  }
}

Json array3(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Json mat_row_major(const Mat3& m) {
  Json a = Json::array();
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) a.push_back(m(r, c));
  }
  return a;
}

Mat3 mat_from_json(const JsonView& v) {
  const std::vector<double> x = v.numbers();
  if (x.size() != 9) v.fail(fmt::format("expected 9 numbers (row-major 3x3), got {}", x.size()));
  Mat3 m;
  m << x[0], x[1], x[2], x[3], x[4], x[5], x[6], x[7], x[8];
  return m;
}

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < text.size() && i + 1 < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return fmt::format("line {}, column {}", line, col);
}

template <typename E>
E parse_enum(const JsonView& v, E (*parser)(std::string_view)) {
  const std::string s = v.string();
  try {
    return parser(s);
  } catch (const Error& e) {
    v.fail(e.what());
  }
}

void reject_unknown_keys(const JsonView& v, std::initializer_list<const char*> known) {
  if (!v.json().is_object()) v.fail("expected an object");
  std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& [key, _] : v.json().items()) {
    if (!allowed.contains(key)) v.fail(fmt::format("unknown field '{}'", key));
  }
}

}  // namespace

Json parse_json_text(const std::string& text, const std::string& source_name) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(fmt::format("{}: malformed JSON at {}: {}", source_name,
                                 line_column(text, e.byte), e.what()));
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot open '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path.string());
}

void write_json_file(const std::filesystem::path& path, const Json& json) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
  out << json.dump(1) << '\n';
}

void check_schema_version(const JsonView& root) {
  const long long v = root.at("schema_version").integer();
  if (v != kSchemaVersion) {
    root.fail(fmt::format("unsupported schema_version {} (expected {})", v, kSchemaVersion));
  }
}

// ---------------------------------------------------------------------------
// Values

Json to_json(const BinaryMask& mask) {
  return {{"size", Json::array({mask.height(), mask.width()})}, {"counts", mask.counts()}};
}

BinaryMask mask_from_json(const JsonView& v) {
  const JsonView size = v.at("size");
  if (size.size() != 2) size.fail("expected [height, width]");
  const long long h = size.at(std::size_t{0}).integer();
  const long long w = size.at(1).integer();
  const JsonView counts = v.at("counts");
  std::vector<std::uint32_t> runs(counts.size());
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const long long c = counts.at(i).integer();
    if (c < 0 || c > 0xffffffffLL) counts.at(i).fail("run length out of range");
    runs[i] = static_cast<std::uint32_t>(c);
  }
  if (h <= 0 || w <= 0 || h > (1 << 20) || w > (1 << 20)) size.fail("mask size out of range");
  return with_path(v, [&] {
    return BinaryMask::from_counts(static_cast<int>(w), static_cast<int>(h), std::move(runs));
  });
}

Json to_json(const RigidPose& pose) {
  return {{"rotation", mat_row_major(pose.rotation)}, {"translation", array3(pose.translation)}};
}

RigidPose pose_from_json(const JsonView& v) {
  return {mat_from_json(v.at("rotation")), v.at("translation").vec3()};
}

Json to_json(const MotionParams& m) {
  Json j = {{"type", to_string(m.type)}, {"axis", array3(m.axis)}};
  if (m.origin) j["origin"] = array3(*m.origin);
  j["frame"] = to_string(m.frame);
  return j;
}

MotionParams motion_from_json(const JsonView& v, CoordFrame default_frame) {
  const MotionType type = parse_enum(v.at("type"), &parse_motion_type);
  const Vec3 axis = v.at("axis").vec3();
  const CoordFrame frame =
      v.has("frame") ? parse_enum(v.at("frame"), &parse_coord_frame) : default_frame;
  // Prismatic origins carry no meaning and are dropped.
  if (type == MotionType::kPrismatic) {
    return with_path(v, [&] { return MotionParams::prismatic(axis, frame); });
  }
  const Vec3 origin = v.at("origin").vec3();
  return with_path(v, [&] { return MotionParams::revolute(axis, origin, frame); });
}

Json to_json(const BBox& b) { return Json::array({b.x_min, b.y_min, b.x_max, b.y_max}); }

BBox bbox_from_json(const JsonView& v) {
  const std::vector<double> x = v.numbers();
  if (x.size() != 4) v.fail("expected [x_min, y_min, x_max, y_max]");
  if (x[0] > x[2] || x[1] > x[3]) v.fail("box minimum exceeds maximum");
  return {x[0], x[1], x[2], x[3]};
}

Json to_json(const Intrinsics& k) {
  return {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}};
}

Intrinsics intrinsics_from_json(const JsonView& v) {
  return {v.at("fx").number(), v.at("fy").number(), v.at("cx").number(), v.at("cy").number()};
}

Json to_json(const OrientedBoundingBox& obb) {
  return {{"center", array3(obb.center)},
          {"half_extents", array3(obb.half_extents)},
          {"basis", mat_row_major(obb.basis)}};
}

OrientedBoundingBox obb_from_json(const JsonView& v) {
  return {v.at("center").vec3(), v.at("half_extents").vec3(), mat_from_json(v.at("basis"))};
}

Json to_json(const Mesh& mesh) {
  Json verts = Json::array();
  for (const auto& p : mesh.vertices) verts.push_back(array3(p));
  Json tris = Json::array();
  for (const auto& t : mesh.triangles) tris.push_back(Json::array({t[0], t[1], t[2]}));
  return {{"vertices", verts}, {"triangles", tris}};
}

Mesh mesh_from_json(const JsonView& v) {
  Mesh mesh;
  const JsonView verts = v.at("vertices");
  for (std::size_t i = 0; i < verts.size(); ++i) mesh.vertices.push_back(verts.at(i).vec3());
  const JsonView tris = v.at("triangles");
  for (std::size_t i = 0; i < tris.size(); ++i) {
    const JsonView t = tris.at(i);
    if (t.size() != 3) t.fail("expected 3 vertex indices");
    mesh.triangles.push_back({static_cast<int>(t.at(std::size_t{0}).integer()),
                              static_cast<int>(t.at(1).integer()),
                              static_cast<int>(t.at(2).integer())});
  }
  with_path(v, [&] {
    mesh.validate();
    return 0;
  });
  return mesh;
}

// ---------------------------------------------------------------------------
// Annotations

Json to_json(const PartAnnotation& p) {
  Json j = {{"part_id", p.part_id},     {"object_id", p.object_id},
            {"label", to_string(p.label)}, {"mask", to_json(p.mask)},
            {"bbox", to_json(p.bbox)},    {"motion", to_json(p.motion)}};
  if (p.object_pose) j["object_pose"] = to_json(*p.object_pose);
  if (p.object_diagonal) j["object_diagonal"] = *p.object_diagonal;
  j["coverage_ratio"] = p.coverage_ratio;
  j["ignored"] = p.ignored;
  return j;
}

PartAnnotation part_from_json(const JsonView& v) {
  PartAnnotation p;
  p.part_id = static_cast<PartId>(v.at("part_id").integer());
  p.object_id = static_cast<ObjectId>(v.at("object_id").integer());
  p.label = parse_enum(v.at("label"), &parse_part_label);
  p.mask = mask_from_json(v.at("mask"));
  p.bbox = v.has("bbox") ? bbox_from_json(v.at("bbox"))
                         : with_path(v, [&] { return tight_bbox(p.mask); });
  p.motion = motion_from_json(v.at("motion"));
  if (v.has("object_pose")) p.object_pose = pose_from_json(v.at("object_pose"));
  if (v.has("object_diagonal")) {
    const double d = v.at("object_diagonal").number();
    if (!(d > 0)) v.at("object_diagonal").fail("must be positive");
    p.object_diagonal = d;
  }
  const double pixels = static_cast<double>(p.mask.width()) * p.mask.height();
  p.coverage_ratio = v.has("coverage_ratio") ? v.at("coverage_ratio").number()
                                             : static_cast<double>(p.mask.area()) / pixels;
  p.ignored = v.has("ignored") ? v.at("ignored").boolean()
                               : p.coverage_ratio < kSmallPartThreshold;
  return p;
}

Json to_json(const Frame& f) {
  Json parts = Json::array();
  for (const auto& p : f.parts) parts.push_back(to_json(p));
  Json j = {{"frame_id", f.frame_id},
            {"width", f.width},
            {"height", f.height},
            {"intrinsics", to_json(f.intrinsics)},
            {"camera_pose", to_json(f.camera_pose)}};
  if (f.global_pose) j["global_pose"] = to_json(*f.global_pose);
  j["parts"] = parts;
  return j;
}

Frame frame_from_json(const JsonView& v) {
  Frame f;
  f.frame_id = v.at("frame_id").string();
  f.width = static_cast<int>(v.at("width").integer());
  f.height = static_cast<int>(v.at("height").integer());
  f.intrinsics = v.has("intrinsics") ? intrinsics_from_json(v.at("intrinsics")) : Intrinsics{};
  f.camera_pose = v.has("camera_pose") ? pose_from_json(v.at("camera_pose")) : RigidPose{};
  if (v.has("global_pose")) f.global_pose = pose_from_json(v.at("global_pose"));
  const JsonView parts = v.at("parts");
  for (std::size_t i = 0; i < parts.size(); ++i) f.parts.push_back(part_from_json(parts.at(i)));
  with_path(v, [&] {
    validate_frame(f);
    return 0;
  });
  return f;
}

Json annotations_to_json(const SplitFrames& split) {
  Json frames = Json::array();
  for (const auto& f : split.frames) frames.push_back(to_json(f));
  return {{"schema_version", kSchemaVersion}, {"split", split.split}, {"frames", frames}};
}

SplitFrames annotations_from_json(const Json& root) {
  const JsonView v(root, "");
  check_schema_version(v);
  SplitFrames out;
  out.split = v.has("split") ? v.at("split").string() : "";
  const JsonView frames = v.at("frames");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    out.frames.push_back(frame_from_json(frames.at(i)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Predictions

Json to_json(const PredictionInstance& p) {
  Json j = {{"label", to_string(p.label)},
            {"confidence", p.confidence},
            {"mask", to_json(p.mask)},
            {"bbox", to_json(p.bbox)},
            {"motion", to_json(p.motion)},
            {"pose_scope", to_string(p.pose_scope)}};
  if (p.predicted_pose) j["pose"] = to_json(*p.predicted_pose);
  return j;
}

PredictionInstance prediction_from_json(const JsonView& v) {
  PredictionInstance p;
  p.label = parse_enum(v.at("label"), &parse_part_label);
  p.confidence = v.at("confidence").number();
  if (!(p.confidence >= 0.0 && p.confidence <= 1.0)) v.at("confidence").fail("must lie in [0, 1]");
  p.mask = mask_from_json(v.at("mask"));
  if (v.has("bbox")) {
    p.bbox = bbox_from_json(v.at("bbox"));
  } else if (!p.mask.empty()) {
    p.bbox = tight_bbox(p.mask);
  }
  p.pose_scope = v.has("pose_scope") ? parse_enum(v.at("pose_scope"), &parse_pose_scope)
                                     : PoseScope::kNone;
  p.motion = motion_from_json(v.at("motion"));
  if (p.pose_scope == PoseScope::kNone && p.motion.frame != CoordFrame::kCamera) {
    v.at("motion").fail("pose_scope 'none' requires a camera-frame motion");
  }
  if (v.has("pose")) p.predicted_pose = pose_from_json(v.at("pose"));
  return p;
}

Json predictions_to_json(const std::vector<PredictionFrame>& frames) {
  Json arr = Json::array();
  for (const auto& f : frames) {
    Json inst = Json::array();
    for (const auto& p : f.instances) inst.push_back(to_json(p));
    arr.push_back({{"frame_id", f.frame_id}, {"instances", inst}});
  }
  return {{"schema_version", kSchemaVersion}, {"frames", arr}};
}

std::vector<PredictionFrame> predictions_from_json(const Json& root) {
  const JsonView v(root, "");
  check_schema_version(v);
  std::vector<PredictionFrame> out;
  const JsonView frames = v.at("frames");
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const JsonView f = frames.at(i);
    PredictionFrame pf;
    pf.frame_id = f.at("frame_id").string();
    const JsonView inst = f.at("instances");
    for (std::size_t k = 0; k < inst.size(); ++k) {
      pf.instances.push_back(prediction_from_json(inst.at(k)));
    }
    out.push_back(std::move(pf));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Scenes and trajectories

Json scenes_to_json(const std::vector<SceneModel>& scenes) {
  Json arr = Json::array();
  for (const auto& s : scenes) {
    Json objects = Json::array();
    for (const auto& o : s.objects) {
      Json parts = Json::array();
      for (const auto& p : o.parts) {
        parts.push_back({{"part_id", p.part_id},
                         {"label", to_string(p.label)},
                         {"mesh", to_json(p.mesh)},
                         {"motion", to_json(p.motion)}});
      }
      objects.push_back({{"object_id", o.object_id}, {"obb", to_json(o.obb)}, {"parts", parts}});
    }
    Json js = {{"scene_id", s.scene_id}, {"objects", objects}};
    if (s.static_geometry) js["static_geometry"] = to_json(*s.static_geometry);
    arr.push_back(js);
  }
  return {{"schema_version", kSchemaVersion}, {"scenes", arr}};
}

std::vector<SceneModel> scenes_from_json(const Json& root) {
  const JsonView v(root, "");
  check_schema_version(v);
  std::vector<SceneModel> out;
  const JsonView scenes = v.at("scenes");
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const JsonView s = scenes.at(i);
    SceneModel scene;
    scene.scene_id = s.at("scene_id").string();
    const JsonView objects = s.at("objects");
    for (std::size_t k = 0; k < objects.size(); ++k) {
      const JsonView o = objects.at(k);
      SceneObject obj;
      obj.object_id = static_cast<ObjectId>(o.at("object_id").integer());
      obj.obb = obb_from_json(o.at("obb"));
      const JsonView parts = o.at("parts");
      for (std::size_t p = 0; p < parts.size(); ++p) {
        const JsonView pv = parts.at(p);
        ScenePart part;
        part.part_id = static_cast<PartId>(pv.at("part_id").integer());
        part.label = parse_enum(pv.at("label"), &parse_part_label);
        part.mesh = mesh_from_json(pv.at("mesh"));
        part.motion = motion_from_json(pv.at("motion"), CoordFrame::kObject);
        obj.parts.push_back(std::move(part));
      }
      scene.objects.push_back(std::move(obj));
    }
    if (s.has("static_geometry")) scene.static_geometry = mesh_from_json(s.at("static_geometry"));
    with_path(s, [&] {
      scene.validate();
      return 0;
    });
    out.push_back(std::move(scene));
  }
  return out;
}

Json trajectories_to_json(const std::vector<CameraTrajectory>& trajectories) {
  Json arr = Json::array();
  for (const auto& t : trajectories) {
    Json frames = Json::array();
    for (const auto& c : t.frames) {
      frames.push_back({{"frame_id", c.frame_id},
                        {"camera_pose", to_json(c.camera_pose)},
                        {"intrinsics", to_json(c.intrinsics)},
                        {"width", c.width},
                        {"height", c.height}});
    }
    arr.push_back({{"scene_id", t.scene_id}, {"split", t.split}, {"frames", frames}});
  }
  return {{"schema_version", kSchemaVersion}, {"trajectories", arr}};
}

std::vector<CameraTrajectory> trajectories_from_json(const Json& root) {
  const JsonView v(root, "");
  check_schema_version(v);
  std::vector<CameraTrajectory> out;
  const JsonView trajs = v.at("trajectories");
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    const JsonView t = trajs.at(i);
    CameraTrajectory traj;
    traj.scene_id = t.at("scene_id").string();
    traj.split = t.has("split") ? t.at("split").string() : "default";
    const JsonView frames = t.at("frames");
    for (std::size_t k = 0; k < frames.size(); ++k) {
      const JsonView c = frames.at(k);
      CameraEntry cam;
      cam.frame_id = c.at("frame_id").string();
      cam.camera_pose = pose_from_json(c.at("camera_pose"));
      cam.intrinsics = intrinsics_from_json(c.at("intrinsics"));
      cam.width = static_cast<int>(c.at("width").integer());
      cam.height = static_cast<int>(c.at("height").integer());
      with_path(c, [&] {
        cam.validate();
        return 0;
      });
      traj.frames.push_back(std::move(cam));
    }
    out.push_back(std::move(traj));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Config

MetricConfig metric_config_from_json(const Json& root) {
  const JsonView v(root, "");
  reject_unknown_keys(v, {"schema_version", "iou_threshold", "axis_threshold_deg",
                          "origin_threshold", "confidence_threshold", "recall_samples",
                          "axis_orientation_aware", "origin_mode", "pose_accuracy_denominator",
                          "match_geometry", "rotation_accuracy_deg", "translation_accuracy"});
  if (v.has("schema_version")) check_schema_version(v);
  MetricConfig c;
  if (v.has("iou_threshold")) c.iou_threshold = v.at("iou_threshold").number();
  if (v.has("axis_threshold_deg")) c.axis_threshold_deg = v.at("axis_threshold_deg").number();
  if (v.has("origin_threshold")) c.origin_threshold = v.at("origin_threshold").number();
  if (v.has("confidence_threshold")) {
    c.confidence_threshold = v.at("confidence_threshold").number();
  }
  if (v.has("recall_samples")) c.recall_samples = static_cast<int>(v.at("recall_samples").integer());
  if (v.has("axis_orientation_aware")) {
    c.axis_orientation_aware = v.at("axis_orientation_aware").boolean();
  }
  if (v.has("origin_mode")) {
    const std::string s = v.at("origin_mode").string();
    if (s == "point_to_line") {
      c.origin_mode = OriginErrorMode::kPointToLine;
    } else if (s == "point_to_point") {
      c.origin_mode = OriginErrorMode::kPointToPoint;
    } else {
      v.at("origin_mode").fail("expected 'point_to_line' or 'point_to_point'");
    }
  }
  if (v.has("pose_accuracy_denominator")) {
    const std::string s = v.at("pose_accuracy_denominator").string();
    if (s == "all_gt") {
      c.pose_denominator = PoseAccuracyDenominator::kAllGtParts;
    } else if (s == "matched") {
      c.pose_denominator = PoseAccuracyDenominator::kMatchedPairs;
    } else {
      v.at("pose_accuracy_denominator").fail("expected 'all_gt' or 'matched'");
    }
  }
  if (v.has("match_geometry")) {
    const std::string s = v.at("match_geometry").string();
    if (s == "mask") {
      c.match_geometry = MatchGeometry::kMask;
    } else if (s == "box") {
      c.match_geometry = MatchGeometry::kBox;
    } else {
      v.at("match_geometry").fail("expected 'mask' or 'box'");
    }
  }
  if (v.has("rotation_accuracy_deg")) {
    c.rotation_accuracy_deg = v.at("rotation_accuracy_deg").number();
  }
  if (v.has("translation_accuracy")) c.translation_accuracy = v.at("translation_accuracy").number();
  with_path(v, [&] {
    c.validate();
    return 0;
  });
  return c;
}

Json to_json(const MetricConfig& c) {
  return {{"schema_version", kSchemaVersion},
          {"iou_threshold", c.iou_threshold},
          {"axis_threshold_deg", c.axis_threshold_deg},
          {"origin_threshold", c.origin_threshold},
          {"confidence_threshold", c.confidence_threshold},
          {"recall_samples", c.recall_samples},
          {"axis_orientation_aware", c.axis_orientation_aware},
          {"origin_mode",
           c.origin_mode == OriginErrorMode::kPointToLine ? "point_to_line" : "point_to_point"},
          {"pose_accuracy_denominator",
           c.pose_denominator == PoseAccuracyDenominator::kAllGtParts ? "all_gt" : "matched"},
          {"match_geometry", c.match_geometry == MatchGeometry::kMask ? "mask" : "box"},
          {"rotation_accuracy_deg", c.rotation_accuracy_deg},
          {"translation_accuracy", c.translation_accuracy}};
}

// ---------------------------------------------------------------------------
// Synth spec

namespace {

IntRange int_range_from_json(const JsonView& v) {
  if (v.size() != 2) v.fail("expected [min, max]");
  return {static_cast<int>(v.at(std::size_t{0}).integer()), static_cast<int>(v.at(1).integer())};
}

RealRange real_range_from_json(const JsonView& v) {
  if (v.size() != 2) v.fail("expected [min, max]");
  return {v.at(std::size_t{0}).number(), v.at(1).number()};
}

}  // namespace

SynthSpec synth_spec_from_json(const Json& root) {
  const JsonView v(root, "");
  reject_unknown_keys(v, {"schema_version", "seed", "scenes", "frames_per_scene",
                          "objects_per_scene", "parts_per_object", "drawer_weight", "door_weight",
                          "lid_weight", "empty_frame_fraction", "camera_distance", "camera_height",
                          "camera_yaw_deg", "object_yaw_jitter_deg", "width", "height",
                          "focal_scale", "splits", "prediction_scope", "perturbation"});
  if (v.has("schema_version")) check_schema_version(v);
  SynthSpec s;
  if (v.has("seed")) {
    const long long seed = v.at("seed").integer();
    if (seed < 0) v.at("seed").fail("must be non-negative");
    s.seed = static_cast<std::uint64_t>(seed);
  }
  auto read_int = [&](const char* key, int& field) {
    if (v.has(key)) field = static_cast<int>(v.at(key).integer());
  };
  auto read_real = [&](const char* key, double& field) {
    if (v.has(key)) field = v.at(key).number();
  };
  read_int("scenes", s.scenes);
  read_int("frames_per_scene", s.frames_per_scene);
  if (v.has("objects_per_scene")) s.objects_per_scene = int_range_from_json(v.at("objects_per_scene"));
  if (v.has("parts_per_object")) s.parts_per_object = int_range_from_json(v.at("parts_per_object"));
  read_real("drawer_weight", s.drawer_weight);
  read_real("door_weight", s.door_weight);
  read_real("lid_weight", s.lid_weight);
  read_real("empty_frame_fraction", s.empty_frame_fraction);
  if (v.has("camera_distance")) s.camera_distance = real_range_from_json(v.at("camera_distance"));
  if (v.has("camera_height")) s.camera_height = real_range_from_json(v.at("camera_height"));
  if (v.has("camera_yaw_deg")) s.camera_yaw_deg = real_range_from_json(v.at("camera_yaw_deg"));
  read_real("object_yaw_jitter_deg", s.object_yaw_jitter_deg);
  read_int("width", s.width);
  read_int("height", s.height);
  read_real("focal_scale", s.focal_scale);
  if (v.has("splits")) {
    const JsonView splits = v.at("splits");
    s.splits.clear();
    for (std::size_t i = 0; i < splits.size(); ++i) s.splits.push_back(splits.at(i).string());
  }
  if (v.has("prediction_scope")) {
    s.prediction_scope = parse_enum(v.at("prediction_scope"), &parse_pose_scope);
  }
  if (v.has("perturbation")) {
    const JsonView p = v.at("perturbation");
    reject_unknown_keys(p, {"axis_noise_deg", "origin_noise_fraction", "pose_rotation_noise_deg",
                            "pose_translation_fraction", "confidence", "drop_rate",
                            "false_positive_rate"});
    auto read_p = [&](const char* key, double& field) {
      if (p.has(key)) field = p.at(key).number();
    };
    read_p("axis_noise_deg", s.perturbation.axis_noise_deg);
    read_p("origin_noise_fraction", s.perturbation.origin_noise_fraction);
    read_p("pose_rotation_noise_deg", s.perturbation.pose_rotation_noise_deg);
    read_p("pose_translation_fraction", s.perturbation.pose_translation_fraction);
    if (p.has("confidence")) s.perturbation.confidence = real_range_from_json(p.at("confidence"));
    read_p("drop_rate", s.perturbation.drop_rate);
    read_p("false_positive_rate", s.perturbation.false_positive_rate);
  }
  with_path(v, [&] {
    s.validate();
    return 0;
  });
  return s;
}

Json to_json(const SynthSpec& s) {
  const auto& p = s.perturbation;
  return {{"schema_version", kSchemaVersion},
          {"seed", s.seed},
          {"scenes", s.scenes},
          {"frames_per_scene", s.frames_per_scene},
          {"objects_per_scene", Json::array({s.objects_per_scene.min, s.objects_per_scene.max})},
          {"parts_per_object", Json::array({s.parts_per_object.min, s.parts_per_object.max})},
          {"drawer_weight", s.drawer_weight},
          {"door_weight", s.door_weight},
          {"lid_weight", s.lid_weight},
          {"empty_frame_fraction", s.empty_frame_fraction},
          {"camera_distance", Json::array({s.camera_distance.min, s.camera_distance.max})},
          {"camera_height", Json::array({s.camera_height.min, s.camera_height.max})},
          {"camera_yaw_deg", Json::array({s.camera_yaw_deg.min, s.camera_yaw_deg.max})},
          {"object_yaw_jitter_deg", s.object_yaw_jitter_deg},
          {"width", s.width},
          {"height", s.height},
          {"focal_scale", s.focal_scale},
          {"splits", s.splits},
          {"prediction_scope", to_string(s.prediction_scope)},
          {"perturbation",
           {{"axis_noise_deg", p.axis_noise_deg},
            {"origin_noise_fraction", p.origin_noise_fraction},
            {"pose_rotation_noise_deg", p.pose_rotation_noise_deg},
            {"pose_translation_fraction", p.pose_translation_fraction},
            {"confidence", Json::array({p.confidence.min, p.confidence.max})},
            {"drop_rate", p.drop_rate},
            {"false_positive_rate", p.false_positive_rate}}}};
}

// ---------------------------------------------------------------------------
// Losses

LossWeights loss_weights_from_json(const JsonView& v) {
  reject_unknown_keys(v, {"ce", "dice", "cls_matched", "cls_unmatched", "motion_type", "axis",
                          "origin", "pose", "smooth_l1_beta"});
  LossWeights w;
  auto read = [&](const char* key, double& field) {
    if (v.has(key)) field = v.at(key).number();
  };
  read("ce", w.ce);
  read("dice", w.dice);
  read("cls_matched", w.cls_matched);
  read("cls_unmatched", w.cls_unmatched);
  read("motion_type", w.motion_type);
  read("axis", w.axis);
  read("origin", w.origin);
  read("pose", w.pose);
  read("smooth_l1_beta", w.smooth_l1_beta);
  with_path(v, [&] {
    w.validate();
    return 0;
  });
  return w;
}

LossPrediction loss_prediction_from_json(const JsonView& v) {
  LossPrediction p;
  p.class_probs = v.at("class_probs").numbers();
  p.mask_probs = v.at("mask_probs").numbers();
  p.motion_type_probs = v.at("motion_type_probs").numbers();
  if (p.motion_type_probs.size() != 2) {
    v.at("motion_type_probs").fail("expected [prismatic, revolute]");
  }
  p.axis = v.at("axis").vec3();
  if (v.has("origin")) p.origin = v.at("origin").vec3();
  if (v.has("pose")) {
    p.pose = v.at("pose").numbers();
    if (p.pose->size() != 12) v.at("pose").fail("expected 12 numbers");
  }
  return p;
}

LossTarget loss_target_from_json(const JsonView& v) {
  LossTarget t;
  const long long cls = v.at("class").integer();
  if (cls < 0) v.at("class").fail("must be non-negative");
  t.class_index = static_cast<std::size_t>(cls);
  t.mask = v.at("mask").numbers();
  t.motion_type = parse_enum(v.at("motion_type"), &parse_motion_type);
  t.axis = v.at("axis").vec3();
  if (v.has("origin")) t.origin = v.at("origin").vec3();
  if (t.motion_type == MotionType::kRevolute && !t.origin) v.fail("revolute target needs 'origin'");
  if (v.has("pose")) {
    t.pose = v.at("pose").numbers();
    if (t.pose->size() != 12) v.at("pose").fail("expected 12 numbers");
  }
  return t;
}

Json to_json(const LossBreakdown& b) {
  Json terms = Json::object();
  for (const auto& t : b.terms) {
    terms[t.name] = {{"value", t.value}, {"weight", t.weight}, {"weighted", t.weighted}};
  }
  return {{"terms", terms}, {"total", b.total}};
}

Json to_json(const Assignment& a) {
  Json pairs = Json::array();
  for (const auto& [r, c] : a.pairs) pairs.push_back(Json::array({r, c}));
  return {{"pairs", pairs}, {"total_cost", a.total_cost}};
}

// ---------------------------------------------------------------------------
// Reports

namespace {

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json levels_json(const LevelValues& values) {
  Json j = Json::object();
  for (auto level : kAllLevels) {
    j[std::string(to_string(level))] = optional_number(values[static_cast<std::size_t>(level)]);
  }
  return j;
}

Json block_json(const ApBlock& b) {
  Json labels = Json::object();
  for (const auto& [l, s] : b.per_label) {
    labels[std::string(to_string(l))] = {
        {"ap", levels_json(s.ap)}, {"gt_count", s.gt_count}, {"detections", s.detections}};
  }
  Json motions = Json::object();
  for (const auto& [m, s] : b.per_motion) {
    motions[std::string(to_string(m))] = {
        {"ap", levels_json(s.ap)}, {"gt_count", s.gt_count}, {"detections", s.detections}};
  }
  return {{"frames", b.frames},
          {"part_averaged", levels_json(b.part_averaged)},
          {"motion_averaged", levels_json(b.motion_averaged)},
          {"per_label", labels},
          {"per_motion", motions}};
}

}  // namespace

Json to_json(const PoseMetrics& p) {
  return {{"rotation_median_deg", optional_number(p.rotation_median_deg)},
          {"rotation_accuracy", optional_number(p.rotation_accuracy)},
          {"translation_median", optional_number(p.translation_median)},
          {"translation_accuracy", optional_number(p.translation_accuracy)},
          {"pairs", p.pairs},
          {"skipped", p.skipped},
          {"denominator", p.denominator}};
}

Json to_json(const EvalReport& r) {
  Json by_ao = Json::object();
  for (const auto& [ao, block] : r.by_ao) by_ao[std::string(to_string(ao))] = block_json(block);
  return {{"schema_version", kSchemaVersion},
          {"overall", block_json(r.overall)},
          {"by_ao", by_ao},
          {"no_ao_accuracy", optional_number(r.no_ao_accuracy)},
          {"no_ao_frames", r.no_ao_frames},
          {"pose", to_json(r.pose)},
          {"predictions", r.predictions},
          {"confident_predictions", r.confident_predictions}};
}

Json to_json(const ConsistencyReport& r) {
  Json axis = Json::array();
  for (std::size_t i = 0; i < r.thresholds_deg.size(); ++i) {
    axis.push_back({{"threshold_deg", r.thresholds_deg[i]}, {"fraction", optional_number(r.axis[i])}});
  }
  return {{"schema_version", kSchemaVersion},
          {"axis", axis},
          {"type", optional_number(r.type)},
          {"axis_frames", r.axis_frames},
          {"type_frames", r.type_frames}};
}

namespace {

Json split_json(const SplitStats& s) {
  Json labels = Json::object();
  for (const auto& [l, n] : s.per_label) labels[std::string(to_string(l))] = n;
  Json motions = Json::object();
  for (const auto& [m, n] : s.per_motion) motions[std::string(to_string(m))] = n;
  return {{"split", s.split},
          {"frames", s.frames},
          {"none", s.none},
          {"single", s.single},
          {"multiple", s.multiple},
          {"parts_per_frame", s.parts_per_frame},
          {"part_histogram", s.part_histogram},
          {"parts", s.parts},
          {"per_label", labels},
          {"per_motion", motions}};
}

}  // namespace

Json to_json(const DatasetStats& stats) {
  Json splits = Json::array();
  for (const auto& s : stats.splits) splits.push_back(split_json(s));
  return {{"schema_version", kSchemaVersion}, {"splits", splits}, {"total", split_json(stats.total)}};
}

}  // namespace opd::io
