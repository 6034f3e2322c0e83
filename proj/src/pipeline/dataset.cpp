#include "opd/pipeline/dataset.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

#include "opd/core/error.hpp"
#include "opd/core/parallel.hpp"

namespace opd {

Frame build_frame(const SceneModel& scene, const CameraEntry& camera,
                  double small_part_threshold) {
  camera.validate();
  const LabelImage labels = rasterize_labels(scene, camera);

  Frame frame;
  frame.frame_id = camera.frame_id;
  frame.width = camera.width;
  frame.height = camera.height;
  frame.intrinsics = camera.intrinsics;
  frame.camera_pose = camera.camera_pose;
  // The world frame doubles as the scene frame.
  frame.global_pose = invert_pose(camera.camera_pose);

  // Pixel counts per part id in one pass so invisible parts are skipped cheaply.
  std::unordered_map<PartId, std::size_t> visible;
  for (PartId id : labels.labels) {
    if (id != LabelImage::kBackground) ++visible[id];
  }

  for (const auto& obj : scene.objects) {
    const RigidPose camera_from_object = derive_object_pose(obj.obb, camera.camera_pose);
    for (const auto& part : obj.parts) {
      if (!visible.contains(part.part_id)) continue;
      BinaryMask mask = rle_encode_columns(camera.width, camera.height, [&](int x, int y) {
        return labels.at(x, y) == part.part_id;
      });
      MotionParams motion = apply_pose_to_motion(part.motion, camera_from_object, CoordFrame::kObject);
      PartAnnotation ann = make_part_annotation(part.part_id, obj.object_id, part.label,
                                                std::move(mask), std::move(motion),
                                                small_part_threshold);
      ann.object_pose = camera_from_object;
      ann.object_diagonal = obj.obb.diagonal();
      frame.parts.push_back(std::move(ann));
    }
  }
  return frame;
}

std::vector<SplitFrames> build_dataset(const std::vector<SceneModel>& scenes,
                                       const std::vector<CameraTrajectory>& trajectories,
                                       double small_part_threshold, int threads) {
  std::unordered_map<std::string, const SceneModel*> by_id;
  for (const auto& s : scenes) {
    s.validate();
    if (!by_id.emplace(s.scene_id, &s).second) {
      throw InputError(fmt::format("duplicate scene id '{}'", s.scene_id));
    }
  }

  struct Job {
    const SceneModel* scene;
    const CameraEntry* camera;
    std::size_t split_index;
  };
  std::vector<std::string> split_names;
  std::vector<Job> jobs;
  std::set<std::string> frame_ids;
  for (const auto& traj : trajectories) {
    auto it = by_id.find(traj.scene_id);
    if (it == by_id.end()) {
      throw InputError(fmt::format("trajectory references unknown scene '{}'", traj.scene_id));
    }
    auto pos = std::find(split_names.begin(), split_names.end(), traj.split);
    const std::size_t split_index = static_cast<std::size_t>(pos - split_names.begin());
    if (pos == split_names.end()) split_names.push_back(traj.split);
    for (const auto& cam : traj.frames) {
      if (!frame_ids.insert(cam.frame_id).second) {
        throw InputError(fmt::format("duplicate frame id '{}'", cam.frame_id));
      }
      jobs.push_back({it->second, &cam, split_index});
    }
  }

  std::vector<Frame> built(jobs.size());
  parallel_for(jobs.size(), threads, [&](std::size_t i) {
    built[i] = build_frame(*jobs[i].scene, *jobs[i].camera, small_part_threshold);
  });

  std::vector<SplitFrames> out(split_names.size());
  for (std::size_t s = 0; s < split_names.size(); ++s) out[s].split = split_names[s];
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    out[jobs[i].split_index].frames.push_back(std::move(built[i]));
  }
  return out;
}

std::string_view to_string(AoClass c) {
  switch (c) {
    case AoClass::kNone:
      return "none";
    case AoClass::kSingle:
      return "single";
    case AoClass::kMultiple:
      return "multiple";
  }
  return "?";
}

AoClass classify_frame_ao(const Frame& frame) {
  std::set<ObjectId> objects;
  for (const auto& p : frame.parts) {
    if (!p.ignored) objects.insert(p.object_id);
  }
  if (objects.empty()) return AoClass::kNone;
  return objects.size() == 1 ? AoClass::kSingle : AoClass::kMultiple;
}

SplitStats split_stats(const std::string& split, const std::vector<Frame>& frames) {
  SplitStats st;
  st.split = split;
  st.frames = frames.size();
  for (auto l : kAllPartLabels) st.per_label[l] = 0;
  for (auto t : kAllMotionTypes) st.per_motion[t] = 0;
  std::size_t frames_with_parts = 0;
  for (const auto& f : frames) {
    switch (classify_frame_ao(f)) {
      case AoClass::kNone:
        ++st.none;
        break;
      case AoClass::kSingle:
        ++st.single;
        break;
      case AoClass::kMultiple:
        ++st.multiple;
        break;
    }
    std::size_t n = 0;
    for (const auto& p : f.parts) {
      if (p.ignored) continue;
      ++n;
      ++st.per_label[p.label];
      ++st.per_motion[p.motion.type];
    }
    st.parts += n;
    ++st.part_histogram[std::min<std::size_t>(n, 4)];
    if (n > 0) ++frames_with_parts;
  }
  st.parts_per_frame =
      frames_with_parts == 0 ? 0.0 : static_cast<double>(st.parts) / frames_with_parts;
  return st;
}

DatasetStats dataset_stats(const std::vector<SplitFrames>& splits) {
  DatasetStats out;
  out.total = split_stats("total", {});
  for (const auto& s : splits) {
    SplitStats st = split_stats(s.split, s.frames);
    SplitStats& t = out.total;
    t.frames += st.frames;
    t.none += st.none;
    t.single += st.single;
    t.multiple += st.multiple;
    t.parts += st.parts;
    for (std::size_t i = 0; i < t.part_histogram.size(); ++i) {
      t.part_histogram[i] += st.part_histogram[i];
    }
    for (const auto& [l, n] : st.per_label) t.per_label[l] += n;
    for (const auto& [m, n] : st.per_motion) t.per_motion[m] += n;
    out.splits.push_back(std::move(st));
  }
  const std::size_t with_parts = out.total.frames - out.total.part_histogram[0];
  out.total.parts_per_frame =
      with_parts == 0 ? 0.0 : static_cast<double>(out.total.parts) / with_parts;
  return out;
}

}  // namespace opd
