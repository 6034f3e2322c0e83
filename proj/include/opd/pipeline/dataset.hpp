#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "opd/pipeline/rasterizer.hpp"

namespace opd {

// Rasterizes the scene for one camera and turns every visible part into a
// PartAnnotation with camera-frame motion, object pose and coverage flag.
// Parts with no visible pixel are omitted.
Frame build_frame(const SceneModel& scene, const CameraEntry& camera,
                  double small_part_threshold = kSmallPartThreshold);

struct SplitFrames {
  std::string split;
  std::vector<Frame> frames;
};

// Builds every trajectory entry, optionally on several threads. Output splits
// follow first appearance in `trajectories`; frames keep trajectory order.
std::vector<SplitFrames> build_dataset(const std::vector<SceneModel>& scenes,
                                       const std::vector<CameraTrajectory>& trajectories,
                                       double small_part_threshold = kSmallPartThreshold,
                                       int threads = 1);

enum class AoClass { kNone, kSingle, kMultiple };

std::string_view to_string(AoClass c);

// Counts distinct objects owning at least one non-ignored part.
AoClass classify_frame_ao(const Frame& frame);

struct SplitStats {
  std::string split;
  std::size_t frames = 0;
  std::size_t none = 0;
  std::size_t single = 0;
  std::size_t multiple = 0;
  // Mean non-ignored parts over frames with at least one; 0 when undefined.
  double parts_per_frame = 0;
  // Frames with 0, 1, 2, 3, 4+ non-ignored parts.
  std::array<std::size_t, 5> part_histogram{};
  std::size_t parts = 0;
  std::map<PartLabel, std::size_t> per_label;
  std::map<MotionType, std::size_t> per_motion;
};

struct DatasetStats {
  std::vector<SplitStats> splits;
  SplitStats total;
};

SplitStats split_stats(const std::string& split, const std::vector<Frame>& frames);
DatasetStats dataset_stats(const std::vector<SplitFrames>& splits);

}  // namespace opd
