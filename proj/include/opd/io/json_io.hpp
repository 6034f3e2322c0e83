#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "opd/core/annotation.hpp"
#include "opd/losses/losses.hpp"
#include "opd/metrics/evaluate.hpp"
#include "opd/pipeline/dataset.hpp"
#include "opd/synth/synth.hpp"

namespace opd::io {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Read-only cursor over a JSON document that remembers its path, so every
// schema error names the offending field, e.g. "frames[3].parts[0].mask".
class JsonView {
 public:
  JsonView(const Json& json, std::string path) : json_(&json), path_(std::move(path)) {}

  const Json& json() const { return *json_; }
  const std::string& path() const { return path_; }

  bool has(const char* key) const;
  JsonView at(const char* key) const;
  JsonView at(std::size_t index) const;
  std::size_t size() const;  // array length; throws if not an array

  double number() const;
  long long integer() const;
  bool boolean() const;
  std::string string() const;
  Vec3 vec3() const;
  std::vector<double> numbers() const;

  [[noreturn]] void fail(const std::string& message) const;

 private:
  const Json* json_;
  std::string path_;
};

// Parses a file; syntax errors become InputError with line and column.
Json read_json_file(const std::filesystem::path& path);
Json parse_json_text(const std::string& text, const std::string& source_name);
void write_json_file(const std::filesystem::path& path, const Json& json);

// Requires "schema_version" == 1.
void check_schema_version(const JsonView& root);

// Values.
Json to_json(const BinaryMask& mask);
Json to_json(const RigidPose& pose);
Json to_json(const MotionParams& motion);
Json to_json(const BBox& box);
Json to_json(const Intrinsics& k);
Json to_json(const OrientedBoundingBox& obb);
Json to_json(const Mesh& mesh);

BinaryMask mask_from_json(const JsonView& v);
RigidPose pose_from_json(const JsonView& v);
// `default_frame` applies when the "frame" key is absent.
MotionParams motion_from_json(const JsonView& v, CoordFrame default_frame = CoordFrame::kCamera);
BBox bbox_from_json(const JsonView& v);
Intrinsics intrinsics_from_json(const JsonView& v);
OrientedBoundingBox obb_from_json(const JsonView& v);
Mesh mesh_from_json(const JsonView& v);

// Annotations: {"schema_version":1,"split":..,"frames":[...]}.
Json to_json(const PartAnnotation& part);
Json to_json(const Frame& frame);
PartAnnotation part_from_json(const JsonView& v);
Frame frame_from_json(const JsonView& v);
Json annotations_to_json(const SplitFrames& split);
SplitFrames annotations_from_json(const Json& root);

// Predictions: {"schema_version":1,"frames":[{frame_id, instances:[...]}]}.
Json to_json(const PredictionInstance& inst);
PredictionInstance prediction_from_json(const JsonView& v);
Json predictions_to_json(const std::vector<PredictionFrame>& frames);
std::vector<PredictionFrame> predictions_from_json(const Json& root);

// Scenes: {"schema_version":1,"scenes":[...]}; trajectories likewise.
Json scenes_to_json(const std::vector<SceneModel>& scenes);
std::vector<SceneModel> scenes_from_json(const Json& root);
Json trajectories_to_json(const std::vector<CameraTrajectory>& trajectories);
std::vector<CameraTrajectory> trajectories_from_json(const Json& root);

// Metric config; absent keys keep their defaults.
MetricConfig metric_config_from_json(const Json& root);
Json to_json(const MetricConfig& config);

// Synthetic generator settings; absent keys keep their defaults.
SynthSpec synth_spec_from_json(const Json& root);
Json to_json(const SynthSpec& spec);

// Loss evaluation inputs and outputs.
LossWeights loss_weights_from_json(const JsonView& v);
LossPrediction loss_prediction_from_json(const JsonView& v);
LossTarget loss_target_from_json(const JsonView& v);
Json to_json(const LossBreakdown& breakdown);
Json to_json(const Assignment& assignment);

// Reports.
Json to_json(const EvalReport& report);
Json to_json(const PoseMetrics& pose);
Json to_json(const ConsistencyReport& report);
Json to_json(const DatasetStats& stats);

}  // namespace opd::io
