// Command-line front end: evaluation, dataset building, statistics, synthetic
// fixtures and loss evaluation over the JSON formats in opd/io/json_io.hpp.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "opd/core/error.hpp"
#include "opd/io/json_io.hpp"
#include "opd/io/report.hpp"
#include "opd/losses/losses.hpp"
#include "opd/metrics/evaluate.hpp"
#include "opd/synth/synth.hpp"

namespace fs = std::filesystem;
using opd::io::Json;
using opd::io::JsonView;

namespace {

constexpr const char* kConfigEnv = "OPD_METRIC_CONFIG";

struct CommonOptions {
  std::string gt;
  std::string pred;
  std::string config;
  std::string split;
  std::string out_json;
  std::string out_csv;
  int threads = 1;
};

opd::MetricConfig load_config(const std::string& path) {
  std::string chosen = path;
  if (chosen.empty()) {
    if (const char* env = std::getenv(kConfigEnv); env && *env) chosen = env;
  }
  if (chosen.empty()) return {};
  return opd::io::metric_config_from_json(opd::io::read_json_file(chosen));
}

opd::SplitFrames load_gt(const CommonOptions& o) {
  opd::SplitFrames gt = opd::io::annotations_from_json(opd::io::read_json_file(o.gt));
  if (!o.split.empty() && !gt.split.empty() && gt.split != o.split) {
    throw opd::InputError(
        fmt::format("{}: holds split '{}', but --split asks for '{}'", o.gt, gt.split, o.split));
  }
  return gt;
}

std::vector<opd::PredictionFrame> load_pred(const CommonOptions& o) {
  return opd::io::predictions_from_json(opd::io::read_json_file(o.pred));
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw opd::InputError(fmt::format("cannot write '{}'", path.string()));
  out << text;
}

// Writes the first table to `path` and the rest next to it as <stem>_<name>.csv.
void write_csv_set(const std::string& path,
                   const std::vector<std::pair<std::string, opd::io::Table>>& tables) {
  if (path.empty()) return;
  const fs::path base(path);
  for (std::size_t i = 0; i < tables.size(); ++i) {
    fs::path target = base;
    if (i > 0) {
      target = base.parent_path() /
               fmt::format("{}_{}{}", base.stem().string(), tables[i].first,
                           base.extension().string());
    }
    write_text(target, tables[i].second.to_csv());
  }
}

void print_tables(const std::vector<std::pair<std::string, opd::io::Table>>& tables) {
  bool first = true;
  for (const auto& [name, table] : tables) {
    if (!first) std::cout << '\n';
    first = false;
    std::cout << "[" << name << "]\n" << table.to_text();
  }
}

void add_common(CLI::App* cmd, CommonOptions& o, bool needs_pred) {
  cmd->add_option("--gt", o.gt, "Ground-truth annotations JSON")->required()->check(CLI::ExistingFile);
  auto* pred = cmd->add_option("--pred", o.pred, "Predictions JSON")->check(CLI::ExistingFile);
  if (needs_pred) pred->required();
  cmd->add_option("--config", o.config,
                  fmt::format("Metric config JSON (default: ${} if set)", kConfigEnv));
  cmd->add_option("--split", o.split, "Expected split name of the annotations");
  cmd->add_option("--out-json", o.out_json, "Write the full-precision report here");
  cmd->add_option("--out-csv", o.out_csv, "Write fixed-precision CSV tables here");
  cmd->add_option("--threads", o.threads, "Worker threads")->check(CLI::Range(1, 256));
}

int run_evaluate(const CommonOptions& o) {
  const opd::MetricConfig config = load_config(o.config);
  const auto gt = load_gt(o);
  const auto pred = load_pred(o);
  const opd::EvalReport report = opd::evaluate(pred, gt.frames, config, o.threads);
  const std::vector<std::pair<std::string, opd::io::Table>> tables = {
      {"map", opd::io::map_table(report)},
      {"ao", opd::io::ao_table(report)},
      {"category", opd::io::category_table(report)},
      {"pose", opd::io::pose_table(report.pose, config)}};
  print_tables(tables);
  if (!o.out_json.empty()) opd::io::write_json_file(o.out_json, opd::io::to_json(report));
  write_csv_set(o.out_csv, tables);
  return 0;
}

int run_pose_eval(const CommonOptions& o) {
  const opd::MetricConfig config = load_config(o.config);
  const auto gt = load_gt(o);
  const auto pred = load_pred(o);
  const opd::EvalReport report = opd::evaluate(pred, gt.frames, config, o.threads);
  const std::vector<std::pair<std::string, opd::io::Table>> tables = {
      {"pose", opd::io::pose_table(report.pose, config)}};
  print_tables(tables);
  if (!o.out_json.empty()) opd::io::write_json_file(o.out_json, opd::io::to_json(report.pose));
  write_csv_set(o.out_csv, tables);
  return 0;
}

int run_consistency(const CommonOptions& o, const std::vector<double>& thresholds) {
  const opd::MetricConfig config = load_config(o.config);
  const auto gt = load_gt(o);
  const opd::ConsistencyReport report =
      o.pred.empty() ? opd::gt_consistency(gt.frames, thresholds)
                     : opd::prediction_consistency(load_pred(o), gt.frames, config, thresholds);
  const std::vector<std::pair<std::string, opd::io::Table>> tables = {
      {"consistency", opd::io::consistency_table(report)}};
  print_tables(tables);
  if (!o.out_json.empty()) opd::io::write_json_file(o.out_json, opd::io::to_json(report));
  write_csv_set(o.out_csv, tables);
  return 0;
}

struct BuildOptions {
  std::string scenes;
  std::string trajectories;
  std::string out_dir;
  std::string split;
  int threads = 1;
};

int run_build_dataset(const BuildOptions& o) {
  const auto scenes = opd::io::scenes_from_json(opd::io::read_json_file(o.scenes));
  auto trajectories = opd::io::trajectories_from_json(opd::io::read_json_file(o.trajectories));
  if (!o.split.empty()) {
    std::erase_if(trajectories, [&](const auto& t) { return t.split != o.split; });
    if (trajectories.empty()) {
      throw opd::InputError(fmt::format("no trajectory belongs to split '{}'", o.split));
    }
  }
  const auto splits = opd::build_dataset(scenes, trajectories, opd::kSmallPartThreshold, o.threads);
  for (const auto& s : splits) {
    const fs::path path = fs::path(o.out_dir) / fmt::format("annotations_{}.json", s.split);
    opd::io::write_json_file(path, opd::io::annotations_to_json(s));
    std::cout << fmt::format("{}: {} frames -> {}\n", s.split, s.frames.size(), path.string());
  }
  return 0;
}

struct StatsOptions {
  std::vector<std::string> gt;
  std::string split;
  std::string out_json;
  std::string out_csv;
};

int run_stats(const StatsOptions& o) {
  std::vector<opd::SplitFrames> splits;
  for (const auto& path : o.gt) {
    opd::SplitFrames s = opd::io::annotations_from_json(opd::io::read_json_file(path));
    if (s.split.empty()) s.split = fs::path(path).stem().string();
    if (!o.split.empty() && s.split != o.split) continue;
    splits.push_back(std::move(s));
  }
  if (splits.empty()) throw opd::InputError(fmt::format("no annotations for split '{}'", o.split));
  const opd::DatasetStats stats = opd::dataset_stats(splits);
  const std::vector<std::pair<std::string, opd::io::Table>> tables = {
      {"frames", opd::io::ao_count_table(stats)},
      {"parts", opd::io::part_count_table(stats)},
      {"types", opd::io::part_type_table(stats)}};
  print_tables(tables);
  if (!o.out_json.empty()) opd::io::write_json_file(o.out_json, opd::io::to_json(stats));
  write_csv_set(o.out_csv, tables);
  return 0;
}

struct SynthOptions {
  std::string spec;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

int run_synth(const SynthOptions& o) {
  opd::SynthSpec spec;
  if (!o.spec.empty()) spec = opd::io::synth_spec_from_json(opd::io::read_json_file(o.spec));
  if (o.seed) spec.seed = *o.seed;
  const opd::SynthOutput out = opd::synth_generate(spec, o.threads);
  const fs::path dir(o.out_dir);
  opd::io::write_json_file(dir / "synth_spec.json", opd::io::to_json(spec));
  opd::io::write_json_file(dir / "scenes.json", opd::io::scenes_to_json(out.scenes));
  opd::io::write_json_file(dir / "trajectories.json",
                           opd::io::trajectories_to_json(out.trajectories));
  for (std::size_t i = 0; i < out.gt.size(); ++i) {
    const auto& split = out.gt[i].split;
    opd::io::write_json_file(dir / fmt::format("annotations_{}.json", split),
                             opd::io::annotations_to_json(out.gt[i]));
    opd::io::write_json_file(dir / fmt::format("predictions_{}.json", split),
                             opd::io::predictions_to_json(out.predictions[i].frames));
    std::cout << fmt::format("{}: {} frames\n", split, out.gt[i].frames.size());
  }
  return 0;
}

struct LossOptions {
  std::string input;
  std::string out_json;
};

// Input: {"weights"?, "matched":[{"prediction","target"}], "unmatched":[...]}
// or {"weights"?, "predictions":[...], "targets":[...]} to assign first.
int run_losses(const LossOptions& o) {
  const Json root = opd::io::read_json_file(o.input);
  const JsonView v(root, "");
  if (!root.is_object()) v.fail("expected an object");
  for (const auto& [key, _] : root.items()) {
    if (key != "weights" && key != "predictions" && key != "targets" && key != "matched" &&
        key != "unmatched") {
      v.fail(fmt::format("unknown field '{}'", key));
    }
  }
  const opd::LossWeights weights =
      v.has("weights") ? opd::io::loss_weights_from_json(v.at("weights")) : opd::LossWeights{};
  Json result;
  opd::LossBreakdown breakdown;
  if (v.has("predictions")) {
    std::vector<opd::LossPrediction> preds;
    std::vector<opd::LossTarget> targets;
    const JsonView p = v.at("predictions"), t = v.at("targets");
    for (std::size_t i = 0; i < p.size(); ++i) preds.push_back(opd::io::loss_prediction_from_json(p.at(i)));
    for (std::size_t i = 0; i < t.size(); ++i) targets.push_back(opd::io::loss_target_from_json(t.at(i)));
    const opd::MatchedLoss m = opd::match_and_score(preds, targets, weights);
    breakdown = m.breakdown;
    result["assignment"] = opd::io::to_json(m.assignment);
  } else {
    std::vector<opd::MatchedPair> matched;
    std::vector<opd::LossPrediction> unmatched;
    const JsonView mv = v.at("matched");
    for (std::size_t i = 0; i < mv.size(); ++i) {
      matched.push_back({opd::io::loss_prediction_from_json(mv.at(i).at("prediction")),
                         opd::io::loss_target_from_json(mv.at(i).at("target"))});
    }
    if (v.has("unmatched")) {
      const JsonView uv = v.at("unmatched");
      for (std::size_t i = 0; i < uv.size(); ++i) {
        unmatched.push_back(opd::io::loss_prediction_from_json(uv.at(i)));
      }
    }
    breakdown = opd::total_loss(matched, unmatched, weights);
  }
  result["loss"] = opd::io::to_json(breakdown);

  opd::io::Table table{{"term", "value", "weight", "weighted"}, {}};
  for (const auto& term : breakdown.terms) {
    table.rows.push_back({term.name, fmt::format("{:.6f}", term.value),
                          fmt::format("{:g}", term.weight), fmt::format("{:.6f}", term.weighted)});
  }
  table.rows.push_back({"total", "", "", fmt::format("{:.6f}", breakdown.total)});
  std::cout << table.to_text();
  if (!o.out_json.empty()) opd::io::write_json_file(o.out_json, result);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Openable part detection: evaluation and data tools"};
  app.require_subcommand(1);

  CommonOptions eval_opts, pose_opts, cons_opts;
  auto* evaluate = app.add_subcommand("evaluate", "Part-detection and motion mAP report");
  add_common(evaluate, eval_opts, true);

  auto* pose = app.add_subcommand("pose-eval", "Object pose error report");
  add_common(pose, pose_opts, true);

  std::vector<double> thresholds = opd::kDefaultConsistencyThresholds;
  auto* consistency =
      app.add_subcommand("consistency", "Within-object axis and motion-type consistency");
  add_common(consistency, cons_opts, false);
  consistency->add_option("--thresholds", thresholds, "Angular thresholds in degrees");

  BuildOptions build_opts;
  auto* build = app.add_subcommand("build-dataset", "Project scenes into annotated frames");
  build->add_option("--scenes", build_opts.scenes, "Scenes JSON")->required()->check(CLI::ExistingFile);
  build->add_option("--trajectories", build_opts.trajectories, "Camera trajectories JSON")
      ->required()
      ->check(CLI::ExistingFile);
  build->add_option("--out-dir", build_opts.out_dir, "Output directory")->required();
  build->add_option("--split", build_opts.split, "Only build this split");
  build->add_option("--threads", build_opts.threads, "Worker threads")->check(CLI::Range(1, 256));

  StatsOptions stats_opts;
  auto* stats = app.add_subcommand("stats", "Frame and part statistics per split");
  stats->add_option("--gt", stats_opts.gt, "Annotation files, one per split")
      ->required()
      ->check(CLI::ExistingFile);
  stats->add_option("--split", stats_opts.split, "Only this split");
  stats->add_option("--out-json", stats_opts.out_json, "Write statistics JSON here");
  stats->add_option("--out-csv", stats_opts.out_csv, "Write CSV tables here");

  SynthOptions synth_opts;
  std::uint64_t seed = 0;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic scene set with predictions");
  synth->add_option("--spec", synth_opts.spec, "Synth spec JSON")->check(CLI::ExistingFile);
  auto* seed_opt = synth->add_option("--seed", seed, "Override the seed in the synth spec");
  synth->add_option("--out-dir", synth_opts.out_dir, "Output directory")->required();
  synth->add_option("--threads", synth_opts.threads, "Worker threads")->check(CLI::Range(1, 256));

  LossOptions loss_opts;
  auto* losses = app.add_subcommand("losses", "Evaluate the training objective on given tensors");
  losses->add_option("--input", loss_opts.input, "Loss input JSON")->required()->check(CLI::ExistingFile);
  losses->add_option("--out-json", loss_opts.out_json, "Write the breakdown here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  if (*seed_opt) synth_opts.seed = seed;

  try {
    if (*evaluate) return run_evaluate(eval_opts);
    if (*pose) return run_pose_eval(pose_opts);
    if (*consistency) return run_consistency(cons_opts, thresholds);
    if (*build) return run_build_dataset(build_opts);
    if (*stats) return run_stats(stats_opts);
    if (*synth) return run_synth(synth_opts);
    if (*losses) return run_losses(loss_opts);
  } catch (const opd::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
