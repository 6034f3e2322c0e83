#include "opd/io/report.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace opd::io {

namespace {

std::string csv_escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string join_csv(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += csv_escape(cells[i]);
  }
  return line + "\n";
}

std::optional<double> level(const LevelValues& v, MetricLevel l) {
  return v[static_cast<std::size_t>(l)];
}

std::string count(std::size_t n) { return fmt::format("{}", n); }

std::vector<std::string> with_label(std::string label, std::vector<std::string> cells) {
  cells.insert(cells.begin(), std::move(label));
  return cells;
}

std::vector<std::string> level_cells(const LevelValues& v) {
  std::vector<std::string> out;
  for (auto l : kAllLevels) out.push_back(percent_cell(level(v, l)));
  return out;
}

template <typename RowFn>
Table per_split(std::vector<std::string> header, const DatasetStats& stats, RowFn&& row) {
  Table t{std::move(header), {}};
  for (const auto& s : stats.splits) t.rows.push_back(with_label(s.split, row(s)));
  t.rows.push_back(with_label("total", row(stats.total)));
  return t;
}

std::size_t lookup(const auto& map, const auto& key) {
  auto it = map.find(key);
  return it == map.end() ? 0 : it->second;
}

}  // namespace

std::string Table::to_csv() const {
  std::string out = join_csv(header);
  for (const auto& r : rows) out += join_csv(r);
  return out;
}

std::string Table::to_text() const {
  std::vector<std::size_t> widths(header.size(), 0);
  auto grow = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size() && i < widths.size(); ++i) {
      widths[i] = std::max(widths[i], r[i].size());
    }
  };
  grow(header);
  for (const auto& r : rows) grow(r);
  auto line = [&](const std::vector<std::string>& r) {
    std::string out;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += "  ";
      // First column left-aligned, numbers right-aligned.
      out += i == 0 ? fmt::format("{:<{}}", r[i], widths[i]) : fmt::format("{:>{}}", r[i], widths[i]);
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out + "\n";
  };
  std::string out = line(header);
  for (const auto& r : rows) out += line(r);
  return out;
}

std::string percent_cell(const std::optional<double>& fraction) {
  return fraction ? fmt::format("{:.1f}", 100.0 * *fraction) : "-";
}

std::string fixed_cell(const std::optional<double>& value, int decimals) {
  return value ? fmt::format("{:.{}f}", *value, decimals) : "-";
}

Table map_table(const EvalReport& report) {
  Table t{{"average", "PDet", "+M", "+MA", "+MAO"}, {}};
  t.rows.push_back(with_label("part", level_cells(report.overall.part_averaged)));
  t.rows.push_back(with_label("motion", level_cells(report.overall.motion_averaged)));
  return t;
}

Table ao_table(const EvalReport& report) {
  Table t{{"No AO Accuracy", "Single PDet", "Single +MAO", "Multiple PDet", "Multiple +MAO"}, {}};
  std::vector<std::string> row{percent_cell(report.no_ao_accuracy)};
  for (auto ao : {AoClass::kSingle, AoClass::kMultiple}) {
    auto it = report.by_ao.find(ao);
    for (auto l : {MetricLevel::kPDet, MetricLevel::kMAO}) {
      row.push_back(it == report.by_ao.end() ? "-"
                                             : percent_cell(level(it->second.part_averaged, l)));
    }
  }
  t.rows.push_back(std::move(row));
  return t;
}

Table category_table(const EvalReport& report) {
  Table t;
  std::vector<std::string> row;
  for (auto label : {PartLabel::kDrawer, PartLabel::kDoor, PartLabel::kLid}) {
    auto it = report.overall.per_label.find(label);
    for (auto l : kAllLevels) {
      t.header.push_back(fmt::format("{} {}", to_string(label), to_string(l)));
      row.push_back(it == report.overall.per_label.end() ? "-" : percent_cell(level(it->second.ap, l)));
    }
  }
  t.rows.push_back(std::move(row));
  return t;
}

Table pose_table(const PoseMetrics& pose, const MetricConfig& config) {
  Table t{{"Rotation MedErr", fmt::format("Rotation Acc:{:g}", config.rotation_accuracy_deg),
           "Translation MedErr", fmt::format("Translation Acc:{:g}", config.translation_accuracy)},
          {}};
  t.rows.push_back({fixed_cell(pose.rotation_median_deg), fixed_cell(pose.rotation_accuracy),
                    fixed_cell(pose.translation_median), fixed_cell(pose.translation_accuracy)});
  return t;
}

Table consistency_table(const ConsistencyReport& report) {
  Table t;
  std::vector<std::string> row;
  for (std::size_t i = 0; i < report.thresholds_deg.size(); ++i) {
    t.header.push_back(fmt::format("axis {:g}deg", report.thresholds_deg[i]));
    row.push_back(fixed_cell(report.axis[i]));
  }
  t.header.push_back("type");
  row.push_back(fixed_cell(report.type));
  t.rows.push_back(std::move(row));
  return t;
}

Table ao_count_table(const DatasetStats& stats) {
  return per_split({"split", "frames", "none", "single", "multiple", "parts/frame"}, stats,
                   [](const SplitStats& s) {
                     return std::vector<std::string>{count(s.frames), count(s.none),
                                                     count(s.single), count(s.multiple),
                                                     fmt::format("{:.2f}", s.parts_per_frame)};
                   });
}

Table part_count_table(const DatasetStats& stats) {
  return per_split({"split", "0", "1", "2", "3", "4+"}, stats, [](const SplitStats& s) {
    std::vector<std::string> out;
    for (std::size_t n : s.part_histogram) out.push_back(count(n));
    return out;
  });
}

Table part_type_table(const DatasetStats& stats) {
  return per_split({"split", "#part", "door", "drawer", "lid", "revolute", "prismatic"}, stats,
                   [](const SplitStats& s) {
                     return std::vector<std::string>{
                         count(s.parts),
                         count(lookup(s.per_label, PartLabel::kDoor)),
                         count(lookup(s.per_label, PartLabel::kDrawer)),
                         count(lookup(s.per_label, PartLabel::kLid)),
                         count(lookup(s.per_motion, MotionType::kRevolute)),
                         count(lookup(s.per_motion, MotionType::kPrismatic))};
                   });
}

}  // namespace opd::io
