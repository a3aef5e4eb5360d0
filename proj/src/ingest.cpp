#include "trajbench/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace tb::ingest {

namespace {

using json = nlohmann::ordered_json;

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) {
    if (cur.back() == '\r') cur.pop_back();
    lines.push_back(cur);
  }
  return lines;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

double parse_number(const std::string& tok, const std::string& where,
                    int field) {
  double value = 0.0;
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value))
    throw ParseError(where + ", field " + std::to_string(field) +
                     ": invalid number '" + tok + "'");
  return value;
}

int parse_frame_idx(const std::string& tok, const std::string& where) {
  int value = 0;
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || value < 0)
    throw ParseError(where + ", field 1: invalid frame_idx '" + tok + "'");
  return value;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Frame rate from timestamps; 0 when the span is degenerate.
double infer_frame_rate(const std::vector<Pose>& poses) {
  if (poses.size() < 2 || !poses.front().timestamp || !poses.back().timestamp)
    return 0.0;
  const double span = *poses.back().timestamp - *poses.front().timestamp;
  if (span <= 0.0) return 0.0;
  return static_cast<double>(poses.size() - 1) / span;
}

double pose_time(const Pose& p, double frame_rate) {
  if (p.timestamp) return *p.timestamp;
  if (frame_rate > 0.0) return p.t_index / frame_rate;
  throw Error("cannot serialize trajectory without timestamps or frame rate");
}

}  // namespace

Trajectory parse_pose_lines(const std::string& text) {
  const auto lines = split_lines(text);
  ScaleStatus scale = ScaleStatus::metric;
  bool scale_set = false;
  std::vector<Pose> poses;
  int t_index = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string where = "line " + std::to_string(i + 1);
    const std::string line = trim(lines[i]);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string body = trim(line.substr(1));
      if (body.rfind("scale:", 0) == 0) {
        if (scale_set) throw ParseError(where + ": duplicate scale header");
        const std::string value = trim(body.substr(6));
        if (value == "metric")
          scale = ScaleStatus::metric;
        else if (value == "arbitrary")
          scale = ScaleStatus::arbitrary;
        else
          throw ParseError(where + ": unknown scale '" + value + "'");
        scale_set = true;
      }
      continue;
    }
    const auto fields = split_ws(line);
    if (fields.size() != 8)
      throw ParseError(where + ": expected 8 fields, got " +
                       std::to_string(fields.size()));
    double v[8];
    for (int f = 0; f < 8; ++f) v[f] = parse_number(fields[f], where, f + 1);
    try {
      poses.emplace_back(t_index, v[0],
                         Eigen::Quaterniond(v[7], v[4], v[5], v[6]),
                         Eigen::Vector3d(v[1], v[2], v[3]));
    } catch (const Error& e) {
      throw ParseError(where + ": " + e.what());
    }
    ++t_index;
  }
  if (poses.size() < 2)
    throw ParseError("fewer than 2 poses (got " + std::to_string(poses.size()) +
                     ")");
  const double frame_rate = infer_frame_rate(poses);
  const auto frame = scale == ScaleStatus::metric
                         ? FrameOfReference::world
                         : FrameOfReference::reconstruction;
  return Trajectory(std::move(poses), frame_rate, scale, frame);
}

Trajectory parse_extrinsics_table(const std::string& text) {
  const auto lines = split_lines(text);
  std::size_t i = 0;
  while (i < lines.size() && trim(lines[i]).empty()) ++i;
  if (i == lines.size() || trim(lines[i]) != kExtrinsicsHeader)
    throw ParseError(std::string("missing extrinsics header \"") +
                     kExtrinsicsHeader + "\"");
  ++i;
  std::vector<Pose> poses;
  int row = 0;
  int last_idx = -1;
  for (; i < lines.size(); ++i) {
    const std::string line = trim(lines[i]);
    if (line.empty()) continue;
    ++row;
    const std::string where = "row " + std::to_string(row);
    const auto fields = split_csv(line);
    if (fields.size() != 13)
      throw ParseError(where + ": expected 13 fields, got " +
                       std::to_string(fields.size()));
    const int frame_idx = parse_frame_idx(fields[0], where);
    if (frame_idx <= last_idx)
      throw ParseError(where + ": frame_idx not increasing (" +
                       std::to_string(frame_idx) + " after " +
                       std::to_string(last_idx) + ")");
    last_idx = frame_idx;
    double v[12];
    for (int f = 0; f < 12; ++f)
      v[f] = parse_number(fields[f + 1], where, f + 2);
    Eigen::Matrix3d rot;
    rot << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
    const double deviation =
        (rot.transpose() * rot - Eigen::Matrix3d::Identity())
            .cwiseAbs()
            .maxCoeff();
    if (deviation > 1e-3) {
      std::ostringstream os;
      os << where << ": rotation not orthonormal (max deviation " << deviation
         << ")";
      throw ParseError(os.str());
    }
    if (rot.determinant() < 0.0)
      throw ParseError(where + ": reflection, not rotation");
    try {
      poses.emplace_back(frame_idx, std::nullopt, Eigen::Quaterniond(rot),
                         Eigen::Vector3d(v[9], v[10], v[11]));
    } catch (const Error& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  if (poses.size() < 2)
    throw ParseError("fewer than 2 poses (got " + std::to_string(poses.size()) +
                     ")");
  return Trajectory(std::move(poses), 0.0, ScaleStatus::arbitrary,
                    FrameOfReference::reconstruction);
}

Trajectory parse_pose_encoding(const std::string& text) {
  const auto lines = split_lines(text);
  std::size_t i = 0;
  while (i < lines.size() && trim(lines[i]).empty()) ++i;
  if (i == lines.size() || trim(lines[i]) != kPoseEncodingHeader)
    throw ParseError(std::string("missing pose-encoding header \"") +
                     kPoseEncodingHeader + "\"");
  ++i;
  std::vector<Pose> poses;
  int row = 0;
  int last_idx = -1;
  for (; i < lines.size(); ++i) {
    const std::string line = trim(lines[i]);
    if (line.empty()) continue;
    ++row;
    const std::string where = "row " + std::to_string(row);
    const auto fields = split_csv(line);
    if (fields.size() != 10)
      throw ParseError(where + ": expected 10 fields, got " +
                       std::to_string(fields.size()));
    const int frame_idx = parse_frame_idx(fields[0], where);
    if (frame_idx <= last_idx)
      throw ParseError(where + ": frame_idx not increasing (" +
                       std::to_string(frame_idx) + " after " +
                       std::to_string(last_idx) + ")");
    last_idx = frame_idx;
    double v[9];
    for (int f = 0; f < 9; ++f)
      v[f] = parse_number(fields[f + 1], where, f + 2);
    try {
      poses.emplace_back(frame_idx, std::nullopt,
                         Eigen::Quaterniond(v[6], v[3], v[4], v[5]),
                         Eigen::Vector3d(v[0], v[1], v[2]),
                         Fov{v[7], v[8]});
    } catch (const Error& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  if (poses.size() < 2)
    throw ParseError("fewer than 2 poses (got " + std::to_string(poses.size()) +
                     ")");
  return Trajectory(std::move(poses), 0.0, ScaleStatus::arbitrary,
                    FrameOfReference::reconstruction);
}

std::string write_pose_lines(const Trajectory& traj) {
  std::string out = "# scale: ";
  out += traj.scale_status() == ScaleStatus::arbitrary ? "arbitrary" : "metric";
  out += "\n";
  for (const auto& p : traj.poses()) {
    const double t = pose_time(p, traj.frame_rate());
    out += fmt(t) + " " + fmt(p.translation.x()) + " " +
           fmt(p.translation.y()) + " " + fmt(p.translation.z()) + " " +
           fmt(p.rotation.x()) + " " + fmt(p.rotation.y()) + " " +
           fmt(p.rotation.z()) + " " + fmt(p.rotation.w()) + "\n";
  }
  return out;
}

std::string write_extrinsics_table(const Trajectory& traj) {
  std::string out = std::string(kExtrinsicsHeader) + "\n";
  for (const auto& p : traj.poses()) {
    const Eigen::Matrix3d rot = p.rotation.toRotationMatrix();
    out += std::to_string(p.t_index);
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) out += "," + fmt(rot(r, c));
    for (int k = 0; k < 3; ++k) out += "," + fmt(p.translation[k]);
    out += "\n";
  }
  return out;
}

std::string write_pose_encoding(const Trajectory& traj) {
  std::string out = std::string(kPoseEncodingHeader) + "\n";
  for (const auto& p : traj.poses()) {
    const Fov fov = p.fov.value_or(Fov{0.0, 0.0});
    out += std::to_string(p.t_index) + "," + fmt(p.translation.x()) + "," +
           fmt(p.translation.y()) + "," + fmt(p.translation.z()) + "," +
           fmt(p.rotation.x()) + "," + fmt(p.rotation.y()) + "," +
           fmt(p.rotation.z()) + "," + fmt(p.rotation.w()) + "," +
           fmt(fov.horizontal) + "," + fmt(fov.vertical) + "\n";
  }
  return out;
}

PoseFileFormat detect_format(const std::string& text) {
  for (const auto& raw : split_lines(text)) {
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line == kExtrinsicsHeader) return PoseFileFormat::extrinsics_table;
    if (line == kPoseEncodingHeader) return PoseFileFormat::pose_encoding;
    return PoseFileFormat::pose_lines;
  }
  return PoseFileFormat::pose_lines;
}

Trajectory parse_any(const std::string& text) {
  switch (detect_format(text)) {
    case PoseFileFormat::extrinsics_table: return parse_extrinsics_table(text);
    case PoseFileFormat::pose_encoding: return parse_pose_encoding(text);
    case PoseFileFormat::pose_lines: default: return parse_pose_lines(text);
  }
}

int Manifest::count(Split s) const {
  return static_cast<int>(
      std::count_if(scenarios.begin(), scenarios.end(),
                    [&](const ScenarioDesc& d) { return d.split == s; }));
}

Manifest parse_manifest(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("manifest: ") + e.what());
  }
  Manifest m;
  if (!doc.contains("format_version") || !doc["format_version"].is_string())
    throw ParseError("manifest: missing field \"format_version\"");
  m.format_version = doc["format_version"].get<std::string>();
  if (!doc.contains("scenarios") || !doc["scenarios"].is_array())
    throw ParseError("manifest: missing field \"scenarios\"");

  std::map<std::string, std::size_t> seen;  // id -> 1-based entry
  std::size_t entry = 0;
  for (const auto& s : doc["scenarios"]) {
    ++entry;
    const std::string where = "manifest scenario " + std::to_string(entry);
    auto need = [&](const char* key) -> const json& {
      if (!s.contains(key))
        throw ParseError(where + ": missing field \"" + key + "\"");
      return s[key];
    };
    ScenarioDesc d;
    try {
      d.id = need("id").get<std::string>();
      d.category = need("category").get<std::string>();
      d.prompt = need("prompt").get<std::string>();
      d.target_mode =
          target_mode_from_string(need("target_mode").get<std::string>());
      d.split = split_from_string(need("split").get<std::string>());
      d.gt_file = need("gt_file").get<std::string>();
      d.frame_rate = need("frame_rate").get<double>();
      d.duration_s = need("duration_s").get<double>();
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    } catch (const Error& e) {
      throw ParseError(where + " (\"" + d.id + "\"): " + e.what());
    }
    if (d.id.empty()) throw ParseError(where + ": empty id");
    if (d.gt_file.empty())
      throw ParseError(where + " (\"" + d.id + "\"): empty gt_file");
    if (auto it = seen.find(d.id); it != seen.end())
      throw ParseError("duplicate scenario id \"" + d.id + "\" (entries " +
                       std::to_string(it->second) + " and " +
                       std::to_string(entry) + ")");
    seen[d.id] = entry;
    m.scenarios.push_back(std::move(d));
  }
  return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_file(path));
}

std::string write_manifest(const Manifest& m) {
  json doc;
  doc["format_version"] = m.format_version;
  doc["scenarios"] = json::array();
  for (const auto& d : m.scenarios) {
    json s;
    s["id"] = d.id;
    s["category"] = d.category;
    s["prompt"] = d.prompt;
    s["target_mode"] = to_string(d.target_mode);
    s["split"] = to_string(d.split);
    s["gt_file"] = d.gt_file;
    s["frame_rate"] = d.frame_rate;
    s["duration_s"] = d.duration_s;
    doc["scenarios"].push_back(std::move(s));
  }
  return doc.dump(2) + "\n";
}

Scenario load_scenario(const std::filesystem::path& manifest_dir,
                       const ScenarioDesc& desc) {
  const auto gt_path = manifest_dir / desc.gt_file;
  Trajectory traj = parse_any(read_file(gt_path));
  if (traj.scale_status() != ScaleStatus::metric)
    throw Error("scenario \"" + desc.id +
                "\": ground truth file is not metric (" + gt_path.string() +
                ")");
  if (traj.frame_rate() == 0.0 && desc.frame_rate > 0.0)
    traj = Trajectory(traj.poses(), desc.frame_rate, traj.scale_status(),
                      traj.frame_of_reference());
  const double duration =
      desc.duration_s > 0.0 ? desc.duration_s : traj.duration_s();
  return Scenario(desc.id, desc.category, desc.prompt, desc.target_mode,
                  desc.split, std::move(traj), duration);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file: " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write file: " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace tb::ingest
