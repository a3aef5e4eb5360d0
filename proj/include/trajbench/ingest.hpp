#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "trajbench/types.hpp"

namespace tb::ingest {

// Supported pose file layouts, auto-detectable from the first content line.
//
//  pose_lines        one pose per line: "timestamp tx ty tz qx qy qz qw",
//                    '#' comments, optional "# scale: metric|arbitrary"
//                    header (default metric).
//  extrinsics_table  CSV "frame_idx,r11,...,r33,t1,t2,t3" with a row-major
//                    rotation matrix; always arbitrary scale.
//  pose_encoding     CSV "frame_idx,tx,ty,tz,qx,qy,qz,qw,fov_h,fov_v";
//                    always arbitrary scale.
enum class PoseFileFormat { pose_lines, extrinsics_table, pose_encoding };

inline constexpr const char* kExtrinsicsHeader =
    "frame_idx,r11,r12,r13,r21,r22,r23,r31,r32,r33,t1,t2,t3";
inline constexpr const char* kPoseEncodingHeader =
    "frame_idx,tx,ty,tz,qx,qy,qz,qw,fov_h,fov_v";

Trajectory parse_pose_lines(const std::string& text);
Trajectory parse_extrinsics_table(const std::string& text);
Trajectory parse_pose_encoding(const std::string& text);

std::string write_pose_lines(const Trajectory& traj);
std::string write_extrinsics_table(const Trajectory& traj);
std::string write_pose_encoding(const Trajectory& traj);

PoseFileFormat detect_format(const std::string& text);
Trajectory parse_any(const std::string& text);

// One manifest entry; gt_file is relative to the manifest's directory.
struct ScenarioDesc {
  std::string id;
  std::string category;
  std::string prompt;
  TargetMode target_mode = TargetMode::explicit_target;
  Split split = Split::eval;
  std::string gt_file;
  double frame_rate = 25.0;
  double duration_s = 0.0;
};

struct Manifest {
  std::string format_version;
  std::vector<ScenarioDesc> scenarios;

  int count(Split s) const;
};

// JSON manifest: {"format_version": ..., "scenarios": [{id, category,
// prompt, target_mode, split, gt_file, frame_rate, duration_s}, ...]}.
Manifest load_manifest(const std::filesystem::path& path);
Manifest parse_manifest(const std::string& text);
std::string write_manifest(const Manifest& m);

// Reads the descriptor's ground-truth pose file and builds a full Scenario.
Scenario load_scenario(const std::filesystem::path& manifest_dir,
                       const ScenarioDesc& desc);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

}  // namespace tb::ingest
