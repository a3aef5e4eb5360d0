#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "trajbench/ingest.hpp"
#include "trajbench/synth.hpp"

#include <cmath>
#include <string>

using namespace tb;
using namespace tb::ingest;

namespace {

std::string contains_or_fail(const Error& e) { return e.what(); }

Trajectory random_trajectory(synth::Rng& rng, int n, bool with_fov) {
  std::vector<Pose> poses;
  poses.reserve(n);
  for (int i = 0; i < n; ++i) {
    Eigen::Quaterniond q(rng.normal(0, 1), rng.normal(0, 1), rng.normal(0, 1),
                         rng.normal(0, 1));
    q.normalize();
    std::optional<Fov> fov;
    if (with_fov) fov = Fov{rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0)};
    poses.emplace_back(i, static_cast<double>(i) / 25.0, q,
                       Eigen::Vector3d(rng.normal(0, 5), rng.normal(0, 5),
                                       rng.normal(0, 5)),
                       fov);
  }
  return Trajectory(std::move(poses), 25.0, ScaleStatus::metric,
                    FrameOfReference::world);
}

bool poses_bit_equal(const Pose& a, const Pose& b) {
  return a.t_index == b.t_index &&
         a.translation.x() == b.translation.x() &&
         a.translation.y() == b.translation.y() &&
         a.translation.z() == b.translation.z() &&
         a.rotation.x() == b.rotation.x() &&
         a.rotation.y() == b.rotation.y() &&
         a.rotation.z() == b.rotation.z() && a.rotation.w() == b.rotation.w();
}

}  // namespace

TEST_CASE("pose lines: minimal valid file") {
  const auto traj = parse_pose_lines(
      "0.0 0 0 0 0 0 0 1\n"
      "0.04 1 0 0 0 0 0 1\n");
  REQUIRE(traj.size() == 2);
  CHECK(traj.scale_status() == ScaleStatus::metric);
  CHECK((traj.poses()[1].translation - traj.poses()[0].translation).norm() ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(traj.frame_rate() == doctest::Approx(25.0).epsilon(1e-12));
}

TEST_CASE("pose lines: bad arity names the line") {
  const std::string text =
      "0.0 0 0 0 0 0 0 1\n"
      "0.04 1 0 0 0 0 0 1\n"
      "0.08 2 0 0 0 0 0\n";
  try {
    parse_pose_lines(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()) == "line 3: expected 8 fields, got 7");
  }
}

TEST_CASE("pose lines: bad number names line and field") {
  try {
    parse_pose_lines("0.0 0 0 0 0 0 0 1\n0.04 oops 0 0 0 0 0 1\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 2, field 2") != std::string::npos);
  }
}

TEST_CASE("pose lines: fewer than 2 poses") {
  CHECK_THROWS_WITH_AS(parse_pose_lines("0.0 0 0 0 0 0 0 1\n"),
                       "fewer than 2 poses (got 1)", ParseError);
  CHECK_THROWS_AS(parse_pose_lines("# only comments\n"), ParseError);
}

TEST_CASE("pose lines: 250 lines at 25 Hz span 9.96 s") {
  std::string text = "# scale: metric\n";
  for (int i = 0; i < 250; ++i)
    text += std::to_string(i / 25.0) + " " + std::to_string(i * 0.02) +
            " 0 0 0 0 0 1\n";
  const auto traj = parse_pose_lines(text);
  REQUIRE(traj.size() == 250);
  CHECK(traj.duration_s() == doctest::Approx(9.96).epsilon(1e-9));
}

TEST_CASE("pose lines: scale header") {
  const std::string body = "0.0 0 0 0 0 0 0 1\n0.04 1 0 0 0 0 0 1\n";
  CHECK(parse_pose_lines("# scale: arbitrary\n" + body).scale_status() ==
        ScaleStatus::arbitrary);
  CHECK(parse_pose_lines("# a comment\n" + body).scale_status() ==
        ScaleStatus::metric);
  CHECK_THROWS_AS(parse_pose_lines("# scale: parsecs\n" + body), ParseError);
  CHECK_THROWS_AS(
      parse_pose_lines("# scale: metric\n# scale: metric\n" + body),
      ParseError);
}

TEST_CASE("pose lines: zero quaternion is rejected with position") {
  try {
    parse_pose_lines("0.0 0 0 0 0 0 0 1\n0.04 1 0 0 0 0 0 0\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(std::string(e.what()).find("quaternion") != std::string::npos);
  }
}

TEST_CASE("extrinsics: identity rotations give plain displacement") {
  const std::string text =
      std::string(kExtrinsicsHeader) +
      "\n0,1,0,0,0,1,0,0,0,1,0,0,0\n1,1,0,0,0,1,0,0,0,1,0,0,2\n";
  const auto traj = parse_extrinsics_table(text);
  REQUIRE(traj.size() == 2);
  CHECK(traj.scale_status() == ScaleStatus::arbitrary);
  CHECK((traj.poses()[1].translation - traj.poses()[0].translation).norm() ==
        doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("extrinsics: reflection is rejected with its row") {
  std::string text = std::string(kExtrinsicsHeader) + "\n";
  for (int i = 0; i < 4; ++i)
    text += std::to_string(i) + ",1,0,0,0,1,0,0,0,1,0,0," + std::to_string(i) +
            "\n";
  text += "4,-1,0,0,0,1,0,0,0,1,0,0,4\n";  // det = -1 on data row 5
  try {
    parse_extrinsics_table(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()) == "row 5: reflection, not rotation");
  }
}

TEST_CASE("extrinsics: non-orthonormal rotation is rejected") {
  const std::string text =
      std::string(kExtrinsicsHeader) +
      "\n0,1,0,0,0,1,0,0,0,1,0,0,0\n1,1.1,0,0,0,1,0,0,0,1,0,0,1\n";
  try {
    parse_extrinsics_table(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("row 2: rotation not orthonormal") !=
          std::string::npos);
  }
}

TEST_CASE("extrinsics: header and ordering are enforced") {
  CHECK_THROWS_AS(parse_extrinsics_table("1,2,3\n"), ParseError);
  const std::string text =
      std::string(kExtrinsicsHeader) +
      "\n1,1,0,0,0,1,0,0,0,1,0,0,0\n0,1,0,0,0,1,0,0,0,1,0,0,1\n";
  try {
    parse_extrinsics_table(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("frame_idx not increasing") !=
          std::string::npos);
  }
}

TEST_CASE("extrinsics: rotation survives the matrix round trip") {
  synth::Rng rng(2024);
  std::vector<Pose> poses;
  for (int i = 0; i < 1000; ++i) {
    Eigen::Quaterniond q(rng.normal(0, 1), rng.normal(0, 1), rng.normal(0, 1),
                         rng.normal(0, 1));
    q.normalize();
    poses.emplace_back(i, std::nullopt, q,
                       Eigen::Vector3d(rng.normal(0, 3), rng.normal(0, 3),
                                       rng.normal(0, 3)));
  }
  const Trajectory traj(poses, 0.0, ScaleStatus::arbitrary,
                        FrameOfReference::reconstruction);
  const auto back = parse_extrinsics_table(write_extrinsics_table(traj));
  REQUIRE(back.size() == traj.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const Eigen::Matrix3d a = traj.poses()[i].rotation.toRotationMatrix();
    const Eigen::Matrix3d b = back.poses()[i].rotation.toRotationMatrix();
    worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
    CHECK(traj.poses()[i].translation.x() == back.poses()[i].translation.x());
    CHECK(traj.poses()[i].translation.y() == back.poses()[i].translation.y());
    CHECK(traj.poses()[i].translation.z() == back.poses()[i].translation.z());
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("pose encoding: single row is rejected") {
  const std::string text =
      std::string(kPoseEncodingHeader) + "\n0,0,0,0,0,0,0,1,1.2,0.9\n";
  CHECK_THROWS_WITH_AS(parse_pose_encoding(text), "fewer than 2 poses (got 1)",
                       ParseError);
}

TEST_CASE("pose encoding: identity rows parse to a zero-displacement path") {
  const std::string text = std::string(kPoseEncodingHeader) +
                           "\n0,0,0,0,0,0,0,1,1.2,0.9\n1,0,0,0,0,0,0,1,1.2,0.9\n";
  const auto traj = parse_pose_encoding(text);
  REQUIRE(traj.size() == 2);
  CHECK((traj.poses()[1].translation - traj.poses()[0].translation).norm() ==
        0.0);
  REQUIRE(traj.poses()[0].fov.has_value());
  CHECK(traj.poses()[0].fov->horizontal == 1.2);
}

TEST_CASE("pose encoding: write then parse is the identity") {
  synth::Rng rng(7);
  const Trajectory traj = random_trajectory(rng, 50, true);
  const Trajectory arb(traj.poses(), 0.0, ScaleStatus::arbitrary,
                       FrameOfReference::reconstruction);
  const auto back = parse_pose_encoding(write_pose_encoding(arb));
  REQUIRE(back.size() == arb.size());
  for (std::size_t i = 0; i < arb.size(); ++i) {
    CHECK(poses_bit_equal(arb.poses()[i], back.poses()[i]));
    CHECK(back.poses()[i].fov->horizontal == arb.poses()[i].fov->horizontal);
    CHECK(back.poses()[i].fov->vertical == arb.poses()[i].fov->vertical);
  }
}

TEST_CASE("pose lines: write then parse is the identity") {
  synth::Rng rng(8);
  const Trajectory traj = random_trajectory(rng, 50, false);
  const auto back = parse_pose_lines(write_pose_lines(traj));
  REQUIRE(back.size() == traj.size());
  CHECK(back.scale_status() == traj.scale_status());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    CHECK(poses_bit_equal(traj.poses()[i], back.poses()[i]));
    CHECK(*back.poses()[i].timestamp == *traj.poses()[i].timestamp);
  }
}

TEST_CASE("format detection keys on the header") {
  CHECK(detect_format("0.0 0 0 0 0 0 0 1\n") == PoseFileFormat::pose_lines);
  CHECK(detect_format(std::string(kExtrinsicsHeader) + "\n") ==
        PoseFileFormat::extrinsics_table);
  CHECK(detect_format(std::string(kPoseEncodingHeader) + "\n") ==
        PoseFileFormat::pose_encoding);
  CHECK(detect_format("# comment first\n0 0 0 0 0 0 0 1\n") ==
        PoseFileFormat::pose_lines);
}

namespace {

Manifest sample_manifest(int train, int eval) {
  Manifest m;
  m.format_version = "1.0";
  for (int i = 0; i < train + eval; ++i) {
    ScenarioDesc d;
    d.id = "S" + std::to_string(i);
    d.category = i % 2 == 0 ? "door" : "chair";
    d.prompt = "walk";
    d.target_mode =
        i % 2 == 0 ? TargetMode::explicit_target : TargetMode::implicit_target;
    d.split = i < train ? Split::train : Split::eval;
    d.gt_file = "gt/" + d.id + ".txt";
    d.frame_rate = 25.0;
    d.duration_s = 10.0;
    m.scenarios.push_back(d);
  }
  return m;
}

}  // namespace

TEST_CASE("manifest: split counts for the full dataset layout") {
  const auto m = parse_manifest(write_manifest(sample_manifest(325, 125)));
  CHECK(m.scenarios.size() == 450);
  CHECK(m.count(Split::train) == 325);
  CHECK(m.count(Split::eval) == 125);
}

TEST_CASE("manifest: duplicate ids name both entries") {
  auto m = sample_manifest(0, 3);
  m.scenarios[2].id = m.scenarios[0].id;
  try {
    parse_manifest(write_manifest(m));
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    const std::string msg = contains_or_fail(e);
    CHECK(msg.find("duplicate scenario id \"S0\"") != std::string::npos);
    CHECK(msg.find("entries 1 and 3") != std::string::npos);
  }
}

TEST_CASE("manifest: unknown target_mode is rejected") {
  std::string text = write_manifest(sample_manifest(0, 2));
  const auto at = text.find("\"implicit\"");
  REQUIRE(at != std::string::npos);
  text.replace(at, 10, "\"both\"");
  try {
    parse_manifest(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("unknown target_mode \"both\"") !=
          std::string::npos);
  }
}

TEST_CASE("manifest: missing fields and empty paths are rejected") {
  CHECK_THROWS_AS(parse_manifest("{}"), ParseError);
  CHECK_THROWS_AS(parse_manifest("not json"), ParseError);
  const std::string missing_prompt = R"({"format_version":"1.0","scenarios":[
    {"id":"a","category":"c","target_mode":"explicit","split":"eval",
     "gt_file":"g.txt","frame_rate":25.0,"duration_s":10.0}]})";
  try {
    parse_manifest(missing_prompt);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("missing field \"prompt\"") !=
          std::string::npos);
  }
  auto m = sample_manifest(0, 1);
  m.scenarios[0].gt_file = "";
  CHECK_THROWS_AS(parse_manifest(write_manifest(m)), ParseError);
}

TEST_CASE("load_scenario reads the ground truth relative to the manifest") {
  const auto dir = std::filesystem::temp_directory_path() / "tb_ingest_test";
  std::filesystem::remove_all(dir);
  const Path2D gt = synth::straight_line(5.0, 100);
  const Trajectory traj = synth::lift_to_poses(gt, 25.0, ScaleStatus::metric,
                                               FrameOfReference::world);
  write_file(dir / "gt" / "S0.txt", write_pose_lines(traj));
  auto m = sample_manifest(0, 1);
  m.scenarios[0].duration_s = 99.0 / 25.0;
  write_file(dir / "manifest.json", write_manifest(m));

  const auto loaded = load_manifest(dir / "manifest.json");
  const Scenario sc = load_scenario(dir, loaded.scenarios[0]);
  CHECK(sc.id == "S0");
  CHECK(sc.gt.size() == 100);
  CHECK(sc.duration_s == doctest::Approx(99.0 / 25.0));
  std::filesystem::remove_all(dir);
}
