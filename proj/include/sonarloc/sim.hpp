// Deterministic synthetic world: square trajectory, landmark field, noisy
// sonar and odometry synthesis, sparsity windows and wrong associations.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sonarloc/inertial.hpp"
#include "sonarloc/window.hpp"

namespace sonarloc {

struct TrajectorySpec {
  double side_length = 10.0;
  double frame_spacing = 0.2;
  /// Pure-yaw frames per 90° corner.
  int corner_steps = 4;
  /// 0 means one lap: four sides and the three corners between them.
  /// Larger values keep circling the square.
  int frame_count = 0;
  double frame_period = 1.0;
};

struct NoiseSpec {
  double sonar_range = 0.05;
  double sonar_bearing = 0.02;
  double odometry_translation = 0.05;
  double odometry_rotation = 0.02;
};

struct LandmarkSpec {
  int id;
  Vec3 position;
};

/// Detections of `from` relabelled as `to` at one frame.
struct Injection {
  int frame = 0;
  std::map<int, int> relabel;
};

/// Frames [first, last] keep only `keep` landmarks shared with the frame
/// before the window.
struct SparsityWindow {
  int first = 0;
  int last = 0;
  int keep = 1;
};

struct ImuSpec {
  /// Samples per second; 0 disables the IMU stream.
  double rate = 0.0;
  ImuIntrinsics intrinsics;
};

struct ScenarioConfig {
  TrajectorySpec trajectory;
  std::vector<LandmarkSpec> landmarks;
  SonarIntrinsics sonar;
  NoiseSpec noise;
  std::uint64_t seed = 1;
  std::vector<Injection> injections;
  std::vector<SparsityWindow> sparsity;
  ImuSpec imu;

  /// Default square with the built-in landmark layout and sparsity windows.
  static ScenarioConfig standard();
  void validate() const;
};

std::vector<LandmarkSpec> default_landmarks();
std::vector<SparsityWindow> default_sparsity();

struct FrameObservations {
  int frame = 0;
  double timestamp = 0.0;
  std::vector<Observation> observations;
};

/// Noisy planar increment from frame-1 to frame.
struct OdometryRecord {
  int frame = 0;
  double dpsi = 0.0;
  double dx = 0.0;
  double dy = 0.0;

  Pose relative() const { return Pose::planar(dpsi, dx, dy); }
};

struct MeasurementStream {
  std::vector<FrameObservations> frames;
  std::vector<OdometryRecord> odometry;
  std::vector<ImuSample> imu;
};

struct GroundTruth {
  std::vector<Pose> poses;
  std::vector<LandmarkSpec> landmarks;
  /// True landmark id of each detection, parallel to the observations.
  std::vector<std::vector<int>> associations;
};

struct Scenario {
  GroundTruth truth;
  MeasurementStream stream;
};

std::vector<Pose> square_trajectory(const TrajectorySpec& spec);

/// Noise-free visibility of landmark `p` (world frame) from `pose`.
bool visible(const Pose& pose, const Vec3& p, const SonarIntrinsics& sonar);

Scenario generate_scenario(const ScenarioConfig& config);

MeasurementStream inject_wrong_associations(MeasurementStream stream,
                                            const std::vector<Injection>& injections);

/// Parses "50:6>1,7>8"; several injections are separated by ';'.
std::vector<Injection> parse_injections(const std::string& spec);
std::string format_injections(const std::vector<Injection>& injections);

/// Synthesized IMU data for a schedule of per-frame increments.
struct ImuStream {
  std::vector<ImuSample> samples;
  int samples_per_frame = 0;
  /// World-frame velocity and attitude at the start of each frame.
  std::vector<Vec3> start_velocity;
  std::vector<Mat3> start_attitude;
};

/// Samples whose midpoint-rule integration reproduces each increment.
/// Boundary samples carry zero rate and zero world acceleration; the
/// interior of every frame carries a constant yaw rate and two constant
/// acceleration phases that hit the increment's displacement and a target
/// end velocity. The vehicle starts with `start_velocity` (body frame).
ImuStream imu_stream_for(const std::vector<Pose>& increments, double frame_period,
                         double rate_hz, const ImuIntrinsics& intrinsics,
                         const Vec3& start_velocity = Vec3::Zero());

}  // namespace sonarloc
