// End-to-end execution of the estimation methods over a scenario.
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "sonarloc/config.hpp"
#include "sonarloc/eval.hpp"

namespace sonarloc {

struct LoadedScenario {
  ScenarioConfig config;
  MeasurementStream stream;
  GroundTruth truth;
};

/// Reads a simulate directory, or generates the scenario when
/// `run.scenario` names a config file. The run's seed and injection
/// overrides are applied here.
LoadedScenario load_scenario(const RunConfig& run);

std::vector<FrameInput> frame_inputs(const MeasurementStream& stream);

/// One measurement per frame after the first, from odometry.csv with the
/// estimator's assumed sigmas or from pre-integrated IMU samples.
std::vector<OdometryMeasurement> odometry_measurements(const RunConfig& run,
                                                       const LoadedScenario& scenario);

struct MethodRun {
  RunResult result;
  /// One JSON object per frame; deterministic.
  std::vector<nlohmann::json> manifest;
};

/// "all" expands to proposed, aba2view and dr.
std::vector<std::string> expand_methods(const std::string& method);

MethodRun run_method(const std::string& method, const PipelineConfig& config,
                     const std::vector<FrameInput>& frames,
                     const std::vector<OdometryMeasurement>& odometry);

/// trajectory.csv, landmarks.csv, manifest.jsonl, timing.csv and the
/// evaluation files.
void write_method_outputs(const std::filesystem::path& dir, const MethodRun& run,
                          const GroundTruth& truth);

/// Recomputes errors.csv, landmark_errors.csv and summary.json from the
/// trajectory.csv and landmarks.csv in `dir`.
nlohmann::json evaluate_method_dir(const std::filesystem::path& dir, const GroundTruth& truth);

std::vector<Pose> read_trajectory_csv(const std::filesystem::path& path);
std::map<int, Vec3> read_landmarks_csv(const std::filesystem::path& path);
std::vector<double> read_timing_csv(const std::filesystem::path& path);

}  // namespace sonarloc
