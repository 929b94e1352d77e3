// Scenario directories on disk: measurement stream, ground truth and the
// resolved scenario config.
#pragma once

#include <filesystem>

#include "sonarloc/config.hpp"
#include "sonarloc/sim.hpp"

namespace sonarloc {

/// Writes frames.csv, sonar.csv, odometry.csv, imu.csv (when the stream
/// has IMU samples), truth_poses.csv, truth_landmarks.csv,
/// associations.csv, scenario.cfg and manifest.json.
void write_scenario(const std::filesystem::path& dir, const ScenarioConfig& config,
                    const Scenario& scenario);

MeasurementStream read_stream(const std::filesystem::path& dir);
GroundTruth read_truth(const std::filesystem::path& dir);
ScenarioConfig read_scenario_config(const std::filesystem::path& dir);

/// Writes `text` to `path`, throwing on any I/O failure.
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace sonarloc
