// Flat `key = value` configuration files. Keys are dotted paths, values are
// JSON literals; a value that is not valid JSON is taken as a bare string.
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "sonarloc/pipeline.hpp"
#include "sonarloc/sim.hpp"

namespace sonarloc {

using ConfigTree = std::map<std::string, nlohmann::json>;

/// Thrown for malformed files, unknown keys and ill-typed values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json parse_config_value(const std::string& text);
ConfigTree parse_config(std::istream& in, const std::string& source = "<config>");
ConfigTree read_config_file(const std::filesystem::path& path);
/// One `key = value` line per entry, sorted by key.
void write_config(std::ostream& out, const ConfigTree& tree);

/// Applies the keys of `tree` over `base`. Every key must be known.
ScenarioConfig scenario_from_tree(const ConfigTree& tree,
                                  ScenarioConfig base = ScenarioConfig::standard());
ConfigTree to_tree(const ScenarioConfig& config);

enum class OdometrySource { Csv, Imu };

struct RunConfig {
  /// A directory written by `simulate`, or a scenario config file that is
  /// generated in memory.
  std::string scenario;
  /// proposed | aba2view | dr | all
  std::string method = "all";
  PipelineConfig pipeline;
  /// Odometry noise assumed by the estimator.
  double sigma_odometry_translation = 0.05;
  double sigma_odometry_rotation = 0.02;
  /// IMU noise densities assumed when odometry comes from pre-integration.
  double gyro_noise_density = 1e-3;
  double accel_noise_density = 1e-2;
  OdometrySource odometry_source = OdometrySource::Csv;
  std::string out = "results";
  /// Overrides the scenario seed; only valid with a scenario config file.
  std::optional<std::uint64_t> seed;
  /// Wrong-association spec applied on top of the scenario's own list.
  std::string inject;

  void validate() const;
};

RunConfig run_from_tree(const ConfigTree& tree, RunConfig base = {});
ConfigTree to_tree(const RunConfig& config);

}  // namespace sonarloc
