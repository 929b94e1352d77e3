// Trajectory and landmark error metrics. Estimates are compared in the
// world frame as-is; there is no alignment step.
#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "sonarloc/sim.hpp"

namespace sonarloc {

struct RunResult {
  std::string method;
  std::vector<Pose> trajectory;
  std::map<int, Vec3> landmarks;
  std::vector<double> time_ms;
};

/// Population statistics.
struct ErrorSummary {
  double mean = 0.0;
  double std = 0.0;
  double min = 0.0;
  double max = 0.0;
};

ErrorSummary summarize(const std::vector<double>& values);

struct TrajectoryErrors {
  /// Position error per frame.
  std::vector<double> error;
  /// RMSE over frames 0..k.
  std::vector<double> cumulative_rmse;
  ErrorSummary summary;

  double final_rmse() const { return cumulative_rmse.back(); }
};

TrajectoryErrors trajectory_rmse(const std::vector<Pose>& estimate,
                                 const std::vector<Pose>& truth);

struct LandmarkError {
  int id;
  double ex;
  double ey;
};

struct LandmarkErrors {
  std::vector<LandmarkError> per_landmark;
  double rmse_x = 0.0;
  double rmse_y = 0.0;
  double mae_x = 0.0;
  double mae_y = 0.0;
};

/// Estimate minus truth for every estimated id. Throws when nothing was
/// estimated or an id has no ground truth.
LandmarkErrors landmark_errors(const std::map<int, Vec3>& estimate,
                               const std::vector<LandmarkSpec>& truth);

double endpoint_error(const std::vector<Pose>& estimate, const std::vector<Pose>& truth);

void write_errors_csv(std::ostream& out, const TrajectoryErrors& e);
TrajectoryErrors read_errors_csv(std::istream& in);
void write_landmark_errors_csv(std::ostream& out, const LandmarkErrors& e);

/// Summary block: trajectory statistics, endpoint error and, when the
/// method estimates landmarks, their RMSE and MAE.
nlohmann::json summary_json(const std::string& method, const TrajectoryErrors& traj,
                            double endpoint, const LandmarkErrors* landmarks);

}  // namespace sonarloc
