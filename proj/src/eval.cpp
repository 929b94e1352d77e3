#include "sonarloc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "sonarloc/csv.hpp"

namespace sonarloc {

ErrorSummary summarize(const std::vector<double>& v) {
  if (v.empty()) throw std::invalid_argument("no values to summarize");
  ErrorSummary s;
  s.min = v.front();
  s.max = v.front();
  double sum = 0.0;
  for (double x : v) {
    sum += x;
    s.min = std::min(s.min, x);
    s.max = std::max(s.max, x);
  }
  s.mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(v.size()));
  return s;
}

TrajectoryErrors trajectory_rmse(const std::vector<Pose>& estimate,
                                 const std::vector<Pose>& truth) {
  if (estimate.size() != truth.size()) {
    throw std::invalid_argument("trajectory length " + std::to_string(estimate.size()) +
                                " does not match ground truth length " +
                                std::to_string(truth.size()));
  }
  if (truth.empty()) throw std::invalid_argument("empty trajectory");
  TrajectoryErrors e;
  double sq = 0.0;
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const double d = (estimate[k].translation() - truth[k].translation()).norm();
    e.error.push_back(d);
    sq += d * d;
    e.cumulative_rmse.push_back(std::sqrt(sq / static_cast<double>(k + 1)));
  }
  e.summary = summarize(e.error);
  return e;
}

LandmarkErrors landmark_errors(const std::map<int, Vec3>& estimate,
                               const std::vector<LandmarkSpec>& truth) {
  if (estimate.empty()) throw std::invalid_argument("no estimated landmarks");
  LandmarkErrors out;
  for (const auto& [id, p] : estimate) {
    auto it = std::find_if(truth.begin(), truth.end(),
                           [id = id](const LandmarkSpec& l) { return l.id == id; });
    if (it == truth.end()) {
      throw std::invalid_argument("landmark " + std::to_string(id) + " has no ground truth");
    }
    const LandmarkError e{id, p.x() - it->position.x(), p.y() - it->position.y()};
    out.per_landmark.push_back(e);
    out.rmse_x += e.ex * e.ex;
    out.rmse_y += e.ey * e.ey;
    out.mae_x += std::abs(e.ex);
    out.mae_y += std::abs(e.ey);
  }
  const double n = static_cast<double>(out.per_landmark.size());
  out.rmse_x = std::sqrt(out.rmse_x / n);
  out.rmse_y = std::sqrt(out.rmse_y / n);
  out.mae_x /= n;
  out.mae_y /= n;
  return out;
}

double endpoint_error(const std::vector<Pose>& estimate, const std::vector<Pose>& truth) {
  if (estimate.empty() || truth.empty()) throw std::invalid_argument("empty trajectory");
  if (estimate.size() != truth.size()) throw std::invalid_argument("trajectory length mismatch");
  return (estimate.back().translation() - truth.back().translation()).norm();
}

void write_errors_csv(std::ostream& out, const TrajectoryErrors& e) {
  out << "frame,err_m,cum_rmse_m\n";
  for (std::size_t k = 0; k < e.error.size(); ++k) {
    out << k << ',' << fmt_double(e.error[k]) << ',' << fmt_double(e.cumulative_rmse[k])
        << '\n';
  }
}

TrajectoryErrors read_errors_csv(std::istream& in) {
  CsvReader csv(in, {"frame", "err_m", "cum_rmse_m"});
  TrajectoryErrors e;
  std::vector<double> row;
  while (csv.next(row)) {
    if (row[0] != static_cast<double>(e.error.size())) {
      throw std::runtime_error("errors csv: frames must be numbered 0, 1, 2, ...");
    }
    e.error.push_back(row[1]);
    e.cumulative_rmse.push_back(row[2]);
  }
  e.summary = summarize(e.error);
  return e;
}

void write_landmark_errors_csv(std::ostream& out, const LandmarkErrors& e) {
  out << "landmark_id,ex_m,ey_m\n";
  for (const auto& l : e.per_landmark) {
    out << l.id << ',' << fmt_double(l.ex) << ',' << fmt_double(l.ey) << '\n';
  }
}

nlohmann::json summary_json(const std::string& method, const TrajectoryErrors& traj,
                            double endpoint, const LandmarkErrors* landmarks) {
  nlohmann::json j = {{"method", method},
                      {"frames", traj.error.size()},
                      {"trajectory",
                       {{"final_rmse_m", traj.final_rmse()},
                        {"mean_m", traj.summary.mean},
                        {"std_m", traj.summary.std},
                        {"min_m", traj.summary.min},
                        {"max_m", traj.summary.max}}},
                      {"endpoint_error_m", endpoint}};
  if (landmarks) {
    j["landmarks"] = {{"count", landmarks->per_landmark.size()},
                      {"rmse_x_m", landmarks->rmse_x},
                      {"rmse_y_m", landmarks->rmse_y},
                      {"mae_x_m", landmarks->mae_x},
                      {"mae_y_m", landmarks->mae_y}};
  } else {
    j["landmarks"] = nullptr;
  }
  return j;
}

}  // namespace sonarloc
