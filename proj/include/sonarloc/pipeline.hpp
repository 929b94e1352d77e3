// Per-frame estimation pipeline: classify the two-view system, then either
// propagate inertially or optimize over the elastic window.
#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "sonarloc/inertial.hpp"
#include "sonarloc/solver.hpp"
#include "sonarloc/window.hpp"

namespace sonarloc {

struct FrameInput {
  int id = -1;
  double timestamp = 0.0;
  std::vector<Observation> observations;
};

struct PipelineConfig {
  Mode mode = Mode::Planar;
  DegeneracyThresholds thresholds;
  int max_window = 5;
  int coview_threshold = 4;
  std::size_t database_capacity = 200;
  double sigma_bearing = 0.02;
  double sigma_range = 0.05;
  /// σ_min from the Σ-whitened sonar rows (true) or unit-weight rows.
  bool whiten_sigma = true;
  SolverConfig solver;

  /// Plain two-view ABA: N_Smax = 2, σ_low = 0, N_Fth = 0.
  static PipelineConfig two_view_baseline();
  static PipelineConfig two_view_baseline(PipelineConfig base);
  void validate() const;
};

struct Admission {
  int id;
  double sigma_min;
  int coview;
};

struct FrameReport {
  int frame = -1;
  double timestamp = 0.0;
  FrameClass classification = FrameClass::Normal;
  double sigma_min = 0.0;
  int feature_count = 0;
  int reference = -1;
  std::vector<int> window;
  std::vector<Admission> keyframes;
  double sigma_average = 0.0;
  bool optimized = false;
  int iterations = 0;
  double final_cost = 0.0;
  std::string fallback;
  Pose pose;
  /// Wall-clock processing time; not part of the deterministic manifest.
  double time_ms = 0.0;
};

nlohmann::json to_json(const FrameReport& report);

/// Two-view graph between `prev` (fixed at the origin) and `current`
/// (initialized from the odometry): landmarks are the shared ids in
/// ascending order, anchored in `prev`, with each landmark's `prev`
/// detections followed by its `current` detections.
FactorGraph build_two_view_graph(const FrameRecord& prev, const FrameInput& current,
                                 const OdometryMeasurement& odometry,
                                 const PipelineConfig& config);

/// Number of shared ids and σ_min of the two-view sonar Jacobian.
std::pair<int, double> two_view_constraint(const FrameRecord& prev,
                                           const FrameInput& current,
                                           const OdometryMeasurement& odometry,
                                           const PipelineConfig& config);

class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config);

  /// The first frame fixes the gauge at `start`.
  FrameReport initialize(const FrameInput& first, const Pose& start);
  FrameReport initialize(const FrameInput& first);
  /// `odometry` is the increment from the previous frame to this one.
  FrameReport process_frame(const FrameInput& frame, const OdometryMeasurement& odometry);

  bool initialized() const { return !history_.empty(); }
  const PipelineConfig& config() const { return config_; }
  const std::vector<FrameRecord>& history() const { return history_; }
  const std::vector<FrameRecord>& database() const { return database_; }
  const ElasticWindow& window() const { return window_; }
  /// Latest world-frame estimate of every landmark optimized so far.
  const std::map<int, Vec3>& landmarks() const { return landmarks_; }

 private:
  FactorGraph build_window_graph(const FrameInput& frame,
                                 const std::vector<const FrameRecord*>& frames) const;
  void store_landmarks(const FactorGraph& graph, const Pose& reference_pose);

  PipelineConfig config_;
  std::vector<FrameRecord> history_;
  std::vector<FrameRecord> database_;
  ElasticWindow window_;
  int last_accepted_ = -1;
  OdometryMeasurement accumulated_;
  std::map<int, Vec3> landmarks_;
};

/// Standalone two-view ABA: every frame is solved against its immediate
/// predecessor, no classification and no keyframes.
class TwoViewAba {
 public:
  explicit TwoViewAba(PipelineConfig config);
  Pose initialize(const FrameInput& first, const Pose& start);
  Pose process_frame(const FrameInput& frame, const OdometryMeasurement& odometry);
  const std::map<int, Vec3>& landmarks() const { return landmarks_; }

 private:
  PipelineConfig config_;
  FrameRecord prev_;
  std::map<int, Vec3> landmarks_;
};

/// Pure odometry composition.
class DeadReckoning {
 public:
  explicit DeadReckoning(Mode mode = Mode::Planar) : pose_(Pose::identity(mode)) {}
  Pose initialize(const Pose& start) { return pose_ = start; }
  Pose process_frame(const OdometryMeasurement& odometry) {
    return pose_ = pose_.compose(odometry.relative);
  }

 private:
  Pose pose_;
};

}  // namespace sonarloc
