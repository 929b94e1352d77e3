// Factor graph over sonar poses and polar landmarks and its whitened
// linear system.
#pragma once

#include <compare>
#include <map>
#include <vector>

#include "sonarloc/inertial.hpp"
#include "sonarloc/sonar_model.hpp"

namespace sonarloc {

struct PoseVariable {
  Pose value;
  bool fixed = false;
};

/// Pose and landmark variables keyed by id, plus sonar and odometry
/// factors in insertion order. Each landmark is expressed in the frame of
/// its `anchor` pose.
class FactorGraph {
 public:
  explicit FactorGraph(Mode mode = Mode::Planar) : mode_(mode) {}

  Mode mode() const { return mode_; }

  void add_pose(int id, const Pose& value, bool fixed = false);
  void add_landmark(int id, const PolarLandmark& value);
  void add_sonar(const SonarMeasurement& m);
  void add_odometry(const OdometryMeasurement& m);

  bool has_pose(int id) const { return poses_.count(id) != 0; }
  bool has_landmark(int id) const { return landmarks_.count(id) != 0; }
  const Pose& pose(int id) const;
  const PolarLandmark& landmark(int id) const;
  void set_pose(int id, const Pose& value);
  void set_landmark(int id, const PolarLandmark& value);

  const std::map<int, PoseVariable>& poses() const { return poses_; }
  const std::map<int, PolarLandmark>& landmarks() const { return landmarks_; }
  const std::vector<SonarMeasurement>& sonar_factors() const { return sonar_; }
  const std::vector<OdometryMeasurement>& odometry_factors() const { return odometry_; }

  /// Throws std::invalid_argument on dangling ids or mismatched
  /// dimensions.
  void validate() const;

  /// Σ rᵀΣ⁻¹r over all factors.
  double cost() const;

 private:
  Mode mode_;
  std::map<int, PoseVariable> poses_;
  std::map<int, PolarLandmark> landmarks_;
  std::vector<SonarMeasurement> sonar_;
  std::vector<OdometryMeasurement> odometry_;
};

/// Odometry residual: rotation error and translation difference of
/// from⁻¹∘to against the measurement.
VecX odometry_residual(const OdometryMeasurement& m, const Pose& from, const Pose& to);
/// Jacobians of odometry_residual for right perturbations of each end.
MatX odometry_jacobian_from(const OdometryMeasurement& m, const Pose& from,
                            const Pose& to);
MatX odometry_jacobian_to(const OdometryMeasurement& m, const Pose& from,
                          const Pose& to);

enum class VariableKind { Pose, Landmark };

struct VariableKey {
  VariableKind kind;
  int id;
  auto operator<=>(const VariableKey&) const = default;
};

struct ColumnBlock {
  int offset = 0;
  int size = 0;
};

/// Stacked whitened system A Δ ≈ b with b = −Σ^{-1/2}(h − z). Rows: one
/// 2-row band per sonar factor in insertion order, then odometry bands.
/// Columns: free poses by id, then landmarks by id.
struct LinearSystem {
  MatX A;
  VecX b;
  std::map<VariableKey, ColumnBlock> columns;
  int sonar_rows = 0;
};

struct AssembleOptions {
  bool include_odometry = true;
  /// Unit weights instead of Σ^{-1/2} when false.
  bool whiten = true;
};

LinearSystem assemble(const FactorGraph& graph, const AssembleOptions& options = {});

/// Returns a copy of the graph with Δ applied to every free variable.
FactorGraph retract(const FactorGraph& graph, const LinearSystem& layout,
                    const VecX& delta);

}  // namespace sonarloc
