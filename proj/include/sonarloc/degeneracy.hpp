// Solvability counting, singular-value constraint analysis and the planar
// triangulation analysis for pure and composite motions.
#pragma once

#include <string>
#include <variant>

#include "sonarloc/factor_graph.hpp"

namespace sonarloc {

enum class FrameClass { UnderConstrained, Normal, Keyframe };

std::string to_string(FrameClass c);
FrameClass frame_class_from_string(const std::string& s);

struct ConstraintReport {
  /// Descending singular values, zero-padded to the column count.
  VecX spectrum;
  double sigma_min = 0.0;
  int feature_count = 0;
  FrameClass classification = FrameClass::Normal;
};

struct DegeneracyThresholds {
  double sigma_low = 0.13;
  double sigma_high = 0.8;
  int min_features = 2;

  /// Thresholds that accept every frame. Used for the plain two-view
  /// baseline.
  static DegeneracyThresholds disabled();
  bool is_disabled() const { return sigma_low == 0.0 && min_features == 0; }

  /// Requires 0 < σ_low < σ_high and N_Fth >= 2 unless disabled().
  void validate() const;
};

/// Smallest M with 4M >= pose_dof + landmark_dof * M for a two-view
/// problem with one fixed pose.
int min_feature_count(Mode mode);
bool is_solvable(int feature_count, Mode mode);

/// Descending singular values of A, padded with zeros when A has fewer
/// rows than columns.
VecX singular_spectrum(const MatX& A);

/// Spectrum part of a ConstraintReport. Throws on empty or non-finite A.
ConstraintReport min_singular_value(const LinearSystem& system);
ConstraintReport min_singular_value(const MatX& A);

FrameClass classify_frame(int feature_count, double sigma_min,
                          const DegeneracyThresholds& thresholds);

struct PureX {
  double dx;
};
struct PureY {
  double dy;
};
struct PureYaw {
  double dpsi;
};
struct Composite {
  double dpsi;
  double dx;
  double dy;
};
using PlanarMotion = std::variant<PureX, PureY, PureYaw, Composite>;

/// Pose of the second view relative to the first.
Pose motion_pose(const PlanarMotion& motion);

struct TriangulationJacobian {
  Mat2 A;
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  /// σ_min > 1e-8 σ_max.
  bool full_rank = false;
};

/// ∂h/∂l of the second-view observation of a planar landmark anchored in
/// the first view.
TriangulationJacobian triangulation_jacobian(const PlanarMotion& motion,
                                             const PolarLandmark& landmark);

/// Gauss-Newton on the polar landmark from observations at two known planar
/// poses. The result is anchored in the first view. Throws
/// std::domain_error when the second-view Jacobian is rank deficient.
PolarLandmark triangulate_landmark(const Pose& first, const Vec2& z_first,
                                   const Pose& second, const Vec2& z_second,
                                   const PolarLandmark& init, int max_iterations = 50);

}  // namespace sonarloc
