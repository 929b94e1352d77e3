// Sonar measurement prediction, residuals, analytic Jacobians and
// whitening.
#pragma once

#include "sonarloc/geometry.hpp"

namespace sonarloc {

/// One (ψ, r) detection of landmark `landmark` in frame `frame`.
struct SonarMeasurement {
  double bearing = 0.0;
  double range = 0.0;
  Mat2 covariance = Mat2::Identity();
  int frame = -1;
  int landmark = -1;
};

/// Diagonal measurement covariance from per-axis standard deviations.
Mat2 sonar_covariance(double sigma_bearing, double sigma_range);

/// Landmark point in the observing frame, `pose` being the observer
/// relative to the landmark's anchor.
Vec3 landmark_in_frame(const Pose& pose, const PolarLandmark& l);

/// π(Rᵀ(p(l) − t)).
Vec2 predict(const Pose& pose, const PolarLandmark& l);

/// h − z with the bearing wrapped to (−π, π].
Vec2 residual(const SonarMeasurement& z, const Pose& pose, const PolarLandmark& l);

/// ∂h/∂q at a point q of the observing frame. 2x2 in planar mode, 2x3
/// otherwise.
MatX jacobian_projection(const Vec3& q, Mode mode);

/// ∂p/∂l of the polar-to-Cartesian map, 2x2 or 3x3.
MatX jacobian_back_projection(const PolarLandmark& l, Mode mode);

/// ∂h/∂δ for a right perturbation of the observer, 2 x pose_dof.
MatX jacobian_pose(const Pose& pose, const PolarLandmark& l);

/// ∂h/∂l, 2 x landmark_dof.
MatX jacobian_landmark(const Pose& pose, const PolarLandmark& l);

/// ∂h/∂δ for a right perturbation of the anchor frame, 2 x pose_dof.
MatX jacobian_anchor(const Pose& pose, const PolarLandmark& l);

/// Landmark block of an observation made from the anchor frame itself:
/// [[1,0],[0,1]] or [[1,0,0],[0,1,0]].
MatX reference_jacobian_landmark(Mode mode);

/// Symmetric Σ^{-1/2}. Throws std::invalid_argument unless Σ is symmetric
/// positive definite.
MatX inverse_sqrt(const MatX& cov);

struct Whitened {
  MatX block;
  VecX residual;
};

Whitened whiten(const MatX& block, const VecX& residual, const MatX& cov);

/// Applies a polar increment (ψ, r[, θ]) to a landmark.
PolarLandmark retract_landmark(const PolarLandmark& l, const VecX& delta, Mode mode);

}  // namespace sonarloc
