#include "sonarloc/sonar_model.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace sonarloc {

Mat2 sonar_covariance(double sigma_bearing, double sigma_range) {
  return Eigen::Vector2d(sigma_bearing * sigma_bearing, sigma_range * sigma_range)
      .asDiagonal();
}

Vec3 landmark_in_frame(const Pose& pose, const PolarLandmark& l) {
  return transform_into(pose, back_project(l));
}

Vec2 predict(const Pose& pose, const PolarLandmark& l) {
  return project(landmark_in_frame(pose, l));
}

Vec2 residual(const SonarMeasurement& z, const Pose& pose, const PolarLandmark& l) {
  const Vec2 h = predict(pose, l);
  return Vec2(wrap_angle(h(0) - z.bearing), h(1) - z.range);
}

MatX jacobian_projection(const Vec3& q, Mode mode) {
  const double rho2 = q.x() * q.x() + q.y() * q.y();
  if (!(rho2 > 1e-24)) {
    throw DegeneratePointError("bearing undefined for a point on the sonar axis");
  }
  if (mode == Mode::Planar) {
    const double rho = std::sqrt(rho2);
    MatX J(2, 2);
    J << -q.y() / rho2, q.x() / rho2, q.x() / rho, q.y() / rho;
    return J;
  }
  const double r = q.norm();
  MatX J(2, 3);
  J << -q.y() / rho2, q.x() / rho2, 0.0, q.x() / r, q.y() / r, q.z() / r;
  return J;
}

MatX jacobian_back_projection(const PolarLandmark& l, Mode mode) {
  const double cb = std::cos(l.bearing), sb = std::sin(l.bearing);
  const double r = l.range;
  if (mode == Mode::Planar) {
    MatX J(2, 2);
    J << -r * sb, cb, r * cb, sb;
    return J;
  }
  const double ce = std::cos(l.elevation), se = std::sin(l.elevation);
  MatX J(3, 3);
  // clang-format off
  J << -r * sb * ce, cb * ce, -r * cb * se,
        r * cb * ce, sb * ce, -r * sb * se,
        0.0,         se,       r * ce;
  // clang-format on
  return J;
}

MatX jacobian_pose(const Pose& pose, const PolarLandmark& l) {
  const Mode mode = pose.mode();
  const Vec3 q = landmark_in_frame(pose, l);
  const MatX Hq = jacobian_projection(q, mode);
  if (mode == Mode::Planar) {
    MatX dq(2, 3);
    dq << q.y(), -1.0, 0.0, -q.x(), 0.0, -1.0;
    return Hq * dq;
  }
  MatX dq(3, 6);
  dq << skew(q), -Mat3::Identity();
  return Hq * dq;
}

MatX jacobian_landmark(const Pose& pose, const PolarLandmark& l) {
  const Mode mode = pose.mode();
  const MatX Hq = jacobian_projection(landmark_in_frame(pose, l), mode);
  const int n = landmark_dof(mode);
  const MatX Rt = pose.rotation().transpose().topLeftCorner(n, n);
  return Hq * Rt * jacobian_back_projection(l, mode);
}

MatX jacobian_anchor(const Pose& pose, const PolarLandmark& l) {
  const Mode mode = pose.mode();
  const Vec3 p = back_project(l);
  const Vec3 q = transform_into(pose, p);
  const MatX Hq = jacobian_projection(q, mode);
  const Mat3 Rt = pose.rotation().transpose();
  if (mode == Mode::Planar) {
    MatX dp(2, 3);
    dp << -p.y(), 1.0, 0.0, p.x(), 0.0, 1.0;
    return Hq * Rt.topLeftCorner<2, 2>() * dp;
  }
  MatX dp(3, 6);
  dp << -skew(p), Mat3::Identity();
  return Hq * Rt * dp;
}

MatX reference_jacobian_landmark(Mode mode) {
  MatX J = MatX::Zero(2, landmark_dof(mode));
  J(0, 0) = 1.0;
  J(1, 1) = 1.0;
  return J;
}

MatX inverse_sqrt(const MatX& cov) {
  if (cov.rows() != cov.cols() || cov.rows() == 0 || !cov.allFinite()) {
    throw std::invalid_argument("covariance must be a finite square matrix");
  }
  const double scale = cov.cwiseAbs().maxCoeff();
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("covariance is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<MatX> es(cov);
  const VecX& ev = es.eigenvalues();
  if (!(ev.minCoeff() > 0.0) || ev.minCoeff() <= 1e-14 * ev.maxCoeff()) {
    throw std::invalid_argument("covariance is not positive definite");
  }
  return es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
         es.eigenvectors().transpose();
}

Whitened whiten(const MatX& block, const VecX& residual, const MatX& cov) {
  if (block.rows() != cov.rows() || residual.size() != cov.rows()) {
    throw std::invalid_argument("whiten: dimension mismatch");
  }
  const MatX W = inverse_sqrt(cov);
  return {W * block, W * residual};
}

PolarLandmark retract_landmark(const PolarLandmark& l, const VecX& d, Mode mode) {
  if (d.size() != landmark_dof(mode)) {
    throw std::invalid_argument("landmark increment has wrong dimension");
  }
  PolarLandmark out = l;
  out.bearing = wrap_angle(l.bearing + d(0));
  out.range = l.range + d(1);
  if (mode == Mode::Spatial) out.elevation = l.elevation + d(2);
  return out;
}

}  // namespace sonarloc
