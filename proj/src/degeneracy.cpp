#include "sonarloc/degeneracy.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <type_traits>

namespace sonarloc {

std::string to_string(FrameClass c) {
  switch (c) {
    case FrameClass::UnderConstrained:
      return "under_constrained";
    case FrameClass::Normal:
      return "normal";
    case FrameClass::Keyframe:
      return "keyframe";
  }
  return "unknown";
}

FrameClass frame_class_from_string(const std::string& s) {
  if (s == "under_constrained") return FrameClass::UnderConstrained;
  if (s == "normal") return FrameClass::Normal;
  if (s == "keyframe") return FrameClass::Keyframe;
  throw std::invalid_argument("unknown frame class '" + s + "'");
}

DegeneracyThresholds DegeneracyThresholds::disabled() {
  return DegeneracyThresholds{0.0, std::numeric_limits<double>::infinity(), 0};
}

void DegeneracyThresholds::validate() const {
  if (is_disabled()) return;
  if (!(sigma_low > 0.0) || !(sigma_high > sigma_low)) {
    throw std::invalid_argument("thresholds need 0 < sigma_low < sigma_high");
  }
  if (min_features < 2) throw std::invalid_argument("min_features must be >= 2");
}

int min_feature_count(Mode mode) {
  // Each landmark seen twice adds 4 equations and landmark_dof unknowns.
  const int per_landmark = 4 - landmark_dof(mode);
  return (pose_dof(mode) + per_landmark - 1) / per_landmark;
}

bool is_solvable(int feature_count, Mode mode) {
  return 4 * feature_count >= pose_dof(mode) + landmark_dof(mode) * feature_count;
}

VecX singular_spectrum(const MatX& A) {
  VecX out = VecX::Zero(A.cols());
  if (A.rows() == 0 || A.cols() == 0) return out;
  Eigen::JacobiSVD<MatX> svd(A);
  const VecX& s = svd.singularValues();
  out.head(s.size()) = s;
  return out;
}

ConstraintReport min_singular_value(const MatX& A) {
  if (A.rows() == 0 || A.cols() == 0) throw std::invalid_argument("empty Jacobian");
  if (!A.allFinite()) throw std::invalid_argument("Jacobian has NaN or Inf entries");
  ConstraintReport r;
  r.spectrum = singular_spectrum(A);
  r.sigma_min = r.spectrum(r.spectrum.size() - 1);
  return r;
}

ConstraintReport min_singular_value(const LinearSystem& system) {
  return min_singular_value(system.A);
}

FrameClass classify_frame(int nf, double sigma_min, const DegeneracyThresholds& t) {
  if (nf < t.min_features || sigma_min < t.sigma_low) return FrameClass::UnderConstrained;
  if (sigma_min > t.sigma_high) return FrameClass::Keyframe;
  return FrameClass::Normal;
}

Pose motion_pose(const PlanarMotion& motion) {
  return std::visit(
      [](const auto& m) -> Pose {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, PureX>) return Pose::planar(0.0, m.dx, 0.0);
        if constexpr (std::is_same_v<T, PureY>) return Pose::planar(0.0, 0.0, m.dy);
        if constexpr (std::is_same_v<T, PureYaw>) return Pose::planar(m.dpsi, 0.0, 0.0);
        if constexpr (std::is_same_v<T, Composite>) return Pose::planar(m.dpsi, m.dx, m.dy);
      },
      motion);
}

namespace {

TriangulationJacobian rank_verdict(const Mat2& A) {
  TriangulationJacobian out;
  out.A = A;
  Eigen::JacobiSVD<Mat2> svd(A);
  out.sigma_max = svd.singularValues()(0);
  out.sigma_min = svd.singularValues()(1);
  out.full_rank = out.sigma_min > 1e-8 * out.sigma_max;
  return out;
}

void require_range(const PolarLandmark& l) {
  if (!(l.range > 0.0)) throw DegeneratePointError("landmark range must be positive");
}

}  // namespace

TriangulationJacobian triangulation_jacobian(const PlanarMotion& motion,
                                             const PolarLandmark& landmark) {
  require_range(landmark);
  PolarLandmark l = landmark;
  l.elevation = 0.0;
  return rank_verdict(jacobian_landmark(motion_pose(motion), l));
}

PolarLandmark triangulate_landmark(const Pose& first, const Vec2& z_first,
                                   const Pose& second, const Vec2& z_second,
                                   const PolarLandmark& init, int max_iterations) {
  if (first.mode() != Mode::Planar || second.mode() != Mode::Planar) {
    throw std::invalid_argument("triangulation is defined for planar poses");
  }
  require_range(init);
  const Pose rel = first.between(second);
  PolarLandmark l = init;
  l.elevation = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    const Mat2 Jb = jacobian_landmark(rel, l);
    const TriangulationJacobian verdict = rank_verdict(Jb);
    if (!verdict.full_rank) {
      throw std::domain_error("second-view landmark Jacobian is rank deficient");
    }
    Eigen::Matrix<double, 4, 2> A;
    A << Mat2::Identity(), Jb;
    Eigen::Vector4d r;
    r << wrap_angle(l.bearing - z_first(0)), l.range - z_first(1),
        wrap_angle(predict(rel, l)(0) - z_second(0)), predict(rel, l)(1) - z_second(1);
    const Vec2 delta = (A.transpose() * A).ldlt().solve(-A.transpose() * r);
    l = retract_landmark(l, delta, Mode::Planar);
    require_range(l);
    if (delta.lpNorm<Eigen::Infinity>() < 1e-12) break;
  }
  return l;
}

}  // namespace sonarloc
