// Shared helpers for the test binaries: seeded random states and
// central finite differences.
#pragma once

#include <functional>
#include <map>
#include <random>

#include "sonarloc/factor_graph.hpp"

namespace sonarloc::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline Pose random_pose(std::mt19937_64& rng, Mode mode, double t_scale = 1.0) {
  if (mode == Mode::Planar) {
    return Pose::planar(uniform(rng, -0.5, 0.5), t_scale * uniform(rng, -1, 1),
                        t_scale * uniform(rng, -1, 1));
  }
  return Pose::spatial(uniform(rng, -0.5, 0.5), uniform(rng, -0.3, 0.3),
                       uniform(rng, -0.3, 0.3),
                       t_scale * Vec3(uniform(rng, -1, 1), uniform(rng, -1, 1),
                                      uniform(rng, -0.3, 0.3)));
}

/// A landmark inside the default sonar window as seen from `pose`,
/// expressed in the anchor frame.
inline PolarLandmark random_visible_landmark(std::mt19937_64& rng, const Pose& pose) {
  const SonarIntrinsics fov;
  for (;;) {
    const double b = uniform(rng, fov.bearing_min, fov.bearing_max);
    const double r = uniform(rng, 1.0, fov.range_max);
    const double e =
        pose.mode() == Mode::Planar ? 0.0 : uniform(rng, fov.elevation_min, fov.elevation_max);
    const Vec3 q = back_project({b, r, e, 0});
    const Vec3 p = pose.apply(q);
    const Vec3 pol(std::atan2(p.y(), p.x()), p.norm(), std::asin(p.z() / p.norm()));
    if (p.norm() < 0.5) continue;
    return {pol(0), pol(1), pose.mode() == Mode::Planar ? 0.0 : pol(2), 0};
  }
}

/// Central differences of f at x along unit vectors, step h.
inline MatX numeric_jacobian(const std::function<VecX(const VecX&)>& f, const VecX& x,
                             double h = 1e-6) {
  const VecX f0 = f(x);
  MatX J(f0.size(), x.size());
  for (int i = 0; i < x.size(); ++i) {
    VecX xp = x, xm = x;
    xp(i) += h;
    xm(i) -= h;
    J.col(i) = (f(xp) - f(xm)) / (2 * h);
  }
  return J;
}

/// max |A − B| / max(1, max |B|).
inline double relative_error(const MatX& A, const MatX& B) {
  return (A - B).cwiseAbs().maxCoeff() / std::max(1.0, B.cwiseAbs().maxCoeff());
}

struct TwoView {
  FactorGraph graph;
  Pose truth_b;
  std::map<int, PolarLandmark> truth_l;
};

/// Noise-free two-view problem: pose 0 fixed at the origin, pose 1 at `b`,
/// landmarks anchored in pose 0 and visible from both. Each landmark's
/// pose-0 detection precedes its pose-1 detection.
inline TwoView two_view(std::mt19937_64& rng, Mode mode, const Pose& b, int landmarks,
                        double sigma_b = 0.02, double sigma_r = 0.05, bool odometry = true) {
  TwoView tv{FactorGraph(mode), b, {}};
  const Pose origin = Pose::identity(mode);
  tv.graph.add_pose(0, origin, true);
  tv.graph.add_pose(1, b);
  for (int j = 0; j < landmarks; ++j) {
    PolarLandmark l;
    for (;;) {
      l = random_visible_landmark(rng, origin);
      const Vec3 q = landmark_in_frame(b, l);
      const Vec2 z = project(q);
      if (SonarIntrinsics{}.contains(z(0), z(1), elevation_of(q))) break;
    }
    tv.truth_l[j] = l;
    tv.graph.add_landmark(j, l);
    const Vec2 z0 = predict(origin, l), z1 = predict(b, l);
    tv.graph.add_sonar({z0(0), z0(1), sonar_covariance(sigma_b, sigma_r), 0, j});
    tv.graph.add_sonar({z1(0), z1(1), sonar_covariance(sigma_b, sigma_r), 1, j});
  }
  if (odometry) {
    const int n = pose_dof(mode);
    tv.graph.add_odometry({b, MatX::Identity(n, n) * 0.05 * 0.05, 0, 1});
  }
  return tv;
}

/// Copy of `g` with the pose-1 detection of landmark `from` relabelled as
/// `to`, both linearized at the same point.
inline FactorGraph relabel_second_view(const FactorGraph& g, int from, int to) {
  FactorGraph out(g.mode());
  for (const auto& [id, p] : g.poses()) out.add_pose(id, p.value, p.fixed);
  for (const auto& [id, l] : g.landmarks()) out.add_landmark(id, l);
  for (auto m : g.sonar_factors()) {
    if (m.frame == 1 && m.landmark == from) m.landmark = to;
    out.add_sonar(m);
  }
  for (const auto& o : g.odometry_factors()) out.add_odometry(o);
  return out;
}

}  // namespace sonarloc::testing
