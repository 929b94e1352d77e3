// Rigid-body poses, the imaging-sonar projection model and coordinate
// conversions.
#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <numbers>
#include <stdexcept>
#include <string>

namespace sonarloc {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Planar mode keeps only [yaw, tx, ty]; pitch, roll and tz stay exactly zero.
enum class Mode { Planar, Spatial };

constexpr int pose_dof(Mode m) { return m == Mode::Planar ? 3 : 6; }
constexpr int landmark_dof(Mode m) { return m == Mode::Planar ? 2 : 3; }

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

/// Thrown when a point sits at the sonar origin and has no bearing.
class DegeneratePointError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

/// Ω(v) with Ω(v) w = v × w.
Mat3 skew(const Vec3& v);

/// SO(3) exponential map (Rodrigues).
Mat3 so3_exp(const Vec3& w);
/// SO(3) logarithm, returns the rotation vector.
Vec3 so3_log(const Mat3& R);
/// Inverse of the right Jacobian of SO(3).
Mat3 so3_right_jacobian_inv(const Vec3& w);

/// Z-Y-X Euler pose. Maps points from its own frame into the anchor frame:
/// p_anchor = R p_local + t.
class Pose {
 public:
  Pose() = default;

  static Pose identity(Mode mode);
  static Pose planar(double yaw, double x, double y);
  static Pose spatial(double yaw, double pitch, double roll, const Vec3& t);
  /// Extracts Z-Y-X angles from a rotation matrix.
  static Pose from_rotation(const Mat3& R, const Vec3& t, Mode mode);

  Mode mode() const { return mode_; }
  double yaw() const { return yaw_; }
  double pitch() const { return pitch_; }
  double roll() const { return roll_; }
  const Vec3& translation() const { return t_; }

  Mat3 rotation() const;

  /// this ∘ other.
  Pose compose(const Pose& other) const;
  Pose inverse() const;
  /// this⁻¹ ∘ other, the pose of `other` seen from this frame.
  Pose between(const Pose& other) const;

  /// Right perturbation: (R Exp(δθ), t + R δt). Tangent order is
  /// [δψ, δtx, δty] in planar mode and [δθx, δθy, δθz, δtx, δty, δtz] in
  /// spatial mode.
  Pose retract(const VecX& delta) const;

  /// Maps a point from this frame into the anchor frame.
  Vec3 apply(const Vec3& p) const { return rotation() * p + t_; }

  /// Packed state: [yaw, tx, ty] or [yaw, pitch, roll, tx, ty, tz].
  VecX vector() const;
  static Pose from_vector(const VecX& v, Mode mode);

 private:
  Pose(double yaw, double pitch, double roll, const Vec3& t, Mode mode);

  double yaw_ = 0.0;
  double pitch_ = 0.0;
  double roll_ = 0.0;
  Vec3 t_ = Vec3::Zero();
  Mode mode_ = Mode::Planar;
};

bool operator==(const Pose& a, const Pose& b);

/// Landmark in sonar spherical coordinates, expressed in the anchor frame.
struct PolarLandmark {
  double bearing = 0.0;
  double range = 1.0;
  double elevation = 0.0;
  int anchor = 0;
};

/// Field-of-view box of the imaging sonar. Defaults are the simulated
/// sensor used throughout the experiments.
struct SonarIntrinsics {
  double range_min = 0.5;
  double range_max = 9.0;
  double bearing_min = -std::numbers::pi / 4.0;
  double bearing_max = std::numbers::pi / 4.0;
  double elevation_min = -std::numbers::pi / 18.0;
  double elevation_max = std::numbers::pi / 18.0;

  void validate() const;
  bool contains(double bearing, double range, double elevation) const;
};

/// (ψ, r) of a Cartesian point in the sonar frame. Elevation is dropped.
Vec2 project(const Vec3& p);
/// Elevation angle of a Cartesian point, asin(pz / ‖p‖).
double elevation_of(const Vec3& p);
Vec3 back_project(const PolarLandmark& l);
/// Rᵀ(p − t): anchor-frame point expressed in the pose frame.
Vec3 transform_into(const Pose& pose, const Vec3& p);

}  // namespace sonarloc
