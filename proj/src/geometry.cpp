#include "sonarloc/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace sonarloc {

std::string to_string(Mode m) { return m == Mode::Planar ? "2d" : "3d"; }

Mode mode_from_string(const std::string& s) {
  if (s == "2d" || s == "2D" || s == "planar") return Mode::Planar;
  if (s == "3d" || s == "3D" || s == "spatial") return Mode::Spatial;
  throw std::invalid_argument("unknown mode '" + s + "' (expected 2d or 3d)");
}

double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * std::numbers::pi);
  if (w <= -std::numbers::pi) w += 2.0 * std::numbers::pi;
  return w;
}

Mat3 skew(const Vec3& v) {
  Mat3 s;
  // clang-format off
  s <<   0.0, -v.z(),  v.y(),
       v.z(),    0.0, -v.x(),
      -v.y(),  v.x(),    0.0;
  // clang-format on
  return s;
}

Mat3 so3_exp(const Vec3& w) {
  const double theta = w.norm();
  const Mat3 W = skew(w);
  if (theta < 1e-10) return Mat3::Identity() + W + 0.5 * W * W;
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / (theta * theta);
  return Mat3::Identity() + a * W + b * W * W;
}

Vec3 so3_log(const Mat3& R) {
  Eigen::AngleAxisd aa(R);
  return aa.angle() * aa.axis();
}

Mat3 so3_right_jacobian_inv(const Vec3& w) {
  const double theta = w.norm();
  const Mat3 W = skew(w);
  if (theta < 1e-8) return Mat3::Identity() + 0.5 * W + W * W / 12.0;
  const double c = 1.0 / (theta * theta) -
                   (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  return Mat3::Identity() + 0.5 * W + c * W * W;
}

Pose::Pose(double yaw, double pitch, double roll, const Vec3& t, Mode mode)
    : yaw_(wrap_angle(yaw)),
      pitch_(wrap_angle(pitch)),
      roll_(wrap_angle(roll)),
      t_(t),
      mode_(mode) {
  if (mode_ == Mode::Planar) {
    pitch_ = 0.0;
    roll_ = 0.0;
    t_.z() = 0.0;
  }
}

Pose Pose::identity(Mode mode) { return Pose(0, 0, 0, Vec3::Zero(), mode); }

Pose Pose::planar(double yaw, double x, double y) {
  return Pose(yaw, 0, 0, Vec3(x, y, 0), Mode::Planar);
}

Pose Pose::spatial(double yaw, double pitch, double roll, const Vec3& t) {
  return Pose(yaw, pitch, roll, t, Mode::Spatial);
}

Pose Pose::from_rotation(const Mat3& R, const Vec3& t, Mode mode) {
  if (mode == Mode::Planar) {
    return Pose(std::atan2(R(1, 0), R(0, 0)), 0, 0, t, mode);
  }
  const double sp = std::clamp(-R(2, 0), -1.0, 1.0);
  const double pitch = std::asin(sp);
  double yaw, roll;
  if (std::abs(sp) > 1.0 - 1e-12) {
    // Gimbal lock: only yaw ∓ roll is observable, put it all in yaw.
    roll = 0.0;
    yaw = std::atan2(-R(0, 1), R(1, 1));
  } else {
    yaw = std::atan2(R(1, 0), R(0, 0));
    roll = std::atan2(R(2, 1), R(2, 2));
  }
  return Pose(yaw, pitch, roll, t, mode);
}

Mat3 Pose::rotation() const {
  const Mat3 Rz = Eigen::AngleAxisd(yaw_, Vec3::UnitZ()).toRotationMatrix();
  if (mode_ == Mode::Planar) return Rz;
  return Rz * Eigen::AngleAxisd(pitch_, Vec3::UnitY()).toRotationMatrix() *
         Eigen::AngleAxisd(roll_, Vec3::UnitX()).toRotationMatrix();
}

Pose Pose::compose(const Pose& o) const {
  if (mode_ != o.mode_) throw std::invalid_argument("pose mode mismatch");
  if (mode_ == Mode::Planar) {
    const double c = std::cos(yaw_), s = std::sin(yaw_);
    const Vec3 t(t_.x() + c * o.t_.x() - s * o.t_.y(),
                 t_.y() + s * o.t_.x() + c * o.t_.y(), 0.0);
    return Pose(yaw_ + o.yaw_, 0, 0, t, mode_);
  }
  const Mat3 R = rotation();
  return from_rotation(R * o.rotation(), R * o.t_ + t_, mode_);
}

Pose Pose::inverse() const {
  if (mode_ == Mode::Planar) {
    const double c = std::cos(yaw_), s = std::sin(yaw_);
    const Vec3 t(-(c * t_.x() + s * t_.y()), -(-s * t_.x() + c * t_.y()), 0.0);
    return Pose(-yaw_, 0, 0, t, mode_);
  }
  const Mat3 Rt = rotation().transpose();
  return from_rotation(Rt, -Rt * t_, mode_);
}

Pose Pose::between(const Pose& o) const {
  if (mode_ != o.mode_) throw std::invalid_argument("pose mode mismatch");
  if (mode_ == Mode::Planar) {
    const double c = std::cos(yaw_), s = std::sin(yaw_);
    const double dx = o.t_.x() - t_.x(), dy = o.t_.y() - t_.y();
    return Pose(o.yaw_ - yaw_, 0, 0, Vec3(c * dx + s * dy, -s * dx + c * dy, 0),
                mode_);
  }
  const Mat3 Rt = rotation().transpose();
  return from_rotation(Rt * o.rotation(), Rt * (o.t_ - t_), mode_);
}

Pose Pose::retract(const VecX& d) const {
  if (d.size() != pose_dof(mode_)) {
    throw std::invalid_argument("pose tangent has wrong dimension");
  }
  if (mode_ == Mode::Planar) {
    const double c = std::cos(yaw_), s = std::sin(yaw_);
    const Vec3 t(t_.x() + c * d(1) - s * d(2), t_.y() + s * d(1) + c * d(2),
                 0.0);
    return Pose(yaw_ + d(0), 0, 0, t, mode_);
  }
  const Mat3 R = rotation();
  return from_rotation(R * so3_exp(d.head<3>()), t_ + R * d.tail<3>(), mode_);
}

VecX Pose::vector() const {
  if (mode_ == Mode::Planar) return Eigen::Vector3d(yaw_, t_.x(), t_.y());
  VecX v(6);
  v << yaw_, pitch_, roll_, t_;
  return v;
}

Pose Pose::from_vector(const VecX& v, Mode mode) {
  if (v.size() != pose_dof(mode)) {
    throw std::invalid_argument("pose vector has wrong dimension");
  }
  if (mode == Mode::Planar) return planar(v(0), v(1), v(2));
  return spatial(v(0), v(1), v(2), v.tail<3>());
}

bool operator==(const Pose& a, const Pose& b) {
  return a.mode() == b.mode() && a.yaw() == b.yaw() &&
         a.pitch() == b.pitch() && a.roll() == b.roll() &&
         a.translation() == b.translation();
}

void SonarIntrinsics::validate() const {
  if (!(range_min > 0.0)) throw std::invalid_argument("range_min must be > 0");
  if (!(range_max > range_min)) {
    throw std::invalid_argument("range window is empty");
  }
  if (!(bearing_max > bearing_min)) {
    throw std::invalid_argument("bearing field of view is empty");
  }
  if (!(elevation_max >= elevation_min)) {
    throw std::invalid_argument("elevation aperture is empty");
  }
  if (elevation_max - elevation_min > std::numbers::pi / 2.0) {
    throw std::invalid_argument("elevation aperture wider than pi/2");
  }
}

bool SonarIntrinsics::contains(double bearing, double range,
                               double elevation) const {
  return range >= range_min && range <= range_max && bearing >= bearing_min &&
         bearing <= bearing_max && elevation >= elevation_min &&
         elevation <= elevation_max;
}

Vec2 project(const Vec3& p) {
  const double r = p.norm();
  if (!(r > 0.0)) throw DegeneratePointError("point at the sonar origin");
  return Vec2(std::atan2(p.y(), p.x()), r);
}

double elevation_of(const Vec3& p) {
  const double r = p.norm();
  if (!(r > 0.0)) throw DegeneratePointError("point at the sonar origin");
  return std::asin(std::clamp(p.z() / r, -1.0, 1.0));
}

Vec3 back_project(const PolarLandmark& l) {
  const double ce = std::cos(l.elevation);
  return Vec3(l.range * std::cos(l.bearing) * ce,
              l.range * std::sin(l.bearing) * ce,
              l.range * std::sin(l.elevation));
}

Vec3 transform_into(const Pose& pose, const Vec3& p) {
  return pose.rotation().transpose() * (p - pose.translation());
}

}  // namespace sonarloc
