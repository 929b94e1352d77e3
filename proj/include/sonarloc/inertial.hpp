// IMU kinematics and midpoint-rule pre-integration of inter-frame pose
// increments.
#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sonarloc/geometry.hpp"

namespace sonarloc {

struct ImuSample {
  double t = 0.0;
  Vec3 gyro = Vec3::Zero();
  Vec3 accel = Vec3::Zero();
};

struct ImuIntrinsics {
  Vec3 gyro_bias = Vec3::Zero();
  Vec3 accel_bias = Vec3::Zero();
  double gyro_noise_density = 0.0;
  double accel_noise_density = 0.0;
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);

  void validate() const;
};

/// Relative motion accumulated over one sample span. `dp` and `dv` are
/// expressed in the world frame fixed by the start attitude; `dR` is the
/// rotation of the end body frame relative to the start body frame.
/// Covariance is 6x6 ordered [rotation, translation].
struct PoseIncrement {
  Vec3 dp = Vec3::Zero();
  Vec3 dv = Vec3::Zero();
  Mat3 dR = Mat3::Identity();
  double dt = 0.0;
  MatX covariance = MatX::Zero(6, 6);
  Mat3 start_attitude = Mat3::Identity();

  /// Translation expressed in the start body frame.
  Vec3 body_translation() const { return start_attitude.transpose() * dp; }
};

/// Measured relative pose between consecutive frames with its covariance
/// (3x3 [ψ, x, y] in planar mode, 6x6 [rotation, translation] otherwise).
struct OdometryMeasurement {
  Pose relative;
  MatX covariance;
  int from = -1;
  int to = -1;
};

/// Integrates raw samples with the midpoint rule. Biases are subtracted
/// and gravity compensated in the world frame given by `start_attitude`
/// (body to world at the first sample).
PoseIncrement preintegrate(std::span<const ImuSample> samples,
                           const ImuIntrinsics& intrinsics,
                           const Vec3& start_velocity = Vec3::Zero(),
                           const Mat3& start_attitude = Mat3::Identity());

/// Packages an increment as an odometry factor. Planar mode keeps
/// (Δψ, Δtx, Δty) and the matching covariance entries.
OdometryMeasurement increment_to_odometry(const PoseIncrement& inc, Mode mode);

/// Throws unless `cov` is square, symmetric and positive semi-definite.
void check_psd(const MatX& cov, const std::string& what);

std::vector<ImuSample> read_imu_csv(std::istream& in);
void write_imu_csv(std::ostream& out, std::span<const ImuSample> samples);

}  // namespace sonarloc
