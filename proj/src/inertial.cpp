#include "sonarloc/inertial.hpp"

#include <Eigen/Eigenvalues>

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sonarloc/csv.hpp"

namespace sonarloc {

void ImuIntrinsics::validate() const {
  if (gyro_noise_density < 0.0 || accel_noise_density < 0.0) {
    throw std::invalid_argument("IMU noise densities must be non-negative");
  }
}

PoseIncrement preintegrate(std::span<const ImuSample> samples,
                           const ImuIntrinsics& intr, const Vec3& v0,
                           const Mat3& R0) {
  intr.validate();
  if (samples.size() < 2) {
    throw std::invalid_argument("pre-integration needs at least two samples");
  }
  for (std::size_t k = 1; k < samples.size(); ++k) {
    if (!(samples[k].t > samples[k - 1].t)) {
      throw std::invalid_argument("IMU timestamps must be strictly increasing");
    }
  }

  Mat3 C = R0;
  Vec3 p = Vec3::Zero();
  Vec3 v = v0;
  Vec3 a_prev = C * (samples[0].accel - intr.accel_bias) + intr.gravity;
  for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
    const double h = samples[k + 1].t - samples[k].t;
    const Vec3 w = 0.5 * (samples[k].gyro + samples[k + 1].gyro) - intr.gyro_bias;
    C = C * so3_exp(w * h);
    const Vec3 a_next = C * (samples[k + 1].accel - intr.accel_bias) + intr.gravity;
    const Vec3 a_mid = 0.5 * (a_prev + a_next);
    p += v * h + 0.5 * a_mid * h * h;
    v += a_mid * h;
    a_prev = a_next;
  }

  PoseIncrement inc;
  inc.dt = samples.back().t - samples.front().t;
  inc.dp = p;
  inc.dv = v - v0;
  inc.dR = R0.transpose() * C;
  inc.start_attitude = R0;
  inc.covariance = MatX::Zero(6, 6);
  const double g2 = intr.gyro_noise_density * intr.gyro_noise_density;
  const double a2 = intr.accel_noise_density * intr.accel_noise_density;
  for (int i = 0; i < 3; ++i) {
    inc.covariance(i, i) = g2 * inc.dt;
    inc.covariance(i + 3, i + 3) = a2 * inc.dt;
  }
  return inc;
}

void check_psd(const MatX& cov, const std::string& what) {
  if (cov.rows() != cov.cols() || cov.rows() == 0) {
    throw std::invalid_argument(what + " covariance must be square");
  }
  if (!cov.allFinite()) {
    throw std::invalid_argument(what + " covariance has non-finite entries");
  }
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument(what + " covariance is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<MatX> es(cov, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-12 * scale) {
    throw std::invalid_argument(what + " covariance is not positive semi-definite");
  }
}

OdometryMeasurement increment_to_odometry(const PoseIncrement& inc, Mode mode) {
  if (!(inc.dt > 0.0)) throw std::invalid_argument("increment has dt <= 0");
  check_psd(inc.covariance, "increment");
  OdometryMeasurement m;
  const Vec3 t = inc.body_translation();
  if (mode == Mode::Spatial) {
    m.relative = Pose::from_rotation(inc.dR, t, Mode::Spatial);
    m.covariance = inc.covariance;
    return m;
  }
  m.relative = Pose::from_rotation(inc.dR, t, Mode::Planar);
  const int idx[3] = {2, 3, 4};  // yaw, tx, ty
  m.covariance = MatX::Zero(3, 3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m.covariance(i, j) = inc.covariance(idx[i], idx[j]);
  }
  return m;
}

std::vector<ImuSample> read_imu_csv(std::istream& in) {
  CsvReader csv(in, {"t", "wx", "wy", "wz", "ax", "ay", "az"});
  std::vector<ImuSample> out;
  std::vector<double> row;
  while (csv.next(row)) {
    ImuSample s;
    s.t = row[0];
    s.gyro = Vec3(row[1], row[2], row[3]);
    s.accel = Vec3(row[4], row[5], row[6]);
    if (!out.empty() && !(s.t > out.back().t)) {
      throw std::runtime_error("IMU csv: timestamps not strictly increasing at line " +
                               std::to_string(csv.line()));
    }
    out.push_back(s);
  }
  return out;
}

void write_imu_csv(std::ostream& out, std::span<const ImuSample> samples) {
  out << "t,wx,wy,wz,ax,ay,az\n";
  for (const auto& s : samples) {
    out << fmt_double(s.t) << ',' << fmt_double(s.gyro.x()) << ','
        << fmt_double(s.gyro.y()) << ',' << fmt_double(s.gyro.z()) << ','
        << fmt_double(s.accel.x()) << ',' << fmt_double(s.accel.y()) << ','
        << fmt_double(s.accel.z()) << '\n';
  }
}

}  // namespace sonarloc
