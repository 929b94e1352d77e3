#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "sonarloc/sim.hpp"
#include "support.hpp"

using namespace sonarloc;
using namespace sonarloc::testing;
using std::numbers::pi;

namespace {

std::span<const ImuSample> frame_span(const ImuStream& s, std::size_t i) {
  const auto n = static_cast<std::size_t>(s.samples_per_frame);
  return {s.samples.data() + i * n, n + 1};
}

}  // namespace

TEST_CASE("stationary samples integrate to nothing") {
  ImuIntrinsics intr;
  std::vector<ImuSample> samples;
  for (int k = 0; k <= 100; ++k) samples.push_back({0.01 * k, Vec3::Zero(), Vec3(0, 0, 9.81)});
  const PoseIncrement inc = preintegrate(samples, intr);
  CHECK(inc.dp.norm() < 1e-12);
  CHECK(inc.dv.norm() < 1e-12);
  CHECK((inc.dR - Mat3::Identity()).norm() < 1e-15);
  CHECK(inc.dt == doctest::Approx(1.0));
}

TEST_CASE("constant velocity and constant acceleration") {
  ImuIntrinsics intr;
  std::vector<ImuSample> samples;
  for (int k = 0; k <= 50; ++k) samples.push_back({0.02 * k, Vec3::Zero(), Vec3(0.4, 0, 9.81)});
  const PoseIncrement inc = preintegrate(samples, intr, Vec3(0.2, 0, 0));
  // p = v t + a t²/2 is exact under the midpoint rule for constant a.
  CHECK(inc.dp.x() == doctest::Approx(0.2 + 0.2));
  CHECK(inc.dv.x() == doctest::Approx(0.4));
  CHECK(inc.body_translation().x() == doctest::Approx(0.4));
}

TEST_CASE("biases are subtracted") {
  ImuIntrinsics intr;
  intr.gyro_bias = Vec3(0, 0, 0.01);
  intr.accel_bias = Vec3(0.05, -0.02, 0.1);
  std::vector<ImuSample> samples;
  for (int k = 0; k <= 20; ++k) {
    samples.push_back({0.05 * k, intr.gyro_bias, Vec3(0, 0, 9.81) + intr.accel_bias});
  }
  const PoseIncrement inc = preintegrate(samples, intr);
  CHECK(inc.dp.norm() < 1e-12);
  CHECK((inc.dR - Mat3::Identity()).norm() < 1e-12);
}

TEST_CASE("pre-integration composes across a split") {
  std::mt19937_64 rng(3);
  ImuIntrinsics intr;
  std::vector<ImuSample> samples;
  for (int k = 0; k <= 40; ++k) {
    samples.push_back({0.025 * k,
                       Vec3(uniform(rng, -0.2, 0.2), uniform(rng, -0.2, 0.2), uniform(rng, -1, 1)),
                       Vec3(uniform(rng, -1, 1), uniform(rng, -1, 1), 9.81 + uniform(rng, -1, 1))});
  }
  const Vec3 v0(0.3, -0.1, 0.05);
  const Mat3 R0 = so3_exp(Vec3(0.1, -0.05, 0.4));
  const PoseIncrement whole = preintegrate(samples, intr, v0, R0);
  const std::span<const ImuSample> all(samples);
  const PoseIncrement a = preintegrate(all.subspan(0, 18), intr, v0, R0);
  const Mat3 R_mid = R0 * a.dR;
  const PoseIncrement b = preintegrate(all.subspan(17), intr, v0 + a.dv, R_mid);
  CHECK((whole.dp - (a.dp + b.dp)).norm() < 1e-12);
  CHECK((whole.dv - (a.dv + b.dv)).norm() < 1e-12);
  CHECK((whole.dR - a.dR * b.dR).norm() < 1e-12);
  CHECK(whole.dt == doctest::Approx(a.dt + b.dt));
}

TEST_CASE("covariance grows linearly with the span") {
  ImuIntrinsics intr;
  intr.gyro_noise_density = 1e-3;
  intr.accel_noise_density = 1e-2;
  std::vector<ImuSample> samples;
  for (int k = 0; k <= 10; ++k) samples.push_back({0.2 * k, Vec3::Zero(), Vec3(0, 0, 9.81)});
  const PoseIncrement inc = preintegrate(samples, intr);
  CHECK(inc.covariance(0, 0) == doctest::Approx(1e-6 * 2.0));
  CHECK(inc.covariance(4, 4) == doctest::Approx(1e-4 * 2.0));
  const OdometryMeasurement m = increment_to_odometry(inc, Mode::Planar);
  CHECK(m.covariance.rows() == 3);
  CHECK(m.covariance(0, 0) == doctest::Approx(2e-6));
  CHECK(m.covariance(1, 1) == doctest::Approx(2e-4));
}

TEST_CASE("pre-integration rejects bad input") {
  ImuIntrinsics intr;
  std::vector<ImuSample> one{{0.0, Vec3::Zero(), Vec3::Zero()}};
  CHECK_THROWS_AS(preintegrate(one, intr), std::invalid_argument);
  std::vector<ImuSample> backwards{{0.1, Vec3::Zero(), Vec3::Zero()},
                                   {0.1, Vec3::Zero(), Vec3::Zero()}};
  CHECK_THROWS_AS(preintegrate(backwards, intr), std::invalid_argument);
  intr.gyro_noise_density = -1.0;
  std::vector<ImuSample> ok{{0.0, Vec3::Zero(), Vec3::Zero()}, {0.1, Vec3::Zero(), Vec3::Zero()}};
  CHECK_THROWS_AS(preintegrate(ok, intr), std::invalid_argument);
}

TEST_CASE("check_psd") {
  CHECK_NOTHROW(check_psd(MatX::Identity(3, 3), "x"));
  CHECK_NOTHROW(check_psd(MatX::Zero(3, 3), "x"));
  MatX neg = MatX::Identity(2, 2);
  neg(1, 1) = -1e-3;
  CHECK_THROWS_AS(check_psd(neg, "x"), std::invalid_argument);
  MatX asym = MatX::Identity(2, 2);
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(check_psd(asym, "x"), std::invalid_argument);
  CHECK_THROWS_AS(check_psd(MatX::Zero(2, 3), "x"), std::invalid_argument);
}

TEST_CASE("synthesized IMU data reproduces the square's increments") {
  TrajectorySpec spec;
  const std::vector<Pose> poses = square_trajectory(spec);
  std::vector<Pose> incs;
  for (std::size_t i = 1; i < poses.size(); ++i) incs.push_back(poses[i - 1].between(poses[i]));
  ImuIntrinsics intr;
  intr.gyro_bias = Vec3(0.001, -0.002, 0.003);
  intr.accel_bias = Vec3(0.02, 0.01, -0.03);
  const ImuStream s = imu_stream_for(incs, spec.frame_period, 100.0, intr);
  CHECK(s.samples_per_frame == 100);
  CHECK(s.samples.size() == 1 + 100 * incs.size());
  for (std::size_t i = 0; i < incs.size(); ++i) {
    const PoseIncrement inc =
        preintegrate(frame_span(s, i), intr, s.start_velocity[i], s.start_attitude[i]);
    const OdometryMeasurement m = increment_to_odometry(inc, Mode::Planar);
    CHECK(std::abs(wrap_angle(m.relative.yaw() - incs[i].yaw())) < 1e-9);
    CHECK((m.relative.translation() - incs[i].translation()).norm() < 1e-9);
    if (i + 1 < incs.size()) {
      CHECK((s.start_velocity[i] + inc.dv - s.start_velocity[i + 1]).norm() < 1e-9);
    }
  }
}

TEST_CASE("a corner accumulates a quarter turn") {
  TrajectorySpec spec;
  const std::vector<Pose> poses = square_trajectory(spec);
  std::vector<Pose> incs;
  for (std::size_t i = 1; i < poses.size(); ++i) incs.push_back(poses[i - 1].between(poses[i]));
  const ImuStream s = imu_stream_for(incs, spec.frame_period, 50.0, ImuIntrinsics{});
  double yaw = 0.0;
  int corner = 0;
  for (std::size_t i = 0; i < incs.size(); ++i) {
    if (incs[i].yaw() == 0.0) {
      if (corner != 0) break;
      continue;
    }
    ++corner;
    yaw += increment_to_odometry(preintegrate(frame_span(s, i), ImuIntrinsics{},
                                              s.start_velocity[i], s.start_attitude[i]),
                                 Mode::Planar)
               .relative.yaw();
  }
  CHECK(corner == spec.corner_steps);
  CHECK(std::abs(std::abs(yaw) - pi / 2) < 1e-9);
}

TEST_CASE("straight-line segment carries a constant cruise velocity") {
  std::vector<Pose> incs(5, Pose::planar(0.0, 0.2, 0.0));
  const ImuStream s = imu_stream_for(incs, 1.0, 20.0, ImuIntrinsics{});
  CHECK(s.start_velocity[0].norm() == 0.0);
  for (std::size_t i = 1; i < incs.size(); ++i) {
    CHECK((s.start_velocity[i] - Vec3(0.2, 0, 0)).norm() < 1e-12);
  }
}

TEST_CASE("IMU synthesis rejects a slow rate") {
  std::vector<Pose> incs(2, Pose::planar(0.0, 0.2, 0.0));
  CHECK_THROWS_AS(imu_stream_for(incs, 1.0, 0.5, ImuIntrinsics{}), std::invalid_argument);
  CHECK_THROWS_AS(imu_stream_for(incs, 1.0, 3.0, ImuIntrinsics{}), std::invalid_argument);
}

TEST_CASE("IMU CSV round trip") {
  std::vector<ImuSample> samples{{0.0, Vec3(0.1, 0.2, 0.3), Vec3(1, 2, 3)},
                                 {0.01, Vec3(-0.1, 1e-9, 0.3), Vec3(1, -2, 9.81)}};
  std::stringstream ss;
  write_imu_csv(ss, samples);
  const auto back = read_imu_csv(ss);
  REQUIRE(back.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(back[k].t == samples[k].t);
    CHECK(back[k].gyro == samples[k].gyro);
    CHECK(back[k].accel == samples[k].accel);
  }
  std::stringstream bad("t,wx,wy,wz,ax,ay,az\n0.1,0,0,0,0,0,0\n0.1,0,0,0,0,0,0\n");
  CHECK_THROWS(read_imu_csv(bad));
}
