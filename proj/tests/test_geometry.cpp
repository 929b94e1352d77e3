#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sonarloc/geometry.hpp"
#include "support.hpp"

using namespace sonarloc;
using namespace sonarloc::testing;
using std::numbers::pi;

TEST_CASE("wrap_angle maps into (-pi, pi]") {
  CHECK(wrap_angle(pi) == doctest::Approx(pi));
  CHECK(wrap_angle(-pi) == doctest::Approx(pi));
  CHECK(wrap_angle(3 * pi / 2) == doctest::Approx(-pi / 2));
  CHECK(wrap_angle(0.3 + 4 * pi) == doctest::Approx(0.3));
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double a = uniform(rng, -50, 50);
    const double w = wrap_angle(a);
    CHECK(w > -pi);
    CHECK(w <= pi);
    CHECK(std::remainder(a - w, 2 * pi) == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("project evaluates bearing and Euclidean range") {
  const Vec2 z = project(Vec3(3, 4, 0));
  CHECK(z(0) == doctest::Approx(std::atan2(4.0, 3.0)));
  CHECK(z(1) == doctest::Approx(5.0));
  // Elevation is dropped but the range stays the full norm.
  CHECK(project(Vec3(1, 0, 1))(1) == doctest::Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(project(Vec3::Zero()), DegeneratePointError);
}

TEST_CASE("back_project inverts project in the plane") {
  const Vec3 p = back_project({pi / 4, std::sqrt(2.0), 0.0, 0});
  CHECK(p.x() == doctest::Approx(1.0));
  CHECK(p.y() == doctest::Approx(1.0));
  CHECK(p.z() == doctest::Approx(0.0));
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const PolarLandmark l{uniform(rng, -3, 3), uniform(rng, 0.5, 9), uniform(rng, -0.3, 0.3), 0};
    const Vec3 q = back_project(l);
    const Vec2 z = project(q);
    CHECK(z(0) == doctest::Approx(l.bearing).epsilon(1e-12));
    CHECK(z(1) == doctest::Approx(l.range).epsilon(1e-12));
    CHECK(elevation_of(q) == doctest::Approx(l.elevation).epsilon(1e-12));
  }
}

TEST_CASE("transform_into rotates into the pose frame") {
  const Vec3 q = transform_into(Pose::planar(pi / 2, 0, 0), Vec3(1, 0, 0));
  CHECK(q.x() == doctest::Approx(0.0));
  CHECK(q.y() == doctest::Approx(-1.0));
  CHECK(q.z() == doctest::Approx(0.0));
}

TEST_CASE("pose algebra") {
  std::mt19937_64 rng(11);
  for (Mode mode : {Mode::Planar, Mode::Spatial}) {
    for (int i = 0; i < 100; ++i) {
      const Pose a = random_pose(rng, mode), b = random_pose(rng, mode);
      const Vec3 p(uniform(rng, -3, 3), uniform(rng, -3, 3), uniform(rng, -3, 3));
      CHECK((a.compose(b).apply(p) - a.apply(b.apply(p))).norm() < 1e-12);
      CHECK((a.inverse().apply(a.apply(p)) - p).norm() < 1e-12);
      const Pose rel = a.between(b);
      CHECK((a.compose(rel).apply(p) - b.apply(p)).norm() < 1e-12);
      const Pose back = Pose::from_vector(a.vector(), mode);
      CHECK((back.rotation() - a.rotation()).norm() < 1e-14);
      CHECK((back.translation() - a.translation()).norm() < 1e-14);
    }
  }
}

TEST_CASE("planar poses keep out-of-plane components at zero") {
  const Pose p = Pose::planar(0.4, 1, 2).compose(Pose::planar(-1.3, 0.5, -0.1));
  CHECK(p.pitch() == 0.0);
  CHECK(p.roll() == 0.0);
  CHECK(p.translation().z() == 0.0);
  VecX d(3);
  d << 0.1, 0.2, 0.3;
  const Pose r = p.retract(d);
  CHECK(r.yaw() == doctest::Approx(wrap_angle(p.yaw() + 0.1)));
  CHECK((r.translation() - (p.translation() + p.rotation() * Vec3(0.2, 0.3, 0))).norm() < 1e-14);
}

TEST_CASE("spatial retraction is the right perturbation") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 50; ++i) {
    const Pose p = random_pose(rng, Mode::Spatial);
    VecX d(6);
    for (int k = 0; k < 6; ++k) d(k) = uniform(rng, -0.2, 0.2);
    const Pose r = p.retract(d);
    const Mat3 expect = p.rotation() * so3_exp(d.head<3>());
    CHECK((r.rotation() - expect).norm() < 1e-12);
    CHECK((r.translation() - (p.translation() + p.rotation() * d.tail<3>())).norm() < 1e-12);
  }
}

TEST_CASE("so3 exp and log round trip, right Jacobian inverse by differences") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    const Vec3 w(uniform(rng, -1.5, 1.5), uniform(rng, -1.5, 1.5), uniform(rng, -1.5, 1.5));
    CHECK((so3_log(so3_exp(w)) - w).norm() < 1e-10);
    // Jr⁻¹ satisfies Log(Exp(w) Exp(δ)) ≈ w + Jr⁻¹ δ.
    auto f = [&](const VecX& d) -> VecX { return so3_log(so3_exp(w) * so3_exp(Vec3(d))); };
    const MatX num = numeric_jacobian(f, VecX::Zero(3));
    CHECK(relative_error(so3_right_jacobian_inv(w), num) < 1e-6);
  }
  CHECK(so3_log(Mat3::Identity()).norm() == 0.0);
  CHECK((skew(Vec3(1, 2, 3)) * Vec3(4, 5, 6) - Vec3(1, 2, 3).cross(Vec3(4, 5, 6))).norm() <
        1e-15);
}

TEST_CASE("Euler extraction handles gimbal lock") {
  const Pose p = Pose::spatial(0.3, pi / 2, 0.2, Vec3(1, 2, 3));
  const Pose q = Pose::from_rotation(p.rotation(), p.translation(), Mode::Spatial);
  CHECK((q.rotation() - p.rotation()).norm() < 1e-12);
}

TEST_CASE("sonar intrinsics") {
  const SonarIntrinsics fov;
  CHECK(fov.contains(0.0, 5.0, 0.0));
  CHECK_FALSE(fov.contains(0.0, 9.5, 0.0));
  CHECK_FALSE(fov.contains(pi / 3, 5.0, 0.0));
  CHECK_FALSE(fov.contains(0.0, 5.0, 0.3));
  SonarIntrinsics bad;
  bad.range_min = 10;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("mode names round trip") {
  CHECK(mode_from_string(to_string(Mode::Planar)) == Mode::Planar);
  CHECK(mode_from_string(to_string(Mode::Spatial)) == Mode::Spatial);
  CHECK_THROWS(mode_from_string("cubic"));
}
