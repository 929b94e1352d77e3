#include "sonarloc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace sonarloc {

std::vector<LandmarkSpec> default_landmarks() {
  // 25 landmarks visible from the square plus 3 that never enter the
  // sonar window. Only 1, 6 and 7 are in view at frames 49 and 50; 8 is not.
  const double xy[][2] = {
      {12.5, -1.8}, {-0.75, 9.5},  {9.5, 10.75},  {-0.75, 1.25}, {7.0, 9.25},  {12.0, 1.6},
      {14.5, 0.3},  {11.6, 4.5},   {-0.5, -0.75}, {7.75, 4.0},   {1.25, 10.75}, {8.75, 11.5},
      {-1.5, 8.75}, {3.0, 0.75},   {10.75, 8.75}, {0.5, -0.75},  {0.75, 7.0},  {8.75, 3.75},
      {-1.75, 9.75}, {8.5, 12.75}, {-1.25, -1.5}, {2.25, 6.0},   {8.75, -0.75}, {9.25, 8.75},
      {-2.5, 8.75}, {5.0, -10.0},  {20.0, 12.0},  {-9.0, 4.0}};
  std::vector<LandmarkSpec> out;
  int id = 1;
  for (const auto& p : xy) out.push_back({id++, Vec3(p[0], p[1], 0.0)});
  return out;
}

std::vector<SparsityWindow> default_sparsity() { return {{88, 89, 1}, {164, 167, 1}}; }

ScenarioConfig ScenarioConfig::standard() {
  ScenarioConfig c;
  c.landmarks = default_landmarks();
  c.sparsity = default_sparsity();
  return c;
}

void ScenarioConfig::validate() const {
  if (!(trajectory.side_length > 0.0)) throw std::invalid_argument("side_length must be > 0");
  if (!(trajectory.frame_spacing > 0.0)) {
    throw std::invalid_argument("frame_spacing must be > 0");
  }
  if (trajectory.corner_steps < 1) throw std::invalid_argument("corner_steps must be >= 1");
  if (trajectory.frame_count < 0) throw std::invalid_argument("frame_count must be >= 0");
  if (!(trajectory.frame_period > 0.0)) throw std::invalid_argument("frame_period must be > 0");
  sonar.validate();
  if (noise.sonar_range < 0.0 || noise.sonar_bearing < 0.0 ||
      noise.odometry_translation < 0.0 || noise.odometry_rotation < 0.0) {
    throw std::invalid_argument("noise sigmas must be >= 0");
  }
  std::set<int> ids;
  for (const auto& l : landmarks) {
    if (!ids.insert(l.id).second) {
      throw std::invalid_argument("duplicate landmark id " + std::to_string(l.id));
    }
  }
  const int n = static_cast<int>(square_trajectory(trajectory).size());
  for (const auto& inj : injections) {
    if (inj.frame < 0 || inj.frame >= n) {
      throw std::invalid_argument("injection frame " + std::to_string(inj.frame) +
                                  " outside [0, " + std::to_string(n - 1) + "]");
    }
  }
  for (const auto& w : sparsity) {
    if (w.first < 1 || w.last < w.first || w.last >= n || w.keep < 0) {
      throw std::invalid_argument("invalid sparsity window");
    }
  }
  imu.intrinsics.validate();
  if (imu.rate < 0.0) throw std::invalid_argument("imu rate must be >= 0");
}

std::vector<Pose> square_trajectory(const TrajectorySpec& spec) {
  const int per_side = static_cast<int>(std::lround(spec.side_length / spec.frame_spacing));
  const int lap = 1 + 4 * per_side + 3 * spec.corner_steps;
  const int total = spec.frame_count > 0 ? spec.frame_count : lap;
  const Pose step = Pose::planar(0.0, spec.frame_spacing, 0.0);
  const Pose turn = Pose::planar(std::numbers::pi / 2.0 / spec.corner_steps, 0.0, 0.0);

  std::vector<Pose> poses{Pose::identity(Mode::Planar)};
  while (static_cast<int>(poses.size()) < total) {
    for (int k = 0; k < per_side && static_cast<int>(poses.size()) < total; ++k) {
      poses.push_back(poses.back().compose(step));
    }
    for (int k = 0; k < spec.corner_steps && static_cast<int>(poses.size()) < total; ++k) {
      poses.push_back(poses.back().compose(turn));
    }
  }
  return poses;
}

bool visible(const Pose& pose, const Vec3& p, const SonarIntrinsics& sonar) {
  const Vec3 q = transform_into(pose, p);
  if (!(q.norm() > 0.0)) return false;
  const Vec2 z = project(q);
  return sonar.contains(z(0), z(1), elevation_of(q));
}

namespace {

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

double gauss(std::mt19937_64& rng, double sigma) {
  if (sigma == 0.0) return 0.0;
  std::normal_distribution<double> n(0.0, sigma);
  return n(rng);
}

}  // namespace

Scenario generate_scenario(const ScenarioConfig& config) {
  config.validate();
  Scenario sc;
  sc.truth.poses = square_trajectory(config.trajectory);
  sc.truth.landmarks = config.landmarks;
  std::sort(sc.truth.landmarks.begin(), sc.truth.landmarks.end(),
            [](const LandmarkSpec& a, const LandmarkSpec& b) { return a.id < b.id; });
  const auto& poses = sc.truth.poses;
  const int n = static_cast<int>(poses.size());

  // Noise-free visibility sets decide which landmarks survive a sparsity
  // window.
  std::vector<std::vector<int>> seen(n);
  bool any = false;
  for (int f = 0; f < n; ++f) {
    for (const auto& l : sc.truth.landmarks) {
      if (visible(poses[f], l.position, config.sonar)) seen[f].push_back(l.id);
    }
    any = any || !seen[f].empty();
  }
  if (!any) throw std::invalid_argument("no landmark is ever visible from the trajectory");

  std::vector<std::set<int>> allowed(n);
  std::vector<bool> restricted(n, false);
  for (const auto& w : config.sparsity) {
    std::vector<int> shared = seen[w.first - 1];
    for (int f = w.first; f <= std::min(w.last + 1, n - 1); ++f) {
      std::vector<int> next;
      std::set_intersection(shared.begin(), shared.end(), seen[f].begin(), seen[f].end(),
                            std::back_inserter(next));
      shared = next;
    }
    if (shared.empty()) {
      std::set_intersection(seen[w.first - 1].begin(), seen[w.first - 1].end(),
                            seen[w.first].begin(), seen[w.first].end(),
                            std::back_inserter(shared));
    }
    if (static_cast<int>(shared.size()) > w.keep) shared.resize(w.keep);
    for (int f = w.first; f <= w.last; ++f) {
      restricted[f] = true;
      allowed[f].insert(shared.begin(), shared.end());
    }
  }

  auto sonar_rng = make_rng(config.seed, 1);
  auto odo_rng = make_rng(config.seed, 2);
  sc.truth.associations.resize(n);
  for (int f = 0; f < n; ++f) {
    FrameObservations fo;
    fo.frame = f;
    fo.timestamp = f * config.trajectory.frame_period;
    for (const auto& l : sc.truth.landmarks) {
      if (!visible(poses[f], l.position, config.sonar)) continue;
      const Vec3 q = transform_into(poses[f], l.position);
      const Vec2 z = project(q);
      const double bearing = z(0) + gauss(sonar_rng, config.noise.sonar_bearing);
      const double range = z(1) + gauss(sonar_rng, config.noise.sonar_range);
      if (restricted[f] && !allowed[f].count(l.id)) continue;
      // A detection pushed out of the sonar window by noise is not reported.
      if (!config.sonar.contains(bearing, range, elevation_of(q))) continue;
      fo.observations.push_back({l.id, bearing, range});
      sc.truth.associations[f].push_back(l.id);
    }
    sc.stream.frames.push_back(std::move(fo));
  }
  for (int f = 1; f < n; ++f) {
    const Pose inc = poses[f - 1].between(poses[f]);
    OdometryRecord r;
    r.frame = f;
    r.dpsi = wrap_angle(inc.yaw() + gauss(odo_rng, config.noise.odometry_rotation));
    r.dx = inc.translation().x() + gauss(odo_rng, config.noise.odometry_translation);
    r.dy = inc.translation().y() + gauss(odo_rng, config.noise.odometry_translation);
    sc.stream.odometry.push_back(r);
  }
  if (config.imu.rate > 0.0) {
    std::vector<Pose> incs;
    for (int f = 1; f < n; ++f) incs.push_back(poses[f - 1].between(poses[f]));
    sc.stream.imu = imu_stream_for(incs, config.trajectory.frame_period, config.imu.rate,
                                   config.imu.intrinsics)
                        .samples;
  }
  sc.stream = inject_wrong_associations(std::move(sc.stream), config.injections);
  return sc;
}

MeasurementStream inject_wrong_associations(MeasurementStream stream,
                                            const std::vector<Injection>& injections) {
  for (const auto& inj : injections) {
    auto it = std::find_if(stream.frames.begin(), stream.frames.end(),
                           [&](const FrameObservations& f) { return f.frame == inj.frame; });
    if (it == stream.frames.end()) {
      throw std::invalid_argument("injection frame " + std::to_string(inj.frame) +
                                  " not in stream");
    }
    // Relabel against the original ids so chained maps (a>b, b>c) do not
    // cascade.
    const auto original = it->observations;
    for (const auto& [from, to] : inj.relabel) {
      if (to < 0 || to == from) {
        throw std::invalid_argument("invalid wrong-association target " + std::to_string(to));
      }
      bool found = false;
      for (std::size_t k = 0; k < original.size(); ++k) {
        if (original[k].landmark == from) {
          it->observations[k].landmark = to;
          found = true;
        }
      }
      if (!found) {
        throw std::invalid_argument("landmark " + std::to_string(from) +
                                    " is not observed at frame " + std::to_string(inj.frame));
      }
    }
  }
  return stream;
}

std::vector<Injection> parse_injections(const std::string& spec) {
  std::vector<Injection> out;
  std::stringstream all(spec);
  std::string item;
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("bad injection spec '" + spec + "': " + why);
  };
  while (std::getline(all, item, ';')) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) fail("expected frame:from>to[,from>to]");
    Injection inj;
    try {
      inj.frame = std::stoi(item.substr(0, colon));
      std::stringstream pairs(item.substr(colon + 1));
      std::string pair;
      while (std::getline(pairs, pair, ',')) {
        const auto gt = pair.find('>');
        if (gt == std::string::npos) fail("expected from>to");
        const int from = std::stoi(pair.substr(0, gt));
        const int to = std::stoi(pair.substr(gt + 1));
        if (!inj.relabel.emplace(from, to).second) fail("landmark relabelled twice");
      }
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const std::invalid_argument*>(&e) &&
          std::string(e.what()).rfind("bad injection", 0) == 0) {
        throw;
      }
      fail("not an integer");
    }
    if (inj.relabel.empty()) fail("no relabel pairs");
    out.push_back(inj);
  }
  return out;
}

std::string format_injections(const std::vector<Injection>& injections) {
  std::string out;
  for (const auto& inj : injections) {
    if (!out.empty()) out += ';';
    out += std::to_string(inj.frame) + ':';
    bool first = true;
    for (const auto& [from, to] : inj.relabel) {
      if (!first) out += ',';
      out += std::to_string(from) + '>' + std::to_string(to);
      first = false;
    }
  }
  return out;
}

ImuStream imu_stream_for(const std::vector<Pose>& increments, double frame_period,
                         double rate_hz, const ImuIntrinsics& intr, const Vec3& start_velocity) {
  intr.validate();
  if (!(frame_period > 0.0)) throw std::invalid_argument("frame_period must be > 0");
  if (!(rate_hz > 1.0 / frame_period)) {
    throw std::invalid_argument("IMU rate must exceed the frame rate");
  }
  const int n = static_cast<int>(std::lround(rate_hz * frame_period));
  if (n < 4) throw std::invalid_argument("IMU rate gives fewer than 4 samples per frame");
  const double h = frame_period / n;
  const int split = n / 2;

  // Response of the midpoint recurrence to unit world acceleration held on
  // interior samples [lo, hi], starting from rest.
  auto response = [&](int lo, int hi) {
    double p = 0.0, v = 0.0;
    for (int k = 0; k < n; ++k) {
      const double a0 = (k >= lo && k <= hi) ? 1.0 : 0.0;
      const double a1 = (k + 1 >= lo && k + 1 <= hi) ? 1.0 : 0.0;
      const double am = 0.5 * (a0 + a1);
      p += v * h + 0.5 * am * h * h;
      v += am * h;
    }
    return Vec2(p, v);
  };
  const Vec2 k1 = response(1, split);
  const Vec2 k2 = response(split + 1, n - 1);
  Mat2 K;
  K << k1(0), k2(0), k1(1), k2(1);
  const Mat2 K_inv = K.inverse();

  auto is_translation = [](const Pose& p) { return p.translation().norm() > 0.0 && p.yaw() == 0.0; };

  ImuStream out;
  out.samples_per_frame = n;
  Mat3 C = Mat3::Identity();
  Vec3 v = start_velocity;
  double t = 0.0;
  for (std::size_t i = 0; i < increments.size(); ++i) {
    const Pose& inc = increments[i];
    out.start_velocity.push_back(v);
    out.start_attitude.push_back(C);

    const Vec3 dp = C * inc.translation();
    Vec3 v_end = Vec3::Zero();
    if (is_translation(inc)) {
      if (i + 1 == increments.size()) {
        v_end = dp / frame_period;
      } else if (is_translation(increments[i + 1])) {
        v_end = C * increments[i + 1].translation() / frame_period;
      }
    }
    // Phase accelerations per axis from [p; v] = K [c1; c2].
    Eigen::Matrix<double, 3, 2> c;
    for (int ax = 0; ax < 3; ++ax) {
      const Vec2 rhs(dp(ax) - v(ax) * frame_period, v_end(ax) - v(ax));
      c.row(ax) = (K_inv * rhs).transpose();
    }
    const Vec3 w_rate = so3_log(inc.rotation()) / (h * (n - 1));

    std::vector<Vec3> gyro(n + 1), acc_world(n + 1);
    for (int k = 0; k <= n; ++k) {
      const bool interior = k >= 1 && k <= n - 1;
      gyro[k] = interior ? w_rate : Vec3::Zero();
      acc_world[k] = interior ? Vec3(k <= split ? c.col(0) : c.col(1)) : Vec3::Zero();
    }
    // Attitude at each sample through the same recurrence the integrator
    // uses, so the body-frame accelerometer values round-trip.
    std::vector<Mat3> att(n + 1);
    att[0] = C;
    for (int k = 0; k < n; ++k) {
      const Vec3 w = 0.5 * ((gyro[k] + intr.gyro_bias) + (gyro[k + 1] + intr.gyro_bias)) -
                     intr.gyro_bias;
      att[k + 1] = att[k] * so3_exp(w * h);
    }
    for (int k = (i == 0 ? 0 : 1); k <= n; ++k) {
      ImuSample s;
      s.t = t + k * h;
      s.gyro = gyro[k] + intr.gyro_bias;
      s.accel = att[k].transpose() * (acc_world[k] - intr.gravity) + intr.accel_bias;
      out.samples.push_back(s);
    }
    t += frame_period;
    C = att[n];
    v = v_end;
  }
  return out;
}

}  // namespace sonarloc
