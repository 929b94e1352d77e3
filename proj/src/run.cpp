#include "sonarloc/run.hpp"

#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "sonarloc/csv.hpp"
#include "sonarloc/io.hpp"

namespace sonarloc {

namespace fs = std::filesystem;
using nlohmann::json;

LoadedScenario load_scenario(const RunConfig& run) {
  LoadedScenario s;
  const fs::path path(run.scenario);
  const auto extra = parse_injections(run.inject);
  if (fs::is_directory(path)) {
    s.config = read_scenario_config(path);
    if (run.seed && *run.seed != s.config.seed) {
      throw ConfigError("seed " + std::to_string(*run.seed) +
                        " differs from the seed of scenario directory " + path.string());
    }
    s.stream = inject_wrong_associations(read_stream(path), extra);
    s.truth = read_truth(path);
    s.config.injections.insert(s.config.injections.end(), extra.begin(), extra.end());
  } else {
    s.config = scenario_from_tree(read_config_file(path));
    if (run.seed) s.config.seed = *run.seed;
    s.config.injections.insert(s.config.injections.end(), extra.begin(), extra.end());
    Scenario sc = generate_scenario(s.config);
    s.stream = std::move(sc.stream);
    s.truth = std::move(sc.truth);
  }
  if (s.truth.poses.size() != s.stream.frames.size()) {
    throw std::runtime_error("ground truth and measurement stream differ in length");
  }
  return s;
}

std::vector<FrameInput> frame_inputs(const MeasurementStream& stream) {
  std::vector<FrameInput> out;
  for (const auto& f : stream.frames) out.push_back({f.frame, f.timestamp, f.observations});
  return out;
}

std::vector<OdometryMeasurement> odometry_measurements(const RunConfig& run,
                                                       const LoadedScenario& sc) {
  std::vector<OdometryMeasurement> out;
  if (run.odometry_source == OdometrySource::Csv) {
    MatX cov = MatX::Zero(3, 3);
    cov(0, 0) = run.sigma_odometry_rotation * run.sigma_odometry_rotation;
    cov(1, 1) = cov(2, 2) = run.sigma_odometry_translation * run.sigma_odometry_translation;
    for (const auto& r : sc.stream.odometry) {
      out.push_back({r.relative(), cov, r.frame - 1, r.frame});
    }
    return out;
  }

  const auto& imu = sc.stream.imu;
  if (imu.empty()) throw std::runtime_error("odometry.source = imu but the scenario has no IMU data");
  const int n = static_cast<int>(
      std::lround(sc.config.imu.rate * sc.config.trajectory.frame_period));
  const std::size_t frames = sc.stream.frames.size();
  if (n < 2 || imu.size() != 1 + static_cast<std::size_t>(n) * (frames - 1)) {
    throw std::runtime_error("IMU sample count does not match the frame schedule");
  }
  ImuIntrinsics intr = sc.config.imu.intrinsics;
  intr.gyro_noise_density = run.gyro_noise_density;
  intr.accel_noise_density = run.accel_noise_density;
  Vec3 v = Vec3::Zero();
  Mat3 R = Mat3::Identity();
  for (std::size_t f = 1; f < frames; ++f) {
    const std::span<const ImuSample> span(imu.data() + (f - 1) * n, n + 1);
    const PoseIncrement inc = preintegrate(span, intr, v, R);
    OdometryMeasurement m = increment_to_odometry(inc, Mode::Planar);
    m.from = static_cast<int>(f) - 1;
    m.to = static_cast<int>(f);
    out.push_back(m);
    v += inc.dv;
    R = R * inc.dR;
  }
  return out;
}

std::vector<std::string> expand_methods(const std::string& method) {
  if (method == "all") return {"proposed", "aba2view", "dr"};
  if (method == "proposed" || method == "aba2view" || method == "dr") return {method};
  throw std::invalid_argument("unknown method '" + method + "'");
}

namespace {

json pose_json(const Pose& p) {
  return json::array({p.yaw(), p.translation().x(), p.translation().y()});
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

MethodRun run_method(const std::string& method, const PipelineConfig& config,
                     const std::vector<FrameInput>& frames,
                     const std::vector<OdometryMeasurement>& odometry) {
  if (frames.empty()) throw std::invalid_argument("empty measurement stream");
  if (odometry.size() + 1 != frames.size()) {
    throw std::invalid_argument("need one odometry measurement per frame after the first");
  }
  MethodRun run;
  run.result.method = method;
  const Pose start = Pose::identity(config.mode);
  auto record = [&](const Pose& p, double ms, json line) {
    run.result.trajectory.push_back(p);
    run.result.time_ms.push_back(ms);
    run.manifest.push_back(std::move(line));
  };

  if (method == "proposed") {
    Pipeline pipe(config);
    const FrameReport first = pipe.initialize(frames[0], start);
    record(first.pose, first.time_ms, to_json(first));
    for (std::size_t k = 1; k < frames.size(); ++k) {
      const FrameReport rep = pipe.process_frame(frames[k], odometry[k - 1]);
      record(rep.pose, rep.time_ms, to_json(rep));
    }
    run.result.landmarks = pipe.landmarks();
  } else if (method == "aba2view") {
    TwoViewAba aba(PipelineConfig::two_view_baseline(config));
    auto t0 = std::chrono::steady_clock::now();
    Pose p = aba.initialize(frames[0], start);
    record(p, ms_since(t0), {{"frame", frames[0].id}, {"pose", pose_json(p)}});
    for (std::size_t k = 1; k < frames.size(); ++k) {
      t0 = std::chrono::steady_clock::now();
      p = aba.process_frame(frames[k], odometry[k - 1]);
      record(p, ms_since(t0), {{"frame", frames[k].id}, {"pose", pose_json(p)}});
    }
    run.result.landmarks = aba.landmarks();
  } else if (method == "dr") {
    DeadReckoning dr(config.mode);
    auto t0 = std::chrono::steady_clock::now();
    Pose p = dr.initialize(start);
    record(p, ms_since(t0), {{"frame", frames[0].id}, {"pose", pose_json(p)}});
    for (std::size_t k = 1; k < frames.size(); ++k) {
      t0 = std::chrono::steady_clock::now();
      p = dr.process_frame(odometry[k - 1]);
      record(p, ms_since(t0), {{"frame", frames[k].id}, {"pose", pose_json(p)}});
    }
  } else {
    throw std::invalid_argument("unknown method '" + method + "'");
  }
  return run;
}

void write_method_outputs(const fs::path& dir, const MethodRun& run, const GroundTruth& truth) {
  fs::create_directories(dir);
  std::ostringstream traj, lms, manifest, timing;
  traj << "frame,yaw,x,y\n";
  for (std::size_t k = 0; k < run.result.trajectory.size(); ++k) {
    const auto& p = run.result.trajectory[k];
    traj << k << ',' << fmt_double(p.yaw()) << ',' << fmt_double(p.translation().x()) << ','
         << fmt_double(p.translation().y()) << '\n';
  }
  lms << "landmark_id,x,y,z\n";
  for (const auto& [id, p] : run.result.landmarks) {
    lms << id << ',' << fmt_double(p.x()) << ',' << fmt_double(p.y()) << ','
        << fmt_double(p.z()) << '\n';
  }
  for (const auto& line : run.manifest) manifest << line.dump() << '\n';
  timing << "frame,time_ms\n";
  for (std::size_t k = 0; k < run.result.time_ms.size(); ++k) {
    timing << k << ',' << fmt_double(run.result.time_ms[k]) << '\n';
  }
  write_text(dir / "trajectory.csv", traj.str());
  write_text(dir / "landmarks.csv", lms.str());
  write_text(dir / "manifest.jsonl", manifest.str());
  write_text(dir / "timing.csv", timing.str());
  evaluate_method_dir(dir, truth);
}

std::vector<Pose> read_trajectory_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  CsvReader csv(in, {"frame", "yaw", "x", "y"});
  std::vector<Pose> out;
  std::vector<double> row;
  while (csv.next(row)) out.push_back(Pose::planar(row[1], row[2], row[3]));
  return out;
}

std::map<int, Vec3> read_landmarks_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  CsvReader csv(in, {"landmark_id", "x", "y", "z"});
  std::map<int, Vec3> out;
  std::vector<double> row;
  while (csv.next(row)) out[static_cast<int>(row[0])] = Vec3(row[1], row[2], row[3]);
  return out;
}

std::vector<double> read_timing_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  CsvReader csv(in, {"frame", "time_ms"});
  std::vector<double> out;
  std::vector<double> row;
  while (csv.next(row)) out.push_back(row[1]);
  return out;
}

json evaluate_method_dir(const fs::path& dir, const GroundTruth& truth) {
  const auto traj = read_trajectory_csv(dir / "trajectory.csv");
  const auto lms = read_landmarks_csv(dir / "landmarks.csv");
  const std::string method = dir.filename().string();
  const TrajectoryErrors errs = trajectory_rmse(traj, truth.poses);
  std::ostringstream e;
  write_errors_csv(e, errs);
  write_text(dir / "errors.csv", e.str());

  std::optional<LandmarkErrors> lerr;
  std::ostringstream l;
  if (!lms.empty()) {
    lerr = landmark_errors(lms, truth.landmarks);
    write_landmark_errors_csv(l, *lerr);
  } else {
    l << "landmark_id,ex_m,ey_m\n";
  }
  write_text(dir / "landmark_errors.csv", l.str());
  const json summary =
      summary_json(method, errs, endpoint_error(traj, truth.poses), lerr ? &*lerr : nullptr);
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  return summary;
}

}  // namespace sonarloc
