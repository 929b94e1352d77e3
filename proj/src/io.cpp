#include "sonarloc/io.hpp"

#include <fstream>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "sonarloc/csv.hpp"

namespace sonarloc {

namespace fs = std::filesystem;
using nlohmann::json;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

std::ifstream open(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

int as_int(double v, const fs::path& file, std::size_t line) {
  if (v != std::floor(v)) {
    throw std::runtime_error(file.string() + ":" + std::to_string(line) +
                             ": expected an integer id");
  }
  return static_cast<int>(v);
}

}  // namespace

void write_scenario(const fs::path& dir, const ScenarioConfig& config, const Scenario& sc) {
  fs::create_directories(dir);
  std::ostringstream frames, sonar, odo, poses, lms, assoc;
  frames << "frame,timestamp\n";
  sonar << "frame,landmark_id,bearing_rad,range_m\n";
  assoc << "frame,detection,landmark_id,true_landmark_id\n";
  std::size_t detections = 0;
  for (std::size_t i = 0; i < sc.stream.frames.size(); ++i) {
    const auto& f = sc.stream.frames[i];
    frames << f.frame << ',' << fmt_double(f.timestamp) << '\n';
    for (std::size_t k = 0; k < f.observations.size(); ++k) {
      const auto& o = f.observations[k];
      sonar << f.frame << ',' << o.landmark << ',' << fmt_double(o.bearing) << ','
            << fmt_double(o.range) << '\n';
      assoc << f.frame << ',' << k << ',' << o.landmark << ','
            << sc.truth.associations[i][k] << '\n';
      ++detections;
    }
  }
  odo << "frame,dpsi,dx,dy\n";
  for (const auto& r : sc.stream.odometry) {
    odo << r.frame << ',' << fmt_double(r.dpsi) << ',' << fmt_double(r.dx) << ','
        << fmt_double(r.dy) << '\n';
  }
  poses << "frame,yaw,x,y\n";
  for (std::size_t i = 0; i < sc.truth.poses.size(); ++i) {
    const auto& p = sc.truth.poses[i];
    poses << i << ',' << fmt_double(p.yaw()) << ',' << fmt_double(p.translation().x()) << ','
          << fmt_double(p.translation().y()) << '\n';
  }
  lms << "landmark_id,x,y,z\n";
  for (const auto& l : sc.truth.landmarks) {
    lms << l.id << ',' << fmt_double(l.position.x()) << ',' << fmt_double(l.position.y())
        << ',' << fmt_double(l.position.z()) << '\n';
  }
  write_text(dir / "frames.csv", frames.str());
  write_text(dir / "sonar.csv", sonar.str());
  write_text(dir / "odometry.csv", odo.str());
  write_text(dir / "truth_poses.csv", poses.str());
  write_text(dir / "truth_landmarks.csv", lms.str());
  write_text(dir / "associations.csv", assoc.str());
  if (!sc.stream.imu.empty()) {
    std::ostringstream imu;
    write_imu_csv(imu, sc.stream.imu);
    write_text(dir / "imu.csv", imu.str());
  } else {
    fs::remove(dir / "imu.csv");
  }
  std::ostringstream cfg;
  write_config(cfg, to_tree(config));
  write_text(dir / "scenario.cfg", cfg.str());

  std::set<int> observed;
  for (const auto& ids : sc.truth.associations) observed.insert(ids.begin(), ids.end());
  json config_json;
  for (const auto& [k, v] : to_tree(config)) config_json[k] = v;
  const json manifest = {{"command", "simulate"},
                         {"config", config_json},
                         {"frames", sc.stream.frames.size()},
                         {"detections", detections},
                         {"landmarks_placed", sc.truth.landmarks.size()},
                         {"landmarks_observed", observed.size()},
                         {"imu_samples", sc.stream.imu.size()}};
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

MeasurementStream read_stream(const fs::path& dir) {
  MeasurementStream s;
  {
    auto in = open(dir / "frames.csv");
    CsvReader csv(in, {"frame", "timestamp"});
    std::vector<double> row;
    while (csv.next(row)) {
      FrameObservations f;
      f.frame = as_int(row[0], dir / "frames.csv", csv.line());
      f.timestamp = row[1];
      if (f.frame != static_cast<int>(s.frames.size())) {
        throw std::runtime_error("frames.csv: frames must be numbered 0, 1, 2, ...");
      }
      s.frames.push_back(f);
    }
  }
  {
    auto in = open(dir / "sonar.csv");
    CsvReader csv(in, {"frame", "landmark_id", "bearing_rad", "range_m"});
    std::vector<double> row;
    while (csv.next(row)) {
      const int f = as_int(row[0], dir / "sonar.csv", csv.line());
      if (f < 0 || f >= static_cast<int>(s.frames.size())) {
        throw std::runtime_error("sonar.csv:" + std::to_string(csv.line()) +
                                 ": unknown frame " + std::to_string(f));
      }
      s.frames[f].observations.push_back(
          {as_int(row[1], dir / "sonar.csv", csv.line()), row[2], row[3]});
    }
  }
  {
    auto in = open(dir / "odometry.csv");
    CsvReader csv(in, {"frame", "dpsi", "dx", "dy"});
    std::vector<double> row;
    while (csv.next(row)) {
      OdometryRecord r;
      r.frame = as_int(row[0], dir / "odometry.csv", csv.line());
      r.dpsi = row[1];
      r.dx = row[2];
      r.dy = row[3];
      if (r.frame != static_cast<int>(s.odometry.size()) + 1) {
        throw std::runtime_error("odometry.csv: expected one row per frame from 1");
      }
      s.odometry.push_back(r);
    }
    if (s.odometry.size() + 1 != s.frames.size()) {
      throw std::runtime_error("odometry.csv: row count does not match frames.csv");
    }
  }
  if (fs::exists(dir / "imu.csv")) {
    auto in = open(dir / "imu.csv");
    s.imu = read_imu_csv(in);
  }
  return s;
}

GroundTruth read_truth(const fs::path& dir) {
  GroundTruth t;
  {
    auto in = open(dir / "truth_poses.csv");
    CsvReader csv(in, {"frame", "yaw", "x", "y"});
    std::vector<double> row;
    while (csv.next(row)) t.poses.push_back(Pose::planar(row[1], row[2], row[3]));
  }
  {
    auto in = open(dir / "truth_landmarks.csv");
    CsvReader csv(in, {"landmark_id", "x", "y", "z"});
    std::vector<double> row;
    while (csv.next(row)) {
      t.landmarks.push_back({as_int(row[0], dir / "truth_landmarks.csv", csv.line()),
                             Vec3(row[1], row[2], row[3])});
    }
  }
  {
    auto in = open(dir / "associations.csv");
    CsvReader csv(in, {"frame", "detection", "landmark_id", "true_landmark_id"});
    std::vector<double> row;
    t.associations.resize(t.poses.size());
    while (csv.next(row)) {
      const int f = as_int(row[0], dir / "associations.csv", csv.line());
      if (f < 0 || f >= static_cast<int>(t.poses.size())) {
        throw std::runtime_error("associations.csv: unknown frame " + std::to_string(f));
      }
      t.associations[f].push_back(as_int(row[3], dir / "associations.csv", csv.line()));
    }
  }
  return t;
}

ScenarioConfig read_scenario_config(const fs::path& dir) {
  return scenario_from_tree(read_config_file(dir / "scenario.cfg"));
}

}  // namespace sonarloc
