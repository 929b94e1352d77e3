#include "sonarloc/graph_io.hpp"

namespace sonarloc {

using nlohmann::json;

json matrix_to_json(const MatX& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

MatX matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("matrix must be a nested array");
  const auto rows = static_cast<int>(j.size());
  const auto cols = static_cast<int>(j.at(0).size());
  MatX m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    if (static_cast<int>(j.at(i).size()) != cols) {
      throw std::invalid_argument("matrix rows have different lengths");
    }
    for (int k = 0; k < cols; ++k) m(i, k) = j.at(i).at(k).get<double>();
  }
  return m;
}

namespace {

json pose_json(const Pose& p) {
  const VecX v = p.vector();
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

Pose pose_from(const json& j, Mode mode) {
  const auto v = j.get<std::vector<double>>();
  return Pose::from_vector(Eigen::Map<const VecX>(v.data(), static_cast<int>(v.size())),
                           mode);
}

}  // namespace

json to_json(const FactorGraph& g) {
  json out;
  out["mode"] = to_string(g.mode());
  json poses = json::array();
  for (const auto& [id, v] : g.poses()) {
    poses.push_back({{"id", id}, {"value", pose_json(v.value)}, {"fixed", v.fixed}});
  }
  out["poses"] = poses;
  json lms = json::array();
  for (const auto& [id, l] : g.landmarks()) {
    lms.push_back({{"id", id},
                   {"bearing", l.bearing},
                   {"range", l.range},
                   {"elevation", l.elevation},
                   {"anchor", l.anchor}});
  }
  out["landmarks"] = lms;
  json sonar = json::array();
  for (const auto& m : g.sonar_factors()) {
    sonar.push_back({{"frame", m.frame},
                     {"landmark", m.landmark},
                     {"bearing", m.bearing},
                     {"range", m.range},
                     {"covariance", matrix_to_json(m.covariance)}});
  }
  out["sonar_factors"] = sonar;
  json odo = json::array();
  for (const auto& m : g.odometry_factors()) {
    odo.push_back({{"from", m.from},
                   {"to", m.to},
                   {"relative", pose_json(m.relative)},
                   {"covariance", matrix_to_json(m.covariance)}});
  }
  out["odometry_factors"] = odo;
  return out;
}

FactorGraph graph_from_json(const json& j) {
  const Mode mode = mode_from_string(j.at("mode").get<std::string>());
  FactorGraph g(mode);
  for (const auto& p : j.at("poses")) {
    g.add_pose(p.at("id").get<int>(), pose_from(p.at("value"), mode),
               p.at("fixed").get<bool>());
  }
  for (const auto& l : j.at("landmarks")) {
    g.add_landmark(l.at("id").get<int>(),
                   PolarLandmark{l.at("bearing").get<double>(), l.at("range").get<double>(),
                                 l.at("elevation").get<double>(), l.at("anchor").get<int>()});
  }
  for (const auto& s : j.at("sonar_factors")) {
    SonarMeasurement m;
    m.frame = s.at("frame").get<int>();
    m.landmark = s.at("landmark").get<int>();
    m.bearing = s.at("bearing").get<double>();
    m.range = s.at("range").get<double>();
    m.covariance = matrix_from_json(s.at("covariance"));
    g.add_sonar(m);
  }
  for (const auto& o : j.at("odometry_factors")) {
    OdometryMeasurement m;
    m.from = o.at("from").get<int>();
    m.to = o.at("to").get<int>();
    m.relative = pose_from(o.at("relative"), mode);
    m.covariance = matrix_from_json(o.at("covariance"));
    g.add_odometry(m);
  }
  return g;
}

}  // namespace sonarloc
