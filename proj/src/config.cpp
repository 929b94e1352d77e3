#include "sonarloc/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace sonarloc {

using nlohmann::json;

json parse_config_value(const std::string& text) {
  json v = json::parse(text, nullptr, false);
  if (v.is_discarded()) return json(text);
  return v;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Pulls typed values out of a tree and rejects whatever is left over.
class Reader {
 public:
  explicit Reader(const ConfigTree& tree) : tree_(tree) {}

  template <typename F>
  void take(const std::string& key, F&& apply) {
    auto it = tree_.find(key);
    if (it == tree_.end()) return;
    used_.insert(key);
    try {
      apply(it->second);
    } catch (const json::exception& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    } catch (const std::invalid_argument& e) {
      throw ConfigError("config key '" + key + "': " + e.what());
    }
  }

  void number(const std::string& key, double& out) {
    take(key, [&](const json& v) {
      if (!v.is_number()) throw std::invalid_argument("expected a number");
      out = v.get<double>();
    });
  }

  void integer(const std::string& key, int& out) {
    take(key, [&](const json& v) {
      if (!v.is_number_integer()) throw std::invalid_argument("expected an integer");
      out = v.get<int>();
    });
  }

  void boolean(const std::string& key, bool& out) {
    take(key, [&](const json& v) {
      if (!v.is_boolean()) throw std::invalid_argument("expected true or false");
      out = v.get<bool>();
    });
  }

  void string(const std::string& key, std::string& out) {
    take(key, [&](const json& v) {
      if (!v.is_string()) throw std::invalid_argument("expected a string");
      out = v.get<std::string>();
    });
  }

  void vec3(const std::string& key, Vec3& out) {
    take(key, [&](const json& v) {
      if (!v.is_array() || v.size() != 3) throw std::invalid_argument("expected [x, y, z]");
      for (int i = 0; i < 3; ++i) {
        if (!v[i].is_number()) throw std::invalid_argument("expected numbers");
        out(i) = v[i].get<double>();
      }
    });
  }

  void finish() const {
    for (const auto& [k, v] : tree_) {
      if (!used_.count(k)) throw ConfigError("unknown config key '" + k + "'");
    }
  }

 private:
  const ConfigTree& tree_;
  std::set<std::string> used_;
};

json to_json(const Vec3& v) { return json::array({v(0), v(1), v(2)}); }

}  // namespace

ConfigTree parse_config(std::istream& in, const std::string& source) {
  ConfigTree tree;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    // A '#' inside a quoted string value is part of the value.
    if (hash != std::string::npos && line.find('"') > hash) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(n) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(n) + ": empty key");
    if (tree.count(key)) {
      throw ConfigError(source + ":" + std::to_string(n) + ": duplicate key '" + key + "'");
    }
    tree[key] = parse_config_value(value);
  }
  return tree;
}

ConfigTree read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in, path.string());
}

void write_config(std::ostream& out, const ConfigTree& tree) {
  for (const auto& [k, v] : tree) out << k << " = " << v.dump() << '\n';
}

ScenarioConfig scenario_from_tree(const ConfigTree& tree, ScenarioConfig c) {
  Reader r(tree);
  r.take("seed", [&](const json& v) {
    if (!v.is_number_unsigned()) throw std::invalid_argument("expected an unsigned integer");
    c.seed = v.get<std::uint64_t>();
  });
  r.number("trajectory.side_length", c.trajectory.side_length);
  r.number("trajectory.frame_spacing", c.trajectory.frame_spacing);
  r.integer("trajectory.corner_steps", c.trajectory.corner_steps);
  r.integer("trajectory.frame_count", c.trajectory.frame_count);
  r.number("trajectory.frame_period", c.trajectory.frame_period);
  r.number("sonar.range_min", c.sonar.range_min);
  r.number("sonar.range_max", c.sonar.range_max);
  r.number("sonar.bearing_min", c.sonar.bearing_min);
  r.number("sonar.bearing_max", c.sonar.bearing_max);
  r.number("sonar.elevation_min", c.sonar.elevation_min);
  r.number("sonar.elevation_max", c.sonar.elevation_max);
  r.number("noise.sonar_range", c.noise.sonar_range);
  r.number("noise.sonar_bearing", c.noise.sonar_bearing);
  r.number("noise.odometry_translation", c.noise.odometry_translation);
  r.number("noise.odometry_rotation", c.noise.odometry_rotation);
  r.take("landmarks.positions", [&](const json& v) {
    if (!v.is_array()) throw std::invalid_argument("expected [[id, x, y, z], ...]");
    c.landmarks.clear();
    for (const auto& e : v) {
      if (!e.is_array() || e.size() != 4 || !e[0].is_number_integer()) {
        throw std::invalid_argument("expected [id, x, y, z] entries");
      }
      c.landmarks.push_back(
          {e[0].get<int>(), Vec3(e[1].get<double>(), e[2].get<double>(), e[3].get<double>())});
    }
  });
  r.take("sparsity.windows", [&](const json& v) {
    if (!v.is_array()) throw std::invalid_argument("expected [[first, last, keep], ...]");
    c.sparsity.clear();
    for (const auto& e : v) {
      if (!e.is_array() || e.size() != 3) {
        throw std::invalid_argument("expected [first, last, keep] entries");
      }
      c.sparsity.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<int>()});
    }
  });
  r.take("inject", [&](const json& v) {
    if (!v.is_string()) throw std::invalid_argument("expected a string like \"50:6>1,7>8\"");
    c.injections = parse_injections(v.get<std::string>());
  });
  r.number("imu.rate", c.imu.rate);
  r.vec3("imu.gyro_bias", c.imu.intrinsics.gyro_bias);
  r.vec3("imu.accel_bias", c.imu.intrinsics.accel_bias);
  r.vec3("imu.gravity", c.imu.intrinsics.gravity);
  r.finish();
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid scenario: ") + e.what());
  }
  return c;
}

ConfigTree to_tree(const ScenarioConfig& c) {
  ConfigTree t;
  t["seed"] = c.seed;
  t["trajectory.side_length"] = c.trajectory.side_length;
  t["trajectory.frame_spacing"] = c.trajectory.frame_spacing;
  t["trajectory.corner_steps"] = c.trajectory.corner_steps;
  t["trajectory.frame_count"] = c.trajectory.frame_count;
  t["trajectory.frame_period"] = c.trajectory.frame_period;
  t["sonar.range_min"] = c.sonar.range_min;
  t["sonar.range_max"] = c.sonar.range_max;
  t["sonar.bearing_min"] = c.sonar.bearing_min;
  t["sonar.bearing_max"] = c.sonar.bearing_max;
  t["sonar.elevation_min"] = c.sonar.elevation_min;
  t["sonar.elevation_max"] = c.sonar.elevation_max;
  t["noise.sonar_range"] = c.noise.sonar_range;
  t["noise.sonar_bearing"] = c.noise.sonar_bearing;
  t["noise.odometry_translation"] = c.noise.odometry_translation;
  t["noise.odometry_rotation"] = c.noise.odometry_rotation;
  json lms = json::array();
  for (const auto& l : c.landmarks) {
    lms.push_back({l.id, l.position.x(), l.position.y(), l.position.z()});
  }
  t["landmarks.positions"] = lms;
  json sp = json::array();
  for (const auto& w : c.sparsity) sp.push_back({w.first, w.last, w.keep});
  t["sparsity.windows"] = sp;
  t["inject"] = format_injections(c.injections);
  t["imu.rate"] = c.imu.rate;
  t["imu.gyro_bias"] = to_json(c.imu.intrinsics.gyro_bias);
  t["imu.accel_bias"] = to_json(c.imu.intrinsics.accel_bias);
  t["imu.gravity"] = to_json(c.imu.intrinsics.gravity);
  return t;
}

void RunConfig::validate() const {
  if (method != "proposed" && method != "aba2view" && method != "dr" && method != "all") {
    throw std::invalid_argument("method must be proposed, aba2view, dr or all");
  }
  if (scenario.empty()) throw std::invalid_argument("no scenario given");
  pipeline.validate();
  if (!(sigma_odometry_translation > 0.0) || !(sigma_odometry_rotation > 0.0)) {
    throw std::invalid_argument("odometry sigmas must be > 0");
  }
  if (!(gyro_noise_density > 0.0) || !(accel_noise_density > 0.0)) {
    throw std::invalid_argument("IMU noise densities must be > 0");
  }
  if (out.empty()) throw std::invalid_argument("no output directory given");
}

RunConfig run_from_tree(const ConfigTree& tree, RunConfig c) {
  Reader r(tree);
  auto& p = c.pipeline;
  r.string("scenario", c.scenario);
  r.string("method", c.method);
  r.string("out", c.out);
  r.string("inject", c.inject);
  r.take("seed", [&](const json& v) {
    if (v.is_null()) {
      c.seed.reset();
      return;
    }
    if (!v.is_number_unsigned()) throw std::invalid_argument("expected an unsigned integer");
    c.seed = v.get<std::uint64_t>();
  });
  r.number("thresholds.sigma_low", p.thresholds.sigma_low);
  r.number("thresholds.sigma_high", p.thresholds.sigma_high);
  r.integer("thresholds.min_features", p.thresholds.min_features);
  r.integer("window.max_size", p.max_window);
  r.integer("window.coview_threshold", p.coview_threshold);
  r.take("window.database_capacity", [&](const json& v) {
    if (!v.is_number_unsigned()) throw std::invalid_argument("expected a positive integer");
    p.database_capacity = v.get<std::size_t>();
  });
  r.number("estimator.sigma_bearing", p.sigma_bearing);
  r.number("estimator.sigma_range", p.sigma_range);
  r.number("estimator.sigma_odometry_translation", c.sigma_odometry_translation);
  r.number("estimator.sigma_odometry_rotation", c.sigma_odometry_rotation);
  r.number("estimator.gyro_noise_density", c.gyro_noise_density);
  r.number("estimator.accel_noise_density", c.accel_noise_density);
  r.boolean("estimator.whiten_sigma", p.whiten_sigma);
  r.take("solver.method", [&](const json& v) {
    p.solver.method = solver_method_from_string(v.get<std::string>());
  });
  r.integer("solver.max_iterations", p.solver.max_iterations);
  r.number("solver.step_tolerance", p.solver.step_tolerance);
  r.number("solver.initial_lambda", p.solver.initial_lambda);
  r.take("odometry.source", [&](const json& v) {
    const auto s = v.get<std::string>();
    if (s == "csv") {
      c.odometry_source = OdometrySource::Csv;
    } else if (s == "imu") {
      c.odometry_source = OdometrySource::Imu;
    } else {
      throw std::invalid_argument("expected csv or imu");
    }
  });
  r.finish();
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid run config: ") + e.what());
  }
  return c;
}

ConfigTree to_tree(const RunConfig& c) {
  const auto& p = c.pipeline;
  ConfigTree t;
  t["scenario"] = c.scenario;
  t["method"] = c.method;
  t["out"] = c.out;
  t["inject"] = c.inject;
  t["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  t["thresholds.sigma_low"] = p.thresholds.sigma_low;
  t["thresholds.sigma_high"] = p.thresholds.sigma_high;
  t["thresholds.min_features"] = p.thresholds.min_features;
  t["window.max_size"] = p.max_window;
  t["window.coview_threshold"] = p.coview_threshold;
  t["window.database_capacity"] = p.database_capacity;
  t["estimator.sigma_bearing"] = p.sigma_bearing;
  t["estimator.sigma_range"] = p.sigma_range;
  t["estimator.sigma_odometry_translation"] = c.sigma_odometry_translation;
  t["estimator.sigma_odometry_rotation"] = c.sigma_odometry_rotation;
  t["estimator.gyro_noise_density"] = c.gyro_noise_density;
  t["estimator.accel_noise_density"] = c.accel_noise_density;
  t["estimator.whiten_sigma"] = p.whiten_sigma;
  t["solver.method"] = to_string(p.solver.method);
  t["solver.max_iterations"] = p.solver.max_iterations;
  t["solver.step_tolerance"] = p.solver.step_tolerance;
  t["solver.initial_lambda"] = p.solver.initial_lambda;
  t["odometry.source"] = c.odometry_source == OdometrySource::Csv ? "csv" : "imu";
  return t;
}

}  // namespace sonarloc
