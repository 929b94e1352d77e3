#include "sonarloc/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>

namespace sonarloc {

using nlohmann::json;

PipelineConfig PipelineConfig::two_view_baseline() { return two_view_baseline(PipelineConfig{}); }

PipelineConfig PipelineConfig::two_view_baseline(PipelineConfig base) {
  base.max_window = 2;
  base.thresholds = DegeneracyThresholds::disabled();
  return base;
}

void PipelineConfig::validate() const {
  thresholds.validate();
  if (max_window < 2) throw std::invalid_argument("max_window must be >= 2");
  if (coview_threshold < 0) throw std::invalid_argument("coview_threshold must be >= 0");
  if (database_capacity == 0) throw std::invalid_argument("database_capacity must be > 0");
  if (!(sigma_bearing > 0.0) || !(sigma_range > 0.0)) {
    throw std::invalid_argument("sonar noise sigmas must be > 0");
  }
}

json to_json(const FrameReport& r) {
  json ks = json::array();
  for (const auto& a : r.keyframes) {
    ks.push_back({{"id", a.id}, {"sigma_min", a.sigma_min}, {"coview", a.coview}});
  }
  const VecX p = r.pose.vector();
  return {{"frame", r.frame},
          {"timestamp", r.timestamp},
          {"classification", to_string(r.classification)},
          {"sigma_min", r.sigma_min},
          {"n_features", r.feature_count},
          {"reference", r.reference},
          {"window", r.window},
          {"keyframes", ks},
          {"sigma_average", r.sigma_average},
          {"optimized", r.optimized},
          {"iterations", r.iterations},
          {"final_cost", r.final_cost},
          {"fallback", r.fallback},
          {"pose", std::vector<double>(p.data(), p.data() + p.size())}};
}

namespace {

SonarMeasurement to_measurement(const Observation& o, int frame, const PipelineConfig& c) {
  SonarMeasurement m;
  m.bearing = o.bearing;
  m.range = o.range;
  m.covariance = sonar_covariance(c.sigma_bearing, c.sigma_range);
  m.frame = frame;
  m.landmark = o.landmark;
  return m;
}

const Observation* first_observation(const std::vector<Observation>& obs, int id) {
  for (const auto& o : obs) {
    if (o.landmark == id) return &o;
  }
  return nullptr;
}

std::vector<int> unique_ids(const std::vector<Observation>& obs) {
  std::vector<int> ids;
  for (const auto& o : obs) ids.push_back(o.landmark);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::vector<int> intersect(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

PolarLandmark landmark_from(const Observation& o, int anchor) {
  return PolarLandmark{o.bearing, o.range, 0.0, anchor};
}

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

Vec3 landmark_world(const FactorGraph& g, int id, const Pose& reference_pose) {
  const PolarLandmark& l = g.landmark(id);
  return reference_pose.compose(g.pose(l.anchor)).apply(back_project(l));
}

}  // namespace

FactorGraph build_two_view_graph(const FrameRecord& prev, const FrameInput& current,
                                 const OdometryMeasurement& odometry,
                                 const PipelineConfig& config) {
  FactorGraph g(config.mode);
  g.add_pose(prev.id, Pose::identity(config.mode), true);
  g.add_pose(current.id, odometry.relative, false);
  const auto common = intersect(unique_ids(prev.observations), unique_ids(current.observations));
  for (int id : common) {
    g.add_landmark(id, landmark_from(*first_observation(prev.observations, id), prev.id));
  }
  for (int id : common) {
    for (const auto& o : prev.observations) {
      if (o.landmark == id) g.add_sonar(to_measurement(o, prev.id, config));
    }
    for (const auto& o : current.observations) {
      if (o.landmark == id) g.add_sonar(to_measurement(o, current.id, config));
    }
  }
  OdometryMeasurement odo = odometry;
  odo.from = prev.id;
  odo.to = current.id;
  g.add_odometry(odo);
  return g;
}

std::pair<int, double> two_view_constraint(const FrameRecord& prev, const FrameInput& current,
                                           const OdometryMeasurement& odometry,
                                           const PipelineConfig& config) {
  const FactorGraph g = build_two_view_graph(prev, current, odometry, config);
  const int nf = static_cast<int>(g.landmarks().size());
  if (nf == 0) return {0, 0.0};
  AssembleOptions opt;
  opt.include_odometry = false;
  opt.whiten = config.whiten_sigma;
  return {nf, min_singular_value(assemble(g, opt)).sigma_min};
}

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)) {
  config_.validate();
  window_.max_size = config_.max_window;
  window_.coview_threshold = config_.coview_threshold;
}

FrameReport Pipeline::initialize(const FrameInput& first) {
  return initialize(first, Pose::identity(config_.mode));
}

FrameReport Pipeline::initialize(const FrameInput& first, const Pose& start) {
  if (initialized()) throw std::logic_error("pipeline already initialized");
  if (start.mode() != config_.mode) throw std::invalid_argument("start pose mode mismatch");
  FrameRecord rec;
  rec.id = first.id;
  rec.timestamp = first.timestamp;
  rec.observations = first.observations;
  rec.pose = start;
  history_.push_back(rec);
  last_accepted_ = 0;
  window_.reference = rec.id;
  window_.current = rec.id;

  FrameReport rep;
  rep.frame = rec.id;
  rep.timestamp = rec.timestamp;
  rep.reference = rec.id;
  rep.window = {rec.id};
  rep.pose = start;
  return rep;
}

FactorGraph Pipeline::build_window_graph(const FrameInput& frame,
                                         const std::vector<const FrameRecord*>& frames) const {
  // frames[0] is the reference; the rest are keyframes, all sorted by id.
  const FrameRecord& ref = *frames.front();
  FactorGraph g(config_.mode);
  for (const auto* f : frames) {
    g.add_pose(f->id, f == &ref ? Pose::identity(config_.mode) : ref.pose.between(f->pose),
               true);
  }
  g.add_pose(frame.id, accumulated_.relative, false);

  std::vector<int> window_ids;
  for (const auto* f : frames) {
    const auto ids = unique_ids(f->observations);
    window_ids.insert(window_ids.end(), ids.begin(), ids.end());
  }
  std::sort(window_ids.begin(), window_ids.end());
  window_ids.erase(std::unique(window_ids.begin(), window_ids.end()), window_ids.end());
  const auto landmarks = intersect(unique_ids(frame.observations), window_ids);

  for (int id : landmarks) {
    for (const auto* f : frames) {
      if (const Observation* o = first_observation(f->observations, id)) {
        g.add_landmark(id, landmark_from(*o, f->id));
        break;
      }
    }
  }
  for (int id : landmarks) {
    for (const auto* f : frames) {
      for (const auto& o : f->observations) {
        if (o.landmark == id) g.add_sonar(to_measurement(o, f->id, config_));
      }
    }
    for (const auto& o : frame.observations) {
      if (o.landmark == id) g.add_sonar(to_measurement(o, frame.id, config_));
    }
  }
  OdometryMeasurement odo = accumulated_;
  odo.from = ref.id;
  odo.to = frame.id;
  g.add_odometry(odo);
  return g;
}

void Pipeline::store_landmarks(const FactorGraph& g, const Pose& reference_pose) {
  for (const auto& [id, l] : g.landmarks()) landmarks_[id] = landmark_world(g, id, reference_pose);
}

FrameReport Pipeline::process_frame(const FrameInput& frame, const OdometryMeasurement& odometry) {
  if (!initialized()) throw std::logic_error("pipeline not initialized");
  const auto t0 = std::chrono::steady_clock::now();
  const FrameRecord& prev = history_.back();
  if (frame.id <= prev.id) throw std::invalid_argument("frame ids must increase");

  FrameRecord rec;
  rec.id = frame.id;
  rec.timestamp = frame.timestamp;
  rec.observations = frame.observations;
  const auto [nf, sigma] = two_view_constraint(prev, frame, odometry, config_);
  rec.feature_count = nf;
  rec.sigma_min = sigma;
  rec.classification = classify_frame(nf, sigma, config_.thresholds);

  // Odometry from the last accepted frame to this one.
  if (last_accepted_ == static_cast<int>(history_.size()) - 1) {
    accumulated_ = odometry;
  } else {
    accumulated_.relative = accumulated_.relative.compose(odometry.relative);
    accumulated_.covariance = accumulated_.covariance + odometry.covariance;
  }
  const FrameRecord& ref = history_[last_accepted_];
  const Pose inertial = prev.pose.compose(odometry.relative);

  FrameReport rep;
  rep.frame = rec.id;
  rep.timestamp = rec.timestamp;
  rep.classification = rec.classification;
  rep.sigma_min = sigma;
  rep.feature_count = nf;
  rep.reference = ref.id;

  auto propagate = [&](const std::string& reason) {
    rec.pose = inertial;
    rep.pose = inertial;
    rep.fallback = reason;
    rep.window = {ref.id, rec.id};
    history_.push_back(std::move(rec));
    rep.time_ms = elapsed_ms(t0);
    return rep;
  };

  if (rec.classification == FrameClass::UnderConstrained) return propagate("under_constrained");

  ElasticWindow win = window_;
  win.reference = ref.id;
  win = admit_keyframes(database_, rec, win);

  std::vector<const FrameRecord*> frames{&ref};
  for (int id : win.keyframes) {
    for (const auto& r : database_) {
      if (r.id == id) frames.push_back(&r);
    }
  }
  std::sort(frames.begin() + 1, frames.end(),
            [](const FrameRecord* a, const FrameRecord* b) { return a->id < b->id; });

  FactorGraph graph = build_window_graph(frame, frames);
  SolveReport sol;
  try {
    sol = solve(graph, config_.solver);
  } catch (const std::exception& e) {
    spdlog::warn("frame {}: optimization failed ({}), using inertial update", frame.id, e.what());
    return propagate("solver_failure");
  }

  window_ = win;
  rec.pose = ref.pose.compose(graph.pose(frame.id));
  store_landmarks(graph, ref.pose);

  rep.pose = rec.pose;
  rep.optimized = true;
  rep.iterations = sol.iterations;
  rep.final_cost = sol.final_cost;
  rep.sigma_average = win.sigma_average;
  rep.window = win.members();
  for (const auto* f : frames) {
    if (f != &ref) rep.keyframes.push_back({f->id, f->sigma_min, coview_count(*f, rec)});
  }
  spdlog::debug("frame {}: {} sigma_min={:.4f} nf={} window={} iters={}", frame.id,
                to_string(rec.classification), sigma, nf, win.size(), sol.iterations);

  if (rec.classification == FrameClass::Keyframe) {
    database_.push_back(rec);
    while (database_.size() > config_.database_capacity) database_.erase(database_.begin());
  }
  history_.push_back(std::move(rec));
  last_accepted_ = static_cast<int>(history_.size()) - 1;
  rep.time_ms = elapsed_ms(t0);
  return rep;
}

TwoViewAba::TwoViewAba(PipelineConfig config) : config_(std::move(config)) {}

Pose TwoViewAba::initialize(const FrameInput& first, const Pose& start) {
  prev_ = FrameRecord{};
  prev_.id = first.id;
  prev_.timestamp = first.timestamp;
  prev_.observations = first.observations;
  prev_.pose = start;
  return start;
}

Pose TwoViewAba::process_frame(const FrameInput& frame, const OdometryMeasurement& odometry) {
  FactorGraph graph = build_two_view_graph(prev_, frame, odometry, config_);
  Pose pose;
  try {
    solve(graph, config_.solver);
    pose = prev_.pose.compose(graph.pose(frame.id));
    for (const auto& [id, l] : graph.landmarks()) {
      landmarks_[id] = landmark_world(graph, id, prev_.pose);
    }
  } catch (const std::exception& e) {
    spdlog::warn("frame {}: two-view solve failed ({})", frame.id, e.what());
    pose = prev_.pose.compose(odometry.relative);
  }
  prev_.id = frame.id;
  prev_.timestamp = frame.timestamp;
  prev_.observations = frame.observations;
  prev_.pose = pose;
  return pose;
}

}  // namespace sonarloc
