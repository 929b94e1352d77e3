// Acceptance checks: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.
#include <sys/wait.h>

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "sonarloc/run.hpp"
#include "support.hpp"

using namespace sonarloc;
using namespace sonarloc::testing;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(bool pass, const std::string& name, const std::string& detail) {
  std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

void jacobian_correctness() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  int states = 0;
  for (Mode mode : {Mode::Planar, Mode::Spatial}) {
    const int n = pose_dof(mode), m = landmark_dof(mode);
    for (int i = 0; i < 1000; ++i, ++states) {
      const Pose x = random_pose(rng, mode);
      const PolarLandmark l = random_visible_landmark(rng, x);
      auto fp = [&](const VecX& d) -> VecX { return predict(x.retract(d), l); };
      auto fl = [&](const VecX& d) -> VecX { return predict(x, retract_landmark(l, d, mode)); };
      worst = std::max(worst, relative_error(jacobian_pose(x, l), numeric_jacobian(fp, VecX::Zero(n))));
      worst = std::max(worst,
                       relative_error(jacobian_landmark(x, l), numeric_jacobian(fl, VecX::Zero(m))));
    }
  }
  const double secs = seconds_since(t0);
  report(worst < 1e-6 && secs < 5.0, "jacobian_correctness",
         fmt("%d states (2D+3D), max relative error %.2e (< 1e-6), %.2f s (< 5 s)", states, worst,
             secs));
}

void proposition_one() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1002);
  const SonarIntrinsics fov;
  double worst_ratio = 1e300, worst_err = 0.0;
  int cases = 0;
  auto check = [&](const PlanarMotion& motion, const PolarLandmark& l) {
    const TriangulationJacobian J = triangulation_jacobian(motion, l);
    worst_ratio = std::min(worst_ratio, J.sigma_min / J.sigma_max);
    const Pose a = Pose::identity(Mode::Planar), b = motion_pose(motion);
    const Vec2 za = predict(a, l), zb = predict(b, l);
    const PolarLandmark est = triangulate_landmark(a, za, b, zb, {za(0), za(1), 0.0, 0});
    worst_err = std::max(worst_err, (back_project(est) - back_project(l)).norm());
    ++cases;
  };
  auto landmark = [&] {
    return PolarLandmark{uniform(rng, fov.bearing_min, fov.bearing_max),
                         uniform(rng, 1.0, fov.range_max), 0.0, 0};
  };
  for (int i = 0; i < 100; ++i) {
    check(PureX{uniform(rng, 0.05, 0.5) * (i % 2 ? 1 : -1)}, landmark());
    check(PureY{uniform(rng, 0.05, 0.5) * (i % 2 ? 1 : -1)}, landmark());
    check(PureYaw{std::exp(uniform(rng, std::log(1e-3), std::log(0.1))) * (i % 2 ? 1 : -1)},
          landmark());
    check(Composite{uniform(rng, -0.1, 0.1), uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5)},
          landmark());
  }
  const double secs = seconds_since(t0);
  report(worst_ratio > 1e-6 && worst_err < 1e-8 && secs < 5.0, "proposition_one",
         fmt("%d cases, min sigma ratio %.3e (> 1e-6), max triangulation error %.2e m (< 1e-8), "
             "%.3f s (< 5 s)",
             cases, worst_ratio, worst_err, secs));
}

void degeneracy_reproduction() {
  std::mt19937_64 rng(1003);
  int ok = 0;
  double worst_eig = 0.0;
  const int instances = 100;
  for (int i = 0; i < instances; ++i) {
    const int n = 8;
    const TwoView tv = two_view(rng, Mode::Spatial, random_pose(rng, Mode::Spatial, 0.5), n);
    const int from = static_cast<int>(uniform(rng, 0, n));
    int to = static_cast<int>(uniform(rng, 0, n - 1));
    if (to >= from) ++to;
    const double clean = min_singular_value(assemble(tv.graph)).sigma_min;
    const LinearSystem bad = assemble(relabel_second_view(tv.graph, from, to));
    const double corrupted = min_singular_value(bad).sigma_min;
    Eigen::SelfAdjointEigenSolver<MatX> es(bad.A.transpose() * bad.A, Eigen::EigenvaluesOnly);
    const double eig = es.eigenvalues()(0);
    worst_eig = std::max(worst_eig, eig);
    if (clean > 1e-6 && corrupted < clean && eig <= 1e-9) ++ok;
  }
  report(ok == instances, "degeneracy_reproduction",
         fmt("%d/%d 3D instances with a <= 1e-9 Hessian eigenvalue and lower sigma_min "
             "(largest smallest-eigenvalue %.2e)",
             ok, instances, worst_eig));
}

void solvability_counts() {
  const int c3 = min_feature_count(Mode::Spatial), c2 = min_feature_count(Mode::Planar);
  report(c3 == 6 && c2 == 2, "solvability_counts", fmt("3D -> %d (6), 2D -> %d (2)", c3, c2));
}

struct SeedResult {
  double proposed_final = 0.0, aba_final = 0.0, dr_final = 0.0;
  double proposed_max = 0.0;
  double landmark_amplitude = 0.0;
  double mean_ms = 0.0;
};

SeedResult run_seed(std::uint64_t seed, const std::string& inject) {
  RunConfig run;
  LoadedScenario sc;
  sc.config = ScenarioConfig::standard();
  sc.config.seed = seed;
  sc.config.injections = parse_injections(inject);
  Scenario s = generate_scenario(sc.config);
  sc.stream = std::move(s.stream);
  sc.truth = std::move(s.truth);
  const auto frames = frame_inputs(sc.stream);
  const auto odo = odometry_measurements(run, sc);
  SeedResult r;
  for (const auto& m : expand_methods("all")) {
    const MethodRun mr = run_method(m, run.pipeline, frames, odo);
    const TrajectoryErrors e = trajectory_rmse(mr.result.trajectory, sc.truth.poses);
    if (m == "proposed") {
      r.proposed_final = e.final_rmse();
      r.proposed_max = e.summary.max;
      const LandmarkErrors l = landmark_errors(mr.result.landmarks, sc.truth.landmarks);
      r.landmark_amplitude = std::max({l.rmse_x, l.rmse_y, l.mae_x, l.mae_y});
      r.mean_ms = summarize(mr.result.time_ms).mean;
    } else if (m == "aba2view") {
      r.aba_final = e.final_rmse();
    } else {
      r.dr_final = e.final_rmse();
    }
  }
  return r;
}

void simulation_a() {
  const auto t0 = std::chrono::steady_clock::now();
  int bounded = 0, aba_worse = 0, dr_worst = 0;
  std::string maxes;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SeedResult r = run_seed(seed, "");
    bounded += r.proposed_max < 0.5;
    aba_worse += r.aba_final > r.proposed_final;
    dr_worst += r.dr_final > r.aba_final && r.dr_final > r.proposed_final;
    maxes += fmt("%s%.2f", maxes.empty() ? "" : " ", r.proposed_max);
  }
  const double secs = seconds_since(t0);
  report(bounded >= 18, "simulation_a_error_bound",
         fmt("per-frame error < 0.5 m at every frame in %d/20 seeds (>= 18); max errors [%s]",
             bounded, maxes.c_str()));
  report(aba_worse >= 18, "simulation_a_aba_worse",
         fmt("two-view ABA final RMSE above proposed in %d/20 seeds (>= 18)", aba_worse));
  report(dr_worst == 20, "simulation_a_dr_worst",
         fmt("dead reckoning worst in %d/20 seeds (20)", dr_worst));
  report(secs < 60.0, "simulation_a_runtime", fmt("%.1f s for 20 seeds (< 60 s)", secs));
}

void simulation_b() {
  int ok = 0, aba_over = 0, landmarks_ok = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SeedResult r = run_seed(seed, "50:6>1,7>8");
    aba_over += r.aba_final > 1.0;
    landmarks_ok += r.landmark_amplitude < 0.5;
    ok += r.aba_final > 1.0 && r.landmark_amplitude < 0.5;
  }
  report(ok >= 18, "simulation_b",
         fmt("%d/20 seeds (>= 18) with ABA final RMSE > 1 m (%d/20) and proposed landmark "
             "RMSE/MAE < 0.5 m (%d/20)",
             ok, aba_over, landmarks_ok));
}

void baseline_equivalence() {
  int identical = 0;
  const int seeds = 5;
  for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
    RunConfig run;
    LoadedScenario sc;
    sc.config = ScenarioConfig::standard();
    sc.config.seed = seed;
    if (seed % 2 == 0) sc.config.injections = parse_injections("50:6>1,7>8");
    Scenario s = generate_scenario(sc.config);
    sc.stream = std::move(s.stream);
    sc.truth = std::move(s.truth);
    const auto frames = frame_inputs(sc.stream);
    const auto odo = odometry_measurements(run, sc);
    const PipelineConfig cfg = PipelineConfig::two_view_baseline();
    Pipeline pipe(cfg);
    TwoViewAba aba(cfg);
    pipe.initialize(frames[0], Pose::identity(Mode::Planar));
    aba.initialize(frames[0], Pose::identity(Mode::Planar));
    bool same = true;
    for (std::size_t k = 1; k < frames.size(); ++k) {
      const Pose a = pipe.process_frame(frames[k], odo[k - 1]).pose;
      const Pose b = aba.process_frame(frames[k], odo[k - 1]);
      same = same && a.yaw() == b.yaw() && a.translation() == b.translation();
    }
    same = same && pipe.landmarks() == aba.landmarks();
    identical += same;
  }
  report(identical == seeds, "baseline_equivalence",
         fmt("bit-identical poses and landmarks in %d/%d streams", identical, seeds));
}

void whitening() {
  std::mt19937_64 rng(1004);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  const int samples = 100000;
  for (int trial = 0; trial < 10; ++trial) {
    const int d = trial % 2 ? 3 : 2;
    MatX L = MatX::Zero(d, d);
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < r; ++c) L(r, c) = uniform(rng, -0.5, 0.5);
      L(r, r) = std::exp(uniform(rng, std::log(0.01), std::log(2.0)));
    }
    const MatX cov = L * L.transpose();
    const MatX W = inverse_sqrt(cov);
    MatX acc = MatX::Zero(d, d);
    for (int s = 0; s < samples; ++s) {
      VecX e(d);
      for (int i = 0; i < d; ++i) e(i) = gauss(rng);
      const VecX w = W * (L * e);
      acc += w * w.transpose();
    }
    acc /= samples;
    worst = std::max(worst, (acc - MatX::Identity(d, d)).cwiseAbs().maxCoeff());
  }
  report(worst < 0.02, "whitening",
         fmt("10 random covariances, 1e5 samples each, max |cov - I| entry %.4f (< 0.02)", worst));
}

int cli(const std::string& args) {
  const std::string cmd = std::string("\"") + SONARLOC_CLI + "\" " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void determinism() {
  const fs::path root = fs::temp_directory_path() / "sonarloc_acceptance";
  fs::remove_all(root);
  // Both invocations write to the same paths; the first result is moved
  // aside before the second.
  const fs::path work = root / "work";
  bool ok = true;
  for (const char* tag : {"a", "b"}) {
    ok = ok && cli("simulate --seed 11 --imu.rate 20 --out \"" + (work / "scn").string() + "\"") == 0;
    ok = ok && cli("run --scenario \"" + (work / "scn").string() + "\" --inject '50:6>1,7>8' --out \"" +
                   (work / "res").string() + "\"") == 0;
    if (ok) fs::rename(work, root / tag);
  }
  int compared = 0, differing = 0;
  std::string first_diff;
  if (ok) {
    for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
      if (!e.is_regular_file() || e.path().filename() == "timing.csv") continue;
      const fs::path rel = fs::relative(e.path(), root / "a");
      ++compared;
      if (slurp(e.path()) != slurp(root / "b" / rel)) {
        ++differing;
        if (first_diff.empty()) first_diff = rel.string();
      }
    }
  }
  report(ok && compared > 0 && differing == 0, "determinism",
         fmt("%d files compared across two simulate+run invocations, %d differ%s%s", compared,
             differing, first_diff.empty() ? "" : ", first: ", first_diff.c_str()));
  fs::remove_all(root);
}

void throughput() {
  const SeedResult r = run_seed(1, "");
  report(r.mean_ms < 10.0, "throughput",
         fmt("mean per-frame pipeline time %.3f ms (< 10 ms)", r.mean_ms));
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<void()>> checks[] = {
      {"jacobian_correctness", jacobian_correctness},
      {"proposition_one", proposition_one},
      {"degeneracy_reproduction", degeneracy_reproduction},
      {"solvability_counts", solvability_counts},
      {"simulation_a", simulation_a},
      {"simulation_b", simulation_b},
      {"baseline_equivalence", baseline_equivalence},
      {"whitening", whitening},
      {"determinism", determinism},
      {"throughput", throughput}};
  for (const auto& [name, check] : checks) {
    try {
      check();
    } catch (const std::exception& e) {
      report(false, name, std::string("threw: ") + e.what());
    }
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
