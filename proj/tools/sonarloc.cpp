// sonarloc: simulate scenarios, run the estimators, evaluate and report.
#include <CLI11.hpp>
#include <spdlog/cfg/env.h>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "sonarloc/csv.hpp"
#include "sonarloc/io.hpp"
#include "sonarloc/run.hpp"

namespace fs = std::filesystem;
using namespace sonarloc;
using nlohmann::json;

namespace {

// One --<key> option per config key. String-typed keys keep the raw text;
// everything else is parsed as a JSON literal.
struct Overrides {
  ConfigTree schema;
  std::map<std::string, std::string> values;

  void attach(CLI::App* app, const ConfigTree& defaults) {
    schema = defaults;
    for (const auto& [key, v] : defaults) {
      app->add_option("--" + key, values[key], "Overrides config key " + key);
    }
  }

  ConfigTree apply(ConfigTree tree, CLI::App* app) const {
    for (const auto& [key, text] : values) {
      if (app->count("--" + key) == 0) continue;
      tree[key] = schema.at(key).is_string() ? json(text) : parse_config_value(text);
    }
    return tree;
  }
};

ConfigTree load_tree(const std::string& path) {
  return path.empty() ? ConfigTree{} : read_config_file(path);
}

json tree_json(const ConfigTree& t) {
  json j = json::object();
  for (const auto& [k, v] : t) j[k] = v;
  return j;
}

std::string config_text(const ConfigTree& t) {
  std::ostringstream s;
  write_config(s, t);
  return s.str();
}

int cmd_simulate(const std::string& config_path, const std::string& out, CLI::App* app,
                 const Overrides& ov) {
  const ConfigTree tree = ov.apply(load_tree(config_path), app);
  const ScenarioConfig cfg = scenario_from_tree(tree);
  const Scenario sc = generate_scenario(cfg);
  write_scenario(out, cfg, sc);
  spdlog::info("wrote {} frames to {}", sc.stream.frames.size(), out);
  return 0;
}

int cmd_run(const std::string& config_path, CLI::App* app, const Overrides& ov) {
  const ConfigTree tree = ov.apply(load_tree(config_path), app);
  const RunConfig rc = run_from_tree(tree);
  const LoadedScenario sc = load_scenario(rc);
  const auto frames = frame_inputs(sc.stream);
  const auto odometry = odometry_measurements(rc, sc);
  const fs::path out(rc.out);
  fs::create_directories(out);
  write_scenario(out / "scenario", sc.config, Scenario{sc.truth, sc.stream});
  write_text(out / "run.cfg", config_text(to_tree(rc)));

  int status = 0;
  json methods = json::array();
  for (const auto& m : expand_methods(rc.method)) {
    try {
      const MethodRun run = run_method(m, rc.pipeline, frames, odometry);
      write_method_outputs(out / m, run, sc.truth);
      const json s = json::parse(read_text(out / m / "summary.json"));
      spdlog::info("{}: final RMSE {:.4f} m, endpoint {:.4f} m", m,
                   s["trajectory"]["final_rmse_m"].get<double>(),
                   s["endpoint_error_m"].get<double>());
      methods.push_back(m);
    } catch (const std::exception& e) {
      spdlog::error("method {} aborted: {}", m, e.what());
      status = 1;
    }
  }
  const json manifest = {{"command", "run"},
                         {"config", tree_json(to_tree(rc))},
                         {"scenario_config", tree_json(to_tree(sc.config))},
                         {"frames", frames.size()},
                         {"methods", methods}};
  write_text(out / "manifest.json", manifest.dump(2) + "\n");
  return status;
}

// Method directories below `dir`, or `dir` itself when it holds results.
std::vector<fs::path> method_dirs(const fs::path& dir) {
  if (fs::exists(dir / "trajectory.csv")) return {dir};
  std::vector<fs::path> out;
  for (const char* m : {"proposed", "aba2view", "dr"}) {
    if (fs::exists(dir / m / "trajectory.csv")) out.push_back(dir / m);
  }
  if (out.empty()) throw std::runtime_error("no results found in " + dir.string());
  return out;
}

int cmd_evaluate(const std::string& results, const std::string& scenario) {
  const fs::path dir(results);
  const fs::path truth_dir = scenario.empty() ? dir / "scenario" : fs::path(scenario);
  const GroundTruth truth = read_truth(truth_dir);
  for (const auto& m : method_dirs(dir)) {
    const json s = evaluate_method_dir(m, truth);
    spdlog::info("{}: final RMSE {:.4f} m", m.string(),
                 s["trajectory"]["final_rmse_m"].get<double>());
  }
  return 0;
}

std::string fixed(double v, int digits = 3) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

int cmd_report(const std::vector<std::string>& dirs, const std::string& out_dir,
               double budget_ms) {
  struct Entry {
    std::string label;
    json summary;
    TrajectoryErrors errors;
    ErrorSummary timing;
  };
  std::vector<Entry> entries;
  for (const auto& d : dirs) {
    for (const auto& m : method_dirs(d)) {
      Entry e;
      e.label = m.filename().string();
      for (const auto& other : entries) {
        if (other.label == e.label) e.label = m.parent_path().filename().string() + "/" + e.label;
      }
      e.summary = json::parse(read_text(m / "summary.json"));
      std::ifstream in(m / "errors.csv");
      e.errors = read_errors_csv(in);
      e.timing = summarize(read_timing_csv(m / "timing.csv"));
      entries.push_back(std::move(e));
    }
  }
  for (const auto& e : entries) {
    if (e.errors.error.size() != entries.front().errors.error.size()) {
      throw std::runtime_error("inconsistent frame counts: " + entries.front().label + " has " +
                               std::to_string(entries.front().errors.error.size()) + ", " +
                               e.label + " has " + std::to_string(e.errors.error.size()));
    }
  }

  std::ostringstream csv;
  csv << "method,final_rmse_m,mean_m,std_m,min_m,max_m,endpoint_m,lm_rmse_x_m,lm_rmse_y_m,"
         "lm_mae_x_m,lm_mae_y_m,time_mean_ms,time_max_ms\n";
  std::cout << std::left << std::setw(12) << "method" << std::setw(11) << "final_rmse"
            << std::setw(18) << "mean±std" << std::setw(18) << "[min, max]" << std::setw(10)
            << "endpoint" << std::setw(22) << "lm rmse x/y" << std::setw(22) << "lm mae x/y"
            << "time ms (budget " << fixed(budget_ms, 0) << ")\n";
  for (const auto& e : entries) {
    const auto& t = e.summary["trajectory"];
    const auto& l = e.summary["landmarks"];
    const double endpoint = e.summary["endpoint_error_m"].get<double>();
    std::string lr = "-", lm = "-";
    if (!l.is_null()) {
      lr = fixed(l["rmse_x_m"].get<double>()) + "/" + fixed(l["rmse_y_m"].get<double>());
      lm = fixed(l["mae_x_m"].get<double>()) + "/" + fixed(l["mae_y_m"].get<double>());
    }
    std::cout << std::setw(12) << e.label << std::setw(11)
              << fixed(t["final_rmse_m"].get<double>()) << std::setw(17)
              << (fixed(t["mean_m"].get<double>()) + "±" + fixed(t["std_m"].get<double>()))
              << std::setw(18)
              << ("[" + fixed(t["min_m"].get<double>()) + ", " +
                  fixed(t["max_m"].get<double>()) + "]")
              << std::setw(10) << fixed(endpoint) << std::setw(22) << lr << std::setw(22) << lm
              << fixed(e.timing.mean) << (e.timing.mean < budget_ms ? " ok" : " over") << '\n';
    auto num = [](const json& j, const char* k) {
      return j.is_null() ? std::string() : fmt_double(j[k].get<double>());
    };
    csv << e.label << ',' << fmt_double(t["final_rmse_m"].get<double>()) << ','
        << fmt_double(t["mean_m"].get<double>()) << ',' << fmt_double(t["std_m"].get<double>())
        << ',' << fmt_double(t["min_m"].get<double>()) << ','
        << fmt_double(t["max_m"].get<double>()) << ',' << fmt_double(endpoint) << ','
        << num(l, "rmse_x_m") << ',' << num(l, "rmse_y_m") << ',' << num(l, "mae_x_m") << ','
        << num(l, "mae_y_m") << ',' << fmt_double(e.timing.mean) << ','
        << fmt_double(e.timing.max) << '\n';
  }

  std::ostringstream merged;
  merged << "frame";
  for (const auto& e : entries) merged << ',' << e.label << "_err_m," << e.label << "_cum_rmse_m";
  merged << '\n';
  for (std::size_t k = 0; k < entries.front().errors.error.size(); ++k) {
    merged << k;
    for (const auto& e : entries) {
      merged << ',' << fmt_double(e.errors.error[k]) << ','
             << fmt_double(e.errors.cumulative_rmse[k]);
    }
    merged << '\n';
  }
  const fs::path out = out_dir.empty() ? fs::path(dirs.front()) : fs::path(out_dir);
  fs::create_directories(out);
  write_text(out / "report.csv", csv.str());
  write_text(out / "merged_errors.csv", merged.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::info);
  spdlog::cfg::load_env_levels();

  CLI::App app{"Sonar localization toolkit: simulate, run, evaluate, report"};
  app.require_subcommand(1);

  std::string sim_config, sim_out = "scenario";
  auto* sim = app.add_subcommand("simulate", "Generate a scenario directory");
  sim->add_option("--config", sim_config, "Scenario config file")->check(CLI::ExistingFile);
  sim->add_option("--out", sim_out, "Output directory");
  Overrides sim_ov;
  sim_ov.attach(sim, to_tree(ScenarioConfig::standard()));

  std::string run_config;
  auto* run = app.add_subcommand("run", "Run the estimators on a scenario");
  run->add_option("--config", run_config, "Run config file")->check(CLI::ExistingFile);
  Overrides run_ov;
  RunConfig run_defaults;
  run_defaults.seed = 0;
  run_ov.attach(run, to_tree(run_defaults));

  std::string eval_dir, eval_scenario;
  auto* eval = app.add_subcommand("evaluate", "Recompute error files for a results directory");
  eval->add_option("results", eval_dir, "Results directory written by run")->required();
  eval->add_option("--scenario", eval_scenario,
                   "Scenario directory with ground truth (default: <results>/scenario)");

  std::vector<std::string> report_dirs;
  std::string report_out;
  double budget_ms = 10.0;
  auto* report = app.add_subcommand("report", "Compare results across methods");
  report->add_option("results", report_dirs, "Results or method directories")->required();
  report->add_option("--out", report_out, "Directory for report.csv and merged_errors.csv");
  report->add_option("--budget-ms", budget_ms, "Per-frame time budget");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*sim) return cmd_simulate(sim_config, sim_out, sim, sim_ov);
    if (*run) return cmd_run(run_config, run, run_ov);
    if (*eval) return cmd_evaluate(eval_dir, eval_scenario);
    if (*report) return cmd_report(report_dirs, report_out, budget_ms);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
