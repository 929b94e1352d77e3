// Gauss-Newton and Levenberg-Marquardt over a FactorGraph.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "sonarloc/factor_graph.hpp"

namespace sonarloc {

enum class SolverMethod { GaussNewton, LevenbergMarquardt };

std::string to_string(SolverMethod m);
SolverMethod solver_method_from_string(const std::string& s);

struct SolverConfig {
  SolverMethod method = SolverMethod::LevenbergMarquardt;
  int max_iterations = 50;
  /// Stop once ‖Δ‖∞ falls below this.
  double step_tolerance = 1e-8;
  double initial_lambda = 1e-4;
  double lambda_factor = 10.0;
  double max_lambda = 1e10;
  /// Record σ_min of the whitened Jacobian at every linearization.
  bool track_sigma_min = false;
};

struct SolveReport {
  int iterations = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  bool converged = false;
  std::vector<double> sigma_min_history;
};

class SolverError : public std::runtime_error {
 public:
  enum class Kind { Divergence, Singular };
  SolverError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Iterates linearize, solve the normal equation, update. The graph is
/// updated in place with the final estimate.
SolveReport solve(FactorGraph& graph, const SolverConfig& config = {});

}  // namespace sonarloc
