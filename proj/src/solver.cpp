#include "sonarloc/solver.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>

namespace sonarloc {

std::string to_string(SolverMethod m) {
  return m == SolverMethod::GaussNewton ? "gn" : "lm";
}

SolverMethod solver_method_from_string(const std::string& s) {
  if (s == "gn" || s == "gauss-newton") return SolverMethod::GaussNewton;
  if (s == "lm" || s == "levenberg-marquardt") return SolverMethod::LevenbergMarquardt;
  throw std::invalid_argument("unknown solver '" + s + "' (expected gn or lm)");
}

namespace {

double smallest_singular_value(const MatX& A) {
  if (A.rows() < A.cols()) return 0.0;
  Eigen::JacobiSVD<MatX> svd(A);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

}  // namespace

SolveReport solve(FactorGraph& graph, const SolverConfig& cfg) {
  const bool lm = cfg.method == SolverMethod::LevenbergMarquardt;
  SolveReport report;
  double cost = graph.cost();
  report.initial_cost = cost;
  if (!std::isfinite(cost)) {
    throw SolverError(SolverError::Kind::Divergence, "initial cost is not finite");
  }
  double lambda = cfg.initial_lambda;

  for (int it = 0; it < cfg.max_iterations; ++it) {
    const LinearSystem sys = assemble(graph);
    if (cfg.track_sigma_min) {
      report.sigma_min_history.push_back(smallest_singular_value(sys.A));
    }
    const MatX H = sys.A.transpose() * sys.A;
    const VecX g = sys.A.transpose() * sys.b;
    const auto n = H.rows();

    bool accepted = false;
    VecX delta;
    while (!accepted) {
      MatX Hd = H;
      if (lm) Hd.diagonal().array() += lambda;
      Eigen::ColPivHouseholderQR<MatX> qr(Hd);
      if (qr.rank() < n) {
        if (!lm) {
          throw SolverError(SolverError::Kind::Singular,
                            "normal equation is rank deficient (rank " +
                                std::to_string(qr.rank()) + " of " +
                                std::to_string(n) + ")");
        }
        lambda *= cfg.lambda_factor;
        if (lambda > cfg.max_lambda) {
          throw SolverError(SolverError::Kind::Singular,
                            "normal equation stays singular under damping");
        }
        continue;
      }
      delta = qr.solve(g);
      FactorGraph candidate = retract(graph, sys, delta);
      const double new_cost = candidate.cost();
      if (!std::isfinite(new_cost)) {
        if (!lm) {
          throw SolverError(SolverError::Kind::Divergence, "cost became non-finite");
        }
      } else if (!lm || new_cost <= cost) {
        graph = std::move(candidate);
        cost = new_cost;
        accepted = true;
        if (lm) lambda = std::max(lambda / cfg.lambda_factor, 1e-12);
        break;
      }
      if (delta.lpNorm<Eigen::Infinity>() < cfg.step_tolerance) {
        // Rejected step already below tolerance: nothing left to gain.
        report.iterations = it + 1;
        report.converged = true;
        report.final_cost = cost;
        return report;
      }
      lambda *= cfg.lambda_factor;
      if (lambda > cfg.max_lambda) {
        throw SolverError(SolverError::Kind::Divergence,
                          "cost keeps increasing beyond damping recovery");
      }
    }
    report.iterations = it + 1;
    if (delta.lpNorm<Eigen::Infinity>() < cfg.step_tolerance) {
      report.converged = true;
      break;
    }
  }
  report.final_cost = cost;
  if (!lm && cost > report.initial_cost * (1.0 + 1e-9) + 1e-12) {
    throw SolverError(SolverError::Kind::Divergence,
                      "Gauss-Newton ended above its initial cost");
  }
  return report;
}

}  // namespace sonarloc
