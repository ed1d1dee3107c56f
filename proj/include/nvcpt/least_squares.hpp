#pragma once

// Bounded Levenberg-Marquardt for small dense problems.

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nvcpt {

struct LmOptions {
  int max_iterations = 200;
  double cost_rtol = 1e-10;       // relative cost change, checked together with gradient_loose
  double gradient_tol = 1e-8;     // scaled gradient
  double gradient_loose = 1e-5;
  double cost_atol = 0.0;         // stop when the cost itself is this small
  double lambda0 = 1e-3;
  double lambda_up = 10.0;
  double lambda_down = 0.1;
  double lambda_max = 1e16;
};

struct LmResult {
  Eigen::VectorXd x;
  Eigen::VectorXd uncertainty;  // zero for frozen parameters
  Eigen::MatrixXd covariance;   // free parameters only
  double cost = 0.0;            // sum of squared residuals
  double gradient_norm = 0.0;   // max_j |J_j.r| / (|J_j| |r|)
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::vector<double> cost_history;  // accepted steps only
  std::string message;
};

/// Fills r(x) and, when J is non-null, the Jacobian dr/dx (all parameters).
using ResidualFunction = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* J)>;

struct LmProblem {
  ResidualFunction residual;
  Eigen::VectorXd lower;        // empty: unbounded
  Eigen::VectorXd upper;
  std::vector<bool> frozen;     // empty: all free
};

LmResult levenberg_marquardt(const LmProblem& problem, const Eigen::VectorXd& x0, const LmOptions& opt = {});

/// Central-difference Jacobian helper for residual functions without one.
ResidualFunction with_numeric_jacobian(std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> f,
                                       double relative_step = 1e-6);

}  // namespace nvcpt
