#include "nvcpt/least_squares.hpp"

#include <algorithm>
#include <cmath>

#include "nvcpt/types.hpp"

namespace nvcpt {

namespace {

double scaled_gradient(const Eigen::MatrixXd& J, const Eigen::VectorXd& r) {
  const double rn = r.norm();
  if (rn == 0.0) return 0.0;
  double g = 0.0;
  for (int j = 0; j < J.cols(); ++j) {
    const double cn = J.col(j).norm();
    if (cn == 0.0) continue;
    g = std::max(g, std::abs(J.col(j).dot(r)) / (cn * rn));
  }
  return g;
}

}  // namespace

LmResult levenberg_marquardt(const LmProblem& pb, const Eigen::VectorXd& x0, const LmOptions& opt) {
  const int n = static_cast<int>(x0.size());
  std::vector<int> free_idx;
  for (int i = 0; i < n; ++i)
    if (pb.frozen.empty() || !pb.frozen[i]) free_idx.push_back(i);
  const int nf = static_cast<int>(free_idx.size());

  auto project = [&](Eigen::VectorXd& x) {
    for (int i = 0; i < n; ++i) {
      if (pb.lower.size() == n) x[i] = std::max(x[i], pb.lower[i]);
      if (pb.upper.size() == n) x[i] = std::min(x[i], pb.upper[i]);
    }
  };

  LmResult res;
  Eigen::VectorXd x = x0;
  project(x);
  Eigen::VectorXd r;
  Eigen::MatrixXd Jfull;
  pb.residual(x, r, &Jfull);
  ++res.evaluations;
  if (!r.allFinite() || !Jfull.allFinite()) throw InputError("least squares: non-finite residual at the start point");
  const int m = static_cast<int>(r.size());
  if (m < nf) throw InputError("least squares: fewer residuals than free parameters");

  auto free_cols = [&](const Eigen::MatrixXd& Jf) {
    Eigen::MatrixXd J(Jf.rows(), nf);
    for (int k = 0; k < nf; ++k) J.col(k) = Jf.col(free_idx[k]);
    return J;
  };

  Eigen::MatrixXd J = free_cols(Jfull);
  double cost = r.squaredNorm();
  res.cost_history.push_back(cost);
  double lambda = opt.lambda0;
  Eigen::VectorXd diag_scale = Eigen::VectorXd::Zero(nf);

  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    res.gradient_norm = scaled_gradient(J, r);
    if (cost <= opt.cost_atol || nf == 0) {
      res.converged = true;
      res.message = "cost below absolute tolerance";
      break;
    }
    if (res.gradient_norm < opt.gradient_tol) {
      res.converged = true;
      res.message = "gradient below tolerance";
      break;
    }

    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    for (int k = 0; k < nf; ++k) diag_scale[k] = std::max(diag_scale[k], JtJ(k, k));
    const double floor = 1e-12 * std::max(1.0, diag_scale.maxCoeff());

    bool accepted = false;
    bool stalled = false;
    while (!accepted) {
      Eigen::MatrixXd A = JtJ;
      for (int k = 0; k < nf; ++k) A(k, k) += lambda * std::max(diag_scale[k], floor);
      const Eigen::VectorXd step = A.ldlt().solve(-g);
      Eigen::VectorXd xn = x;
      for (int k = 0; k < nf; ++k) xn[free_idx[k]] += step[k];
      project(xn);
      Eigen::VectorXd rn;
      pb.residual(xn, rn, nullptr);
      ++res.evaluations;
      const double cn = rn.allFinite() ? rn.squaredNorm() : INFINITY;
      if (cn < cost) {
        const double rel = (cost - cn) / std::max(cost, 1e-300);
        x = xn;
        pb.residual(x, r, &Jfull);
        ++res.evaluations;
        J = free_cols(Jfull);
        cost = cn;
        res.cost_history.push_back(cost);
        lambda = std::max(lambda * opt.lambda_down, 1e-15);
        accepted = true;
        if (rel < opt.cost_rtol && scaled_gradient(J, r) < opt.gradient_loose) stalled = true;
      } else {
        lambda *= opt.lambda_up;
        if (lambda > opt.lambda_max) break;
      }
    }
    if (stalled) {
      ++it;
      res.gradient_norm = scaled_gradient(J, r);
      res.converged = true;
      res.message = "relative cost change below tolerance";
      break;
    }
    if (!accepted) {
      res.gradient_norm = scaled_gradient(J, r);
      res.converged = res.gradient_norm < opt.gradient_loose;
      res.message = res.converged ? "no further decrease possible" : "damping exhausted";
      break;
    }
  }
  if (it >= opt.max_iterations && !res.converged) res.message = "iteration cap reached";

  res.x = x;
  res.cost = cost;
  res.iterations = it;
  res.uncertainty = Eigen::VectorXd::Zero(n);
  if (nf > 0 && m > nf) {
    const double s2 = cost / static_cast<double>(m - nf);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J.transpose() * J);
    const Eigen::VectorXd ev = es.eigenvalues();
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(nf);
    const double tol = 1e-14 * std::max(1.0, ev.cwiseAbs().maxCoeff());
    for (int k = 0; k < nf; ++k) inv[k] = ev[k] > tol ? 1.0 / ev[k] : 0.0;
    res.covariance = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose() * s2;
    for (int k = 0; k < nf; ++k) res.uncertainty[free_idx[k]] = std::sqrt(std::max(0.0, res.covariance(k, k)));
  }
  return res;
}

ResidualFunction with_numeric_jacobian(std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> f,
                                       double relative_step) {
  return [f = std::move(f), relative_step](const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* J) {
    f(x, r);
    if (!J) return;
    J->resize(r.size(), x.size());
    Eigen::VectorXd xp = x, xm = x, rp, rm;
    for (int j = 0; j < x.size(); ++j) {
      const double h = relative_step * std::max(1.0, std::abs(x[j]));
      xp[j] = x[j] + h;
      xm[j] = x[j] - h;
      f(xp, rp);
      f(xm, rm);
      J->col(j) = (rp - rm) / (2.0 * h);
      xp[j] = xm[j] = x[j];
    }
  };
}

}  // namespace nvcpt
