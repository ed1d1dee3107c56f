#pragma once

// Generic N-level Lindblad master equation with a fixed-step RK4 integrator.
//
// The state is held in an interaction frame. Jump operators are given in a
// reference frame rotating with frequencies `frame` relative to it, so the
// dissipator applied to rho is R D(R^H rho R) R^H with R = diag(exp(i frame t)).

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/SparseCore>

#include "nvcpt/types.hpp"

namespace nvcpt {

/// H(row, col) += amplitude * exp(i * detuning * t), plus the Hermitian conjugate. rad/us.
struct Coupling {
  int row = 0;
  int col = 0;
  cd amplitude{0.0, 0.0};
  double detuning = 0.0;
};

/// vec(L X L^H) = (conj(L) (x) L) vec(X), column-major vec.
template <int N>
Eigen::MatrixXcd jump_superoperator(const SquareC<double, N>& L) {
  const int n2 = N * N;
  Eigen::MatrixXcd s(n2, n2);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) s.block(a * N, b * N, N, N) = std::conj(L(a, b)) * L;
  return s;
}

template <int N>
struct LindbladSystem {
  using Mat = SquareC<double, N>;

  Mat h_static = Mat::Zero();             // rad/us
  std::vector<Coupling> couplings;
  Eigen::Matrix<double, N, 1> frame = Eigen::Matrix<double, N, 1>::Zero();  // rad/us
  Eigen::MatrixXcd jump;                  // N^2 x N^2, empty when closed
  Mat gamma = Mat::Zero();                // sum of L^H L
  Eigen::SparseMatrix<cd, Eigen::RowMajor> jump_sparse;  // filled by compress()
  bool compressed = false;

  /// Sparse copy of `jump` (exact zeros dropped) for faster derivatives.
  void compress() {
    if (!dissipative()) return;
    jump_sparse = jump.sparseView(cd(0.0, 0.0), 0.0);
    jump_sparse.makeCompressed();
    compressed = true;
  }

  void add_jump(const Mat& L) {
    if (jump.size() == 0) jump = Eigen::MatrixXcd::Zero(N * N, N * N);
    jump += jump_superoperator<N>(L);
    gamma += L.adjoint() * L;
    compressed = false;
  }

  bool dissipative() const { return jump.size() != 0; }

  Mat hamiltonian(double t) const {
    Mat h = h_static;
    for (const auto& c : couplings) {
      const cd v = c.amplitude * std::polar(1.0, c.detuning * t);
      h(c.row, c.col) += v;
      h(c.col, c.row) += std::conj(v);
    }
    return h;
  }

  /// Fastest rate in the generator (rad/us), used to pick a step.
  double max_rate() const {
    double r = 0.0;
    for (const auto& c : couplings) r = std::max({r, std::abs(c.amplitude), std::abs(c.detuning)});
    r = std::max(r, h_static.cwiseAbs().maxCoeff());
    r = std::max(r, gamma.cwiseAbs().maxCoeff());
    if (dissipative()) r = std::max(r, frame.cwiseAbs().maxCoeff());
    return r;
  }

  void derivative(double t, const Mat& rho, Mat& out) const {
    const Mat h = hamiltonian(t);
    if (!dissipative()) {
      out.noalias() = cd(0.0, -1.0) * (h * rho - rho * h);
      return;
    }
    Eigen::Matrix<cd, N, 1> p;
    for (int k = 0; k < N; ++k) p[k] = std::polar(1.0, frame[k] * t);
    Mat sigma;
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) sigma(i, j) = std::conj(p[i]) * rho(i, j) * p[j];
    Mat js;
    const Eigen::Map<const Eigen::Matrix<cd, N * N, 1>> sv(sigma.data());
    Eigen::Map<Eigen::Matrix<cd, N * N, 1>> jv(js.data());
    if (compressed)
      jv = jump_sparse * sv;
    else
      jv = jump * sv;
    Mat k = cd(0.0, -1.0) * h;
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < N; ++i) {
        k(i, j) -= 0.5 * p[i] * gamma(i, j) * std::conj(p[j]);
        js(i, j) = p[i] * js(i, j) * std::conj(p[j]);
      }
    out.noalias() = k * rho;
    out.noalias() += rho * k.adjoint();
    out += js;
  }

  /// Liouvillian in the jump-operator frame, acting on column-major vec(rho). Only defined
  /// when that frame is static: resonant couplings with no frame rotation, or no couplings.
  Eigen::MatrixXcd liouvillian() const {
    const int n2 = N * N;
    if (!couplings.empty() && dissipative() && frame.cwiseAbs().maxCoeff() != 0.0)
      throw InputError("liouvillian: generator is time dependent");
    Mat h = h_static;
    for (const auto& c : couplings) {
      if (c.detuning != 0.0) throw InputError("liouvillian: generator is time dependent");
      h(c.row, c.col) += c.amplitude;
      h(c.col, c.row) += std::conj(c.amplitude);
    }
    if (dissipative()) h += Mat(frame.template cast<cd>().asDiagonal());
    const Mat id = Mat::Identity();
    Eigen::MatrixXcd l = Eigen::MatrixXcd::Zero(n2, n2);
    const Mat k = cd(0.0, -1.0) * h - 0.5 * gamma;
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b) {
        l.block(a * N, b * N, N, N) += id(a, b) * k;            // I (x) K
        l.block(a * N, b * N, N, N) += k.adjoint().transpose()(a, b) * id;  // conj(K) (x) I
      }
    if (dissipative()) l += jump;
    return l;
  }

  /// Stationary state in the jump-operator frame (trace one).
  Mat steady_state() const {
    const int n2 = N * N;
    Eigen::MatrixXcd l = liouvillian();
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n2);
    for (int j = 0; j < n2; ++j) l(0, j) = 0.0;
    for (int i = 0; i < N; ++i) l(0, i * N + i) = 1.0;
    rhs[0] = 1.0;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(l);
    const Eigen::VectorXcd v = lu.solve(rhs);
    if (!v.allFinite() || (l * v - rhs).norm() > 1e-8) throw ConvergenceError("steady state: singular Liouvillian");
    Mat rho = Eigen::Map<const Mat>(v.data());
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return rho / rho.trace().real();
  }
};

struct IntegratorOptions {
  double dt = 0.01;                 // us
  double trace_drift_limit = 1e-6;  // per `drift_window` steps
  int drift_window = 1000;
};

/// Classical RK4 from t0 over `steps` steps. The observer sees (step index, t, rho) at
/// step 0 and after each step. Aborts with StepSizeError on trace drift.
template <int N, typename Observer>
SquareC<double, N> rk4_integrate(const LindbladSystem<N>& sys, SquareC<double, N> rho, double t0, long steps,
                                 const IntegratorOptions& opt, Observer&& observe) {
  using Mat = SquareC<double, N>;
  const double dt = opt.dt;
  Mat k1, k2, k3, k4, tmp;
  double t = t0;
  double last_trace = rho.trace().real();
  observe(0L, t, rho);
  for (long s = 1; s <= steps; ++s) {
    sys.derivative(t, rho, k1);
    tmp = rho + (0.5 * dt) * k1;
    sys.derivative(t + 0.5 * dt, tmp, k2);
    tmp = rho + (0.5 * dt) * k2;
    sys.derivative(t + 0.5 * dt, tmp, k3);
    tmp = rho + dt * k3;
    sys.derivative(t + dt, tmp, k4);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t = t0 + static_cast<double>(s) * dt;
    if (s % opt.drift_window == 0 || s == steps) {
      const double tr = rho.trace().real();
      if (!std::isfinite(tr) || std::abs(tr - last_trace) > opt.trace_drift_limit)
        throw StepSizeError("integrator: trace drift exceeds limit; reduce dt");
      last_trace = tr;
    }
    observe(s, t, rho);
  }
  return rho;
}

/// Halve dt until a short probe run drifts less than `per_step` in trace per step.
template <int N>
double probe_step(const LindbladSystem<N>& sys, const SquareC<double, N>& rho0, double dt, double per_step = 1e-9,
                  int probe_steps = 50, int max_halvings = 12) {
  for (int h = 0; h <= max_halvings; ++h) {
    IntegratorOptions o;
    o.dt = dt;
    o.trace_drift_limit = INFINITY;
    const double tr0 = rho0.trace().real();
    double worst = 0.0;
    double prev = tr0;
    bool finite = true;
    rk4_integrate<N>(sys, rho0, 0.0, probe_steps, o, [&](long, double, const SquareC<double, N>& r) {
      const double tr = r.trace().real();
      if (!std::isfinite(tr) || !r.allFinite()) finite = false;
      worst = std::max(worst, std::abs(tr - prev));
      prev = tr;
    });
    if (finite && worst < per_step) return dt;
    dt *= 0.5;
  }
  throw StepSizeError("integrator: no stable step found");
}

}  // namespace nvcpt
