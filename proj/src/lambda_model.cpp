#include "nvcpt/lambda_model.hpp"

#include <algorithm>

namespace nvcpt {

ReducedLambda reduce_lambda(const OpenSystem& sys, const std::array<StateLabel, 3>& levels) {
  const auto& eig = sys.ground().eig;
  std::array<int, 3> idx{};
  for (int k = 0; k < 3; ++k) {
    idx[k] = eig.find(levels[k].ms, levels[k].mi);
    if (idx[k] < 0) throw InputError("reduce_lambda: level " + levels[k].str() + " not found");
  }
  if (idx[0] == idx[1] || idx[0] == idx[2] || idx[1] == idx[2]) throw InputError("reduce_lambda: repeated level");

  // The shared level is the one alone in its mS block.
  int shared = -1;
  for (int k = 0; k < 3; ++k) {
    const bool low = levels[k].ms == 0;
    int same = 0;
    for (int j = 0; j < 3; ++j) same += (levels[j].ms == 0) == low;
    if (same == 1) shared = k;
  }
  if (shared < 0) throw InputError("reduce_lambda: levels do not share a common state");

  ReducedLambda r;
  std::array<int, 2> others{};
  for (int k = 0, n = 0; k < 3; ++k)
    if (k != shared) others[n++] = k;
  if (eig.values[idx[others[0]]] > eig.values[idx[others[1]]]) std::swap(others[0], others[1]);

  r.kind = levels[shared].ms == 0 ? TripleKind::vee : TripleKind::lambda;
  r.shared = eig.labels[idx[shared]];
  r.first = eig.labels[idx[others[0]]];
  r.second = eig.labels[idx[others[1]]];
  r.shared_index = idx[shared];
  r.first_index = idx[others[0]];
  r.second_index = idx[others[1]];
  const auto& e = eig.values;
  r.frequency1 = std::abs(e[r.shared_index] - e[r.first_index]);
  r.frequency2 = std::abs(e[r.shared_index] - e[r.second_index]);
  r.element1 = std::abs(sys.drive_matrix()(r.shared_index, r.first_index));
  r.element2 = std::abs(sys.drive_matrix()(r.shared_index, r.second_index));
  r.splitting = e[r.second_index] - e[r.first_index];
  return r;
}

ReducedLambda reduce_lambda(const OpenSystem& sys, const std::string& t1, const std::string& t2) {
  const auto a = transition_labels(t1);
  const auto b = transition_labels(t2);
  if (a.first.same_state(b.first) && !a.second.same_state(b.second))
    return reduce_lambda(sys, {a.first, a.second, b.second});
  if (a.second.same_state(b.second) && !a.first.same_state(b.first))
    return reduce_lambda(sys, {a.second, a.first, b.first});
  throw InputError("reduce_lambda: transitions " + t1 + " and " + t2 + " do not share exactly one level");
}

void LambdaParams::validate() const {
  for (double x : {omega1, omega2, delta1, delta2})
    if (!std::isfinite(x)) throw InputError("lambda: parameters must be finite");
  if (!(gamma >= 0) || !(gamma_ground >= 0)) throw InputError("lambda: rates must be >= 0");
}

LindbladSystem<3> lambda_system(const LambdaParams& p) {
  p.validate();
  LindbladSystem<3> s;
  s.h_static(0, 0) = kTwoPi * p.delta1;
  s.h_static(1, 1) = kTwoPi * p.delta2;
  s.h_static(0, 2) = s.h_static(2, 0) = kTwoPi * 0.5 * p.omega1;
  s.h_static(1, 2) = s.h_static(2, 1) = kTwoPi * 0.5 * p.omega2;
  if (p.gamma > 0) {
    Eigen::Matrix3cd l = Eigen::Matrix3cd::Zero();
    l(0, 2) = std::sqrt(p.gamma);
    s.add_jump(l);
    l.setZero();
    l(1, 2) = std::sqrt(p.gamma);
    s.add_jump(l);
  }
  if (p.gamma_ground > 0) {
    Eigen::Matrix3cd l = Eigen::Matrix3cd::Zero();
    l(0, 0) = std::sqrt(p.gamma_ground);
    l(1, 1) = -std::sqrt(p.gamma_ground);
    s.add_jump(l);
  }
  return s;
}

Eigen::Vector3cd dark_state(const LambdaParams& p) {
  Eigen::Vector3cd d(p.omega2, -p.omega1, 0.0);
  const double n = d.norm();
  if (n == 0) throw InputError("lambda: dark state undefined for zero drive");
  return d / n;
}

namespace {

LambdaState summarize(const LambdaParams& p, const Eigen::Matrix3cd& rho) {
  LambdaState s;
  s.rho = rho;
  s.excited = rho(2, 2).real();
  const Eigen::Vector3cd d = dark_state(p);
  s.dark_overlap = (d.adjoint() * rho * d)(0, 0).real();
  return s;
}

}  // namespace

LambdaState lambda_steady_state(const LambdaParams& p) { return summarize(p, lambda_system(p).steady_state()); }

LambdaState lambda_evolve(const LambdaParams& p, const Eigen::Matrix3cd& rho0, double duration, double dt) {
  const LindbladSystem<3> s = lambda_system(p);
  const long n = std::max(1L, static_cast<long>(std::ceil(duration / dt - 1e-9)));
  IntegratorOptions io;
  io.dt = duration / static_cast<double>(n);
  const Eigen::Matrix3cd rho = rk4_integrate<3>(s, rho0, 0.0, n, io, [](long, double, const Eigen::Matrix3cd&) {});
  return summarize(p, rho);
}

}  // namespace nvcpt
