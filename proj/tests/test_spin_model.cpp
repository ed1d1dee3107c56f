#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "nvcpt/spin_model.hpp"

using namespace nvcpt;

namespace {

Matrix9cd reference_hamiltonian(const HamiltonianParams& p, const MagneticField& f) {
  // written out element by element from S+- and I+- ladder operators
  const double t = f.tilt * M_PI / 180, ph = f.azimuth * M_PI / 180;
  const double bx = f.magnitude * std::sin(t) * std::cos(ph), by = f.magnitude * std::sin(t) * std::sin(ph),
               bz = f.magnitude * std::cos(t);
  Matrix9cd h = Matrix9cd::Zero();
  auto idx = [](int ms, int mi) { return 3 * (1 - ms) + (1 - mi); };
  auto ladder = [](int m, int up) { return std::sqrt(2.0 - m * (m + up)); };  // <m+up| J_up |m>, spin 1
  const cd bplus(bx, by), bminus(bx, -by);
  for (int ms = -1; ms <= 1; ++ms)
    for (int mi = -1; mi <= 1; ++mi) {
      const int c = idx(ms, mi);
      h(c, c) += p.D * ms * ms + p.gamma_e * bz * ms + p.Q * mi * mi - p.gamma_n * bz * mi + p.A_zz * ms * mi;
      // S.B transverse: (S+ B- + S- B+)/2
      if (ms < 1) h(idx(ms + 1, mi), c) += 0.5 * p.gamma_e * ladder(ms, 1) * bminus;
      if (ms > -1) h(idx(ms - 1, mi), c) += 0.5 * p.gamma_e * ladder(ms, -1) * bplus;
      if (mi < 1) h(idx(ms, mi + 1), c) -= 0.5 * p.gamma_n * ladder(mi, 1) * bminus;
      if (mi > -1) h(idx(ms, mi - 1), c) -= 0.5 * p.gamma_n * ladder(mi, -1) * bplus;
      // Axx SxIx + Ayy SyIy = (Axx+Ayy)/4 (S+I- + S-I+) + (Axx-Ayy)/4 (S+I+ + S-I-)
      const double ap = 0.25 * (p.A_xx + p.A_yy), am = 0.25 * (p.A_xx - p.A_yy);
      if (ms < 1 && mi > -1) h(idx(ms + 1, mi - 1), c) += ap * ladder(ms, 1) * ladder(mi, -1);
      if (ms > -1 && mi < 1) h(idx(ms - 1, mi + 1), c) += ap * ladder(ms, -1) * ladder(mi, 1);
      if (ms < 1 && mi < 1) h(idx(ms + 1, mi + 1), c) += am * ladder(ms, 1) * ladder(mi, 1);
      if (ms > -1 && mi > -1) h(idx(ms - 1, mi - 1), c) += am * ladder(ms, -1) * ladder(mi, -1);
    }
  return h;
}

Eigen::Matrix<double, 9, 1> eigen_values(const Matrix9cd& h) {
  Eigen::SelfAdjointEigenSolver<Matrix9cd> es(h);
  return es.eigenvalues();
}

}  // namespace

TEST_CASE("spin-1 matrices") {
  const auto ops = spin1_operators();
  const Matrix3cd sz = ops.S[2];
  CHECK((sz - Eigen::Vector3cd(1, 0, -1).asDiagonal().toDenseMatrix()).norm() == 0.0);
  const cd i(0, 1);
  for (int a = 0; a < 3; ++a) {
    const auto& x = ops.S[a];
    const auto& y = ops.S[(a + 1) % 3];
    const auto& z = ops.S[(a + 2) % 3];
    CHECK((x * y - y * x - i * z).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(hermiticity_error<double, 3>(x) == 0.0);
  }
  const Matrix3cd casimir = ops.S[0] * ops.S[0] + ops.S[1] * ops.S[1] + ops.S[2] * ops.S[2];
  CHECK((casimir - 2.0 * Matrix3cd::Identity()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(std::abs(std::abs(ops.S[0](0, 1)) - M_SQRT1_2) < 1e-15);
  CHECK(std::abs((sz * sz).trace().real() - 2.0) < 1e-15);
  CHECK(ops.I9[2](basis_index(0, 1), basis_index(0, 1)).real() == 1.0);
  CHECK(ops.S9[2](basis_index(-1, 0), basis_index(-1, 0)).real() == -1.0);
}

TEST_CASE("basis ordering is descending in both spins") {
  CHECK(basis_index(1, 1) == 0);
  CHECK(basis_index(0, 0) == 4);
  CHECK(basis_index(-1, -1) == 8);
  for (int k = 0; k < 9; ++k) CHECK(basis_index(basis_ms(k), basis_mi(k)) == k);
}

TEST_CASE("field direction") {
  const MagneticField f{30, 88, 20};
  CHECK(std::abs(f.cartesian().norm() - 30.0) / 30.0 < 1e-12);
  CHECK_THROWS_AS(MagneticField({30, 181, 0}).validate(), InputError);
  CHECK_THROWS_AS(MagneticField({-1, 0, 0}).validate(), InputError);
}

TEST_CASE("hamiltonian matches the ladder-operator construction") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  for (int n = 0; n < 200; ++n) {
    HamiltonianParams p;
    p.A_xx = -2.62 + u(rng);
    p.A_yy = -2.62 - u(rng);
    const MagneticField f{200 * u(rng), 180 * u(rng), 360 * u(rng)};
    const Matrix9cd h = build_hamiltonian(p, f);
    CHECK((h - reference_hamiltonian(p, f)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(hermiticity_error<double, 9>(h) <= 1e-12);
    CHECK(std::abs(h.trace().real() - (6 * p.D + 6 * p.Q)) / (6 * p.D) < 1e-9);
  }
}

TEST_CASE("trace at zero field") {
  const Matrix9cd h = build_hamiltonian(HamiltonianParams{}, MagneticField{0, 0, 0});
  CHECK(h.trace().real() == doctest::Approx(17190.33).epsilon(1e-12));
}

TEST_CASE("tilt 0 conserves mI inside each mS block") {
  const Matrix9cd h = build_hamiltonian(HamiltonianParams{}, MagneticField{30, 0, 0});
  for (int a = 0; a < 9; ++a)
    for (int b = 0; b < 9; ++b)
      if (basis_ms(a) == basis_ms(b) && basis_mi(a) != basis_mi(b)) CHECK(std::abs(h(a, b)) == 0.0);
}

TEST_CASE("diagonal hamiltonian has analytic levels") {
  HamiltonianParams p;
  p.A_xx = p.A_yy = 0;
  const double b = 30;
  const GroundState g = solve_ground_state(p, MagneticField{b, 0, 0});
  for (int k = 0; k < 9; ++k) {
    const auto& l = g.eig.labels[k];
    const double e = p.D * l.ms * l.ms + p.gamma_e * b * l.ms + p.Q * l.mi * l.mi - p.gamma_n * b * l.mi +
                     p.A_zz * l.ms * l.mi;
    CHECK(g.eig.values[k] == doctest::Approx(e).epsilon(1e-12));
    CHECK(l.weight == doctest::Approx(1.0));
    CHECK_FALSE(l.ambiguous);
  }
}

TEST_CASE("eigensolve trivial inputs") {
  const auto id = eigensolve<double, 9>(Matrix9cd::Identity());
  for (int k = 0; k < 9; ++k) CHECK(id.values[k] == doctest::Approx(1.0));
  CHECK((id.vectors.adjoint() * id.vectors - Matrix9cd::Identity()).norm() < 1e-12);

  Matrix9cd d = Matrix9cd::Zero();
  const int perm[9] = {4, 2, 8, 0, 6, 1, 3, 7, 5};
  for (int k = 0; k < 9; ++k) d(perm[k], perm[k]) = k + 1.0;
  const auto e = eigensolve<double, 9>(d);
  for (int k = 0; k < 9; ++k) {
    CHECK(e.values[k] == doctest::Approx(k + 1.0));
    CHECK(std::abs(e.vectors(perm[k], k)) == doctest::Approx(1.0));
  }
}

TEST_CASE("eigensolve rejects non-hermitian input") {
  Matrix9cd h = Matrix9cd::Identity();
  h(0, 1) = 1.0;
  CHECK_THROWS_AS((eigensolve<double, 9>(h)), InputError);
}

TEST_CASE("eigensolve agrees with a library solver") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (int n = 0; n < 100; ++n) {
    const MagneticField f{200 * u(rng), 180 * u(rng), 360 * u(rng)};
    const Matrix9cd h = build_hamiltonian(HamiltonianParams{}, f);
    const auto e = eigensolve<double, 9>(h);
    const auto ref = eigen_values(h);
    CHECK((e.values - ref).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((e.vectors.adjoint() * e.vectors - Matrix9cd::Identity()).cwiseAbs().maxCoeff() < 1e-10);
    for (int k = 0; k < 9; ++k) {
      const double res = (h * e.vectors.col(k) - e.values[k] * e.vectors.col(k)).norm();
      CHECK(res / h.norm() < 1e-8);
    }
  }
}

TEST_CASE("reconstruction at the reference field") {
  const Matrix9cd h = build_hamiltonian(HamiltonianParams{}, MagneticField{30, 88, 0});
  const auto e = eigensolve<double, 9>(h);
  const Matrix9cd r = e.vectors * e.values.cast<cd>().asDiagonal() * e.vectors.adjoint();
  CHECK((r - h).norm() / h.norm() < 1e-8);
  for (int k = 1; k < 9; ++k) CHECK(e.values[k] >= e.values[k - 1]);
  const auto again = eigensolve<double, 9>(h);
  CHECK(again.values == e.values);
  CHECK(again.vectors == e.vectors);
}

TEST_CASE("largest component of every vector is real positive") {
  const auto e = eigensolve<double, 9>(build_hamiltonian(HamiltonianParams{}, MagneticField{30, 88, 0}));
  for (int k = 0; k < 9; ++k) {
    int best = 0;
    e.vectors.col(k).cwiseAbs().maxCoeff(&best);
    CHECK(e.vectors(best, k).imag() == 0.0);
    CHECK(e.vectors(best, k).real() > 0.0);
  }
}

TEST_CASE("zero field labels") {
  const GroundState g = solve_ground_state(HamiltonianParams{}, MagneticField{0, 0, 0});
  for (int k = 0; k < 3; ++k) CHECK(g.eig.labels[k].ms == 0);
  for (int k = 3; k < 9; ++k) CHECK(g.eig.labels[k].ms != 0);
  // |0,0> is shifted only in second order by the transverse hyperfine terms
  const int k00 = g.eig.find(0, 0);
  REQUIRE(k00 >= 0);
  CHECK(std::abs(g.eig.values[k00]) < 0.01);
  CHECK(g.eig.values[k00] == doctest::Approx(eigen_values(g.hamiltonian)[k00]).epsilon(1e-10));
}

TEST_CASE("labels at 30 G, 88 deg") {
  const GroundState g = solve_ground_state(HamiltonianParams{}, MagneticField{30, 88, 0});
  const std::pair<int, int> expect[9] = {{0, 1}, {0, -1}, {0, 0}, {-1, -1}, {-1, 1}, {1, 1}, {-1, 0}, {1, -1}, {1, 0}};
  const double energies[9] = {-7.408533, -7.404312, -2.457541, 2861.043980, 2864.833377,
                              2867.732269, 2868.049633, 2871.526277, 2874.414849};
  std::vector<int> seen(9, 0);
  for (int k = 0; k < 9; ++k) {
    CHECK(g.eig.labels[k].ms == expect[k].first);
    CHECK(g.eig.labels[k].mi == expect[k].second);
    CHECK(std::abs(g.eig.values[k] - energies[k]) < 1e-6);
    CHECK(g.eig.labels[k].weight > 1.0 / 9);
    CHECK(g.eig.labels[k].weight <= 1.0 + 1e-12);
    ++seen[basis_index(g.eig.labels[k].ms, g.eig.labels[k].mi)];
  }
  for (int s : seen) CHECK(s == 1);
  CHECK(g.eig.labels[0].weight == doctest::Approx(0.574).epsilon(1e-2));
}

TEST_CASE("eigenvalue continuity over a fine tilt sweep") {
  const double b = 30;
  const double bound = 10 * 2.802 * b * M_PI / 1800;
  Eigen::Matrix<double, 9, 1> prev;
  double worst = 0;
  for (int k = 0; k <= 900; ++k) {
    const auto v = eigensolve<double, 9>(build_hamiltonian(HamiltonianParams{}, MagneticField{b, 0.1 * k, 0})).values;
    if (k > 0) worst = std::max(worst, (v - prev).cwiseAbs().maxCoeff());
    prev = v;
  }
  CHECK(worst <= bound);
}

TEST_CASE("tracked labels") {
  const auto ref = solve_ground_state(HamiltonianParams{}, MagneticField{30, 10, 0}).eig;
  const auto raw = eigensolve<double, 9>(build_hamiltonian(HamiltonianParams{}, MagneticField{30, 11, 0}));
  const auto t = label_states_tracked(raw, ref);
  const auto direct = label_states(raw);
  for (int k = 0; k < 9; ++k) CHECK(t.labels[k].same_state(direct.labels[k]));

  // an unrelated reference (basis states scrambled) loses tracking
  EigenSystem scrambled = ref;
  Matrix9cd f = Matrix9cd::Zero();
  for (int a = 0; a < 9; ++a)
    for (int b = 0; b < 9; ++b) f(a, b) = std::polar(1.0 / 3.0, 2 * M_PI * a * b / 9.0);
  scrambled.vectors = f;
  CHECK_THROWS_AS(label_states_tracked(raw, scrambled), StepSizeError);
}

TEST_CASE("parameter validation") {
  HamiltonianParams p;
  p.D = -1;
  CHECK_THROWS_AS(p.validate(), InputError);
  CHECK_THROWS_AS(solve_ground_state(p, MagneticField{}), InputError);
}

TEST_CASE("templated core runs in long double") {
  HamiltonianParamsT<long double> p;
  MagneticFieldT<long double> f;
  const auto h = build_hamiltonian(p, f);
  const auto e = eigensolve<long double, 9>(h);
  const auto d = solve_ground_state(HamiltonianParams{}, MagneticField{});
  for (int k = 0; k < 9; ++k) CHECK(static_cast<double>(e.values[k]) == doctest::Approx(d.eig.values[k]).epsilon(1e-12));
}
