#pragma once

// Ground-state spin model of the NV centre: electron spin S = 1 coupled to the
// 14N nuclear spin I = 1. All energies in MHz, fields in gauss, angles in
// degrees at the interface.
//
// Product basis |mS> (x) |mI>, both ordered +1, 0, -1, so that the basis index
// of |mS, mI> is 3 * (1 - mS) + (1 - mI).

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "nvcpt/types.hpp"

namespace nvcpt {

constexpr int basis_index(int ms, int mi) { return 3 * (1 - ms) + (1 - mi); }
constexpr int basis_ms(int index) { return 1 - index / 3; }
constexpr int basis_mi(int index) { return 1 - index % 3; }

template <typename Scalar = double>
struct HamiltonianParamsT {
  Scalar D = Scalar(2870);           // electron zero-field splitting
  Scalar Q = Scalar(-4.945);         // nuclear quadrupole splitting
  Scalar gamma_e = Scalar(2.802);    // MHz/G
  Scalar gamma_n = Scalar(308e-6);   // MHz/G
  Scalar A_zz = Scalar(-2.162);
  Scalar A_xx = Scalar(-2.62);
  Scalar A_yy = Scalar(-2.62);

  void validate() const {
    if (!(D > 0)) throw InputError("hamiltonian.D must be positive");
    if (!(gamma_e > 0)) throw InputError("hamiltonian.gamma_e must be positive");
    if (!(gamma_n > 0)) throw InputError("hamiltonian.gamma_n must be positive");
  }
};
using HamiltonianParams = HamiltonianParamsT<double>;

template <typename Scalar = double>
struct MagneticFieldT {
  Scalar magnitude = Scalar(30);  // G
  Scalar tilt = Scalar(88);       // polar angle from the NV axis, degrees
  Scalar azimuth = Scalar(0);     // degrees

  void validate() const {
    if (!(magnitude >= 0)) throw InputError("field.magnitude must be >= 0");
    if (!(tilt >= 0 && tilt <= 180)) throw InputError("field.tilt must lie in [0, 180] degrees");
    if (!std::isfinite(static_cast<double>(azimuth))) throw InputError("field.azimuth must be finite");
  }

  Eigen::Matrix<Scalar, 3, 1> cartesian() const {
    const Scalar pi = Scalar(3.141592653589793238462643383279502884L);
    const Scalar t = tilt * pi / Scalar(180);
    const Scalar p = azimuth * pi / Scalar(180);
    using std::cos;
    using std::sin;
    return {magnitude * sin(t) * cos(p), magnitude * sin(t) * sin(p), magnitude * cos(t)};
  }
};
using MagneticField = MagneticFieldT<double>;

template <typename Scalar = double>
struct SpinOperatorSetT {
  std::array<Matrix3c<Scalar>, 3> S;   // electron Sx, Sy, Sz
  std::array<Matrix3c<Scalar>, 3> I;   // nuclear Ix, Iy, Iz
  std::array<Matrix9c<Scalar>, 3> S9;  // S (x) 1
  std::array<Matrix9c<Scalar>, 3> I9;  // 1 (x) I
};
using SpinOperatorSet = SpinOperatorSetT<double>;

template <typename Scalar>
Matrix9c<Scalar> kron(const Matrix3c<Scalar>& a, const Matrix3c<Scalar>& b) {
  Matrix9c<Scalar> out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.template block<3, 3>(3 * i, 3 * j) = a(i, j) * b;
  return out;
}

/// Spin-1 matrices in the {+1, 0, -1} basis.
template <typename Scalar = double>
Matrix3c<Scalar> spin1_matrix(int axis) {
  using C = std::complex<Scalar>;
  const Scalar r = Scalar(1) / std::sqrt(Scalar(2));
  Matrix3c<Scalar> m = Matrix3c<Scalar>::Zero();
  switch (axis) {
    case 0:
      m(0, 1) = m(1, 0) = m(1, 2) = m(2, 1) = C(r, 0);
      break;
    case 1:
      m(0, 1) = m(1, 2) = C(0, -r);
      m(1, 0) = m(2, 1) = C(0, r);
      break;
    default:
      m(0, 0) = C(1, 0);
      m(2, 2) = C(-1, 0);
      break;
  }
  return m;
}

template <typename Scalar = double>
SpinOperatorSetT<Scalar> spin1_operators() {
  SpinOperatorSetT<Scalar> ops;
  const Matrix3c<Scalar> id = Matrix3c<Scalar>::Identity();
  for (int a = 0; a < 3; ++a) {
    ops.S[a] = spin1_matrix<Scalar>(a);
    ops.I[a] = spin1_matrix<Scalar>(a);
    ops.S9[a] = kron<Scalar>(ops.S[a], id);
    ops.I9[a] = kron<Scalar>(id, ops.I[a]);
  }
  return ops;
}

/// H = D Sz^2 + ge S.B + Q Iz^2 - gn I.B + S.A.I with a diagonal hyperfine tensor.
template <typename Scalar = double>
Matrix9c<Scalar> build_hamiltonian(const HamiltonianParamsT<Scalar>& p, const MagneticFieldT<Scalar>& field) {
  const auto ops = spin1_operators<Scalar>();
  const auto b = field.cartesian();
  const Matrix3c<Scalar> id = Matrix3c<Scalar>::Identity();
  const std::array<Scalar, 3> hyperfine{p.A_xx, p.A_yy, p.A_zz};

  Matrix9c<Scalar> h = p.D * kron<Scalar>(ops.S[2] * ops.S[2], id) + p.Q * kron<Scalar>(id, ops.I[2] * ops.I[2]);
  for (int a = 0; a < 3; ++a) {
    h += (p.gamma_e * b[a]) * ops.S9[a];
    h -= (p.gamma_n * b[a]) * ops.I9[a];
    h += hyperfine[a] * kron<Scalar>(ops.S[a], ops.I[a]);
  }
  return h;
}

template <typename Scalar, int N>
Scalar hermiticity_error(const SquareC<Scalar, N>& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// Dominant product-basis component of an eigenvector.
struct StateLabel {
  int ms = 0;
  int mi = 0;
  double weight = 0.0;     // |<ms, mi|state>|^2
  bool ambiguous = false;  // the greedy assignment took a non-maximal component

  bool same_state(const StateLabel& o) const { return ms == o.ms && mi == o.mi; }
  std::string str() const;
};

template <typename Scalar, int N>
struct EigenSystemT {
  Eigen::Matrix<Scalar, N, 1> values;  // ascending
  SquareC<Scalar, N> vectors;          // columns
  std::vector<StateLabel> labels;      // empty until labelled
  int sweeps = 0;

  bool labeled() const { return static_cast<int>(labels.size()) == N; }

  /// Index of the state labelled |ms, mi>, or -1.
  int find(int ms, int mi) const {
    for (int k = 0; k < static_cast<int>(labels.size()); ++k)
      if (labels[k].ms == ms && labels[k].mi == mi) return k;
    return -1;
  }
};
using EigenSystem = EigenSystemT<double, 9>;

struct JacobiOptions {
  double relative_threshold = 1e-12;  // off-diagonal Frobenius norm relative to ||H||_F
  int max_sweeps = 100;
};

namespace detail {

// Multiply the column by a unit phase so its largest component is real positive.
template <typename Scalar, int N>
void normalize_phase(Eigen::Matrix<std::complex<Scalar>, N, 1>& v) {
  int best = 0;
  Scalar best_abs = std::abs(v[0]);
  for (int k = 1; k < v.size(); ++k) {
    const Scalar a = std::abs(v[k]);
    if (a > best_abs * (Scalar(1) + Scalar(1e-12))) {
      best = k;
      best_abs = a;
    }
  }
  if (best_abs > Scalar(0)) v *= std::conj(v[best]) / best_abs;
  v[best] = std::complex<Scalar>(std::abs(v[best]), Scalar(0));
}

}  // namespace detail

/// Cyclic Jacobi diagonalisation of a Hermitian matrix.
///
/// Each rotation first removes the phase of the pivot a_pq and then applies a
/// real Givens rotation. Sweeps stop once the off-diagonal Frobenius norm drops
/// below `relative_threshold * ||H||_F`. Eigenvalues come back ascending;
/// exactly degenerate values are ordered by the phase-normalised real parts of
/// their vectors, largest first, so the output is deterministic.
template <typename Scalar, int N>
EigenSystemT<Scalar, N> eigensolve(const SquareC<Scalar, N>& h, const JacobiOptions& opt = {}) {
  using C = std::complex<Scalar>;
  using std::abs;
  using std::sqrt;

  const Scalar scale = h.norm();
  if (hermiticity_error<Scalar, N>(h) > Scalar(1e-12) * std::max(Scalar(1), h.cwiseAbs().maxCoeff()))
    throw InputError("eigensolve: matrix is not Hermitian");

  SquareC<Scalar, N> a = h;
  SquareC<Scalar, N> v = SquareC<Scalar, N>::Identity();
  const Scalar threshold = Scalar(opt.relative_threshold) * scale;

  auto off_norm = [&] {
    Scalar s = 0;
    for (int p = 0; p < N; ++p)
      for (int q = 0; q < N; ++q)
        if (p != q) s += std::norm(a(p, q));
    return sqrt(s);
  };

  int sweep = 0;
  bool converged = false;
  for (; sweep <= opt.max_sweeps; ++sweep) {
    if (off_norm() <= threshold) {
      converged = true;
      break;
    }
    if (sweep == opt.max_sweeps) break;
    for (int p = 0; p < N - 1; ++p) {
      for (int q = p + 1; q < N; ++q) {
        const C apq = a(p, q);
        const Scalar mag = abs(apq);
        if (mag == Scalar(0)) continue;
        const C u = apq / mag;
        const Scalar app = std::real(a(p, p));
        const Scalar aqq = std::real(a(q, q));
        const Scalar theta = (aqq - app) / (Scalar(2) * mag);
        const Scalar t = (theta >= 0 ? Scalar(1) : Scalar(-1)) / (abs(theta) + sqrt(theta * theta + Scalar(1)));
        const Scalar c = Scalar(1) / sqrt(t * t + Scalar(1));
        const Scalar s = t * c;
        const C cu = std::conj(u);

        // Columns: A <- A G with G_pp = c, G_pq = s, G_qp = -s conj(u), G_qq = c conj(u).
        for (int k = 0; k < N; ++k) {
          const C akp = a(k, p);
          const C akq = a(k, q);
          a(k, p) = c * akp - s * cu * akq;
          a(k, q) = s * akp + c * cu * akq;
          const C vkp = v(k, p);
          const C vkq = v(k, q);
          v(k, p) = c * vkp - s * cu * vkq;
          v(k, q) = s * vkp + c * cu * vkq;
        }
        // Rows: A <- G^H A.
        for (int k = 0; k < N; ++k) {
          const C apk = a(p, k);
          const C aqk = a(q, k);
          a(p, k) = c * apk - s * u * aqk;
          a(q, k) = s * apk + c * u * aqk;
        }
        a(p, q) = a(q, p) = C(0);
        a(p, p) = C(std::real(a(p, p)), 0);
        a(q, q) = C(std::real(a(q, q)), 0);
      }
    }
  }
  if (!converged) throw ConvergenceError("eigensolve: Jacobi sweeps did not converge");

  std::array<int, N> order;
  std::iota(order.begin(), order.end(), 0);
  for (int k = 0; k < N; ++k) {
    Eigen::Matrix<C, N, 1> col = v.col(k);
    detail::normalize_phase<Scalar, N>(col);
    v.col(k) = col;
  }
  const Scalar tie = Scalar(1e-12) * std::max(Scalar(1), scale);
  auto before = [&](int i, int j) {
    const Scalar li = std::real(a(i, i));
    const Scalar lj = std::real(a(j, j));
    if (abs(li - lj) > tie) return li < lj;
    for (int k = 0; k < N; ++k) {
      const Scalar ri = std::real(v(k, i));
      const Scalar rj = std::real(v(k, j));
      if (abs(ri - rj) > Scalar(1e-9)) return ri > rj;
    }
    return i < j;
  };
  // Insertion sort keeps the tolerance-based comparison well behaved for small N.
  for (int i = 1; i < N; ++i)
    for (int j = i; j > 0 && before(order[j], order[j - 1]); --j) std::swap(order[j], order[j - 1]);

  EigenSystemT<Scalar, N> out;
  out.sweeps = sweep;
  for (int k = 0; k < N; ++k) {
    out.values[k] = std::real(a(order[k], order[k]));
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

/// Greedy dominant-component labelling: (state, basis) pairs are taken in
/// descending |amplitude|^2, each state and basis vector used once.
EigenSystem label_states(const EigenSystem& eig);

/// Adiabatic labelling: each state inherits the label of the reference state
/// it overlaps most (greedy, descending overlap). A state below `min_overlap`
/// is still accepted when it and one partner keep their joint two-state
/// subspace (a nearly degenerate pair rotating); both are then flagged
/// ambiguous. Otherwise throws StepSizeError.
EigenSystem label_states_tracked(const EigenSystem& eig, const EigenSystem& reference, double min_overlap = 0.5);

/// Parameters, field and the labelled eigensystem of the 9-level Hamiltonian.
struct GroundState {
  HamiltonianParams params;
  MagneticField field;
  Matrix9cd hamiltonian;
  EigenSystem eig;

  /// True for states whose dominant label has mS = 0.
  bool lower(int k) const { return eig.labels[k].ms == 0; }
};

GroundState solve_ground_state(const HamiltonianParams& params, const MagneticField& field);

}  // namespace nvcpt
