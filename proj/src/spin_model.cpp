#include "nvcpt/spin_model.hpp"

#include <algorithm>
#include <tuple>

namespace nvcpt {

std::string StateLabel::str() const {
  auto sgn = [](int m) { return m > 0 ? std::string("+1") : m < 0 ? std::string("-1") : std::string("0"); };
  return "|" + sgn(ms) + "," + sgn(mi) + ">";
}

namespace {

// Greedy assignment over a 9x9 score table; rows are eigenstates, columns are candidates.
std::array<int, kLevels> greedy_assign(const Eigen::Matrix<double, kLevels, kLevels>& score) {
  std::vector<std::tuple<double, int, int>> pairs;
  pairs.reserve(kLevels * kLevels);
  for (int k = 0; k < kLevels; ++k)
    for (int b = 0; b < kLevels; ++b) pairs.emplace_back(score(k, b), k, b);
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) {
    if (std::get<0>(x) != std::get<0>(y)) return std::get<0>(x) > std::get<0>(y);
    if (std::get<1>(x) != std::get<1>(y)) return std::get<1>(x) < std::get<1>(y);
    return std::get<2>(x) < std::get<2>(y);
  });
  std::array<int, kLevels> assigned;
  assigned.fill(-1);
  std::array<bool, kLevels> used{};
  int left = kLevels;
  for (const auto& [w, k, b] : pairs) {
    if (assigned[k] >= 0 || used[b]) continue;
    assigned[k] = b;
    used[b] = true;
    if (--left == 0) break;
  }
  return assigned;
}

}  // namespace

EigenSystem label_states(const EigenSystem& eig) {
  Eigen::Matrix<double, kLevels, kLevels> w;
  for (int k = 0; k < kLevels; ++k)
    for (int b = 0; b < kLevels; ++b) w(k, b) = std::norm(eig.vectors(b, k));
  const auto assigned = greedy_assign(w);

  EigenSystem out = eig;
  out.labels.assign(kLevels, StateLabel{});
  for (int k = 0; k < kLevels; ++k) {
    const int b = assigned[k];
    int best = 0;
    w.row(k).maxCoeff(&best);
    out.labels[k] = StateLabel{basis_ms(b), basis_mi(b), w(k, b), w(k, best) > w(k, b)};
  }
  return out;
}

EigenSystem label_states_tracked(const EigenSystem& eig, const EigenSystem& reference, double min_overlap) {
  if (!reference.labeled()) throw InputError("label_states_tracked: reference is not labelled");
  const Matrix9cd ov = eig.vectors.adjoint() * reference.vectors;
  Eigen::Matrix<double, kLevels, kLevels> score = ov.cwiseAbs2();
  const auto assigned = greedy_assign(score);

  EigenSystem out = eig;
  out.labels.assign(kLevels, StateLabel{});
  for (int k = 0; k < kLevels; ++k) {
    const int j = assigned[k];
    bool mixed = false;
    if (score(k, j) < min_overlap) {
      // a nearly degenerate pair may rotate inside its own subspace; accept if the pair subspace is kept
      double block = 0;
      for (int q = 0; q < kLevels; ++q) {
        if (q == k) continue;
        const int jq = assigned[q];
        block = std::max(block, 0.5 * (score(k, j) + score(k, jq) + score(q, j) + score(q, jq)));
      }
      if (block < min_overlap)
        throw StepSizeError("label tracking lost: overlap " + std::to_string(score(k, j)) + " below " +
                            std::to_string(min_overlap) + "; refine the grid");
      mixed = true;
    }
    StateLabel l = reference.labels[j];
    const int b = basis_index(l.ms, l.mi);
    double best = 0;
    for (int i = 0; i < kLevels; ++i) best = std::max(best, std::norm(eig.vectors(i, k)));
    l.weight = std::norm(eig.vectors(b, k));
    l.ambiguous = mixed || best > l.weight;
    out.labels[k] = l;
  }
  return out;
}

GroundState solve_ground_state(const HamiltonianParams& params, const MagneticField& field) {
  params.validate();
  field.validate();
  GroundState g;
  g.params = params;
  g.field = field;
  g.hamiltonian = build_hamiltonian(params, field);
  g.eig = label_states(eigensolve<double, kLevels>(g.hamiltonian));
  return g;
}

}  // namespace nvcpt
