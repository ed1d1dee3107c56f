#pragma once

// Three-level reduction of a pair of transitions sharing one level.

#include <array>
#include <string>

#include "nvcpt/dynamics.hpp"

namespace nvcpt {

enum class TripleKind { lambda, vee };

struct ReducedLambda {
  TripleKind kind = TripleKind::lambda;
  StateLabel shared;   // common upper (lambda) or lower (vee) level
  StateLabel first;
  StateLabel second;
  int shared_index = -1;
  int first_index = -1;
  int second_index = -1;
  double frequency1 = 0.0;  // |E_shared - E_first|, MHz
  double frequency2 = 0.0;
  double element1 = 0.0;    // |<shared| S.d |first>|
  double element2 = 0.0;
  double splitting = 0.0;   // E_second - E_first, MHz
};

ReducedLambda reduce_lambda(const OpenSystem& sys, const std::array<StateLabel, 3>& levels);
/// Triple formed by two named transitions with one common level.
ReducedLambda reduce_lambda(const OpenSystem& sys, const std::string& transition1, const std::string& transition2);

// Ideal Lambda system: levels g1 = 0, g2 = 1, e = 2 in the frame of the two tones.
struct LambdaParams {
  double omega1 = 1.0;       // Rabi frequency on g1-e, MHz
  double omega2 = 1.0;       // Rabi frequency on g2-e, MHz
  double delta1 = 0.0;       // one-photon detunings, MHz
  double delta2 = 0.0;
  double gamma = 1.0;        // decay e -> g1 and e -> g2, each, 1/us
  double gamma_ground = 0.0; // ground coherence dephasing, 1/us

  void validate() const;
};

LindbladSystem<3> lambda_system(const LambdaParams& p);

/// Normalised dark state proportional to omega2 |g1> - omega1 |g2>.
Eigen::Vector3cd dark_state(const LambdaParams& p);

struct LambdaState {
  Eigen::Matrix3cd rho;
  double excited = 0.0;
  double dark_overlap = 0.0;  // <D| rho |D>
};

LambdaState lambda_steady_state(const LambdaParams& p);
/// RK4 evolution from rho0 for `duration` us.
LambdaState lambda_evolve(const LambdaParams& p, const Eigen::Matrix3cd& rho0, double duration, double dt = 0.001);

}  // namespace nvcpt
