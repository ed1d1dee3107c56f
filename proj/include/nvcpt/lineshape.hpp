#pragma once

// Three-line ODMR profile with 13C hyperfine sidebands: a sum of nine
// unnormalised Lorentzians sigma / ((nu - nu0)^2 + sigma^2).

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nvcpt/types.hpp"

namespace nvcpt {

struct OdmrModelParams {
  std::array<double, 3> nu0{2870.0, 2875.0, 2880.0};  // MHz
  std::array<double, 3> sigma{0.4, 0.4, 0.4};         // MHz, half-width
  double C = 1.0;
  double alpha = 0.012;   // 13C site occupancy
  double Delta = 13.4;    // MHz
  double offset = 0.0;    // additive baseline

  // Two-group sideband mode: 6 sites at Delta_6 and 3 sites at Delta_3 instead of 9 at Delta.
  bool two_group = false;
  double Delta_6 = 13.7;
  double Delta_3 = 12.8;

  void validate() const;
};

/// Parameter vector layout: nu0[0..2], sigma[3..5], C, alpha, Delta, offset.
inline constexpr int kOdmrParams = 10;
enum OdmrIndex { kNu0 = 0, kSigma = 3, kAmp = 6, kAlpha = 7, kDelta = 8, kOffset = 9 };

using OdmrVector = Eigen::Matrix<double, kOdmrParams, 1>;

OdmrVector pack(const OdmrModelParams& p);
OdmrModelParams unpack(const OdmrVector& v, const OdmrModelParams& like);
const char* odmr_param_name(int index);

/// Main, lower-sideband and upper-sideband weights: (1 - 9a, 9a/2, 9a/2).
std::array<double, 3> weight_groups(double alpha);

double odmr_profile(double nu, const OdmrModelParams& p);
/// d profile / d parameter in pack() order.
OdmrVector odmr_gradient(double nu, const OdmrModelParams& p);

/// Sideband centres nu0_i -+ Delta/2 (both groups in two-group mode), ascending.
std::vector<double> sideband_positions(const OdmrModelParams& p);

struct Spectrum {
  std::vector<double> frequencies;
  std::vector<double> values;
  double noise_sigma = 0.0;

  void validate() const;
  size_t size() const { return frequencies.size(); }
};

std::vector<double> make_grid(double start, double stop, double step);

Spectrum synth_spectrum(const std::vector<double>& grid, const OdmrModelParams& p, double noise_sigma,
                        std::uint64_t seed);

struct GuessOptions {
  double k = 5.0;                 // peak threshold in units of the noise floor
  double min_relative = 0.10;     // and of the tallest peak
};

struct InitialGuess {
  OdmrModelParams params;
  int peaks_found = 0;
  double noise_floor = 0.0;
  double baseline = 0.0;
};

InitialGuess initial_guess(const Spectrum& s, const GuessOptions& opt = {});

struct FitMask {
  std::array<bool, kOdmrParams> frozen{};

  static FitMask defaults() {
    FitMask m;
    m.frozen[kDelta] = true;
    return m;
  }
};

struct FitOptions {
  int max_iterations = 200;
  double cost_rtol = 1e-10;
  double gradient_tol = 1e-8;
};

struct FitResult {
  OdmrModelParams params;
  OdmrVector uncertainty = OdmrVector::Zero();
  double residual_rms = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> cost_history;
  std::string message;
};

FitResult fit_spectrum(const Spectrum& s, const OdmrModelParams& init, const FitMask& mask = FitMask::defaults(),
                       const FitOptions& opt = {});

}  // namespace nvcpt
