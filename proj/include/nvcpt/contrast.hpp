#pragma once

// CPT dip metrics, 13C Larmor frequency and wing-modulation period.

#include <string>
#include <vector>

#include "nvcpt/types.hpp"

namespace nvcpt {

struct ContrastReport {
  double f_r = 0.0;        // MHz
  size_t index = 0;        // grid index of f_r
  double A_EIT = 0.0;      // dip depth at f_r relative to the shifted single-tone trace
  double A_ODMR = 0.0;     // single-tone amplitude at f_r above its baseline
  double delta_A = 0.0;    // two-tone minus single-tone far-detuned baseline
  double apparent = 0.0;   // A_EIT / A_ODMR
  double true_contrast = 0.0;  // A_EIT / (A_ODMR + delta_A)
};

struct ContrastOptions {
  int edge_points = 3;          // per side, for the far-detuned baselines
  double min_relative_dip = 1e-6;
};

/// Both ratios from the three amplitudes.
ContrastReport contrast_from_amplitudes(double A_EIT, double A_ODMR, double delta_A);

/// Two-tone and single-tone scans on a shared grid. The residual
/// r(f) = single(f) + delta_A - two(f) peaks at the dip; f_r is its argmax.
ContrastReport contrast_metrics(const std::vector<double>& grid, const std::vector<double>& two_tone,
                                const std::vector<double>& single_tone, const ContrastOptions& opt = {});

struct DipFit {
  double center = 0.0;      // MHz
  double depth = 0.0;       // below the background
  double half_width = 0.0;  // MHz, Lorentzian HWHM
  double rms = 0.0;
  bool converged = false;
};

/// Lorentzian dip on a quadratic background, fitted by least squares.
DipFit fit_dip(const std::vector<double>& grid, const std::vector<double>& signal);

enum class LarmorMode { standard, literal };

inline constexpr double kLarmorStandard = 1.0705;  // kHz/G
inline constexpr double kLarmorLiteral = 0.535;    // kHz/G

const char* to_string(LarmorMode m);
LarmorMode parse_larmor_mode(const std::string& s);
double larmor_frequency(double field_gauss, LarmorMode mode = LarmorMode::standard);

struct ModulationResult {
  double period_khz = 0.0;
  double f_r = 0.0;
  double half_width = 0.0;  // MHz, of the central dip
  int extrema = 0;
};

struct ModulationOptions {
  double prominence = 0.25;    // fraction of the detrended wing swing
  double exclusion = 2.0;      // dip half-widths excluded around f_r
};

/// Extremum spacing of the wing modulation on either side of the central dip.
ModulationResult modulation_period(const std::vector<double>& grid, const std::vector<double>& signal,
                                   const ModulationOptions& opt = {});

}  // namespace nvcpt
