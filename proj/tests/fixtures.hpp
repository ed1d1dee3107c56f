#pragma once

// Hand-built scans shared by the contrast, cli and acceptance tests.

#include <cmath>
#include <vector>

namespace fixtures {

// cos^2 bump of unit height, exactly zero outside |x| < w
inline double bump(double x, double w) {
  if (std::abs(x) >= w) return 0.0;
  const double c = std::cos(0.5 * M_PI * x / w);
  return c * c;
}

struct ContrastScans {
  std::vector<double> grid;
  std::vector<double> two_tone;
  std::vector<double> single_tone;
};

// Single-tone line of height a_odmr, pump baseline shift delta_a and a dip of depth a_eit,
// all centred at f0 on a 41-point grid. Edges are flat so the baselines are exact.
inline ContrastScans contrast_scans(double a_eit, double a_odmr, double delta_a, double f0 = 2873.98,
                                    double base = 0.25) {
  ContrastScans s;
  for (int i = 0; i <= 40; ++i) {
    const double x = 0.025 * (i - 20);
    s.grid.push_back(f0 + x);
    const double single = base + a_odmr * bump(x, 0.3);
    s.single_tone.push_back(single);
    s.two_tone.push_back(single + delta_a - a_eit * bump(x, 0.1));
  }
  return s;
}

// The pair that yields apparent 0.98 and true 0.35: A_EIT = 0.98, A_ODMR = 1, delta_A = 1.8.
inline ContrastScans reference_contrast() { return contrast_scans(0.98, 1.0, 1.8); }

// A dip with a cosine wing modulation of the given period (kHz) on a sloped background.
inline void modulated_dip(double period_khz, std::vector<double>& grid, std::vector<double>& signal,
                          double f0 = 2873.98) {
  grid.clear();
  signal.clear();
  const double p = period_khz * 1e-3;
  for (int i = 0; i <= 600; ++i) {
    const double x = 0.001 * (i - 300);
    grid.push_back(f0 + x);
    const double dip = 0.5 / (1 + std::pow(x / 0.01, 2));
    const double wing = 0.05 * std::cos(2 * M_PI * x / p) * std::exp(-std::abs(x) / 0.2);
    signal.push_back(1.0 + 0.3 * x - dip + wing);
  }
}

}  // namespace fixtures
