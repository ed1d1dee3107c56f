#include "nvcpt/lineshape.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "nvcpt/least_squares.hpp"

namespace nvcpt {

void OdmrModelParams::validate() const {
  for (int i = 0; i < 3; ++i) {
    if (!std::isfinite(nu0[i])) throw InputError("odmr: nu0 must be finite");
    if (!(sigma[i] > 0)) throw InputError("odmr: sigma must be positive");
  }
  if (!std::isfinite(C)) throw InputError("odmr: C must be finite");
  if (!(alpha >= 0 && alpha < 1.0 / 9.0)) throw InputError("odmr: alpha must lie in [0, 1/9)");
  if (!(Delta > 0)) throw InputError("odmr: Delta must be positive");
  if (two_group && !(Delta_6 > 0 && Delta_3 > 0)) throw InputError("odmr: group splittings must be positive");
  if (!std::isfinite(offset)) throw InputError("odmr: offset must be finite");
}

OdmrVector pack(const OdmrModelParams& p) {
  OdmrVector v;
  for (int i = 0; i < 3; ++i) {
    v[kNu0 + i] = p.nu0[i];
    v[kSigma + i] = p.sigma[i];
  }
  v[kAmp] = p.C;
  v[kAlpha] = p.alpha;
  v[kDelta] = p.Delta;
  v[kOffset] = p.offset;
  return v;
}

OdmrModelParams unpack(const OdmrVector& v, const OdmrModelParams& like) {
  OdmrModelParams p = like;
  for (int i = 0; i < 3; ++i) {
    p.nu0[i] = v[kNu0 + i];
    p.sigma[i] = v[kSigma + i];
  }
  p.C = v[kAmp];
  p.alpha = v[kAlpha];
  p.Delta = v[kDelta];
  p.offset = v[kOffset];
  return p;
}

const char* odmr_param_name(int index) {
  static const char* names[kOdmrParams] = {"nu0_1",   "nu0_2", "nu0_3", "sigma_1", "sigma_2",
                                           "sigma_3", "C",     "alpha", "Delta",   "offset"};
  return names[index];
}

std::array<double, 3> weight_groups(double alpha) { return {1.0 - 9.0 * alpha, 4.5 * alpha, 4.5 * alpha}; }

namespace {

inline double lorentz(double x, double s) { return s / (x * x + s * s); }
inline double lorentz_dx(double x, double s) {
  const double d = x * x + s * s;
  return -2.0 * x * s / (d * d);
}
inline double lorentz_ds(double x, double s) {
  const double d = x * x + s * s;
  return (x * x - s * s) / (d * d);
}

// Sideband groups as (weight per side, half-splitting, d weight / d alpha, splitting follows Delta).
struct Group {
  double w;
  double half;
  double dw;
  bool tracks_delta;
};

std::vector<Group> groups(const OdmrModelParams& p) {
  if (p.two_group) return {{3.0 * p.alpha, 0.5 * p.Delta_6, 3.0, false}, {1.5 * p.alpha, 0.5 * p.Delta_3, 1.5, false}};
  return {{4.5 * p.alpha, 0.5 * p.Delta, 4.5, true}};
}

}  // namespace

double odmr_profile(double nu, const OdmrModelParams& p) {
  const double w0 = 1.0 - 9.0 * p.alpha;
  double main = 0.0;
  double side = 0.0;
  for (int i = 0; i < 3; ++i) main += lorentz(nu - p.nu0[i], p.sigma[i]);
  for (const auto& g : groups(p)) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) s += lorentz(nu - p.nu0[i] + g.half, p.sigma[i]) + lorentz(nu - p.nu0[i] - g.half, p.sigma[i]);
    side += g.w * s;
  }
  return p.C * (w0 * main + side) + p.offset;
}

OdmrVector odmr_gradient(double nu, const OdmrModelParams& p) {
  OdmrVector g = OdmrVector::Zero();
  const double w0 = 1.0 - 9.0 * p.alpha;
  double bracket = 0.0;
  double dalpha = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double x = nu - p.nu0[i];
    const double s = p.sigma[i];
    const double l = lorentz(x, s);
    bracket += w0 * l;
    dalpha += -9.0 * l;
    g[kNu0 + i] += -p.C * w0 * lorentz_dx(x, s);
    g[kSigma + i] += p.C * w0 * lorentz_ds(x, s);
  }
  for (const auto& gr : groups(p)) {
    for (int i = 0; i < 3; ++i) {
      const double s = p.sigma[i];
      const double xl = nu - p.nu0[i] + gr.half;
      const double xu = nu - p.nu0[i] - gr.half;
      const double ll = lorentz(xl, s);
      const double lu = lorentz(xu, s);
      bracket += gr.w * (ll + lu);
      dalpha += gr.dw * (ll + lu);
      g[kNu0 + i] += -p.C * gr.w * (lorentz_dx(xl, s) + lorentz_dx(xu, s));
      g[kSigma + i] += p.C * gr.w * (lorentz_ds(xl, s) + lorentz_ds(xu, s));
      if (gr.tracks_delta) g[kDelta] += p.C * gr.w * 0.5 * (lorentz_dx(xl, s) - lorentz_dx(xu, s));
    }
  }
  g[kAmp] = bracket;
  g[kAlpha] = p.C * dalpha;
  g[kOffset] = 1.0;
  return g;
}

std::vector<double> sideband_positions(const OdmrModelParams& p) {
  std::vector<double> out;
  for (const auto& g : groups(p))
    for (int i = 0; i < 3; ++i) {
      out.push_back(p.nu0[i] - g.half);
      out.push_back(p.nu0[i] + g.half);
    }
  std::sort(out.begin(), out.end());
  return out;
}

void Spectrum::validate() const {
  if (frequencies.size() != values.size()) throw InputError("spectrum: frequency and value columns differ in length");
  if (frequencies.empty()) throw InputError("spectrum: no data points");
  for (size_t i = 0; i < frequencies.size(); ++i) {
    if (!std::isfinite(frequencies[i]) || !std::isfinite(values[i])) throw InputError("spectrum: non-finite entry");
    if (i > 0 && !(frequencies[i] > frequencies[i - 1]))
      throw InputError("spectrum: frequencies must be strictly ascending");
  }
}

std::vector<double> make_grid(double start, double stop, double step) {
  if (!(step > 0) || !(stop >= start)) throw InputError("grid: need step > 0 and stop >= start");
  const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
  if (n > 10'000'000) throw InputError("grid: too many points");
  std::vector<double> g(static_cast<size_t>(n));
  for (long i = 0; i < n; ++i) g[static_cast<size_t>(i)] = start + static_cast<double>(i) * step;
  return g;
}

Spectrum synth_spectrum(const std::vector<double>& grid, const OdmrModelParams& p, double noise_sigma,
                        std::uint64_t seed) {
  p.validate();
  if (!(noise_sigma >= 0)) throw InputError("synth: noise_sigma must be >= 0");
  Spectrum s;
  s.frequencies = grid;
  s.noise_sigma = noise_sigma;
  s.values.resize(grid.size());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (size_t i = 0; i < grid.size(); ++i) {
    s.values[i] = odmr_profile(grid[i], p);
    if (noise_sigma > 0) s.values[i] += noise_sigma * normal(rng);
  }
  s.validate();
  return s;
}

namespace {

double median(std::vector<double> v) {
  const size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + static_cast<long>(n / 2), v.end());
  double m = v[n / 2];
  if (n % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<long>(n / 2)));
  return m;
}

struct Peak {
  double nu;
  double height;
  double sigma;
};

}  // namespace

InitialGuess initial_guess(const Spectrum& s, const GuessOptions& opt) {
  s.validate();
  const size_t n = s.size();
  if (n < 5) throw InputError("initial_guess: need at least 5 points");

  InitialGuess out;
  out.baseline = median(s.values);
  std::vector<double> d(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) d[i] = s.values[i + 1] - s.values[i];
  const double md = median(d);
  for (auto& x : d) x = std::abs(x - md);
  out.noise_floor = 1.4826 * median(d) / std::sqrt(2.0);

  std::vector<double> y(n);
  for (size_t i = 0; i < n; ++i) y[i] = s.values[i] - out.baseline;
  const double ymax = *std::max_element(y.begin(), y.end());
  const double threshold = std::max(opt.k * out.noise_floor, opt.min_relative * ymax);
  if (!(ymax > 0) || ymax <= opt.k * out.noise_floor) throw InputError("initial_guess: no peaks found");

  std::vector<size_t> cand;
  for (size_t i = 1; i + 1 < n; ++i)
    if (y[i] > threshold && y[i] >= y[i - 1] && y[i] > y[i + 1]) cand.push_back(i);
  std::stable_sort(cand.begin(), cand.end(), [&](size_t a, size_t b) { return y[a] > y[b]; });

  const double step = (s.frequencies.back() - s.frequencies.front()) / static_cast<double>(n - 1);
  auto crossing = [&](size_t i, int dir) {
    const double half = 0.5 * y[i];
    long j = static_cast<long>(i);
    while (j + dir >= 0 && j + dir < static_cast<long>(n) && y[static_cast<size_t>(j + dir)] > half) j += dir;
    const long k = j + dir;
    if (k < 0 || k >= static_cast<long>(n)) return s.frequencies[static_cast<size_t>(j)];
    const double y0 = y[static_cast<size_t>(j)], y1 = y[static_cast<size_t>(k)];
    const double f0 = s.frequencies[static_cast<size_t>(j)], f1 = s.frequencies[static_cast<size_t>(k)];
    return f0 + (f1 - f0) * (y0 - half) / (y0 - y1);
  };

  std::vector<Peak> peaks;
  for (size_t i : cand) {
    const double sig = std::max(0.5 * (crossing(i, 1) - crossing(i, -1)), step);
    const double nu = s.frequencies[i];
    bool near = false;
    for (const auto& p : peaks)
      if (std::abs(p.nu - nu) < 2.0 * std::max(p.sigma, sig)) near = true;
    if (near) continue;
    peaks.push_back({nu, y[i], sig});
    if (peaks.size() == 3) break;
  }
  out.peaks_found = static_cast<int>(peaks.size());
  if (peaks.empty()) throw InputError("initial_guess: no peaks found");

  double amp = 0.0;
  for (const auto& p : peaks) amp += p.height * p.sigma;
  amp /= static_cast<double>(peaks.size());

  while (peaks.size() < 3) {
    auto widest = std::max_element(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.sigma < b.sigma; });
    Peak p = *widest;
    const double half = 0.5 * p.sigma;
    widest->nu = p.nu - half;
    widest->sigma = half;
    peaks.push_back({p.nu + half, p.height, half});
  }
  std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.nu < b.nu; });

  OdmrModelParams& g = out.params;
  for (int i = 0; i < 3; ++i) {
    g.nu0[i] = peaks[static_cast<size_t>(i)].nu;
    g.sigma[i] = peaks[static_cast<size_t>(i)].sigma;
  }
  g.C = amp / weight_groups(g.alpha)[0];
  g.offset = out.baseline;
  return out;
}

FitResult fit_spectrum(const Spectrum& s, const OdmrModelParams& init, const FitMask& mask, const FitOptions& opt) {
  s.validate();
  init.validate();
  const int m = static_cast<int>(s.size());

  std::vector<bool> frozen(mask.frozen.begin(), mask.frozen.end());
  if (init.two_group) frozen[kDelta] = true;
  int nfree = 0;
  for (bool f : frozen) nfree += f ? 0 : 1;
  if (m < nfree) throw InputError("fit: fewer points than free parameters");

  LmProblem pb;
  pb.frozen = frozen;
  pb.residual = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* J) {
    const OdmrModelParams p = unpack(x, init);
    r.resize(m);
    if (J) J->resize(m, kOdmrParams);
    for (int i = 0; i < m; ++i) {
      r[i] = odmr_profile(s.frequencies[static_cast<size_t>(i)], p) - s.values[static_cast<size_t>(i)];
      if (J) J->row(i) = odmr_gradient(s.frequencies[static_cast<size_t>(i)], p).transpose();
    }
  };
  const double inf = std::numeric_limits<double>::infinity();
  pb.lower = Eigen::VectorXd::Constant(kOdmrParams, -inf);
  pb.upper = Eigen::VectorXd::Constant(kOdmrParams, inf);
  for (int i = 0; i < 3; ++i) pb.lower[kSigma + i] = 1e-9;
  pb.lower[kAlpha] = 0.0;
  pb.upper[kAlpha] = 1.0 / 9.0 - 1e-12;
  pb.lower[kDelta] = 1e-9;

  double scale = 0.0;
  for (double v : s.values) scale = std::max(scale, std::abs(v));
  LmOptions lo;
  lo.max_iterations = opt.max_iterations;
  lo.cost_rtol = opt.cost_rtol;
  lo.gradient_tol = opt.gradient_tol;
  lo.cost_atol = static_cast<double>(m) * std::pow(1e-13 * scale, 2);

  const LmResult lm = levenberg_marquardt(pb, pack(init), lo);
  FitResult fr;
  fr.params = unpack(lm.x, init);
  fr.uncertainty = lm.uncertainty;
  fr.residual_rms = std::sqrt(lm.cost / static_cast<double>(m));
  fr.gradient_norm = lm.gradient_norm;
  fr.iterations = lm.iterations;
  fr.converged = lm.converged;
  fr.cost_history = lm.cost_history;
  fr.message = lm.message;
  return fr;
}

}  // namespace nvcpt
