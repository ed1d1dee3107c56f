#include "nvcpt/contrast.hpp"

#include <algorithm>
#include <cmath>

#include "nvcpt/least_squares.hpp"

namespace nvcpt {

ContrastReport contrast_from_amplitudes(double A_EIT, double A_ODMR, double delta_A) {
  ContrastReport r;
  r.A_EIT = A_EIT;
  r.A_ODMR = A_ODMR;
  r.delta_A = delta_A;
  if (A_ODMR == 0.0 || A_ODMR + delta_A == 0.0) throw InputError("contrast: zero denominator");
  r.apparent = A_EIT / A_ODMR;
  r.true_contrast = A_EIT / (A_ODMR + delta_A);
  if (!std::isfinite(r.apparent) || !std::isfinite(r.true_contrast)) throw InvariantError("contrast: non-finite ratio");
  return r;
}

ContrastReport contrast_metrics(const std::vector<double>& grid, const std::vector<double>& two,
                                const std::vector<double>& single, const ContrastOptions& opt) {
  const size_t n = grid.size();
  if (two.size() != n || single.size() != n) throw InputError("contrast: scans must share the probe grid");
  const size_t k = static_cast<size_t>(std::max(1, opt.edge_points));
  if (n < 2 * k + 1) throw InputError("contrast: grid too short for the edge baselines");
  for (size_t i = 1; i < n; ++i)
    if (!(grid[i] > grid[i - 1])) throw InputError("contrast: grid must be strictly ascending");

  auto edge_mean = [&](const std::vector<double>& v) {
    double s = 0;
    for (size_t i = 0; i < k; ++i) s += v[i] + v[n - 1 - i];
    return s / static_cast<double>(2 * k);
  };
  const double base_single = edge_mean(single);
  const double delta_A = edge_mean(two) - base_single;

  size_t best = k;
  double best_r = -INFINITY;
  double scale = 0.0;
  for (size_t i = 0; i < n; ++i) scale = std::max({scale, std::abs(single[i] - base_single), std::abs(two[i])});
  for (size_t i = k; i + k < n; ++i) {
    const double r = single[i] + delta_A - two[i];
    if (r > best_r) {
      best_r = r;
      best = i;
    }
  }
  if (!(best_r > opt.min_relative_dip * std::max(scale, 1e-300))) throw InputError("contrast: no dip detected");

  ContrastReport rep = contrast_from_amplitudes(best_r, single[best] - base_single, delta_A);
  rep.f_r = grid[best];
  rep.index = best;
  return rep;
}

const char* to_string(LarmorMode m) { return m == LarmorMode::standard ? "standard" : "literal"; }

LarmorMode parse_larmor_mode(const std::string& s) {
  if (s == "standard") return LarmorMode::standard;
  if (s == "literal") return LarmorMode::literal;
  throw InputError("larmor mode must be 'standard' or 'literal' (got '" + s + "')");
}

double larmor_frequency(double b, LarmorMode mode) {
  if (!(b >= 0) || !std::isfinite(b)) throw InputError("larmor: field must be finite and >= 0");
  return (mode == LarmorMode::standard ? kLarmorStandard : kLarmorLiteral) * b;
}

namespace {

// Least-squares quadratic through the selected points, evaluated everywhere.
std::vector<double> quadratic_trend(const std::vector<double>& x, const std::vector<double>& y,
                                    const std::vector<bool>& use) {
  const double x0 = 0.5 * (x.front() + x.back());
  const double sx = std::max(1e-300, 0.5 * (x.back() - x.front()));
  Eigen::MatrixXd a(0, 3);
  std::vector<double> rows;
  int m = 0;
  for (size_t i = 0; i < x.size(); ++i) m += use[i];
  a.resize(m, 3);
  Eigen::VectorXd b(m);
  for (size_t i = 0, r = 0; i < x.size(); ++i) {
    if (!use[i]) continue;
    const double u = (x[i] - x0) / sx;
    a.row(static_cast<long>(r)) << 1.0, u, u * u;
    b[static_cast<long>(r)] = y[i];
    ++r;
  }
  const Eigen::Vector3d c = a.colPivHouseholderQr().solve(b);
  std::vector<double> out(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const double u = (x[i] - x0) / sx;
    out[i] = c[0] + c[1] * u + c[2] * u * u;
  }
  return out;
}

// Turning points of y[lo, hi) with hysteresis `thr`, boundary points excluded.
std::vector<size_t> turning_points(const std::vector<double>& y, size_t lo, size_t hi, double thr) {
  std::vector<size_t> out;
  if (hi <= lo + 2) return out;
  int dir = 0;
  size_t hi_i = lo, lo_i = lo;
  double vmax = y[lo], vmin = y[lo];
  auto keep = [&](size_t i) {
    if (i > lo && i + 1 < hi) out.push_back(i);
  };
  for (size_t i = lo + 1; i < hi; ++i) {
    if (dir >= 0 && y[i] > vmax) {
      vmax = y[i];
      hi_i = i;
    }
    if (dir <= 0 && y[i] < vmin) {
      vmin = y[i];
      lo_i = i;
    }
    if (dir >= 0 && vmax - y[i] >= thr) {
      keep(hi_i);
      dir = -1;
      vmin = y[i];
      lo_i = i;
    } else if (dir <= 0 && y[i] - vmin >= thr) {
      keep(lo_i);
      dir = 1;
      vmax = y[i];
      hi_i = i;
    }
  }
  return out;
}

}  // namespace

DipFit fit_dip(const std::vector<double>& f, const std::vector<double>& s) {
  const size_t n = f.size();
  if (s.size() != n) throw InputError("dip fit: column lengths differ");
  if (n < 7) throw InputError("dip fit: need at least 7 points");
  for (size_t i = 1; i < n; ++i)
    if (!(f[i] > f[i - 1])) throw InputError("dip fit: grid must be strictly ascending");

  const double xc = 0.5 * (f.front() + f.back());
  const double sx = 0.5 * (f.back() - f.front());
  double ys = 0;
  for (double v : s) ys = std::max(ys, std::abs(v));
  if (ys == 0) ys = 1;

  const auto trend = quadratic_trend(f, s, std::vector<bool>(n, true));
  size_t c = 0;
  for (size_t i = 1; i < n; ++i)
    if (s[i] - trend[i] < s[c] - trend[c]) c = i;
  double step = INFINITY;
  for (size_t i = 1; i < n; ++i) step = std::min(step, f[i] - f[i - 1]);

  // parameters: background (scaled), depth, centre, width; all in units of sx / ys
  Eigen::VectorXd x0(6);
  x0 << 0, 0, 0, std::max(trend[c] - s[c], 0.0) / ys, (f[c] - xc) / sx, 2.0 * step / sx;
  {
    std::vector<bool> wide(n);
    for (size_t i = 0; i < n; ++i) wide[i] = std::abs(f[i] - f[c]) > 3 * step;
    int m = 0;
    for (bool w : wide) m += w;
    const auto bg = quadratic_trend(f, s, m >= 3 ? wide : std::vector<bool>(n, true));
    // recover coefficients from three evaluations
    const double y0 = bg[0] / ys, y1 = bg[n / 2] / ys, y2 = bg[n - 1] / ys;
    const double u0 = (f[0] - xc) / sx, u1 = (f[n / 2] - xc) / sx, u2 = (f[n - 1] - xc) / sx;
    Eigen::Matrix3d a;
    a << 1, u0, u0 * u0, 1, u1, u1 * u1, 1, u2, u2 * u2;
    const Eigen::Vector3d coef = a.colPivHouseholderQr().solve(Eigen::Vector3d(y0, y1, y2));
    x0.head<3>() = coef;
    x0[3] = std::max(coef[0] + coef[1] * x0[4] + coef[2] * x0[4] * x0[4] - s[c] / ys, 1e-12);
  }

  auto model = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    r.resize(static_cast<long>(n));
    for (size_t i = 0; i < n; ++i) {
      const double u = (f[i] - xc) / sx;
      const double z = (u - p[4]) / p[5];
      r[static_cast<long>(i)] = p[0] + p[1] * u + p[2] * u * u - p[3] / (1 + z * z) - s[i] / ys;
    }
  };
  LmProblem prob;
  prob.residual = with_numeric_jacobian(model);
  prob.lower = Eigen::VectorXd::Constant(6, -INFINITY);
  prob.upper = Eigen::VectorXd::Constant(6, INFINITY);
  prob.lower[3] = 0;
  prob.lower[4] = -1;
  prob.upper[4] = 1;
  prob.lower[5] = 1e-3 * step / sx;
  prob.upper[5] = 2;
  LmOptions opt;
  opt.max_iterations = 500;
  opt.cost_atol = static_cast<double>(n) * 1e-26;
  const auto res = levenberg_marquardt(prob, x0, opt);

  DipFit out;
  out.center = xc + sx * res.x[4];
  out.depth = ys * res.x[3];
  out.half_width = sx * res.x[5];
  out.rms = ys * std::sqrt(res.cost / static_cast<double>(n));
  out.converged = res.converged;
  return out;
}

ModulationResult modulation_period(const std::vector<double>& f, const std::vector<double>& s,
                                   const ModulationOptions& opt) {
  const size_t n = f.size();
  if (s.size() != n) throw InputError("modulation: column lengths differ");
  if (n < 7) throw InputError("modulation: scan too short");
  for (size_t i = 1; i < n; ++i)
    if (!(f[i] > f[i - 1])) throw InputError("modulation: grid must be strictly ascending");

  std::vector<bool> all(n, true);
  const auto trend = quadratic_trend(f, s, all);
  std::vector<double> res(n);
  for (size_t i = 0; i < n; ++i) res[i] = s[i] - trend[i];
  const size_t c = static_cast<size_t>(std::min_element(res.begin(), res.end()) - res.begin());
  const double half = 0.5 * res[c];
  size_t l = c, r = c;
  while (l > 0 && res[l] < half) --l;
  while (r + 1 < n && res[r] < half) ++r;

  ModulationResult out;
  out.f_r = f[c];
  out.half_width = std::max(0.5 * (f[r] - f[l]), f[1] - f[0]);
  std::vector<bool> wing(n);
  for (size_t i = 0; i < n; ++i) wing[i] = std::abs(f[i] - out.f_r) > opt.exclusion * out.half_width;
  size_t left_end = 0, right_begin = n;
  for (size_t i = 0; i < n; ++i)
    if (wing[i] && f[i] < out.f_r) left_end = i + 1;
  for (size_t i = n; i-- > 0;)
    if (wing[i] && f[i] > out.f_r) right_begin = i;

  int wing_points = 0;
  for (bool w : wing) wing_points += w;
  if (wing_points < 5) throw InputError("modulation: insufficient extrema");
  const auto wtrend = quadratic_trend(f, s, wing);
  std::vector<double> d(n);
  double dmax = -INFINITY, dmin = INFINITY, scale = 0;
  for (size_t i = 0; i < n; ++i) {
    d[i] = s[i] - wtrend[i];
    scale = std::max(scale, std::abs(s[i]));
    if (wing[i]) {
      dmax = std::max(dmax, d[i]);
      dmin = std::min(dmin, d[i]);
    }
  }
  const double swing = dmax - dmin;
  if (!(swing > 1e-9 * std::max(scale, 1e-300))) throw InputError("modulation: insufficient extrema");

  std::vector<double> spacing;
  int count = 0;
  for (auto [lo, hi] : {std::pair<size_t, size_t>{0, left_end}, std::pair<size_t, size_t>{right_begin, n}}) {
    const auto tp = turning_points(d, lo, hi, opt.prominence * swing);
    count += static_cast<int>(tp.size());
    for (size_t k = 1; k < tp.size(); ++k) spacing.push_back(f[tp[k]] - f[tp[k - 1]]);
  }
  out.extrema = count;
  if (count < 3 || spacing.empty()) throw InputError("modulation: insufficient extrema");
  std::sort(spacing.begin(), spacing.end());
  const size_t m = spacing.size();
  const double med = m % 2 ? spacing[m / 2] : 0.5 * (spacing[m / 2 - 1] + spacing[m / 2]);
  out.period_khz = 2.0 * med * 1000.0;
  return out;
}

}  // namespace nvcpt
