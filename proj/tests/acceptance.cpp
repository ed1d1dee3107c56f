// acceptance [N]: runs one criterion (or all) and prints one PASS/FAIL line each.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include "cli_fixtures.hpp"
#include "json.hpp"
#include "nvcpt/contrast.hpp"
#include "nvcpt/dynamics.hpp"
#include "nvcpt/lambda_model.hpp"
#include "nvcpt/lineshape.hpp"
#include "nvcpt/transitions.hpp"

using namespace nvcpt;
namespace fs = std::filesystem;

namespace {

// tolerances
constexpr double kCalTolMhz = 0.5;
constexpr double kCalMaxSeconds = 1.0;
constexpr double kForbiddenZeroTilt = 1e-10;
constexpr double kForbiddenRatio = 3.0;
constexpr double kSelectionMaxSeconds = 1.0;
constexpr double kWeightSumTol = 1e-12;
constexpr double kIntegralRelTol = 1e-4;
constexpr double kJacobianRelTol = 1e-5;
constexpr double kFitNu0Tol = 0.02;
constexpr double kFitSigmaRel = 0.05;
constexpr int kFitRequired = 95;
constexpr double kFitMaxSeconds = 30.0;
constexpr long kIntegritySteps = 100000;
constexpr double kTraceTol = 1e-9;
constexpr double kMinEigTol = -1e-8;
constexpr double kHermTol = 1e-10;
constexpr double kExcitedMax = 1e-3;
constexpr double kDarkMin = 0.999;
constexpr double kDipCentreKhz = 2.0;
constexpr double kDepthRatioMin = 0.2;
constexpr double kContrastTol = 1e-12;
constexpr double kLarmorTol = 0.05;
constexpr double kRabiTol = 0.02;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char b[64];
  std::snprintf(b, sizeof b, f, a);
  return b;
}

GroundState ground_88() { return solve_ground_state(HamiltonianParams{}, MagneticField{30, 88, 0}); }

Outcome c1() {
  const std::vector<MeasuredLine> lines = reference_lines();
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = calibrate_field(HamiltonianParams{}, lines, MagneticField{30, 89.5, 0});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double worst = 0;
  const auto t = transition_table(solve_ground_state(HamiltonianParams{}, r.field));
  for (const auto& l : lines) worst = std::max(worst, std::abs(t.frequency(l.name) - l.frequency));
  return {worst < kCalTolMhz && secs < kCalMaxSeconds,
          "B=" + fmt("%.4f", r.field.magnitude) + " G tilt=" + fmt("%.4f", r.field.tilt) +
              " worst |df|=" + fmt("%.4f", worst) + " MHz in " + fmt("%.3f", secs) + " s"};
}

Outcome c2() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto z = transition_table(solve_ground_state(HamiltonianParams{}, MagneticField{30, 0, 0}));
  double worst_zero = 0;
  for (const auto& tr : z.transitions)
    if (tr.cls == TransitionClass::forbidden) worst_zero = std::max(worst_zero, tr.matrix_element);
  const auto t = transition_table(ground_88());
  double weakest_allowed = INFINITY, strongest_forbidden = 0, weakest_forbidden = INFINITY;
  for (const auto& tr : t.transitions) {
    if (tr.cls == TransitionClass::allowed) {
      weakest_allowed = std::min(weakest_allowed, tr.matrix_element);
    } else {
      strongest_forbidden = std::max(strongest_forbidden, tr.matrix_element);
      weakest_forbidden = std::min(weakest_forbidden, tr.matrix_element);
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool zero_ok = worst_zero < kForbiddenZeroTilt;
  const bool tilt_ok = weakest_forbidden > 0 && kForbiddenRatio * strongest_forbidden <= weakest_allowed;
  return {zero_ok && tilt_ok && secs < kSelectionMaxSeconds,
          "tilt 0: max forbidden " + fmt("%.3g", worst_zero) + "; 88 deg: forbidden " + fmt("%.4f", weakest_forbidden) +
              ".." + fmt("%.4f", strongest_forbidden) + " vs weakest allowed " + fmt("%.4f", weakest_allowed)};
}

Outcome c3() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ua(0, 1.0 / 9.0);
  double worst_w = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto w = weight_groups(ua(rng));
    worst_w = std::max(worst_w, std::abs(w[0] + w[1] + w[2] - 1));
  }

  OdmrModelParams p;
  p.C = 1.3;
  const double s = p.sigma[0];
  const double lo = p.nu0[0] - 500 * s, hi = p.nu0[2] + 500 * s, h = s / 100;
  const auto n = static_cast<long>(std::llround((hi - lo) / h));
  double integral = 0;
  for (long i = 0; i <= n; ++i) integral += ((i == 0 || i == n) ? 0.5 : 1.0) * odmr_profile(lo + h * static_cast<double>(i), p);
  integral *= h;
  const double rel = std::abs(integral / (3 * M_PI * p.C) - 1);

  std::uniform_real_distribution<double> unu(2855, 2895);
  p.alpha = 0.02;
  p.sigma = {0.35, 0.45, 0.5};
  const OdmrVector x0 = pack(p);
  double worst_j = 0;
  for (int k = 0; k < 100; ++k) {
    const double nu = unu(rng);
    const OdmrVector g = odmr_gradient(nu, p);
    for (int j = 0; j < kOdmrParams; ++j) {
      const double d = 1e-6;
      OdmrVector a = x0, b = x0;
      a[j] += d;
      b[j] -= d;
      const double fd = (odmr_profile(nu, unpack(a, p)) - odmr_profile(nu, unpack(b, p))) / (2 * d);
      const double scale = std::max(std::abs(fd), 1e-3 * std::abs(odmr_profile(nu, p)));
      worst_j = std::max(worst_j, std::abs(g[j] - fd) / scale);
    }
  }
  return {worst_w <= kWeightSumTol && rel <= kIntegralRelTol && worst_j <= kJacobianRelTol,
          "weights " + fmt("%.2g", worst_w) + ", integral rel err " + fmt("%.3e", rel) + " (limit " +
              fmt("%.0e", kIntegralRelTol) + "), jacobian " + fmt("%.2g", worst_j)};
}

Outcome c4() {
  const auto grid = make_grid(2860, 2890, 0.05);
  const auto t0 = std::chrono::steady_clock::now();
  int good = 0, converged = 0;
  for (int seed = 1; seed <= 100; ++seed) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    std::uniform_real_distribution<double> jitter(-0.5, 0.5), width(0.3, 0.5);
    OdmrModelParams truth;
    for (int i = 0; i < 3; ++i) {
      truth.nu0[i] += jitter(rng);
      truth.sigma[i] = width(rng);
    }
    double peak = 0;
    for (double f : grid) peak = std::max(peak, odmr_profile(f, truth));
    const Spectrum s = synth_spectrum(grid, truth, 0.01 * peak, static_cast<std::uint64_t>(seed));
    try {
      const FitResult r = fit_spectrum(s, initial_guess(s).params);
      converged += r.converged;
      bool ok = r.converged;
      for (int i = 0; i < 3; ++i) {
        ok = ok && std::abs(r.params.nu0[i] - truth.nu0[i]) < kFitNu0Tol;
        ok = ok && std::abs(r.params.sigma[i] / truth.sigma[i] - 1) < kFitSigmaRel;
      }
      good += ok;
    } catch (const Error&) {
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {good >= kFitRequired && secs < kFitMaxSeconds,
          std::to_string(good) + "/100 within tolerance (" + std::to_string(converged) + " converged) in " +
              fmt("%.1f", secs) + " s"};
}

Outcome c5() {
  const OpenSystem sys(ground_88());
  const std::vector<ToneConfig> tones{sys.tone("d", 0.05), sys.tone("2", 0.05, 0.01)};
  const auto gen = sys.generator(tones, true);
  IntegratorOptions io;
  io.dt = sys.auto_dt(gen);
  double worst_tr = 0, min_eig = INFINITY, worst_h = 0;
  Matrix9cd rho0 = Matrix9cd::Identity() / 9.0;
  rho0(0, 1) = rho0(1, 0) = 0.05;
  rk4_integrate<kLevels>(gen, rho0, 0.0, kIntegritySteps, io, [&](long s, double, const Matrix9cd& r) {
    if (s % 100 != 0) return;
    worst_tr = std::max(worst_tr, std::abs(r.trace().real() - 1));
    worst_h = std::max(worst_h, (r - r.adjoint()).cwiseAbs().maxCoeff());
    const Matrix9cd herm = 0.5 * (r + r.adjoint());
    min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<Matrix9cd>(herm, Eigen::EigenvaluesOnly).eigenvalues()[0]);
  });
  return {worst_tr <= kTraceTol && min_eig >= kMinEigTol && worst_h <= kHermTol,
          std::to_string(kIntegritySteps) + " steps of " + fmt("%.4f", io.dt) + " us: |tr-1| " + fmt("%.2g", worst_tr) +
              ", min eig " + fmt("%.2g", min_eig) + ", hermiticity " + fmt("%.2g", worst_h)};
}

Outcome c6() {
  LambdaParams lp;
  lp.omega1 = 0.2;
  lp.omega2 = 0.3;
  lp.gamma = 1.0;
  lp.delta1 = lp.delta2 = 0.15;
  const LambdaState st = lambda_steady_state(lp);
  const bool lambda_ok = st.excited < kExcitedMax && st.dark_overlap >= kDarkMin;

  // weak drive, pump detuned from "d" so the dip moves away from the probe line centre
  const OpenSystem sys(ground_88());
  const double amp = 0.02;
  const ToneConfig pump = sys.tone("d", amp, 0.02);
  const ToneConfig probe = sys.tone("2", amp);
  const double pred = pump.frequency + sys.table().frequency("2") - sys.table().frequency("d");
  const double step = 0.003;
  std::vector<double> grid;
  for (int k : {-40, -30, -20}) grid.push_back(pred + k * step);
  for (int k = -10; k <= 10; ++k) grid.push_back(pred + k * step);
  for (int k : {20, 30, 40}) grid.push_back(pred + k * step);
  const auto two = cpt_scan(sys, pump, probe, grid);
  const auto one = odmr_scan(sys, probe, grid);
  std::vector<double> diff(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) diff[i] = two.signal[i] - one.signal[i];
  const DipFit d = fit_dip(grid, diff);
  const double off_khz = (d.center - pred) * 1e3;
  return {lambda_ok && d.converged && std::abs(off_khz) <= kDipCentreKhz,
          "lambda excited " + fmt("%.2g", st.excited) + " dark " + fmt("%.5f", st.dark_overlap) +
              "; 9-level dip at " + fmt("%+.3f", off_khz) + " kHz from prediction (depth " + fmt("%.3g", d.depth) + ")"};
}

// Dip depth of the two-tone minus single-tone difference, probe scanned around its line.
DipFit cpt_depth(const OpenSystem& sys, const std::string& pump_line, const std::string& probe_line, double amp) {
  const ToneConfig pump = sys.tone(pump_line, amp), probe = sys.tone(probe_line, amp);
  const double c = probe.frequency + sys.table().frequency(pump_line) - pump.frequency;
  std::vector<double> grid;
  for (double k : {-150, -100, -60}) grid.push_back(c + k * 1e-3);
  for (int k = -6; k <= 6; ++k) grid.push_back(c + k * 5e-3);
  for (double k : {60, 100, 150}) grid.push_back(c + k * 1e-3);
  const auto two = cpt_scan(sys, pump, probe, grid);
  const auto one = odmr_scan(sys, probe, grid);
  std::vector<double> diff(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) diff[i] = two.signal[i] - one.signal[i];
  return fit_dip(grid, diff);
}

Outcome c7() {
  const OpenSystem sys(ground_88());
  const double amp = 0.05;
  const DipFit on_a = cpt_depth(sys, "a", "1", amp);
  const DipFit on_d = cpt_depth(sys, "d", "2", amp);
  const double ratio = on_d.depth > 0 ? on_a.depth / on_d.depth : 0.0;

  // single-tone scan across "a": resolvable means a local maximum near the line
  const ToneConfig ta = sys.tone("a", amp);
  std::vector<double> grid;
  for (int k = -10; k <= 10; ++k) grid.push_back(ta.frequency + 0.02 * k);
  const auto odmr = odmr_scan(sys, ta, grid);
  int peaks = 0;
  for (size_t i = 1; i + 1 < grid.size(); ++i)
    if (std::abs(grid[i] - ta.frequency) <= 0.1 && odmr.signal[i] > odmr.signal[i - 1] &&
        odmr.signal[i] > odmr.signal[i + 1])
      ++peaks;
  return {on_a.converged && on_d.converged && ratio >= kDepthRatioMin && peaks == 0,
          "depth a " + fmt("%.3g", on_a.depth) + " / d " + fmt("%.3g", on_d.depth) + " = " + fmt("%.3f", ratio) +
              "; ODMR local maxima near a: " + std::to_string(peaks)};
}

Outcome c8() {
  const auto s = fixtures::reference_contrast();
  const auto r = contrast_metrics(s.grid, s.two_tone, s.single_tone);
  const bool exact = std::abs(r.apparent - 0.98) <= kContrastTol && std::abs(r.true_contrast - 0.35) <= kContrastTol;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.05, 2.0), d(0.0, 3.0);
  int violations = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto f = fixtures::contrast_scans(u(rng), u(rng), d(rng));
    const auto c = contrast_metrics(f.grid, f.two_tone, f.single_tone);
    violations += c.apparent < c.true_contrast;
  }
  return {exact && violations == 0, "apparent " + fmt("%.15g", r.apparent) + ", true " + fmt("%.15g", r.true_contrast) +
                                        "; apparent < true in " + std::to_string(violations) + "/1000 random fixtures"};
}

Outcome c9() {
  const double s30 = larmor_frequency(30), s45 = larmor_frequency(45);
  const double l30 = larmor_frequency(30, LarmorMode::literal), l45 = larmor_frequency(45, LarmorMode::literal);
  bool ok = std::abs(s30 - 32.1) <= kLarmorTol && std::abs(s45 - 48.2) <= kLarmorTol &&
            std::abs(l30 - 16.05) <= kLarmorTol && std::abs(l45 - 24.1) <= kLarmorTol;
  const fs::path dir = fs::absolute("acceptance_out") / "c9";
  fs::remove_all(dir);
  const auto r = fixtures::run({"larmor", "--out-dir", dir.string()});
  bool meta = false;
  if (r.code == 0) {
    const auto j = nlohmann::json::parse(fixtures::slurp(dir / "larmor.json"));
    meta = j.contains("note") && !j["note"].get<std::string>().empty() && j.contains("literal_khz") &&
           j.contains("standard_khz") && j.contains("constants_khz_per_gauss");
  }
  ok = ok && meta;
  return {ok, "standard " + fmt("%.4g", s30) + "/" + fmt("%.4g", s45) + " kHz, literal " + fmt("%.4g", l30) + "/" +
                  fmt("%.4g", l45) + " kHz, metadata " + (meta ? "present" : "missing")};
}

Outcome c10() {
  const OpenSystem sys(ground_88(), DissipatorConfig{1.0, 0.1, 0.0, 0.0, 0.0});
  auto rabi = [&](const std::string& line, double amp) {
    RabiOptions o;
    o.duration_us = 6.0 / (2.802 * amp * sys.table().at(line).matrix_element);
    return simulate_rabi(sys, line, amp, o).frequency;
  };
  const std::vector<double> amps{0.01, 0.02, 0.05, 0.1};
  std::vector<double> per_amp;
  for (double a : amps) per_amp.push_back(rabi("2", a) / a);
  double lin = 0;
  for (double v : per_amp) lin = std::max(lin, std::abs(v / per_amp.front() - 1));
  const double f_allowed = per_amp[1] * 0.02;
  const double f_forbidden = rabi("a", 0.02);
  const double elem_ratio = sys.table().at("a").matrix_element / sys.table().at("2").matrix_element;
  const double ratio_err = std::abs((f_forbidden / f_allowed) / elem_ratio - 1);
  return {lin <= kRabiTol && ratio_err <= kRabiTol,
          "linearity dev " + fmt("%.4f", lin) + " over 0.01-0.1 G; a/2 ratio " + fmt("%.5f", f_forbidden / f_allowed) +
              " vs elements " + fmt("%.5f", elem_ratio) + " (err " + fmt("%.4f", ratio_err) + ")"};
}

Outcome c11() {
  const fs::path root = fs::absolute("acceptance_out") / "c11";
  fs::remove_all(root);
  const auto [two, single] = fixtures::write_contrast_fixture(root / "inputs");
  std::vector<double> g, s;
  fixtures::modulated_dip(32.1, g, s);
  CsvWriter w({"probe_mhz", "signal"});
  for (size_t i = 0; i < g.size(); ++i) w.row(std::vector<double>{g[i], s[i]});
  w.write((root / "inputs" / "scan.csv").string());
  if (fixtures::run({"synth", "--out-dir", (root / "inputs").string(), "--seed", "3"}).code != 0)
    return {false, "synth for fit input failed"};

  const std::vector<std::string> cmds{"levels", "anglescan", "synth", "fit",      "rabi",   "odmr",
                                      "cpt",    "cpt2d",     "contrast", "larmor", "calibrate"};
  int files = 0;
  std::string bad;
  for (const auto& cmd : cmds) {
    std::vector<std::string> outs;
    for (const char* run : {"a", "b"}) {
      const fs::path dir = root / cmd / run;
      fixtures::write_text(root / cmd / "config.json", fixtures::quick_config(cmd));
      std::vector<std::string> args{cmd, "--config", (root / cmd / "config.json").string(), "--out-dir",
                                    dir.string(), "--seed", "11", "--svg"};
      if (cmd == "fit") args.push_back((root / "inputs" / "spectrum.csv").string());
      if (cmd == "contrast") {
        args.push_back(two);
        args.push_back(single);
      }
      if (cmd == "larmor") args.push_back((root / "inputs" / "scan.csv").string());
      const auto r = fixtures::run(args);
      if (r.code != 0) return {false, cmd + " exited " + std::to_string(r.code) + ": " + r.err};
    }
    for (const auto& e : fs::directory_iterator(root / cmd / "a")) {
      ++files;
      if (fixtures::slurp(e.path()) != fixtures::slurp(root / cmd / "b" / e.path().filename()))
        bad += " " + cmd + "/" + e.path().filename().string();
    }
  }
  return {bad.empty() && files > 0,
          std::to_string(cmds.size()) + " commands, " + std::to_string(files) + " files compared" +
              (bad.empty() ? std::string(", all identical") : ", differing:" + bad)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> all{c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11};
  std::vector<int> which;
  if (argc > 1) {
    const int n = std::atoi(argv[1]);
    if (n < 1 || n > static_cast<int>(all.size())) {
      std::fprintf(stderr, "usage: acceptance [1-%zu]\n", all.size());
      return 2;
    }
    which.push_back(n);
  } else {
    for (int n = 1; n <= static_cast<int>(all.size()); ++n) which.push_back(n);
  }
  bool ok = true;
  for (int n : which) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = all[static_cast<size_t>(n - 1)]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d: %s  %s  [%.1f s]\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
    ok = ok && o.pass;
  }
  return ok ? 0 : 1;
}
