#include "commands.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <sstream>

#include "CLI11.hpp"
#include "config.hpp"
#include "nvcpt/contrast.hpp"
#include "nvcpt/dynamics.hpp"
#include "nvcpt/io.hpp"
#include "nvcpt/lambda_model.hpp"
#include "nvcpt/lineshape.hpp"
#include "nvcpt/svg.hpp"
#include "nvcpt/transitions.hpp"

namespace nvcpt::cli {

namespace {

struct Context {
  RunConfig cfg;
  std::ostream* out = nullptr;

  std::string path(const std::string& name) const { return (std::filesystem::path(cfg.out_dir) / name).string(); }

  void write(const std::string& name, const std::string& content) const {
    atomic_write(path(name), content);
    *out << "wrote " << path(name) << "\n";
  }
  void write_json(const std::string& name, const Json& j) const { write(name, j.dump(2) + "\n"); }
  void write_svg(const std::string& name, const SvgPlot& plot) const {
    if (cfg.svg) write(name, render_svg(plot));
  }
};

Json field_json(const MagneticField& f) {
  return Json{{"magnitude", f.magnitude}, {"tilt", f.tilt}, {"azimuth", f.azimuth}};
}

Json dissipators_json(const DissipatorConfig& d) {
  return Json{{"gamma_pump", d.gamma_pump}, {"p_flip", d.p_flip}, {"gamma_2e", d.gamma_2e},
              {"gamma_2n", d.gamma_2n}, {"gamma_1", d.gamma_1}};
}

Json tone_json(const ToneConfig& t) {
  return Json{{"target", t.target}, {"frequency", t.frequency}, {"amplitude", t.rabi_scale}, {"phase", t.phase}};
}

GroundState ground(const RunConfig& c) { return solve_ground_state(c.hamiltonian, c.field); }

DriveVector drive(const RunConfig& c) {
  DriveVector d;
  d.direction = c.drive_direction;
  d.validate();
  return d;
}

OpenSystem open_system(const RunConfig& c) {
  DynamicsOptions opt;
  opt.rwa_cutoff = c.rwa_cutoff;
  opt.readout_contrast = c.readout_contrast;
  opt.drive = drive(c);
  opt.transition.include_nuclear_drive = c.include_nuclear_drive;
  opt.max_dt = c.max_dt;
  return OpenSystem(ground(c), c.dissipators, opt);
}

EvolveOptions evolve_options(const RunConfig& c) {
  EvolveOptions e;
  e.dt = c.dt;
  return e;
}

CptOptions cpt_options(const RunConfig& c) {
  CptOptions o;
  o.window_us = c.window_us;
  o.ref_us = c.ref_us;
  o.prepulse_us = c.prepulse_us;
  o.laser_during_probe = c.laser_during_probe;
  o.ensemble_sigma = c.ensemble_sigma;
  o.ensemble_nodes = c.ensemble_nodes;
  o.threads = c.threads;
  o.evolve = evolve_options(c);
  return o;
}

ToneConfig resolve(const OpenSystem& sys, const ToneSpec& s, const char* what) {
  ToneConfig t;
  t.target = s.target;
  if (s.frequency) {
    t.frequency = *s.frequency;
  } else if (s.target == "scan") {
    t.frequency = 1.0;  // replaced per grid point
  } else {
    try {
      t.frequency = sys.table().frequency(s.target);
    } catch (const InputError& e) {
      throw InputError(std::string(what) + ": " + e.what());
    }
  }
  t.frequency += s.offset;
  t.rabi_scale = s.amplitude;
  t.phase = s.phase;
  t.validate();
  return t;
}

std::string scan_csv(const std::string& xname, const std::vector<double>& x, const std::vector<double>& y) {
  CsvWriter w({xname, "signal"});
  for (size_t i = 0; i < x.size(); ++i) w.row(std::vector<double>{x[i], y[i]});
  return w.str();
}

std::string class_of(const std::string& name) {
  const auto [lo, up] = transition_labels(name);
  return lo.mi == up.mi ? "allowed" : "forbidden";
}

// ---- commands ----

int cmd_levels(const Context& ctx) {
  const auto& c = ctx.cfg;
  const GroundState g = ground(c);
  const TransitionTable table = transition_table(g, drive(c), {c.include_nuclear_drive});

  CsvWriter lv({"index", "energy_mhz", "label", "ms", "mi", "weight", "ambiguous"});
  Json levels = Json::array();
  for (int k = 0; k < kLevels; ++k) {
    const auto& l = g.eig.labels[k];
    lv.row({std::to_string(k), format_number(g.eig.values[k]), l.str(), std::to_string(l.ms), std::to_string(l.mi),
            format_number(l.weight), l.ambiguous ? "1" : "0"});
    levels.push_back(Json{{"index", k}, {"energy_mhz", g.eig.values[k]}, {"label", l.str()}, {"ms", l.ms},
                          {"mi", l.mi}, {"weight", l.weight}, {"ambiguous", l.ambiguous}});
  }
  CsvWriter tr({"name", "lower", "upper", "frequency_mhz", "matrix_element", "class"});
  Json trans = Json::array();
  for (const auto& t : table.transitions) {
    tr.row({t.name, t.lower_label.str(), t.upper_label.str(), format_number(t.frequency),
            format_number(t.matrix_element), to_string(t.cls)});
    trans.push_back(Json{{"name", t.name}, {"lower", t.lower_label.str()}, {"upper", t.upper_label.str()},
                         {"frequency_mhz", t.frequency}, {"matrix_element", t.matrix_element},
                         {"class", to_string(t.cls)}});
  }
  ctx.write("levels.csv", lv.str());
  ctx.write("transitions.csv", tr.str());
  ctx.write_json("levels.json", Json{{"field", field_json(c.field)}, {"levels", levels}, {"transitions", trans}});
  *ctx.out << kLevels << " levels, " << table.transitions.size() << " transitions\n";
  return kOk;
}

int cmd_anglescan(const Context& ctx) {
  const auto& c = ctx.cfg;
  AngleScanOptions opt;
  opt.azimuth = c.field.azimuth;
  opt.sideband_splitting = c.sideband_splitting;
  opt.drive = drive(c);
  const auto angles = c.angles.values("anglescan");
  const AngleScan s = angle_scan(c.hamiltonian, c.field.magnitude, angles, opt);

  CsvWriter lv({"angle_deg", "label", "energy_mhz"});
  for (size_t st = 0; st < s.states.size(); ++st)
    for (size_t k = 0; k < angles.size(); ++k)
      lv.row({format_number(angles[k]), s.states[st].str(), format_number(s.level_curves[st][k])});

  CsvWriter tr({"angle_deg", "name", "frequency_mhz", "matrix_element", "class"});
  CsvWriter sb({"angle_deg", "name", "frequency_mhz", "matrix_element", "parent"});
  SvgPlot plot{"Transitions vs field angle", "tilt (deg)", "frequency (MHz)", {}, 720, 480};
  for (size_t n = 0; n < s.transition_names.size(); ++n) {
    const std::string& name = s.transition_names[n];
    const auto sp = name.find(' ');
    const bool sideband = sp != std::string::npos;
    for (size_t k = 0; k < angles.size(); ++k) {
      const std::string a = format_number(angles[k]), f = format_number(s.transition_curves[n][k]),
                        m = format_number(s.element_curves[n][k]);
      if (sideband)
        sb.row({a, name, f, m, name.substr(0, sp)});
      else
        tr.row({a, name, f, m, class_of(name)});
    }
    plot.series.push_back({name, angles, s.transition_curves[n], sideband});
  }
  ctx.write("anglescan_levels.csv", lv.str());
  ctx.write("anglescan_transitions.csv", tr.str());
  ctx.write("anglescan_sidebands.csv", sb.str());
  ctx.write_svg("anglescan.svg", plot);
  *ctx.out << angles.size() << " angles, " << s.transition_names.size() << " curves\n";
  return kOk;
}

int cmd_synth(const Context& ctx) {
  const auto& c = ctx.cfg;
  const auto grid = c.synth_grid.values("synth");
  double peak = 0;
  for (double f : grid) peak = std::max(peak, std::abs(odmr_profile(f, c.model)));
  const double noise = c.synth_noise * peak;
  const Spectrum s = synth_spectrum(grid, c.model, noise, c.seed);
  ctx.write("spectrum.csv", scan_csv("frequency_mhz", s.frequencies, s.values));
  Json truth;
  const OdmrVector v = pack(c.model);
  for (int i = 0; i < kOdmrParams; ++i) truth[odmr_param_name(i)] = v[i];
  ctx.write_json("synth.json", Json{{"seed", c.seed}, {"noise_sigma", noise}, {"points", grid.size()}, {"params", truth}});
  ctx.write_svg("spectrum.svg", SvgPlot{"Synthetic ODMR", "frequency (MHz)", "signal", {{"data", s.frequencies, s.values, false}}, 720, 480});
  *ctx.out << grid.size() << " points, noise sigma " << format_number(noise) << "\n";
  return kOk;
}

int cmd_fit(const Context& ctx, const std::string& input) {
  const auto& c = ctx.cfg;
  const CsvTable t = read_csv(input);
  if (t.header.size() < 2) throw InputError(input + ": need frequency and signal columns");
  Spectrum s;
  s.frequencies = t.columns[0];
  s.values = t.columns[1];
  s.validate();

  const InitialGuess guess = initial_guess(s);
  OdmrModelParams init = guess.params;
  init.alpha = c.model.alpha;
  init.Delta = c.model.Delta;
  init.two_group = c.model.two_group;
  init.Delta_6 = c.model.Delta_6;
  init.Delta_3 = c.model.Delta_3;
  FitMask mask;
  for (const auto& f : c.freeze)
    for (int i = 0; i < kOdmrParams; ++i)
      if (f == odmr_param_name(i)) mask.frozen[static_cast<size_t>(i)] = true;
  FitOptions fo;
  fo.max_iterations = c.fit_iterations;
  const FitResult r = fit_spectrum(s, init, mask, fo);

  Json params, unc;
  const OdmrVector v = pack(r.params);
  for (int i = 0; i < kOdmrParams; ++i) {
    params[odmr_param_name(i)] = v[i];
    unc[odmr_param_name(i)] = r.uncertainty[i];
  }
  Json frozen = Json::array();
  for (int i = 0; i < kOdmrParams; ++i)
    if (mask.frozen[static_cast<size_t>(i)]) frozen.push_back(odmr_param_name(i));
  ctx.write_json("fit.json", Json{{"input", std::filesystem::path(input).filename().string()},
                                  {"converged", r.converged},
                                  {"message", r.message},
                                  {"iterations", r.iterations},
                                  {"residual_rms", r.residual_rms},
                                  {"peaks_found", guess.peaks_found},
                                  {"frozen", frozen},
                                  {"params", params},
                                  {"uncertainty", unc}});
  if (c.svg) {
    std::vector<double> model(s.size());
    for (size_t i = 0; i < s.size(); ++i) model[i] = odmr_profile(s.frequencies[i], r.params);
    ctx.write_svg("fit.svg", SvgPlot{"ODMR fit", "frequency (MHz)", "signal",
                                     {{"data", s.frequencies, s.values, false}, {"fit", s.frequencies, model, true}}, 720, 480});
  }
  if (!r.converged) {
    *ctx.out << "fit did not converge: " << r.message << "\n";
    return kNotConverged;
  }
  *ctx.out << "converged in " << r.iterations << " iterations, rms " << format_number(r.residual_rms) << "\n";
  return kOk;
}

int cmd_rabi(const Context& ctx) {
  const auto& c = ctx.cfg;
  const OpenSystem sys = open_system(c);
  RabiOptions o;
  o.duration_us = c.rabi_duration;
  o.sample_us = c.rabi_sample;
  o.prominence = c.rabi_prominence;
  o.phase = c.rabi_phase;
  o.detuning = c.rabi_detuning;
  o.evolve = evolve_options(c);
  const RabiResult r = simulate_rabi(sys, c.rabi_transition, c.rabi_amplitude, o);
  CsvWriter w({"time_us", "signal"});
  for (size_t i = 0; i < r.times.size(); ++i) w.row(std::vector<double>{r.times[i], r.signal[i]});
  ctx.write("rabi.csv", w.str());
  ctx.write_json("rabi.json", Json{{"transition", r.transition},
                                   {"amplitude", r.amplitude},
                                   {"frequency_mhz", r.frequency},
                                   {"expected_mhz", r.expected},
                                   {"extrema", r.extrema},
                                   {"field", field_json(c.field)},
                                   {"dissipators", dissipators_json(c.dissipators)}});
  ctx.write_svg("rabi.svg", SvgPlot{"Rabi " + r.transition, "time (us)", "fluorescence", {{"signal", r.times, r.signal, false}}, 720, 480});
  *ctx.out << "rabi " << r.transition << ": " << format_number(r.frequency) << " MHz (expected "
           << format_number(r.expected) << ")\n";
  return kOk;
}

int cmd_odmr(const Context& ctx) {
  const auto& c = ctx.cfg;
  const OpenSystem sys = open_system(c);
  const auto grid = c.odmr_grid.values("odmr");
  PulseSequence seq;
  Json segs = Json::array();
  for (const auto& s : c.sequence) {
    Segment seg;
    seg.duration_us = s.duration_us;
    seg.laser = s.laser;
    seg.record = parse_record(s.record);
    Json tones = Json::array();
    for (const auto& t : s.tones) {
      seg.tones.push_back(resolve(sys, t, "odmr.sequence"));
      tones.push_back(to_json(t));
    }
    seq.segments.push_back(seg);
    segs.push_back(Json{{"duration_us", s.duration_us}, {"laser", s.laser}, {"tones", tones}, {"record", s.record}});
  }
  const auto sig = sequence_scan(sys, seq, grid, {c.shots}, evolve_options(c), c.threads);
  ctx.write("odmr.csv", scan_csv("frequency_mhz", grid, sig));
  ctx.write_json("odmr.json", Json{{"points", grid.size()}, {"shots", c.shots}, {"sequence", segs},
                                   {"field", field_json(c.field)}, {"dissipators", dissipators_json(c.dissipators)}});
  ctx.write_svg("odmr.svg", SvgPlot{"ODMR", "frequency (MHz)", "ref - signal", {{"output", grid, sig, false}}, 720, 480});
  *ctx.out << grid.size() << " points\n";
  return kOk;
}

// Probe frequency of the two-photon resonance when pump and probe lines share a level.
Json two_photon(const OpenSystem& sys, const ToneSpec& pump, const ToneSpec& probe, const ToneConfig& pt) {
  try {
    const ReducedLambda r = reduce_lambda(sys, probe.target, pump.target);
    const double pred = pt.frequency + sys.table().frequency(probe.target) - sys.table().frequency(pump.target);
    return Json{{"kind", r.kind == TripleKind::lambda ? "lambda" : "vee"},
                {"shared", r.shared.str()},
                {"splitting_mhz", r.splitting},
                {"probe_mhz", pred}};
  } catch (const InputError&) {
    return nullptr;
  }
}

int cmd_cpt(const Context& ctx) {
  const auto& c = ctx.cfg;
  const OpenSystem sys = open_system(c);
  const ToneConfig pump = resolve(sys, c.pump, "tones.pump");
  const ToneConfig probe = resolve(sys, c.probe, "tones.probe");
  const auto grid = c.probe_offsets.values("cpt.probe_offsets", probe.frequency);
  const CptOptions opt = cpt_options(c);

  const CptScanResult r = cpt_scan(sys, pump, probe, grid, opt);
  ctx.write("cpt.csv", scan_csv("probe_mhz", grid, r.signal));
  Json j{{"pump", tone_json(pump)},
         {"probe", tone_json(probe)},
         {"points", grid.size()},
         {"window_us", c.window_us},
         {"field", field_json(c.field)},
         {"dissipators", dissipators_json(c.dissipators)},
         {"two_photon", two_photon(sys, c.pump, c.probe, pump)}};

  SvgPlot plot{"CPT scan", "probe (MHz)", "ref - signal", {{"two-tone", grid, r.signal, false}}, 720, 480};
  if (c.reference_scan) {
    const CptScanResult o = odmr_scan(sys, probe, grid, opt);
    ctx.write("cpt_reference.csv", scan_csv("probe_mhz", grid, o.signal));
    plot.series.push_back({"single-tone", grid, o.signal, true});
    try {
      const ContrastReport rep = contrast_metrics(grid, r.signal, o.signal, {c.edge_points});
      j["contrast"] = Json{{"f_r", rep.f_r}, {"A_EIT", rep.A_EIT}, {"A_ODMR", rep.A_ODMR}, {"delta_A", rep.delta_A},
                           {"apparent", rep.apparent}, {"true_contrast", rep.true_contrast}};
    } catch (const InputError& e) {
      j["contrast"] = nullptr;
      j["contrast_error"] = e.what();
    }
    if (grid.size() >= 7) {
      std::vector<double> diff(grid.size());
      for (size_t i = 0; i < grid.size(); ++i) diff[i] = r.signal[i] - o.signal[i];
      const DipFit d = fit_dip(grid, diff);
      j["dip"] = Json{{"center_mhz", d.center}, {"depth", d.depth}, {"half_width_mhz", d.half_width},
                      {"rms", d.rms}, {"converged", d.converged}};
    }
  }
  ctx.write_json("cpt.json", j);
  ctx.write_svg("cpt.svg", plot);
  *ctx.out << grid.size() << " probe points\n";
  return kOk;
}

int cmd_cpt2d(const Context& ctx) {
  const auto& c = ctx.cfg;
  const OpenSystem sys = open_system(c);
  const ToneConfig pump = resolve(sys, c.pump, "tones.pump");
  const ToneConfig probe = resolve(sys, c.probe, "tones.probe");
  const auto pg = c.pump_offsets_2d.values("cpt2d.pump_offsets", pump.frequency);
  const auto qg = c.probe_offsets_2d.values("cpt2d.probe_offsets", probe.frequency);
  const CptScanResult r = cpt_2d_scan(sys, pump, pg, probe, qg, cpt_options(c));
  CsvWriter w({"pump_mhz", "probe_mhz", "signal"});
  for (size_t i = 0; i < pg.size(); ++i)
    for (size_t k = 0; k < qg.size(); ++k) w.row(std::vector<double>{pg[i], qg[k], r.at(i, k)});
  ctx.write("cpt2d.csv", w.str());
  ctx.write_json("cpt2d.json", Json{{"pump", tone_json(pump)},
                                    {"probe", tone_json(probe)},
                                    {"pump_points", pg.size()},
                                    {"probe_points", qg.size()},
                                    {"field", field_json(c.field)},
                                    {"dissipators", dissipators_json(c.dissipators)},
                                    {"two_photon", two_photon(sys, c.pump, c.probe, pump)}});
  if (c.svg)
    ctx.write("cpt2d.svg", render_svg_heatmap("CPT 2D scan", qg, pg, r.signal, "probe (MHz)", "pump (MHz)"));
  *ctx.out << pg.size() << " x " << qg.size() << " points\n";
  return kOk;
}

std::pair<std::vector<double>, std::vector<double>> two_columns(const std::string& path) {
  const CsvTable t = read_csv(path);
  if (t.header.size() < 2) throw InputError(path + ": need a frequency column and a signal column");
  return {t.columns[0], t.columns[1]};
}

int cmd_contrast(const Context& ctx, const std::string& two_path, const std::string& single_path) {
  const auto [x2, two] = two_columns(two_path);
  const auto [x1, single] = two_columns(single_path);
  if (x1 != x2) throw InputError("contrast: the two scans must share the probe grid");
  const ContrastReport r = contrast_metrics(x2, two, single, {ctx.cfg.edge_points});
  ctx.write_json("contrast.json", Json{{"f_r", r.f_r},
                                       {"A_EIT", r.A_EIT},
                                       {"A_ODMR", r.A_ODMR},
                                       {"delta_A", r.delta_A},
                                       {"apparent", r.apparent},
                                       {"true_contrast", r.true_contrast}});
  *ctx.out << "apparent " << format_number(r.apparent) << ", true " << format_number(r.true_contrast) << "\n";
  return kOk;
}

int cmd_larmor(const Context& ctx, const std::string& scan_path) {
  const auto& c = ctx.cfg;
  const double b = c.larmor_field.value_or(c.field.magnitude);
  const double f = larmor_frequency(b, c.larmor_mode);
  Json j{{"field_gauss", b},
         {"mode", to_string(c.larmor_mode)},
         {"frequency_khz", f},
         {"standard_khz", larmor_frequency(b, LarmorMode::standard)},
         {"literal_khz", larmor_frequency(b, LarmorMode::literal)},
         {"constants_khz_per_gauss", Json{{"standard", kLarmorStandard}, {"literal", kLarmorLiteral}}},
         {"note", "the literal constant is half the standard 13C gyromagnetic ratio; quoted precession "
                  "frequencies of 32 kHz at 30 G and 48 kHz at 45 G follow the standard value"}};
  if (!scan_path.empty()) {
    const auto [x, y] = two_columns(scan_path);
    const ModulationResult m = modulation_period(x, y, {c.modulation_prominence, c.modulation_exclusion});
    j["modulation"] = Json{{"period_khz", m.period_khz},
                           {"f_r", m.f_r},
                           {"extrema", m.extrema},
                           {"relative_to_larmor", f > 0 ? m.period_khz / f : 0.0}};
  }
  ctx.write_json("larmor.json", j);
  *ctx.out << "larmor " << format_number(f) << " kHz at " << format_number(b) << " G (" << to_string(c.larmor_mode)
           << ")\n";
  return kOk;
}

int cmd_calibrate(const Context& ctx) {
  const auto& c = ctx.cfg;
  const CalibrationResult r =
      calibrate_field(c.hamiltonian, c.lines, MagneticField{c.calibrate_magnitude, c.calibrate_tilt, c.field.azimuth});
  Json lines = Json::array();
  for (size_t i = 0; i < r.measured.size(); ++i)
    lines.push_back(Json{{"name", r.measured[i].name},
                         {"measured_mhz", r.measured[i].frequency},
                         {"computed_mhz", r.computed[i]},
                         {"residual_mhz", r.residuals[i]}});
  ctx.write_json("calibrate.json", Json{{"field", field_json(r.field)},
                                        {"rms_mhz", r.rms},
                                        {"iterations", r.iterations},
                                        {"converged", r.converged},
                                        {"lines", lines}});
  *ctx.out << "B = " << format_number(r.field.magnitude) << " G, tilt = " << format_number(r.field.tilt)
           << " deg, rms " << format_number(r.rms) << " MHz\n";
  return kOk;
}

std::string help_footer() {
  std::string s = "\nConfig keys (JSON; defaults shown; config path from --config or $";
  s += kConfigEnv;
  s += "):\n";
  for (const auto& line : describe_defaults()) s += "  " + line + "\n";
  return s;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"NV-center spin, ODMR and CPT simulation toolkit", "nvcpt"};
  app.require_subcommand(1);

  struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    bool svg = false;
  } common;
  std::string input, second;

  const std::string footer = help_footer();
  auto add = [&](const std::string& name, const std::string& desc) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("--config", common.config, "JSON config file");
    sub->add_option("--seed", common.seed, "random seed (overrides the config)");
    sub->add_option("--out-dir", common.out_dir, "output directory (overrides the config)");
    sub->add_flag("--svg", common.svg, "also write SVG plots");
    sub->footer(footer);
    return sub;
  };
  add("levels", "eigenlevels and transition table");
  add("anglescan", "levels and transitions versus field tilt");
  add("synth", "synthetic ODMR spectrum");
  add("fit", "fit the ODMR profile to a spectrum CSV")->add_option("input", input, "spectrum CSV")->required();
  add("rabi", "Rabi oscillation on one transition");
  add("odmr", "frequency sweep of the configured pulse sequence");
  add("cpt", "two-tone CPT scan over the probe frequency");
  add("cpt2d", "two-tone scan over pump and probe frequencies");
  CLI::App* contrast = add("contrast", "apparent and true contrast from two scans");
  contrast->add_option("two_tone", input, "two-tone scan CSV")->required();
  contrast->add_option("single_tone", second, "single-tone scan CSV")->required();
  add("larmor", "13C Larmor frequency, optional wing-modulation analysis")->add_option("scan", input, "CPT scan CSV");
  add("calibrate", "fit field magnitude and tilt to measured lines");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    std::string cfg_path = common.config;
    if (cfg_path.empty())
      if (const char* env = std::getenv(kConfigEnv)) cfg_path = env;
    Context ctx{load_config(cfg_path), &out};
    if (common.seed) ctx.cfg.seed = *common.seed;
    if (!common.out_dir.empty()) ctx.cfg.out_dir = common.out_dir;
    if (common.svg) ctx.cfg.svg = true;

    if (cmd == "levels") return cmd_levels(ctx);
    if (cmd == "anglescan") return cmd_anglescan(ctx);
    if (cmd == "synth") return cmd_synth(ctx);
    if (cmd == "fit") return cmd_fit(ctx, input);
    if (cmd == "rabi") return cmd_rabi(ctx);
    if (cmd == "odmr") return cmd_odmr(ctx);
    if (cmd == "cpt") return cmd_cpt(ctx);
    if (cmd == "cpt2d") return cmd_cpt2d(ctx);
    if (cmd == "contrast") return cmd_contrast(ctx, input, second);
    if (cmd == "larmor") return cmd_larmor(ctx, input);
    if (cmd == "calibrate") return cmd_calibrate(ctx);
    err << "error: unknown command " << cmd << "\n";
    return kInputError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const ConvergenceError& e) {
    err << "not converged: " << e.what() << "\n";
    return kNotConverged;
  } catch (const InvariantError& e) {
    err << "invariant violated: " << e.what() << "\n";
    return kInvariant;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInvariant;
  }
}

}  // namespace nvcpt::cli
