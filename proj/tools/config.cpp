#include "config.hpp"

#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>

#include "nvcpt/io.hpp"

namespace nvcpt::cli {

namespace {

Json tone_template() {
  return Json{{"target", ""}, {"frequency", nullptr}, {"offset", 0.0}, {"amplitude", 0.05}, {"phase", 0.0}};
}

Json segment_template() {
  return Json{{"duration_us", 1.0}, {"laser", false}, {"tones", Json::array()}, {"record", "none"}};
}

Json line_template() { return Json{{"name", ""}, {"frequency", 0.0}}; }

Json grid(double a, double b, double s) { return Json{{"start", a}, {"stop", b}, {"step", s}}; }

Json build_defaults() {
  const HamiltonianParams h;
  const DissipatorConfig d;
  const OdmrModelParams m;
  const RunConfig rc;

  Json seq = Json::array();
  seq.push_back(Json{{"duration_us", 1.0}, {"laser", true}, {"tones", Json::array()}, {"record", "ref"}});
  Json scan_tone = tone_template();
  scan_tone["target"] = "scan";
  seq.push_back(Json{{"duration_us", 20.0}, {"laser", true}, {"tones", Json::array({scan_tone})}, {"record", "signal"}});

  Json lines = Json::array();
  for (const auto& l : reference_lines()) lines.push_back(Json{{"name", l.name}, {"frequency", l.frequency}});

  Json pump = tone_template();
  pump["target"] = "d";
  Json probe = tone_template();
  probe["target"] = "2";

  Json j;
  j["hamiltonian"] = {{"D", h.D}, {"Q", h.Q}, {"gamma_e", h.gamma_e}, {"gamma_n", h.gamma_n},
                      {"A_zz", h.A_zz}, {"A_xx", h.A_xx}, {"A_yy", h.A_yy}};
  j["field"] = {{"magnitude", 30.0}, {"tilt", 88.0}, {"azimuth", 0.0}};
  j["drive"] = {{"direction", Json::array({M_SQRT1_2, M_SQRT1_2, 0.0})}, {"include_nuclear_drive", false}};
  j["dissipators"] = {{"gamma_pump", d.gamma_pump}, {"p_flip", d.p_flip}, {"gamma_2e", d.gamma_2e},
                      {"gamma_2n", d.gamma_2n}, {"gamma_1", d.gamma_1}};
  j["dynamics"] = {{"rwa_cutoff", rc.rwa_cutoff}, {"readout_contrast", rc.readout_contrast},
                   {"max_dt", rc.max_dt}, {"dt", rc.dt}, {"threads", rc.threads}};
  j["anglescan"] = grid(0, 90, 1);
  j["anglescan"]["sideband_splitting"] = rc.sideband_splitting;
  j["odmr_model"] = {{"nu0", m.nu0}, {"sigma", m.sigma}, {"C", m.C}, {"alpha", m.alpha}, {"Delta", m.Delta},
                     {"offset", m.offset}, {"two_group", m.two_group}, {"Delta_6", m.Delta_6},
                     {"Delta_3", m.Delta_3}};
  j["synth"] = grid(rc.synth_grid.start, rc.synth_grid.stop, rc.synth_grid.step);
  j["synth"]["noise_relative"] = rc.synth_noise;
  j["fit"] = {{"freeze", Json::array({"Delta"})}, {"max_iterations", rc.fit_iterations}};
  j["rabi"] = {{"transition", rc.rabi_transition}, {"amplitude", rc.rabi_amplitude},
               {"duration_us", rc.rabi_duration}, {"sample_us", rc.rabi_sample},
               {"detuning", rc.rabi_detuning}, {"phase", rc.rabi_phase}, {"prominence", rc.rabi_prominence}};
  j["tones"] = {{"pump", pump}, {"probe", probe}};
  j["cpt"] = {{"probe_offsets", grid(-0.3, 0.3, 0.025)},
              {"window_us", rc.window_us},
              {"ref_us", rc.ref_us},
              {"prepulse_us", rc.prepulse_us},
              {"laser_during_probe", rc.laser_during_probe},
              {"ensemble_sigma", rc.ensemble_sigma},
              {"ensemble_nodes", rc.ensemble_nodes},
              {"reference_scan", rc.reference_scan}};
  j["cpt2d"] = {{"pump_offsets", grid(-0.1, 0.1, 0.05)}, {"probe_offsets", grid(-0.2, 0.2, 0.05)}};
  j["odmr"] = grid(rc.odmr_grid.start, rc.odmr_grid.stop, rc.odmr_grid.step);
  j["odmr"]["sequence"] = seq;
  j["odmr"]["shots"] = rc.shots;
  j["contrast"] = {{"edge_points", rc.edge_points}};
  j["larmor"] = {{"field", nullptr}, {"mode", "standard"}, {"prominence", rc.modulation_prominence},
                 {"exclusion", rc.modulation_exclusion}};
  j["calibrate"] = {{"start_magnitude", rc.calibrate_magnitude}, {"start_tilt", rc.calibrate_tilt}, {"lines", lines}};
  j["seed"] = rc.seed;
  j["out_dir"] = rc.out_dir;
  j["svg"] = rc.svg;
  return j;
}

// element templates for arrays of objects
const std::map<std::string, Json>& templates() {
  static const std::map<std::string, Json> t{{"odmr.sequence", segment_template()},
                                             {"odmr.sequence.tones", tone_template()},
                                             {"calibrate.lines", line_template()}};
  return t;
}

std::string strip_indices(const std::string& path) {
  std::string out;
  for (size_t i = 0; i < path.size(); ++i) {
    if (path[i] == '[') {
      while (i < path.size() && path[i] != ']') ++i;
      continue;
    }
    out += path[i];
  }
  return out;
}

const char* kind(const Json& v) {
  if (v.is_null()) return "null";
  if (v.is_boolean()) return "boolean";
  if (v.is_number()) return "number";
  if (v.is_string()) return "string";
  if (v.is_array()) return "array";
  return "object";
}

void check(const Json& user, const Json& def, const std::string& path) {
  auto fail = [&](const std::string& what) { throw InputError("config: " + what); };
  if (def.is_object()) {
    if (!user.is_object()) fail("'" + path + "' must be an object, got " + kind(user));
    for (auto it = user.begin(); it != user.end(); ++it) {
      const std::string sub = path.empty() ? it.key() : path + "." + it.key();
      if (!def.contains(it.key())) fail("unknown key '" + sub + "'");
      check(it.value(), def.at(it.key()), sub);
    }
    return;
  }
  if (def.is_array()) {
    if (!user.is_array()) fail("'" + path + "' must be an array, got " + kind(user));
    const auto& tm = templates();
    const auto t = tm.find(strip_indices(path));
    for (size_t i = 0; i < user.size(); ++i) {
      const std::string sub = path + "[" + std::to_string(i) + "]";
      if (t != tm.end())
        check(user[i], t->second, sub);
      else if (!def.empty())
        check(user[i], def[0], sub);
    }
    if (def.size() == 3 && def[0].is_number() && user.size() != 3) fail("'" + path + "' needs exactly 3 numbers");
    return;
  }
  if (def.is_null()) {
    if (!user.is_null() && !user.is_number()) fail("'" + path + "' must be a number or null, got " + kind(user));
    return;
  }
  if (def.is_number()) {
    if (!user.is_number()) fail("'" + path + "' must be a number, got " + kind(user));
    if (!std::isfinite(user.get<double>())) fail("'" + path + "' must be finite");
    if (def.is_number_integer() && !user.is_number_integer()) fail("'" + path + "' must be an integer");
    if (def.is_number_unsigned() && user.get<long long>() < 0) fail("'" + path + "' must be non-negative");
    return;
  }
  if (def.is_boolean() && !user.is_boolean()) fail("'" + path + "' must be a boolean, got " + kind(user));
  if (def.is_string() && !user.is_string()) fail("'" + path + "' must be a string, got " + kind(user));
}

void flatten(const Json& j, const std::string& prefix, std::vector<std::string>& out) {
  if (j.is_object() && !j.empty()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
    return;
  }
  out.push_back(prefix + " = " + j.dump());
}

ToneSpec tone_from(const Json& j) {
  Json t = tone_template();
  t.update(j);
  ToneSpec s;
  s.target = t["target"].get<std::string>();
  if (!t["frequency"].is_null()) s.frequency = t["frequency"].get<double>();
  s.offset = t["offset"].get<double>();
  s.amplitude = t["amplitude"].get<double>();
  s.phase = t["phase"].get<double>();
  if (s.target.empty() && !s.frequency) throw InputError("config: a tone needs a target or a frequency");
  if (!(s.amplitude >= 0)) throw InputError("config: tone amplitude must be >= 0");
  return s;
}

GridSpec grid_from(const Json& j) { return {j["start"].get<double>(), j["stop"].get<double>(), j["step"].get<double>()}; }

}  // namespace

std::vector<double> GridSpec::values(const std::string& what, double centre) const {
  try {
    return make_grid(centre + start, centre + stop, step);
  } catch (const InputError& e) {
    throw InputError(what + ": " + e.what());
  }
}

const Json& default_config() {
  static const Json d = build_defaults();
  return d;
}

std::vector<std::string> describe_defaults() {
  std::vector<std::string> out;
  flatten(default_config(), "", out);
  return out;
}

Json merge_config(const Json& user) {
  if (!user.is_object()) throw InputError("config: top level must be a JSON object");
  check(user, default_config(), "");
  Json merged = default_config();
  // objects merge key by key, arrays and scalars replace
  std::function<void(Json&, const Json&)> apply = [&](Json& dst, const Json& src) {
    for (auto it = src.begin(); it != src.end(); ++it) {
      if (it.value().is_object() && dst.contains(it.key()) && dst[it.key()].is_object())
        apply(dst[it.key()], it.value());
      else
        dst[it.key()] = it.value();
    }
  };
  apply(merged, user);
  return merged;
}

Json parse_config_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::string msg = e.what();
    const auto p = msg.find("parse error");
    if (p != std::string::npos) msg = msg.substr(p);
    throw InputError(origin + ": " + msg);
  }
}

RunConfig to_run_config(const Json& j) {
  RunConfig c;
  try {
    const auto& h = j["hamiltonian"];
    c.hamiltonian.D = h["D"];
    c.hamiltonian.Q = h["Q"];
    c.hamiltonian.gamma_e = h["gamma_e"];
    c.hamiltonian.gamma_n = h["gamma_n"];
    c.hamiltonian.A_zz = h["A_zz"];
    c.hamiltonian.A_xx = h["A_xx"];
    c.hamiltonian.A_yy = h["A_yy"];
    c.hamiltonian.validate();

    c.field.magnitude = j["field"]["magnitude"];
    c.field.tilt = j["field"]["tilt"];
    c.field.azimuth = j["field"]["azimuth"];
    c.field.validate();

    const auto& dir = j["drive"]["direction"];
    c.drive_direction = Eigen::Vector3d(dir[0].get<double>(), dir[1].get<double>(), dir[2].get<double>());
    c.include_nuclear_drive = j["drive"]["include_nuclear_drive"];

    const auto& d = j["dissipators"];
    c.dissipators = {d["gamma_pump"], d["p_flip"], d["gamma_2e"], d["gamma_2n"], d["gamma_1"]};
    c.dissipators.validate();

    const auto& dy = j["dynamics"];
    c.rwa_cutoff = dy["rwa_cutoff"];
    c.readout_contrast = dy["readout_contrast"];
    c.max_dt = dy["max_dt"];
    c.dt = dy["dt"];
    c.threads = dy["threads"];
    if (c.threads < 1) throw InputError("config: dynamics.threads must be >= 1");
    if (!(c.dt >= 0)) throw InputError("config: dynamics.dt must be >= 0");

    c.angles = grid_from(j["anglescan"]);
    c.sideband_splitting = j["anglescan"]["sideband_splitting"];

    const auto& m = j["odmr_model"];
    for (int i = 0; i < 3; ++i) {
      c.model.nu0[static_cast<size_t>(i)] = m["nu0"][static_cast<size_t>(i)];
      c.model.sigma[static_cast<size_t>(i)] = m["sigma"][static_cast<size_t>(i)];
    }
    c.model.C = m["C"];
    c.model.alpha = m["alpha"];
    c.model.Delta = m["Delta"];
    c.model.offset = m["offset"];
    c.model.two_group = m["two_group"];
    c.model.Delta_6 = m["Delta_6"];
    c.model.Delta_3 = m["Delta_3"];
    c.model.validate();

    c.synth_grid = grid_from(j["synth"]);
    c.synth_noise = j["synth"]["noise_relative"];
    if (!(c.synth_noise >= 0)) throw InputError("config: synth.noise_relative must be >= 0");

    c.freeze.clear();
    for (const auto& f : j["fit"]["freeze"]) {
      const auto name = f.get<std::string>();
      bool ok = false;
      for (int i = 0; i < kOdmrParams; ++i) ok = ok || name == odmr_param_name(i);
      if (!ok) throw InputError("config: fit.freeze has unknown parameter '" + name + "'");
      c.freeze.push_back(name);
    }
    c.fit_iterations = j["fit"]["max_iterations"];

    const auto& r = j["rabi"];
    c.rabi_transition = r["transition"];
    c.rabi_amplitude = r["amplitude"];
    c.rabi_duration = r["duration_us"];
    c.rabi_sample = r["sample_us"];
    c.rabi_detuning = r["detuning"];
    c.rabi_phase = r["phase"];
    c.rabi_prominence = r["prominence"];

    c.pump = tone_from(j["tones"]["pump"]);
    c.probe = tone_from(j["tones"]["probe"]);

    const auto& cp = j["cpt"];
    c.probe_offsets = grid_from(cp["probe_offsets"]);
    c.window_us = cp["window_us"];
    c.ref_us = cp["ref_us"];
    c.prepulse_us = cp["prepulse_us"];
    c.laser_during_probe = cp["laser_during_probe"];
    c.ensemble_sigma = cp["ensemble_sigma"];
    c.ensemble_nodes = cp["ensemble_nodes"];
    c.reference_scan = cp["reference_scan"];

    c.pump_offsets_2d = grid_from(j["cpt2d"]["pump_offsets"]);
    c.probe_offsets_2d = grid_from(j["cpt2d"]["probe_offsets"]);

    c.odmr_grid = grid_from(j["odmr"]);
    for (const auto& s : j["odmr"]["sequence"]) {
      Json t = segment_template();
      t.update(s);
      SegmentSpec seg;
      seg.duration_us = t["duration_us"];
      seg.laser = t["laser"];
      seg.record = t["record"];
      for (const auto& tone : t["tones"]) seg.tones.push_back(tone_from(tone));
      c.sequence.push_back(seg);
    }
    c.shots = j["odmr"]["shots"];
    if (c.shots < 1) throw InputError("config: odmr.shots must be >= 1");

    c.edge_points = j["contrast"]["edge_points"];

    if (!j["larmor"]["field"].is_null()) c.larmor_field = j["larmor"]["field"].get<double>();
    c.larmor_mode = parse_larmor_mode(j["larmor"]["mode"]);
    c.modulation_prominence = j["larmor"]["prominence"];
    c.modulation_exclusion = j["larmor"]["exclusion"];

    c.calibrate_magnitude = j["calibrate"]["start_magnitude"];
    c.calibrate_tilt = j["calibrate"]["start_tilt"];
    for (const auto& l : j["calibrate"]["lines"]) {
      Json t = line_template();
      t.update(l);
      c.lines.push_back({t["name"], t["frequency"]});
    }

    c.seed = j["seed"];
    c.out_dir = j["out_dir"];
    c.svg = j["svg"];
  } catch (const Json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  if (path.empty()) return to_run_config(default_config());
  return to_run_config(merge_config(parse_config_text(read_file(path), path)));
}

Json to_json(const ToneSpec& t) {
  Json j = tone_template();
  j["target"] = t.target;
  if (t.frequency) j["frequency"] = *t.frequency;
  j["offset"] = t.offset;
  j["amplitude"] = t.amplitude;
  j["phase"] = t.phase;
  return j;
}

}  // namespace nvcpt::cli
