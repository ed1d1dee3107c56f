#pragma once

// JSON run configuration: defaults, strict key checking, typed view.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nvcpt/contrast.hpp"
#include "nvcpt/dynamics.hpp"
#include "nvcpt/lineshape.hpp"

namespace nvcpt::cli {

using Json = nlohmann::ordered_json;

struct GridSpec {
  double start = 0;
  double stop = 0;
  double step = 1;

  std::vector<double> values(const std::string& what, double centre = 0.0) const;
};

struct ToneSpec {
  std::string target;                // transition name, "scan", or "" with an explicit frequency
  std::optional<double> frequency;   // MHz, overrides the target frequency
  double offset = 0;                 // MHz
  double amplitude = 0.05;           // G
  double phase = 0;
};

struct SegmentSpec {
  double duration_us = 1;
  bool laser = false;
  std::vector<ToneSpec> tones;
  std::string record = "none";
};

struct RunConfig {
  HamiltonianParams hamiltonian;
  MagneticField field;
  Eigen::Vector3d drive_direction{M_SQRT1_2, M_SQRT1_2, 0.0};
  bool include_nuclear_drive = false;

  DissipatorConfig dissipators;
  double rwa_cutoff = 50;
  double readout_contrast = 0.3;
  double max_dt = 0.01;
  double dt = 0;
  int threads = 1;

  GridSpec angles{0, 90, 1};
  double sideband_splitting = 13.4;

  OdmrModelParams model;
  GridSpec synth_grid{2860, 2890, 0.05};
  double synth_noise = 0.01;  // relative to the profile maximum

  std::vector<std::string> freeze{"Delta"};
  int fit_iterations = 200;

  std::string rabi_transition = "2";
  double rabi_amplitude = 0.05;
  double rabi_duration = 60;
  double rabi_sample = 0.05;
  double rabi_detuning = 0;
  double rabi_phase = 0;
  double rabi_prominence = 0.2;

  ToneSpec pump{"d", std::nullopt, 0, 0.05, 0};
  ToneSpec probe{"2", std::nullopt, 0, 0.05, 0};

  GridSpec probe_offsets{-0.3, 0.3, 0.025};
  double window_us = 130;
  double ref_us = 1;
  double prepulse_us = 0;
  bool laser_during_probe = true;
  double ensemble_sigma = 0;
  int ensemble_nodes = 1;
  bool reference_scan = true;

  GridSpec pump_offsets_2d{-0.1, 0.1, 0.05};
  GridSpec probe_offsets_2d{-0.2, 0.2, 0.05};

  GridSpec odmr_grid{2866, 2884, 0.1};
  std::vector<SegmentSpec> sequence;
  int shots = 1;

  int edge_points = 3;

  std::optional<double> larmor_field;
  LarmorMode larmor_mode = LarmorMode::standard;
  double modulation_prominence = 0.25;
  double modulation_exclusion = 2.0;

  double calibrate_magnitude = 30;
  double calibrate_tilt = 89.5;
  std::vector<MeasuredLine> lines;

  std::uint64_t seed = 1;
  std::string out_dir = "out";
  bool svg = false;
};

/// Every key with its default value.
const Json& default_config();

/// "section.key = value" lines for --help.
std::vector<std::string> describe_defaults();

/// Checks `user` against the defaults (unknown keys and type mismatches are InputErrors)
/// and returns the merged document.
Json merge_config(const Json& user);

/// Parses JSON text; syntax errors report line and column.
Json parse_config_text(const std::string& text, const std::string& origin);

RunConfig to_run_config(const Json& merged);

/// File at `path`, or all defaults when the path is empty.
RunConfig load_config(const std::string& path);

Json to_json(const ToneSpec& t);

}  // namespace nvcpt::cli
