#pragma once

// Open-system dynamics of the driven, optically pumped 9-level ground state.
//
// States are propagated in the interaction picture of the static Hamiltonian
// (every eigenlevel rotating at its own frequency). Tones couple only pairs
// whose transition frequency lies within the RWA cutoff of the tone. Times in
// us, frequencies in MHz, rates in 1/us.

#include <string>
#include <vector>

#include "nvcpt/master_equation.hpp"
#include "nvcpt/transitions.hpp"

namespace nvcpt {

struct DissipatorConfig {
  double gamma_pump = 1.0;   // laser repolarisation mS = +-1 -> 0
  double p_flip = 0.1;       // chance a pump cycle randomises mI
  double gamma_2e = 0.3;     // electron dephasing
  double gamma_2n = 0.001;   // nuclear dephasing inside mS = 0
  double gamma_1 = 0.001;    // longitudinal relaxation across mS

  void validate() const;
  static DissipatorConfig none() { return {0.0, 0.0, 0.0, 0.0, 0.0}; }
};

struct ToneConfig {
  double frequency = 2870.0;  // MHz
  double rabi_scale = 0.0;    // microwave amplitude, G
  double phase = 0.0;         // rad
  std::string target;         // bookkeeping only

  void validate() const;
};

struct DynamicsOptions {
  double rwa_cutoff = 50.0;        // MHz
  double readout_contrast = 0.3;
  DriveVector drive{};             // direction of the microwave field; amplitude unused
  TransitionOptions transition{};
  double max_dt = 0.01;            // us

  void validate() const;
};

/// Fluorescence of a product-basis density matrix: P(mS=0) + (1 - c) P(mS=+-1).
double readout_signal(const Matrix9cd& rho_product, double contrast = 0.3);

class OpenSystem {
 public:
  OpenSystem(GroundState ground, DissipatorConfig diss = {}, DynamicsOptions opt = {});

  const GroundState& ground() const { return ground_; }
  const TransitionTable& table() const { return table_; }
  const DissipatorConfig& dissipators() const { return diss_; }
  const DynamicsOptions& options() const { return opt_; }
  /// <i| S.d |j> in the eigenbasis.
  const Matrix9cd& drive_matrix() const { return drive_; }

  /// Tone at a named transition (plus offset), amplitude in G.
  ToneConfig tone(const std::string& name, double amplitude, double offset = 0.0, double phase = 0.0) const;

  std::vector<Coupling> couplings(const std::vector<ToneConfig>& tones) const;
  /// Drive Hamiltonian in the interaction picture, MHz (not angular).
  Matrix9cd interaction_hamiltonian(const std::vector<ToneConfig>& tones, double t) const;
  LindbladSystem<kLevels> generator(const std::vector<ToneConfig>& tones, bool laser) const;

  /// Stationary state with the laser on and no microwaves.
  Matrix9cd laser_steady_state() const;
  /// Fluorescence of an interaction-picture state at time t.
  double readout(const Matrix9cd& rho, double t) const;
  /// Product-basis matrix with correct populations (intra-block coherences kept).
  Matrix9cd to_product(const Matrix9cd& rho, double t) const;

  /// Default step for a generator: min(max_dt, 1 / max rate).
  double auto_dt(const LindbladSystem<kLevels>& sys) const;

  const Eigen::Matrix<double, kLevels, 1>& frame() const { return frame_; }

 private:
  GroundState ground_;
  DissipatorConfig diss_;
  DynamicsOptions opt_;
  TransitionTable table_;
  Matrix9cd drive_;
  Matrix9cd readout_op_;
  Eigen::Matrix<double, kLevels, 1> frame_;
  LindbladSystem<kLevels> laser_part_;
  LindbladSystem<kLevels> rest_part_;
};

struct EvolveOptions {
  double dt = 0.0;         // 0: automatic
  bool probe_step = true;  // cap dt at 1/max rate, then halve on a short probe run if needed
  int keep_states = 0;     // keep every n-th state in the trajectory (0: none)
};

struct Trajectory {
  std::vector<double> times;
  std::vector<double> signal;  // readout at each step
  std::vector<Matrix9cd> states;
  Matrix9cd final_state;
  double t_end = 0.0;
  double dt = 0.0;
  long steps = 0;
};

Trajectory evolve(const OpenSystem& sys, const Matrix9cd& rho0, double t0, const std::vector<ToneConfig>& tones,
                  bool laser, double duration, const EvolveOptions& opt = {});

/// Laboratory-frame integration without the RWA and with the full dissipator, for
/// short validation runs. Returns the state transformed to the interaction picture.
Trajectory evolve_exact(const OpenSystem& sys, const Matrix9cd& rho0, const std::vector<ToneConfig>& tones, bool laser,
                        double duration, double dt = 0.0);

enum class Record { none, ref, signal };

const char* to_string(Record r);
Record parse_record(const std::string& s);

struct Segment {
  double duration_us = 1.0;
  bool laser = false;
  std::vector<ToneConfig> tones;
  Record record = Record::none;
};

struct PulseSequence {
  std::vector<Segment> segments;

  /// `require_windows`: exactly one ref and one signal window must be present.
  void validate(bool require_windows = true) const;
};

struct ShotsModel {
  int shots = 1;  // repetitions; the state carries over between shots
};

struct SequenceResult {
  double ref = 0.0;
  double signal = 0.0;
  double output = 0.0;  // ref - signal
  Matrix9cd final_state;
  double t_end = 0.0;
};

/// Runs the sequence from the laser steady state, averaging the readout over each record window.
SequenceResult run_sequence(const OpenSystem& sys, const PulseSequence& seq, const ShotsModel& shots = {},
                            const EvolveOptions& opt = {});

struct CptOptions {
  double window_us = 130.0;
  double ref_us = 1.0;
  bool laser_during_probe = true;
  double prepulse_us = 0.0;          // pump-only interval before the window
  double ensemble_sigma = 0.0;       // MHz, Gaussian spread of transition frequencies
  int ensemble_nodes = 1;
  int threads = 1;
  EvolveOptions evolve{};
};

struct CptScanResult {
  std::vector<double> probe;
  std::vector<double> pump;    // 2D scans only
  std::vector<double> signal;  // 1D: per probe; 2D: row-major pump x probe
  ToneConfig pump_tone;
  ToneConfig probe_tone;
  bool two_d = false;

  double at(size_t pump_index, size_t probe_index) const { return signal[pump_index * probe.size() + probe_index]; }
};

/// The pulse sequence used for a single scan point.
PulseSequence cpt_sequence(const ToneConfig& pump, const ToneConfig& probe, const CptOptions& opt);
double cpt_point(const OpenSystem& sys, const ToneConfig& pump, const ToneConfig& probe, const CptOptions& opt);

CptScanResult cpt_scan(const OpenSystem& sys, const ToneConfig& pump, const ToneConfig& probe,
                       const std::vector<double>& probe_grid, const CptOptions& opt = {});
CptScanResult cpt_2d_scan(const OpenSystem& sys, const ToneConfig& pump, const std::vector<double>& pump_grid,
                          const ToneConfig& probe, const std::vector<double>& probe_grid, const CptOptions& opt = {});
/// Single-tone scan: a CPT scan with the pump switched off.
CptScanResult odmr_scan(const OpenSystem& sys, const ToneConfig& probe, const std::vector<double>& grid,
                        const CptOptions& opt = {});

/// Frequency sweep of an arbitrary sequence; tones with `target == "scan"` take the grid frequency.
std::vector<double> sequence_scan(const OpenSystem& sys, const PulseSequence& seq, const std::vector<double>& grid,
                                  const ShotsModel& shots = {}, const EvolveOptions& opt = {}, int threads = 1);

struct RabiOptions {
  double duration_us = 10.0;
  double sample_us = 0.0;      // 0: every step
  double prominence = 0.2;     // fraction of the peak-to-peak swing
  double phase = 0.0;
  double detuning = 0.0;       // MHz, off the transition
  EvolveOptions evolve{};
};

struct RabiResult {
  std::string transition;
  double amplitude = 0.0;
  std::vector<double> times;
  std::vector<double> signal;
  double frequency = 0.0;  // extracted, MHz
  double expected = 0.0;   // gamma_e * amplitude * |element|
  int extrema = 0;
};

RabiResult simulate_rabi(const OpenSystem& sys, const std::string& transition, double amplitude,
                         const RabiOptions& opt = {});

/// Oscillation frequency from turning points (hysteresis by prominence, parabolic refinement).
/// Returns 0 with `extrema` < 2 when no oscillation is found; swings below 1e-8 count as flat.
double oscillation_frequency(const std::vector<double>& t, const std::vector<double>& y, double prominence,
                             int* extrema = nullptr);

/// Gauss-Hermite nodes and weights for the standard normal distribution.
void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace nvcpt
