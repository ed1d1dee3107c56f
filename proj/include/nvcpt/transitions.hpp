#pragma once

// Microwave transitions between the mS = 0 manifold and the mS = +-1 manifolds.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nvcpt/spin_model.hpp"

namespace nvcpt {

struct DriveVector {
  double amplitude = 1.0;                                   // G
  Eigen::Vector3d direction{M_SQRT1_2, M_SQRT1_2, 0.0};     // NV frame

  void validate() const;
  DriveVector normalized() const;
};

enum class TransitionClass { allowed, forbidden };

const char* to_string(TransitionClass c);

struct Transition {
  StateLabel lower_label;
  StateLabel upper_label;
  int lower = -1;  // eigenstate indices
  int upper = -1;
  double frequency = 0.0;       // MHz
  double matrix_element = 0.0;  // |<upper| S.d |lower>|, multiply by gamma_e * amplitude for MHz
  cd coupling{0.0, 0.0};        // <lower| S.d |upper>
  TransitionClass cls = TransitionClass::allowed;
  std::string name;  // "" when the pair has no conventional name
};

struct TransitionTable {
  MagneticField field;
  std::vector<Transition> transitions;  // ascending frequency

  const Transition* find(const std::string& name) const;
  const Transition& at(const std::string& name) const;  // throws InputError
  /// Frequency of a named line; "c-d" is the mean of c and d.
  double frequency(const std::string& name) const;
};

struct TransitionOptions {
  bool include_nuclear_drive = false;
};

/// Conventional name of the transition between two product labels, if any.
std::optional<std::string> transition_name(const StateLabel& lower, const StateLabel& upper);

/// Names understood by TransitionTable::frequency.
const std::vector<std::string>& named_transitions();
bool is_known_line(const std::string& name);

/// Lower (mS = 0) and upper product labels of a named transition.
std::pair<StateLabel, StateLabel> transition_labels(const std::string& name);

/// Drive operator S.d (optionally minus gamma_n/gamma_e I.d) in the product basis.
Matrix9cd drive_operator(const Eigen::Vector3d& direction, const HamiltonianParams& p = {},
                         const TransitionOptions& opt = {});

TransitionTable transition_table(const GroundState& g, const DriveVector& drive = {}, const TransitionOptions& opt = {});

struct AngleScan {
  double magnitude = 0.0;
  std::vector<double> angles;
  std::vector<StateLabel> states;                       // curve labels, in order of the first point
  std::vector<std::vector<double>> level_curves;        // [state][angle], MHz
  std::vector<std::string> transition_names;            // named lines then 13C sidebands
  std::vector<std::vector<double>> transition_curves;   // [name][angle], MHz
  std::vector<std::vector<double>> element_curves;      // [name][angle]; sidebands copy the parent
};

struct AngleScanOptions {
  double azimuth = 0.0;
  double sideband_splitting = 13.4;  // MHz, sidebands at +-splitting/2
  double min_overlap = 0.5;
  DriveVector drive{};
};

AngleScan angle_scan(const HamiltonianParams& params, double magnitude, const std::vector<double>& angles,
                     const AngleScanOptions& opt = {});

struct MeasuredLine {
  std::string name;
  double frequency = 0.0;
};

/// The six lines of the reference near-perpendicular measurement.
std::vector<MeasuredLine> reference_lines();

struct CalibrationResult {
  MagneticField field;
  std::vector<MeasuredLine> measured;
  std::vector<double> computed;
  std::vector<double> residuals;  // computed - measured
  double rms = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Damped least-squares fit of (magnitude, tilt) to measured named lines; azimuth is held fixed.
CalibrationResult calibrate_field(const HamiltonianParams& params, const std::vector<MeasuredLine>& measured,
                                  const MagneticField& initial);

}  // namespace nvcpt
