#include "nvcpt/transitions.hpp"

#include <algorithm>
#include <cmath>

#include "nvcpt/least_squares.hpp"

namespace nvcpt {

void DriveVector::validate() const {
  if (!(amplitude >= 0)) throw InputError("drive amplitude must be >= 0");
  const double n = direction.norm();
  if (!(n > 0) || !direction.allFinite()) throw InputError("drive direction must be a nonzero vector");
}

DriveVector DriveVector::normalized() const {
  validate();
  DriveVector d = *this;
  d.direction /= direction.norm();
  return d;
}

const char* to_string(TransitionClass c) { return c == TransitionClass::allowed ? "allowed" : "forbidden"; }

namespace {

struct NamedPair {
  const char* name;
  int lower_mi;
  int upper_ms;
  int upper_mi;
};

constexpr NamedPair kNamed[] = {
    {"1", -1, 1, -1}, {"2", 0, 1, 0},   {"3", 1, 1, 1},  {"1-", -1, -1, -1}, {"2-", 0, -1, 0},
    {"3-", 1, -1, 1}, {"a", 0, 1, -1}, {"b", 0, 1, 1}, {"c", -1, 1, 0},    {"d", 1, 1, 0},
};

}  // namespace

const std::vector<std::string>& named_transitions() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& p : kNamed) v.emplace_back(p.name);
    return v;
  }();
  return names;
}

bool is_known_line(const std::string& name) {
  if (name == "c-d") return true;
  const auto& v = named_transitions();
  return std::find(v.begin(), v.end(), name) != v.end();
}

std::optional<std::string> transition_name(const StateLabel& lower, const StateLabel& upper) {
  if (lower.ms != 0) return std::nullopt;
  for (const auto& p : kNamed)
    if (p.lower_mi == lower.mi && p.upper_ms == upper.ms && p.upper_mi == upper.mi) return std::string(p.name);
  return std::nullopt;
}

std::pair<StateLabel, StateLabel> transition_labels(const std::string& name) {
  for (const auto& p : kNamed)
    if (name == p.name) return {StateLabel{0, p.lower_mi}, StateLabel{p.upper_ms, p.upper_mi}};
  throw InputError("unknown transition name '" + name + "'");
}

const Transition* TransitionTable::find(const std::string& name) const {
  for (const auto& t : transitions)
    if (t.name == name) return &t;
  return nullptr;
}

const Transition& TransitionTable::at(const std::string& name) const {
  const Transition* t = find(name);
  if (!t) throw InputError("transition '" + name + "' not present in the table");
  return *t;
}

double TransitionTable::frequency(const std::string& name) const {
  if (name == "c-d") return 0.5 * (at("c").frequency + at("d").frequency);
  return at(name).frequency;
}

Matrix9cd drive_operator(const Eigen::Vector3d& direction, const HamiltonianParams& p, const TransitionOptions& opt) {
  const auto ops = spin1_operators<double>();
  Matrix9cd m = Matrix9cd::Zero();
  for (int a = 0; a < 3; ++a) {
    m += direction[a] * ops.S9[a];
    if (opt.include_nuclear_drive) m -= (p.gamma_n / p.gamma_e) * direction[a] * ops.I9[a];
  }
  return m;
}

TransitionTable transition_table(const GroundState& g, const DriveVector& drive, const TransitionOptions& opt) {
  if (!g.eig.labeled()) throw InputError("transition_table: eigensystem is not labelled");
  const DriveVector d = drive.normalized();
  const Matrix9cd m = g.eig.vectors.adjoint() * drive_operator(d.direction, g.params, opt) * g.eig.vectors;

  TransitionTable table;
  table.field = g.field;
  for (int i = 0; i < kLevels; ++i) {
    if (g.eig.labels[i].ms != 0) continue;
    for (int f = 0; f < kLevels; ++f) {
      if (g.eig.labels[f].ms == 0) continue;
      Transition t;
      t.lower = i;
      t.upper = f;
      t.lower_label = g.eig.labels[i];
      t.upper_label = g.eig.labels[f];
      t.frequency = g.eig.values[f] - g.eig.values[i];
      t.coupling = m(i, f);
      t.matrix_element = std::abs(m(f, i));
      t.cls = t.lower_label.mi == t.upper_label.mi ? TransitionClass::allowed : TransitionClass::forbidden;
      t.name = transition_name(t.lower_label, t.upper_label).value_or("");
      table.transitions.push_back(t);
    }
  }
  std::stable_sort(table.transitions.begin(), table.transitions.end(),
                   [](const Transition& a, const Transition& b) { return a.frequency < b.frequency; });
  return table;
}

AngleScan angle_scan(const HamiltonianParams& params, double magnitude, const std::vector<double>& angles,
                     const AngleScanOptions& opt) {
  if (angles.empty()) throw InputError("angle_scan: empty grid");
  for (double a : angles)
    if (!(a >= 0 && a <= 90)) throw InputError("angle_scan: angles must lie in [0, 90] degrees");
  if (angles.size() > 1) {
    const bool up = angles[1] > angles[0];
    for (size_t k = 1; k < angles.size(); ++k)
      if ((angles[k] > angles[k - 1]) != up || angles[k] == angles[k - 1])
        throw InputError("angle_scan: grid must be strictly monotone");
  }

  AngleScan scan;
  scan.magnitude = magnitude;
  scan.angles = angles;
  const auto& names = named_transitions();
  for (const auto& n : names) scan.transition_names.push_back(n);
  std::vector<std::string> parents;
  for (const auto& n : names) {
    if (transition_labels(n).first.mi != transition_labels(n).second.mi) continue;
    parents.push_back(n);
    scan.transition_names.push_back(n + " 13C-");
    scan.transition_names.push_back(n + " 13C+");
  }
  const size_t nt = scan.transition_names.size();
  scan.transition_curves.assign(nt, std::vector<double>(angles.size()));
  scan.element_curves.assign(nt, std::vector<double>(angles.size()));
  scan.level_curves.assign(kLevels, std::vector<double>(angles.size()));

  EigenSystem previous;
  for (size_t k = 0; k < angles.size(); ++k) {
    MagneticField field{magnitude, angles[k], opt.azimuth};
    GroundState g;
    g.params = params;
    g.field = field;
    g.hamiltonian = build_hamiltonian(params, field);
    const EigenSystem raw = eigensolve<double, kLevels>(g.hamiltonian);
    g.eig = k == 0 ? label_states(raw) : label_states_tracked(raw, previous, opt.min_overlap);
    previous = g.eig;
    if (k == 0) scan.states = g.eig.labels;

    for (int s = 0; s < kLevels; ++s) {
      const auto& l = scan.states[s];
      scan.level_curves[s][k] = g.eig.values[g.eig.find(l.ms, l.mi)];
    }
    const TransitionTable table = transition_table(g, opt.drive);
    size_t col = 0;
    for (const auto& n : names) {
      const Transition& t = table.at(n);
      scan.transition_curves[col][k] = t.frequency;
      scan.element_curves[col][k] = t.matrix_element;
      ++col;
    }
    for (const auto& n : parents) {
      const Transition& t = table.at(n);
      for (double sgn : {-1.0, 1.0}) {
        scan.transition_curves[col][k] = t.frequency + sgn * 0.5 * opt.sideband_splitting;
        scan.element_curves[col][k] = t.matrix_element;
        ++col;
      }
    }
  }
  return scan;
}

std::vector<MeasuredLine> reference_lines() {
  return {{"1-", 2869.1}, {"2-", 2871.1}, {"3", 2874.9}, {"2", 2876.3}, {"1", 2878.3}, {"c-d", 2881.3}};
}

CalibrationResult calibrate_field(const HamiltonianParams& params, const std::vector<MeasuredLine>& measured,
                                  const MagneticField& initial) {
  params.validate();
  initial.validate();
  if (measured.size() < 2) throw InputError("calibrate_field: at least two measured lines are required");
  for (size_t i = 0; i < measured.size(); ++i) {
    if (!is_known_line(measured[i].name)) throw InputError("calibrate_field: unknown line '" + measured[i].name + "'");
    if (!std::isfinite(measured[i].frequency)) throw InputError("calibrate_field: non-finite frequency");
    for (size_t j = 0; j < i; ++j)
      if (measured[j].name == measured[i].name)
        throw InputError("calibrate_field: duplicate line '" + measured[i].name + "'");
  }

  auto compute = [&](const Eigen::VectorXd& x) {
    const MagneticField f{x[0], x[1], initial.azimuth};
    const TransitionTable t = transition_table(solve_ground_state(params, f));
    std::vector<double> out;
    for (const auto& m : measured) out.push_back(t.frequency(m.name));
    return out;
  };

  LmProblem pb;
  pb.residual = with_numeric_jacobian([&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
    const auto c = compute(x);
    r.resize(static_cast<int>(c.size()));
    for (size_t i = 0; i < c.size(); ++i) r[i] = c[i] - measured[i].frequency;
  });
  pb.lower = Eigen::Vector2d(0.0, 0.0);
  pb.upper = Eigen::Vector2d(1e4, 180.0);
  LmOptions opt;
  opt.max_iterations = 100;
  opt.cost_atol = 1e-18 * static_cast<double>(measured.size());
  const LmResult lm = levenberg_marquardt(pb, Eigen::Vector2d(initial.magnitude, initial.tilt), opt);

  CalibrationResult res;
  res.field = MagneticField{lm.x[0], lm.x[1], initial.azimuth};
  res.measured = measured;
  res.computed = compute(lm.x);
  double ss = 0;
  for (size_t i = 0; i < measured.size(); ++i) {
    res.residuals.push_back(res.computed[i] - measured[i].frequency);
    ss += res.residuals.back() * res.residuals.back();
  }
  res.rms = std::sqrt(ss / static_cast<double>(measured.size()));
  res.iterations = lm.iterations;
  res.converged = lm.converged;
  if (!res.converged) throw ConvergenceError("calibrate_field: " + lm.message);
  return res;
}

}  // namespace nvcpt
