#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <chrono>
#include <map>

#include "nvcpt/transitions.hpp"

using namespace nvcpt;

namespace {

GroundState at(double b, double tilt, double azimuth = 0) {
  return solve_ground_state(HamiltonianParams{}, MagneticField{b, tilt, azimuth});
}

// |<f| S.d |i>| straight from the eigenvectors, S.d built from the spin matrices
double element(const GroundState& g, int i, int f, const Eigen::Vector3d& d) {
  const auto ops = spin1_operators();
  Matrix9cd v = Matrix9cd::Zero();
  for (int a = 0; a < 3; ++a) v += d[a] * ops.S9[a];
  return std::abs((g.eig.vectors.col(f).adjoint() * v * g.eig.vectors.col(i))(0, 0));
}

}  // namespace

TEST_CASE("table shape") {
  const auto t = transition_table(at(30, 88));
  REQUIRE(t.transitions.size() == 18);
  for (size_t k = 1; k < t.transitions.size(); ++k) CHECK(t.transitions[k].frequency >= t.transitions[k - 1].frequency);
  int named = 0, allowed = 0;
  for (const auto& tr : t.transitions) {
    CHECK(tr.lower_label.ms == 0);
    CHECK(tr.upper_label.ms != 0);
    CHECK(tr.frequency > 0);
    CHECK(tr.matrix_element >= 0);
    named += !tr.name.empty();
    allowed += tr.cls == TransitionClass::allowed;
    CHECK((tr.cls == TransitionClass::allowed) == (tr.lower_label.mi == tr.upper_label.mi));
  }
  CHECK(named == 10);
  CHECK(allowed == 6);
}

TEST_CASE("frequencies and elements from eigenvalues and eigenvectors") {
  const auto g = at(30, 88);
  const auto t = transition_table(g);
  const Eigen::Vector3d d = DriveVector{}.direction;
  for (const auto& tr : t.transitions) {
    CHECK(tr.frequency == doctest::Approx(g.eig.values[tr.upper] - g.eig.values[tr.lower]).epsilon(1e-14));
    CHECK(tr.matrix_element == doctest::Approx(element(g, tr.lower, tr.upper, d)).epsilon(1e-12));
    CHECK(element(g, tr.upper, tr.lower, d) == doctest::Approx(tr.matrix_element).epsilon(1e-12));
  }
}

TEST_CASE("named lines at 30 G, 88 deg") {
  const auto t = transition_table(at(30, 88));
  const std::map<std::string, std::pair<double, double>> expect{
      {"1-", {2868.4483, 0.5355}}, {"b", {2870.1898, 0.0337}}, {"2-", {2870.5072, 0.7052}},
      {"3-", {2872.2419, 0.5353}}, {"a", {2873.9838, 0.0406}}, {"3", {2875.1408, 0.5346}},
      {"2", {2876.8724, 0.7049}},  {"1", {2878.9306, 0.5352}}, {"c", {2881.8192, 0.0125}},
      {"d", {2881.8234, 0.0408}}};
  for (const auto& [name, fe] : expect) {
    CAPTURE(name);
    const Transition& tr = t.at(name);
    CHECK(std::abs(tr.frequency - fe.first) < 1e-4);
    CHECK(std::abs(tr.matrix_element - fe.second) < 1e-4);
  }
  CHECK(t.frequency("c-d") == doctest::Approx(0.5 * (t.at("c").frequency + t.at("d").frequency)));
  CHECK_THROWS_AS(t.at("zz"), InputError);
  CHECK(t.find("zz") == nullptr);
}

TEST_CASE("forbidden c is weaker than allowed 3") {
  const auto t = transition_table(at(30, 88));
  CHECK(t.at("c").matrix_element > 0);
  CHECK(t.at("c").matrix_element < t.at("3").matrix_element);
}

TEST_CASE("named forbidden lines are at least 3x weaker than every allowed line") {
  const auto t = transition_table(at(30, 88));
  double weakest = INFINITY;
  for (const auto& tr : t.transitions)
    if (tr.cls == TransitionClass::allowed) weakest = std::min(weakest, tr.matrix_element);
  for (const char* n : {"a", "b", "c", "d"}) {
    CAPTURE(n);
    CHECK(t.at(n).matrix_element > 0);
    CHECK(3 * t.at(n).matrix_element <= weakest);
  }
}

TEST_CASE("zero tilt selection rule without transverse hyperfine") {
  HamiltonianParams p;
  p.A_xx = p.A_yy = 0;
  const auto t = transition_table(solve_ground_state(p, MagneticField{30, 0, 0}));
  for (const auto& tr : t.transitions) {
    if (tr.cls == TransitionClass::forbidden)
      CHECK(tr.matrix_element < 1e-10);
    else
      CHECK(tr.matrix_element == doctest::Approx(M_SQRT1_2).epsilon(1e-12));
  }
}

TEST_CASE("zero tilt with full hyperfine: only the two flip-flop partners leak") {
  // |0,-1> <-> |-1,+1> and |0,+1> <-> |+1,-1> keep mS+mI changing by one, so
  // second order A_perp mixing gives them ~1e-5; everything else stays zero
  const auto g = at(30, 0);
  const auto t = transition_table(g);
  int leaking = 0;
  for (const auto& tr : t.transitions) {
    if (tr.cls != TransitionClass::forbidden) {
      CHECK(tr.matrix_element == doctest::Approx(M_SQRT1_2).epsilon(1e-4));
      continue;
    }
    const int dm = (tr.upper_label.ms + tr.upper_label.mi) - (tr.lower_label.ms + tr.lower_label.mi);
    if (std::abs(dm) == 1) {
      ++leaking;
      CHECK(tr.matrix_element > 1e-6);
      CHECK(tr.matrix_element < 1e-4);
    } else {
      CHECK(tr.matrix_element < 1e-10);
    }
  }
  CHECK(leaking == 2);
}

TEST_CASE("forbidden elements grow with tilt") {
  // a, b, d rise all the way to 80 deg; c peaks near 65 deg and falls again
  std::map<std::string, double> prev;
  for (int a = 0; a <= 80; ++a) {
    const auto t = transition_table(at(30, a));
    for (const char* n : {"a", "b", "c", "d"}) {
      CAPTURE(n);
      CAPTURE(a);
      const double m = t.at(n).matrix_element;
      if (a > 0 && (std::string(n) != "c" || a <= 60)) CHECK(m >= prev[n]);
      prev[n] = m;
    }
  }
  CHECK(transition_table(at(30, 80)).at("c").matrix_element < transition_table(at(30, 65)).at("c").matrix_element);
}

TEST_CASE("sum rule over all ordered pairs") {
  for (double tilt : {0.0, 35.0, 88.0}) {
    const auto g = at(45, tilt, 10);
    const Eigen::Vector3d d(0.3, -0.5, 0.8);
    double sum = 0;
    for (int i = 0; i < 9; ++i)
      for (int f = 0; f < 9; ++f) sum += std::pow(element(g, i, f, d), 2);
    CHECK(sum == doctest::Approx(6 * d.squaredNorm()).epsilon(1e-12));
    const Matrix9cd op = drive_operator(d);
    CHECK((op * op).trace().real() == doctest::Approx(6 * d.squaredNorm()).epsilon(1e-12));
  }
}

TEST_CASE("azimuth rotation with co-rotated drive") {
  const double phi = 37.0;
  const auto t0 = transition_table(at(30, 70, 0));
  DriveVector d;
  const double r = phi * M_PI / 180;
  d.direction = Eigen::Vector3d(std::cos(r) * M_SQRT1_2 - std::sin(r) * M_SQRT1_2,
                                std::sin(r) * M_SQRT1_2 + std::cos(r) * M_SQRT1_2, 0);
  const auto t1 = transition_table(at(30, 70, phi), d);
  for (size_t k = 0; k < 18; ++k) {
    CHECK(t1.transitions[k].frequency == doctest::Approx(t0.transitions[k].frequency).epsilon(1e-12));
    CHECK(t1.transitions[k].matrix_element == doctest::Approx(t0.transitions[k].matrix_element).epsilon(1e-8));
  }
}

TEST_CASE("nuclear drive option changes elements only slightly") {
  TransitionOptions opt;
  opt.include_nuclear_drive = true;
  const auto a = transition_table(at(30, 88));
  const auto b = transition_table(at(30, 88), DriveVector{}, opt);
  for (size_t k = 0; k < 18; ++k)
    CHECK(std::abs(a.transitions[k].matrix_element - b.transitions[k].matrix_element) < 1e-3);
}

TEST_CASE("unlabelled eigensystem is rejected") {
  GroundState g = at(30, 88);
  g.eig.labels.clear();
  CHECK_THROWS_AS(transition_table(g), InputError);
}

TEST_CASE("drive vector validation") {
  DriveVector d;
  d.direction = Eigen::Vector3d::Zero();
  CHECK_THROWS_AS(d.validate(), InputError);
  d.direction = Eigen::Vector3d(3, 0, 4);
  CHECK(d.normalized().direction.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("angle scan") {
  std::vector<double> grid;
  for (int a = 0; a <= 90; ++a) grid.push_back(a);
  const AngleScan s = angle_scan(HamiltonianParams{}, 30, grid);
  CHECK(s.states.size() == 9);
  for (const auto& c : s.level_curves) CHECK(c.size() == 91);
  for (const auto& c : s.transition_curves) CHECK(c.size() == 91);

  // the point at 88 deg agrees with a direct evaluation
  const auto t = transition_table(at(30, 88));
  for (size_t n = 0; n < named_transitions().size(); ++n) {
    CAPTURE(s.transition_names[n]);
    CHECK(s.transition_curves[n][88] == doctest::Approx(t.at(s.transition_names[n]).frequency).epsilon(1e-13));
  }

  auto curve = [&](const std::string& n) {
    for (size_t k = 0; k < s.transition_names.size(); ++k)
      if (s.transition_names[k] == n) return s.transition_curves[k];
    FAIL("missing curve " << n);
    return std::vector<double>{};
  };
  // 13C sideband of "3" sits on top of "c" at small tilt and has separated near 90 deg
  const auto side = curve("3 13C+");
  const auto c = curve("c");
  for (int a = 0; a <= 15; ++a) {
    CAPTURE(a);
    CHECK(std::abs(side[a] - c[a]) < 0.5);
  }
  CHECK(std::abs(side[90] - c[90]) > 1.0);
}

TEST_CASE("angle scan at zero field is flat") {
  const AngleScan s = angle_scan(HamiltonianParams{}, 0, {0, 30, 60, 90});
  for (const auto& c : s.level_curves)
    for (double v : c) CHECK(v == doctest::Approx(c[0]).epsilon(1e-12));
}

TEST_CASE("angle scan input errors") {
  CHECK_THROWS_AS(angle_scan(HamiltonianParams{}, 30, {0, 10, 5}), InputError);
  CHECK_THROWS_AS(angle_scan(HamiltonianParams{}, 30, {0, 95}), InputError);
  CHECK_THROWS_AS(angle_scan(HamiltonianParams{}, 30, {}), InputError);
}

TEST_CASE("coarse grid loses tracking") {
  CHECK_THROWS_AS(angle_scan(HamiltonianParams{}, 3000, {0, 89}), StepSizeError);
}

TEST_CASE("calibration round trip on synthetic lines") {
  const auto t = transition_table(at(30, 88));
  std::vector<MeasuredLine> lines;
  for (const char* n : {"1-", "2-", "3", "2", "1", "c-d"}) lines.push_back({n, t.frequency(n)});
  const auto r = calibrate_field(HamiltonianParams{}, lines, MagneticField{28, 86.5, 0});
  CHECK(r.converged);
  CHECK(std::abs(r.field.magnitude - 30) < 0.1);
  CHECK(std::abs(r.field.tilt - 88) < 0.05);
  CHECK(r.rms < 1e-6);
}

TEST_CASE("calibration on the reference lines") {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = calibrate_field(HamiltonianParams{}, reference_lines(), MagneticField{30, 89.5, 0});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(secs < 1.0);
  CHECK(r.converged);
  for (double res : r.residuals) CHECK(std::abs(res) < 0.5);
  CHECK(r.field.magnitude == doctest::Approx(30.0356).epsilon(1e-4));
  CHECK(r.field.tilt == doctest::Approx(88.4419).epsilon(1e-5));
  CHECK(r.rms == doctest::Approx(0.02765).epsilon(1e-3));
}

TEST_CASE("calibration input errors") {
  CHECK_THROWS_AS(calibrate_field(HamiltonianParams{}, {{"1", 2878.3}}, MagneticField{}), InputError);
  CHECK_THROWS_AS(calibrate_field(HamiltonianParams{}, {{"1", 2878.3}, {"q", 2870.0}}, MagneticField{}), InputError);
  CHECK_THROWS_AS(calibrate_field(HamiltonianParams{}, {{"1", 2878.3}, {"1", 2878.3}}, MagneticField{}), InputError);
}
