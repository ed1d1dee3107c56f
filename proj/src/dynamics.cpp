#include "nvcpt/dynamics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace nvcpt {

void DissipatorConfig::validate() const {
  for (double r : {gamma_pump, gamma_2e, gamma_2n, gamma_1})
    if (!(r >= 0) || !std::isfinite(r)) throw InputError("dissipators: rates must be finite and >= 0");
  if (!(p_flip >= 0 && p_flip <= 1)) throw InputError("dissipators: p_flip must lie in [0, 1]");
}

void ToneConfig::validate() const {
  if (!(frequency > 0) || !std::isfinite(frequency)) throw InputError("tone: frequency must be positive");
  if (!(rabi_scale >= 0) || !std::isfinite(rabi_scale)) throw InputError("tone: amplitude must be >= 0");
  if (!std::isfinite(phase)) throw InputError("tone: phase must be finite");
}

void DynamicsOptions::validate() const {
  if (!(rwa_cutoff > 0)) throw InputError("dynamics: rwa_cutoff must be positive");
  if (!(readout_contrast >= 0 && readout_contrast <= 1)) throw InputError("dynamics: readout_contrast must lie in [0, 1]");
  if (!(max_dt > 0)) throw InputError("dynamics: max_dt must be positive");
  drive.validate();
}

double readout_signal(const Matrix9cd& rho, double c) {
  double s = 0.0;
  for (int k = 0; k < kLevels; ++k) s += (basis_ms(k) == 0 ? 1.0 : 1.0 - c) * rho(k, k).real();
  return s;
}

namespace {

enum Part { kDown, kSame, kUp };

// Secular split of an eigenbasis operator into the parts lowering, keeping and raising mS block.
std::array<Matrix9cd, 3> split_blocks(const Matrix9cd& l, const std::array<bool, kLevels>& lower) {
  std::array<Matrix9cd, 3> parts;
  for (auto& p : parts) p.setZero();
  for (int i = 0; i < kLevels; ++i)
    for (int j = 0; j < kLevels; ++j) {
      if (l(i, j) == cd(0.0, 0.0)) continue;
      const int part = lower[i] == lower[j] ? kSame : (lower[i] ? kDown : kUp);
      parts[part](i, j) = l(i, j);
    }
  return parts;
}

Matrix9cd ket_bra(int ms_to, int mi_to, int ms_from, int mi_from) {
  Matrix9cd m = Matrix9cd::Zero();
  m(basis_index(ms_to, mi_to), basis_index(ms_from, mi_from)) = 1.0;
  return m;
}

template <typename F>
std::vector<double> parallel_map(size_t n, int threads, F f) {
  std::vector<double> out(n);
  const size_t workers = std::min<size_t>(n, static_cast<size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> pool;
  for (size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (size_t i = next++; i < n; i = next++) {
        try {
          out[i] = f(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace

OpenSystem::OpenSystem(GroundState ground, DissipatorConfig diss, DynamicsOptions opt)
    : ground_(std::move(ground)), diss_(diss), opt_(std::move(opt)) {
  diss_.validate();
  opt_.validate();
  if (!ground_.eig.labeled()) throw InputError("dynamics: eigensystem is not labelled");
  opt_.drive = opt_.drive.normalized();
  table_ = transition_table(ground_, opt_.drive, opt_.transition);

  const Matrix9cd& v = ground_.eig.vectors;
  drive_ = v.adjoint() * drive_operator(opt_.drive.direction, ground_.params, opt_.transition) * v;

  std::array<bool, kLevels> lower{};
  double ref_low = 0, ref_up = 0;
  int n_low = 0, n_up = 0;
  for (int k = 0; k < kLevels; ++k) {
    lower[k] = ground_.eig.labels[k].ms == 0;
    (lower[k] ? ref_low : ref_up) += ground_.eig.values[k];
    (lower[k] ? n_low : n_up) += 1;
  }
  ref_low /= std::max(n_low, 1);
  ref_up /= std::max(n_up, 1);
  for (int k = 0; k < kLevels; ++k) frame_[k] = kTwoPi * (ground_.eig.values[k] - (lower[k] ? ref_low : ref_up));

  Matrix9cd o_prod = Matrix9cd::Zero();
  for (int k = 0; k < kLevels; ++k) o_prod(k, k) = basis_ms(k) == 0 ? 1.0 : 1.0 - opt_.readout_contrast;
  readout_op_ = v.adjoint() * o_prod * v;
  for (int i = 0; i < kLevels; ++i)
    for (int j = 0; j < kLevels; ++j)
      if (lower[i] != lower[j]) readout_op_(i, j) = 0.0;

  auto add = [&](LindbladSystem<kLevels>& sys, const Matrix9cd& l_prod) {
    const Matrix9cd l = v.adjoint() * l_prod * v;
    for (const auto& p : split_blocks(l, lower))
      if (p.cwiseAbs().maxCoeff() > 0) sys.add_jump(p);
  };

  laser_part_.frame = frame_;
  rest_part_.frame = frame_;
  if (diss_.gamma_pump > 0) {
    const double keep = std::sqrt(diss_.gamma_pump * (1.0 - diss_.p_flip));
    const double flip = std::sqrt(diss_.gamma_pump * diss_.p_flip / 3.0);
    for (int ms : {1, -1})
      for (int mi : {1, 0, -1}) {
        if (keep > 0) add(laser_part_, keep * ket_bra(0, mi, ms, mi));
        if (flip > 0)
          for (int mi2 : {1, 0, -1}) add(laser_part_, flip * ket_bra(0, mi2, ms, mi));
      }
  }
  const auto ops = spin1_operators<double>();
  if (diss_.gamma_2e > 0) add(rest_part_, std::sqrt(2.0 * diss_.gamma_2e) * ops.S9[2]);
  if (diss_.gamma_2n > 0) {
    Matrix3cd p0 = Matrix3cd::Zero();
    p0(1, 1) = 1.0;
    add(rest_part_, std::sqrt(2.0 * diss_.gamma_2n) * kron<double>(p0, ops.I[2]));
  }
  if (diss_.gamma_1 > 0) {
    const double r = std::sqrt(diss_.gamma_1 / 3.0);
    for (int s : {1, 0, -1})
      for (int s2 : {1, 0, -1}) {
        if (s == s2) continue;
        Matrix9cd l = Matrix9cd::Zero();
        for (int mi : {1, 0, -1}) l(basis_index(s2, mi), basis_index(s, mi)) = r;
        add(rest_part_, l);
      }
  }
}

ToneConfig OpenSystem::tone(const std::string& name, double amplitude, double offset, double phase) const {
  ToneConfig t;
  t.frequency = table_.frequency(name) + offset;
  t.rabi_scale = amplitude;
  t.phase = phase;
  t.target = name;
  t.validate();
  return t;
}

std::vector<Coupling> OpenSystem::couplings(const std::vector<ToneConfig>& tones) const {
  std::vector<Coupling> out;
  const auto& e = ground_.eig.values;
  for (const auto& tone : tones) {
    tone.validate();
    if (tone.rabi_scale == 0.0) continue;
    const double g = kTwoPi * ground_.params.gamma_e * 0.5 * tone.rabi_scale;
    for (int i = 0; i < kLevels; ++i)
      for (int j = 0; j < kLevels; ++j) {
        const double nu = e[j] - e[i];
        if (!(nu > 0) || std::abs(tone.frequency - nu) >= opt_.rwa_cutoff) continue;
        const cd m = drive_(i, j);
        if (m == cd(0.0, 0.0)) continue;
        out.push_back({i, j, g * m * std::polar(1.0, tone.phase), kTwoPi * (tone.frequency - nu)});
      }
  }
  return out;
}

Matrix9cd OpenSystem::interaction_hamiltonian(const std::vector<ToneConfig>& tones, double t) const {
  LindbladSystem<kLevels> sys;
  sys.couplings = couplings(tones);
  return sys.hamiltonian(t) / kTwoPi;
}

LindbladSystem<kLevels> OpenSystem::generator(const std::vector<ToneConfig>& tones, bool laser) const {
  LindbladSystem<kLevels> sys = rest_part_;
  if (laser && laser_part_.dissipative()) {
    if (!sys.dissipative()) sys.jump = Eigen::MatrixXcd::Zero(kLevels * kLevels, kLevels * kLevels);
    sys.jump += laser_part_.jump;
    sys.gamma += laser_part_.gamma;
  }
  sys.frame = frame_;
  sys.couplings = couplings(tones);
  sys.compress();
  return sys;
}

Matrix9cd OpenSystem::laser_steady_state() const {
  const LindbladSystem<kLevels> sys = generator({}, true);
  if (!sys.dissipative()) throw InputError("laser steady state needs nonzero dissipation");
  return sys.steady_state();
}

double OpenSystem::readout(const Matrix9cd& rho, double t) const {
  Eigen::Matrix<cd, kLevels, 1> p;
  for (int k = 0; k < kLevels; ++k) p[k] = std::polar(1.0, frame_[k] * t);
  cd s = 0.0;
  for (int i = 0; i < kLevels; ++i)
    for (int j = 0; j < kLevels; ++j) {
      if (readout_op_(i, j) == cd(0.0, 0.0)) continue;
      s += readout_op_(i, j) * std::conj(p[j]) * rho(j, i) * p[i];
    }
  return s.real();
}

Matrix9cd OpenSystem::to_product(const Matrix9cd& rho, double t) const {
  Matrix9cd sigma;
  for (int i = 0; i < kLevels; ++i)
    for (int j = 0; j < kLevels; ++j) {
      const bool same = ground_.lower(i) == ground_.lower(j);
      sigma(i, j) = same ? std::polar(1.0, (frame_[j] - frame_[i]) * t) * rho(i, j) : cd(0.0, 0.0);
    }
  return ground_.eig.vectors * sigma * ground_.eig.vectors.adjoint();
}

double OpenSystem::auto_dt(const LindbladSystem<kLevels>& sys) const {
  const double r = sys.max_rate();
  return r > 0 ? std::min(opt_.max_dt, 1.0 / r) : opt_.max_dt;
}

Trajectory evolve(const OpenSystem& sys, const Matrix9cd& rho0, double t0, const std::vector<ToneConfig>& tones,
                  bool laser, double duration, const EvolveOptions& opt) {
  if (!(duration > 0)) throw InputError("evolve: duration must be positive");
  const LindbladSystem<kLevels> gen = sys.generator(tones, laser);
  double dt = opt.dt > 0 ? opt.dt : sys.auto_dt(gen);
  if (opt.probe_step) {
    // trace is blind to a Hamiltonian instability, so bound the step by the fastest rate first
    const double r = gen.max_rate();
    if (r > 0) dt = std::min(dt, 1.0 / r);
    dt = probe_step<kLevels>(gen, rho0, dt);
  }
  const long n = std::max(1L, static_cast<long>(std::ceil(duration / dt - 1e-9)));
  IntegratorOptions io;
  io.dt = duration / static_cast<double>(n);

  Trajectory tr;
  tr.dt = io.dt;
  tr.steps = n;
  tr.times.reserve(static_cast<size_t>(n) + 1);
  tr.signal.reserve(static_cast<size_t>(n) + 1);
  tr.final_state = rk4_integrate<kLevels>(gen, rho0, t0, n, io, [&](long s, double t, const Matrix9cd& rho) {
    tr.times.push_back(t);
    tr.signal.push_back(sys.readout(rho, t));
    if (opt.keep_states > 0 && s % opt.keep_states == 0) tr.states.push_back(rho);
  });
  tr.t_end = t0 + duration;
  return tr;
}

Trajectory evolve_exact(const OpenSystem& sys, const Matrix9cd& rho0, const std::vector<ToneConfig>& tones, bool laser,
                        double duration, double dt) {
  if (!(duration > 0)) throw InputError("evolve_exact: duration must be positive");
  const auto& g = sys.ground();
  const auto& e = g.eig.values;
  const double mean = e.mean();
  const Matrix9cd& m = sys.drive_matrix();

  LindbladSystem<kLevels> gen;
  double f_max = e.maxCoeff() - e.minCoeff();
  for (int k = 0; k < kLevels; ++k) gen.h_static(k, k) = kTwoPi * (e[k] - mean);
  for (const auto& tone : tones) {
    tone.validate();
    if (tone.rabi_scale == 0.0) continue;
    f_max = std::max(f_max, tone.frequency);
    const double amp = kTwoPi * g.params.gamma_e * tone.rabi_scale * 0.5;
    const double w = kTwoPi * tone.frequency;
    for (int i = 0; i < kLevels; ++i)
      for (int j = i; j < kLevels; ++j) {
        if (m(i, j) == cd(0.0, 0.0)) continue;
        gen.couplings.push_back({i, j, amp * m(i, j) * std::polar(1.0, tone.phase), w});
        if (i != j) gen.couplings.push_back({i, j, amp * m(i, j) * std::polar(1.0, -tone.phase), -w});
      }
  }

  // Full (non-secular) dissipator in the eigenbasis, no frame rotation.
  const auto& dis = sys.dissipators();
  const Matrix9cd& v = g.eig.vectors;
  auto add = [&](const Matrix9cd& l_prod) { gen.add_jump(v.adjoint() * l_prod * v); };
  if (laser && dis.gamma_pump > 0) {
    const double keep = std::sqrt(dis.gamma_pump * (1.0 - dis.p_flip));
    const double flip = std::sqrt(dis.gamma_pump * dis.p_flip / 3.0);
    for (int ms : {1, -1})
      for (int mi : {1, 0, -1}) {
        if (keep > 0) add(keep * ket_bra(0, mi, ms, mi));
        if (flip > 0)
          for (int mi2 : {1, 0, -1}) add(flip * ket_bra(0, mi2, ms, mi));
      }
  }
  const auto ops = spin1_operators<double>();
  if (dis.gamma_2e > 0) add(std::sqrt(2.0 * dis.gamma_2e) * ops.S9[2]);
  if (dis.gamma_2n > 0) {
    Matrix3cd p0 = Matrix3cd::Zero();
    p0(1, 1) = 1.0;
    add(std::sqrt(2.0 * dis.gamma_2n) * kron<double>(p0, ops.I[2]));
  }
  if (dis.gamma_1 > 0) {
    const double r = std::sqrt(dis.gamma_1 / 3.0);
    for (int s : {1, 0, -1})
      for (int s2 : {1, 0, -1}) {
        if (s == s2) continue;
        Matrix9cd l = Matrix9cd::Zero();
        for (int mi : {1, 0, -1}) l(basis_index(s2, mi), basis_index(s, mi)) = r;
        add(l);
      }
  }

  if (!(dt > 0)) dt = 1.0 / (100.0 * f_max);
  const long n = std::max(1L, static_cast<long>(std::ceil(duration / dt - 1e-9)));
  IntegratorOptions io;
  io.dt = duration / static_cast<double>(n);

  auto to_interaction = [&](const Matrix9cd& rho, double t) {
    Matrix9cd out;
    for (int i = 0; i < kLevels; ++i)
      for (int j = 0; j < kLevels; ++j) out(i, j) = std::polar(1.0, kTwoPi * (e[i] - e[j]) * t) * rho(i, j);
    return out;
  };
  auto from_interaction = [&](const Matrix9cd& rho, double t) { return to_interaction(rho, -t); };

  Matrix9cd o_prod = Matrix9cd::Zero();
  for (int k = 0; k < kLevels; ++k) o_prod(k, k) = basis_ms(k) == 0 ? 1.0 : 1.0 - sys.options().readout_contrast;
  const Matrix9cd o = v.adjoint() * o_prod * v;

  Trajectory tr;
  tr.dt = io.dt;
  tr.steps = n;
  const Matrix9cd lab = from_interaction(rho0, 0.0);
  const Matrix9cd fin = rk4_integrate<kLevels>(gen, lab, 0.0, n, io, [&](long, double t, const Matrix9cd& rho) {
    tr.times.push_back(t);
    tr.signal.push_back((o * rho).trace().real());
  });
  tr.final_state = to_interaction(fin, duration);
  tr.t_end = duration;
  return tr;
}

const char* to_string(Record r) {
  switch (r) {
    case Record::ref:
      return "ref";
    case Record::signal:
      return "signal";
    default:
      return "none";
  }
}

Record parse_record(const std::string& s) {
  if (s == "none") return Record::none;
  if (s == "ref") return Record::ref;
  if (s == "signal") return Record::signal;
  throw InputError("record must be one of none, ref, signal (got '" + s + "')");
}

void PulseSequence::validate(bool require_windows) const {
  if (segments.empty()) throw InputError("sequence: no segments");
  int refs = 0, sigs = 0;
  for (const auto& s : segments) {
    if (!(s.duration_us > 0)) throw InputError("sequence: segment durations must be positive");
    for (const auto& t : s.tones) t.validate();
    refs += s.record == Record::ref;
    sigs += s.record == Record::signal;
  }
  if (refs > 1 || sigs > 1) throw InputError("sequence: at most one ref and one signal window per shot");
  if (require_windows && (refs != 1 || sigs != 1))
    throw InputError("sequence: missing record window (need one ref and one signal)");
}

namespace {

double window_average(const Trajectory& tr) {
  double acc = 0.0;
  for (size_t i = 1; i < tr.times.size(); ++i)
    acc += 0.5 * (tr.signal[i] + tr.signal[i - 1]) * (tr.times[i] - tr.times[i - 1]);
  return acc / (tr.times.back() - tr.times.front());
}

}  // namespace

SequenceResult run_sequence(const OpenSystem& sys, const PulseSequence& seq, const ShotsModel& shots,
                            const EvolveOptions& opt) {
  seq.validate(true);
  if (shots.shots < 1) throw InputError("sequence: shots must be >= 1");
  SequenceResult res;
  Matrix9cd rho = sys.laser_steady_state();
  double t = 0.0;
  EvolveOptions eo = opt;
  eo.keep_states = 0;
  for (int shot = 0; shot < shots.shots; ++shot) {
    for (const auto& seg : seq.segments) {
      const Trajectory tr = evolve(sys, rho, t, seg.tones, seg.laser, seg.duration_us, eo);
      if (seg.record == Record::ref) res.ref += window_average(tr);
      if (seg.record == Record::signal) res.signal += window_average(tr);
      rho = tr.final_state;
      t = tr.t_end;
    }
  }
  res.ref /= shots.shots;
  res.signal /= shots.shots;
  res.output = res.ref - res.signal;
  res.final_state = rho;
  res.t_end = t;
  return res;
}

PulseSequence cpt_sequence(const ToneConfig& pump, const ToneConfig& probe, const CptOptions& opt) {
  PulseSequence seq;
  seq.segments.push_back({opt.ref_us, true, {}, Record::ref});
  if (opt.prepulse_us > 0) seq.segments.push_back({opt.prepulse_us, true, {pump}, Record::none});
  seq.segments.push_back({opt.window_us, opt.laser_during_probe, {pump, probe}, Record::signal});
  return seq;
}

double cpt_point(const OpenSystem& sys, const ToneConfig& pump, const ToneConfig& probe, const CptOptions& opt) {
  if (opt.ensemble_nodes < 1) throw InputError("cpt: ensemble_nodes must be >= 1");
  if (!(opt.ensemble_sigma >= 0)) throw InputError("cpt: ensemble_sigma must be >= 0");
  std::vector<double> nodes{0.0}, weights{1.0};
  if (opt.ensemble_sigma > 0 && opt.ensemble_nodes > 1) gauss_hermite(opt.ensemble_nodes, nodes, weights);
  double out = 0.0;
  for (size_t k = 0; k < nodes.size(); ++k) {
    ToneConfig a = pump, b = probe;
    a.frequency -= opt.ensemble_sigma * nodes[k];
    b.frequency -= opt.ensemble_sigma * nodes[k];
    out += weights[k] * run_sequence(sys, cpt_sequence(a, b, opt), {}, opt.evolve).output;
  }
  return out;
}

CptScanResult cpt_scan(const OpenSystem& sys, const ToneConfig& pump, const ToneConfig& probe,
                       const std::vector<double>& probe_grid, const CptOptions& opt) {
  for (size_t i = 1; i < probe_grid.size(); ++i)
    if (!(probe_grid[i] > probe_grid[i - 1])) throw InputError("cpt: probe grid must be strictly ascending");
  if (probe_grid.empty()) throw InputError("cpt: empty probe grid");
  CptScanResult res;
  res.probe = probe_grid;
  res.pump_tone = pump;
  res.probe_tone = probe;
  res.signal = parallel_map(probe_grid.size(), opt.threads, [&](size_t i) {
    ToneConfig p = probe;
    p.frequency = probe_grid[i];
    return cpt_point(sys, pump, p, opt);
  });
  return res;
}

CptScanResult cpt_2d_scan(const OpenSystem& sys, const ToneConfig& pump, const std::vector<double>& pump_grid,
                          const ToneConfig& probe, const std::vector<double>& probe_grid, const CptOptions& opt) {
  for (const auto* g : {&pump_grid, &probe_grid}) {
    if (g->empty()) throw InputError("cpt2d: empty grid");
    for (size_t i = 1; i < g->size(); ++i)
      if (!((*g)[i] > (*g)[i - 1])) throw InputError("cpt2d: grids must be strictly ascending");
  }
  CptScanResult res;
  res.two_d = true;
  res.pump = pump_grid;
  res.probe = probe_grid;
  res.pump_tone = pump;
  res.probe_tone = probe;
  const size_t np = probe_grid.size();
  res.signal = parallel_map(pump_grid.size() * np, opt.threads, [&](size_t k) {
    ToneConfig a = pump, b = probe;
    a.frequency = pump_grid[k / np];
    b.frequency = probe_grid[k % np];
    return cpt_point(sys, a, b, opt);
  });
  return res;
}

CptScanResult odmr_scan(const OpenSystem& sys, const ToneConfig& probe, const std::vector<double>& grid,
                        const CptOptions& opt) {
  ToneConfig off = probe;
  off.rabi_scale = 0.0;
  off.target = "";
  return cpt_scan(sys, off, probe, grid, opt);
}

std::vector<double> sequence_scan(const OpenSystem& sys, const PulseSequence& seq, const std::vector<double>& grid,
                                  const ShotsModel& shots, const EvolveOptions& opt, int threads) {
  seq.validate(true);
  return parallel_map(grid.size(), threads, [&](size_t i) {
    PulseSequence s = seq;
    for (auto& seg : s.segments)
      for (auto& t : seg.tones)
        if (t.target == "scan") t.frequency = grid[i];
    return run_sequence(sys, s, shots, opt).output;
  });
}

double oscillation_frequency(const std::vector<double>& t, const std::vector<double>& y, double prominence,
                             int* extrema) {
  if (extrema) *extrema = 0;
  if (t.size() != y.size() || t.size() < 3) return 0.0;
  const double hi_all = *std::max_element(y.begin(), y.end());
  const double lo_all = *std::min_element(y.begin(), y.end());
  const double swing = hi_all - lo_all;
  if (!(swing > 1e-8 * std::max(1.0, std::abs(hi_all)))) return 0.0;
  const double thr = prominence * swing;
  const size_t n = y.size();

  std::vector<double> times;
  auto record = [&](size_t i) {
    if (i == 0 || i + 1 >= n) return;
    const double ym = y[i - 1], y0 = y[i], yp = y[i + 1];
    const double den = ym - 2.0 * y0 + yp;
    double off = den != 0.0 ? 0.5 * (ym - yp) / den : 0.0;
    off = std::clamp(off, -0.5, 0.5);
    const double h = off >= 0 ? t[i + 1] - t[i] : t[i] - t[i - 1];
    times.push_back(t[i] + off * h);
  };

  int dir = 0;
  size_t hi_i = 0, lo_i = 0;
  double hi = y[0], lo = y[0];
  for (size_t i = 1; i < n; ++i) {
    if (dir >= 0 && y[i] > hi) {
      hi = y[i];
      hi_i = i;
    }
    if (dir <= 0 && y[i] < lo) {
      lo = y[i];
      lo_i = i;
    }
    if (dir >= 0 && hi - y[i] >= thr) {
      record(hi_i);
      dir = -1;
      lo = y[i];
      lo_i = i;
    } else if (dir <= 0 && y[i] - lo >= thr) {
      record(lo_i);
      dir = 1;
      hi = y[i];
      hi_i = i;
    }
  }
  if (extrema) *extrema = static_cast<int>(times.size());
  if (times.size() < 2) return 0.0;
  // Least-squares slope of extremum time against index is half a period.
  const double m = static_cast<double>(times.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t k = 0; k < times.size(); ++k) {
    const double x = static_cast<double>(k);
    sx += x;
    sy += times[k];
    sxx += x * x;
    sxy += x * times[k];
  }
  const double half = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return half > 0 ? 0.5 / half : 0.0;
}

RabiResult simulate_rabi(const OpenSystem& sys, const std::string& transition, double amplitude,
                         const RabiOptions& opt) {
  const Transition& tr = sys.table().at(transition);
  if (!(opt.duration_us > 0)) throw InputError("rabi: duration must be positive");
  ToneConfig tone;
  tone.frequency = tr.frequency + opt.detuning;
  tone.rabi_scale = amplitude;
  tone.phase = opt.phase;
  tone.target = transition;
  tone.validate();

  RabiResult res;
  res.transition = transition;
  res.amplitude = amplitude;
  res.expected = sys.ground().params.gamma_e * amplitude * std::abs(sys.drive_matrix()(tr.lower, tr.upper));

  const Trajectory traj = evolve(sys, sys.laser_steady_state(), 0.0, {tone}, false, opt.duration_us, opt.evolve);
  res.frequency = oscillation_frequency(traj.times, traj.signal, opt.prominence, &res.extrema);
  double next = 0.0;
  for (size_t i = 0; i < traj.times.size(); ++i) {
    if (opt.sample_us > 0 && traj.times[i] + 1e-9 < next && i + 1 != traj.times.size()) continue;
    res.times.push_back(traj.times[i]);
    res.signal.push_back(traj.signal[i]);
    next = traj.times[i] + opt.sample_us;
  }
  return res;
}

void gauss_hermite(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw InputError("gauss_hermite: need n >= 1");
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) j(k, k - 1) = j(k - 1, k) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
  nodes.resize(static_cast<size_t>(n));
  weights.resize(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    nodes[static_cast<size_t>(k)] = es.eigenvalues()[k];
    weights[static_cast<size_t>(k)] = es.eigenvectors()(0, k) * es.eigenvectors()(0, k);
  }
}

}  // namespace nvcpt
