#include "czsim/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <random>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "czsim/nelder_mead.hpp"
#include "czsim/parallel.hpp"
#include "czsim/roots.hpp"

namespace czsim {

namespace {

constexpr Real kNaN = std::numeric_limits<Real>::quiet_NaN();

// dressed qubit frequencies and their derivatives d(w~_q)/d(o_m) = |v_mq|^2
struct QubitPair {
  std::array<Real, 2> freq{};
  Eigen::Matrix2d jacobian;
};

QubitPair qubit_pair(const DeviceSpec& spec, Real wc, Real o1, Real o2) {
  const auto& g = spec.couplings;
  Eigen::Matrix3d m;
  m << spec.q1().frequency + o1, g.g_1c, g.g_12,  //
      g.g_1c, wc, g.g_2c,                          //
      g.g_12, g.g_2c, spec.q2().frequency + o2;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
  const auto& v = es.eigenvectors();
  QubitPair out;
  for (int q = 0; q < 2; ++q) {
    const int row = q == 0 ? 0 : 2;
    int best = 0;
    for (int j = 1; j < 3; ++j)
      if (std::abs(v(row, j)) > std::abs(v(row, best))) best = j;
    out.freq[q] = es.eigenvalues()(best);
    out.jacobian(q, 0) = v(0, best) * v(0, best);
    out.jacobian(q, 1) = v(2, best) * v(2, best);
  }
  return out;
}

}  // namespace

std::array<Real, 2> compensation_offsets(const DeviceSpec& spec, Real coupler_frequency,
                                         const std::array<Real, 2>& target, std::array<Real, 2> guess) {
  Eigen::Vector2d o(guess[0], guess[1]);
  for (int it = 0; it < 60; ++it) {
    const auto p = qubit_pair(spec, coupler_frequency, o(0), o(1));
    const Eigen::Vector2d r(p.freq[0] - target[0], p.freq[1] - target[1]);
    if (r.cwiseAbs().maxCoeff() < 1e-12) return {o(0), o(1)};
    Eigen::Vector2d step = p.jacobian.partialPivLu().solve(r);
    // damp steps that would jump across the coupler
    const Real cap = 0.05;
    if (step.cwiseAbs().maxCoeff() > cap) step *= cap / step.cwiseAbs().maxCoeff();
    o -= step;
    if (!o.allFinite()) break;
  }
  throw Error("compensation_failed",
              fmt::format("no compensating offsets found at coupler frequency {:.6f} GHz", coupler_frequency));
}

std::vector<CompensationPoint> compensation_curve(const DeviceSpec& spec, const std::vector<Real>& coupler_frequencies,
                                                  Real q2_detune) {
  spec.validate();
  const Real w0 = zero_coupling_point(spec);
  const auto ref = dressed_qubit_frequencies(spec, w0, 0.0, q2_detune);
  std::vector<CompensationPoint> out;
  std::array<Real, 2> guess{0.0, q2_detune};
  for (Real wc : coupler_frequencies) {
    for (ModeLabel q : {ModeLabel::Q1, ModeLabel::Q2})
      if (std::abs(spec.mode(q).frequency - wc) < spec.resonance_guard)
        throw Error("coupler_resonance",
                    fmt::format("coupler at {:.6f} GHz is within the resonance guard of {}", wc, to_string(q)));
    CompensationPoint p;
    p.coupler_frequency = wc;
    const auto raw = dressed_qubit_frequencies(spec, wc, 0.0, q2_detune);
    p.q1_shift = raw[0] - ref[0];
    p.q2_shift = raw[1] - ref[1];
    try {
      guess = compensation_offsets(spec, wc, ref, guess);
    } catch (const Error&) {
      guess = compensation_offsets(spec, wc, ref, {0.0, q2_detune});
    }
    p.q1_offset = guess[0];
    p.q2_offset = guess[1];
    out.push_back(p);
  }
  return out;
}

// ---- gate pipeline ---------------------------------------------------------

GateModel::GateModel(const DeviceSpec& spec) : spec_(spec), terms_(build_hamiltonian(spec)), map_(spec) {}

OperatingPoint GateModel::idle(Real q2_detune) const { return {map_.zero_point(), 0.0, q2_detune}; }

ControlSchedule GateModel::schedule(const PulseShapeSpec& pulse, const GateOptions& options) const {
  // a distorted line is a genuine zero-order hold at the sample rate, so only
  // undistorted pulses are sampled at the Gauss nodes
  const bool gauss = !options.distortion;
  SampledWaveform wf = gauss ? sample_pulse_gauss(pulse, options.dt) : sample_pulse(pulse, options.dt);
  if (options.distortion) {
    // the line carries the excursion from idle; it starts from rest
    SampledWaveform dev = wf;
    dev.samples.array() -= pulse.idle_value;
    if (options.predistort) dev = predistort(*options.distortion, dev);
    dev = apply_distortion(*options.distortion, dev);
    wf.samples = dev.samples.array() + pulse.idle_value;
  }

  ControlSchedule s;
  Real idle_coupler = pulse.idle_value;
  if (wf.parameterization == Parameterization::EffectiveCoupling) {
    s.coupler_trajectory = coupling_to_frequency(map_, wf);
    idle_coupler = map_.frequency(pulse.idle_value);
  } else {
    s.coupler_trajectory = wf;
  }
  s.idle = {idle_coupler, 0.0, options.q2_detune};
  if (gauss) s.sampling = ControlSampling::GaussPairs;

  if (options.compensate) {
    const auto target = dressed_qubit_frequencies(spec_, idle_coupler, 0.0, options.q2_detune);
    SampledWaveform q1 = s.coupler_trajectory, q2 = s.coupler_trajectory;
    std::map<Real, std::array<Real, 2>> memo;
    std::array<Real, 2> guess{0.0, options.q2_detune};
    for (Eigen::Index k = 0; k < s.steps(); ++k) {
      const Real wc = s.coupler_trajectory.samples(k);
      auto it = memo.find(wc);
      if (it == memo.end()) {
        try {
          guess = compensation_offsets(spec_, wc, target, guess);
        } catch (const Error&) {
          guess = compensation_offsets(spec_, wc, target, {0.0, options.q2_detune});
        }
        it = memo.emplace(wc, guess).first;
      }
      q1.samples(k) = it->second[0];
      q2.samples(k) = it->second[1];
    }
    s.q1_offsets = std::move(q1);
    s.q2_offsets = std::move(q2);
  }
  return s;
}

PropagationResult GateModel::propagate(const PulseShapeSpec& pulse, const GateOptions& options) const {
  return czsim::propagate(terms_, schedule(pulse, options), options.propagator);
}

GateReport GateModel::evaluate(const PulseShapeSpec& pulse, const GateOptions& options) const {
  // the report only reads the computational states and |2,i,0>
  GateOptions o = options;
  if (o.propagator.max_excitations < 0) o.propagator.max_excitations = 2;
  return evaluate_gate(propagate(pulse, o));
}

// ---- calibration -----------------------------------------------------------

CalibrationResult calibrate_gate(const GateModel& model, const PulseShapeSpec& start, const GateOptions& options,
                                 const CalibrationOptions& copts) {
  const bool coupling = start.parameterization == Parameterization::EffectiveCoupling;
  const auto& map = model.coupling_map();
  const Real lo = std::max(copts.peak_min, coupling ? map.min_coupling() : map.min_frequency());
  const Real hi = std::min(copts.peak_max, coupling ? map.max_coupling() : map.max_frequency());
  const bool fit_lambda = copts.fit_lambda && start.family == PulseFamily::Slepian;
  const int n = fit_lambda ? 3 : 2;

  auto apply = [&](const Eigen::VectorXd& x) {
    PulseShapeSpec p = start;
    p.peak_value = x(0);
    if (fit_lambda) p.slepian_coefficients = {x(2), 0.0, 1.0 - x(2)};
    GateOptions o = options;
    o.q2_detune = x(1);
    return std::pair{p, o};
  };
  auto objective = [&](const Eigen::VectorXd& x) {
    Real outside = std::max({0.0, lo - x(0), x(0) - hi, copts.detune_min - x(1), x(1) - copts.detune_max});
    if (fit_lambda) outside = std::max({outside, -x(2), x(2) - 2.0});
    if (outside > 0.0) return 1.0 + outside;
    const auto [p, o] = apply(x);
    try {
      return 1.0 - model.evaluate(p, o).fidelity;
    } catch (const Error&) {
      return 2.0;
    }
  };

  Eigen::VectorXd x0(n), steps(n);
  x0(0) = start.peak_value;
  x0(1) = options.q2_detune;
  steps(0) = coupling ? copts.peak_step : 10.0 * copts.peak_step;
  steps(1) = copts.detune_step;
  if (fit_lambda) {
    x0(2) = start.slepian_coefficients.empty() ? 1.0 : start.slepian_coefficients[0];
    steps(2) = copts.lambda_step;
  }
  NelderMeadOptions<Real> nm;
  nm.diameter_tolerance = 1e-7;
  nm.value_spread_tolerance = 1e-12;
  nm.max_iterations = copts.max_iterations;
  const auto r = nelder_mead_minimize(objective, axis_simplex(x0, steps), nm);

  CalibrationResult out;
  std::tie(out.pulse, std::ignore) = apply(r.point);
  out.q2_detune = r.point(1);
  GateOptions o = options;
  o.q2_detune = out.q2_detune;
  out.report = model.evaluate(out.pulse, o);
  out.evaluations = r.evaluations + 1;
  out.hit_iteration_cap = r.hit_iteration_cap;
  return out;
}

std::vector<RoughPoint> rough_cz_points(const GateModel& model, const PulseShapeSpec& pulse,
                                        const GateOptions& options, const std::vector<Real>& peaks,
                                        const std::vector<Real>& detunes, std::size_t keep, int workers) {
  if (peaks.empty() || detunes.empty()) throw Error("invalid_grid", "rough search needs non-empty axes");
  const std::size_t cols = peaks.size();
  std::vector<Real> fid(peaks.size() * detunes.size(), -1.0);
  parallel_for(fid.size(), workers, [&](std::size_t i) {
    PulseShapeSpec p = pulse;
    p.peak_value = peaks[i % cols];
    GateOptions o = options;
    o.q2_detune = detunes[i / cols];
    try {
      fid[i] = model.evaluate(p, o).fidelity;
    } catch (const Error&) {
    }
  });
  std::vector<std::size_t> order(fid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fid[a] > fid[b]; });
  std::vector<RoughPoint> out;
  for (std::size_t i : order) {
    if (out.size() >= keep || fid[i] < 0.0) break;
    out.push_back({peaks[i % cols], detunes[i / cols], fid[i]});
  }
  if (out.empty()) throw Error("calibration_failed", "no grid point could be evaluated");
  return out;
}

CalibrationResult calibrate_cz(const GateModel& model, const PulseShapeSpec& pulse, const GateOptions& options,
                               const CalibrationOptions& copts, const CzSearch& search, int workers) {
  const auto& map = model.coupling_map();
  std::vector<Real> peaks, detunes;
  if (pulse.parameterization == Parameterization::EffectiveCoupling) {
    // the strong-coupling side is the negative one above the zero point
    const Real extreme = std::max(copts.peak_min, map.min_coupling());
    for (int i = 1; i <= search.peak_points; ++i) peaks.push_back(extreme * i / search.peak_points);
  } else {
    // uniform in coupling, so the grid is dense where g_eff(w) is steep
    for (int i = 1; i <= search.peak_points; ++i) {
      const Real w = map.frequency(map.min_coupling() * i / search.peak_points);
      if (w >= copts.peak_min && w <= copts.peak_max) peaks.push_back(w);
    }
    if (peaks.empty()) peaks.push_back(std::clamp(map.zero_point(), copts.peak_min, copts.peak_max));
  }
  for (int i = 0; i < search.detune_points; ++i)
    detunes.push_back(search.detune_min +
                      (search.detune_max - search.detune_min) * i / std::max(1, search.detune_points - 1));
  const auto rough = rough_cz_points(model, pulse, options, peaks, detunes,
                                     static_cast<std::size_t>(std::max(1, search.starts)), workers);

  std::vector<CalibrationResult> results(rough.size());
  parallel_for(rough.size(), workers, [&](std::size_t i) {
    PulseShapeSpec p = pulse;
    p.peak_value = rough[i].peak;
    GateOptions o = options;
    o.q2_detune = rough[i].q2_detune;
    results[i] = calibrate_gate(model, p, o, copts);
  });
  std::size_t best = 0;
  int evaluations = static_cast<int>(peaks.size() * detunes.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    evaluations += results[i].evaluations;
    if (results[i].report.fidelity > results[best].report.fidelity) best = i;
  }
  CalibrationResult out = results[best];
  out.evaluations = evaluations;
  return out;
}

std::vector<CalibrationResult> length_sweep(const GateModel& model, const PulseShapeSpec& pulse,
                                            const GateOptions& options, const std::vector<Real>& lengths,
                                            const CalibrationOptions& copts, const CzSearch& search,
                                            Real warm_accept, int workers) {
  std::vector<CalibrationResult> out;
  out.reserve(lengths.size());
  for (const Real length : lengths) {
    PulseShapeSpec p = pulse;
    p.length = length;
    if (out.empty()) {
      out.push_back(calibrate_cz(model, p, options, copts, search, workers));
      continue;
    }
    const CalibrationResult& prev = out.back();
    PulseShapeSpec warm = prev.pulse;
    warm.length = length;
    if (warm.parameterization == Parameterization::EffectiveCoupling)
      warm.peak_value *= prev.pulse.length / length;  // keeps the pulse area
    GateOptions o = options;
    o.q2_detune = prev.q2_detune;
    CalibrationResult r;
    try {
      r = calibrate_gate(model, warm, o, copts);
    } catch (const Error&) {
      r.report.fidelity = -1.0;
    }
    if (r.report.fidelity < warm_accept) {
      CalibrationResult full = calibrate_cz(model, p, options, copts, search, workers);
      full.evaluations += r.evaluations;
      if (full.report.fidelity >= r.report.fidelity) r = std::move(full);
    }
    out.push_back(std::move(r));
  }
  return out;
}

OptimizeResult optimize_pulse(const GateModel& model, const PulseShapeSpec& pulse, const GateOptions& options,
                              const OptimizeOptions& oopts, const CalibrationOptions& copts, const CzSearch& search,
                              int workers) {
  if (!(oopts.length_min > 0.0) || oopts.length_max < oopts.length_min || !(oopts.length_step > 0.0))
    throw Error("invalid_argument", "optimize needs 0 < length_min <= length_max and a positive step");
  OptimizeResult out;
  for (int k = 0;; ++k) {
    const Real length = oopts.length_min + k * oopts.length_step;
    if (length > oopts.length_max + 1e-9) break;
    PulseShapeSpec p = pulse;
    p.length = length;
    out.trials.push_back(calibrate_cz(model, p, options, copts, search, workers));
    out.hit_iteration_cap = out.hit_iteration_cap || out.trials.back().hit_iteration_cap;
    if (out.trials.back().report.fidelity >= oopts.threshold) {
      out.threshold_met = true;
      break;
    }
  }
  std::size_t best = out.trials.size() - 1;
  if (!out.threshold_met)
    for (std::size_t i = 0; i < out.trials.size(); ++i)
      if (out.trials[i].report.fidelity > out.trials[best].report.fidelity) best = i;
  out.best = out.trials[best];
  return out;
}

Real phase_degrees(Real conditional_phase) {
  if (!std::isfinite(conditional_phase)) return kNaN;
  Real d = rad_to_deg(conditional_phase);
  d = std::fmod(d, 360.0);
  if (d < 0.0) d += 360.0;
  return d;
}

std::optional<Real> calibrate_peak_for_phase(const GateModel& model, const PulseShapeSpec& pulse,
                                             const GateOptions& options, Real lo, Real hi) {
  auto f = [&](Real peak) {
    PulseShapeSpec p = pulse;
    p.peak_value = peak;
    return phase_degrees(model.evaluate(p, options).conditional_phase) - 180.0;
  };
  const Real flo = f(lo), fhi = f(hi);
  if (!std::isfinite(flo) || !std::isfinite(fhi)) return std::nullopt;
  return brent_root(f, lo, hi, 1e-10);
}

// ---- scans -------------------------------------------------------------------

namespace {

void check_axis(const char* name, const std::vector<Real>& axis) {
  if (axis.empty()) throw Error("invalid_grid", fmt::format("{} is empty", name));
  if (axis.size() < 2) return;
  const bool up = axis[1] > axis[0];
  for (std::size_t i = 1; i < axis.size(); ++i)
    if (!(up ? axis[i] > axis[i - 1] : axis[i] < axis[i - 1]))
      throw Error("invalid_grid", fmt::format("{} is not strictly monotone at index {}", name, i));
}

}  // namespace

void ScanGrid::validate() const {
  check_axis("coupling_axis", coupling_axis);
  check_axis("detune_axis", detune_axis);
  if (!gate_count_axis.empty()) {
    std::vector<Real> g(gate_count_axis.begin(), gate_count_axis.end());
    check_axis("gate_count_axis", g);
    for (int n : gate_count_axis)
      if (n < 1) throw Error("invalid_grid", "gate counts must be positive");
  }
}

std::string to_string(ScanKind kind) {
  switch (kind) {
    case ScanKind::Leakage:
      return "leakage";
    case ScanKind::Phase:
      return "phase_deg";
    case ScanKind::PhaseDeviation:
      return "phase_deviation_deg";
    case ScanKind::Population:
      return "population";
  }
  return "?";
}

void ScanResult::write_csv(std::ostream& out) const {
  out << row_name << '\\' << column_name;
  for (Real c : column_axis) out << ',' << fmt::format("{:.10g}", c);
  out << '\n';
  for (std::size_t r = 0; r < row_axis.size(); ++r) {
    out << fmt::format("{:.10g}", row_axis[r]);
    for (Eigen::Index c = 0; c < values.cols(); ++c)
      out << ',' << fmt::format("{:.10g}", values(static_cast<Eigen::Index>(r), c));
    out << '\n';
  }
}

std::pair<ScanResult, ScanResult> leakage_phase_scan(const GateModel& model, const ScanGrid& grid,
                                                     const PulseShapeSpec& pulse, const GateOptions& options,
                                                     int workers) {
  grid.validate();
  const auto rows = grid.detune_axis.size(), cols = grid.coupling_axis.size();
  ScanResult leak, phase;
  for (auto* s : {&leak, &phase}) {
    s->row_name = "q2_detune_ghz";
    s->column_name = "peak";
    s->row_axis = grid.detune_axis;
    s->column_axis = grid.coupling_axis;
    s->values = MatrixXr::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  }
  leak.kind = ScanKind::Leakage;
  phase.kind = ScanKind::Phase;
  parallel_for(rows * cols, workers, [&](std::size_t i) {
    const auto r = static_cast<Eigen::Index>(i / cols), c = static_cast<Eigen::Index>(i % cols);
    PulseShapeSpec p = pulse;
    p.peak_value = grid.coupling_axis[static_cast<std::size_t>(c)];
    GateOptions o = options;
    o.q2_detune = grid.detune_axis[static_cast<std::size_t>(r)];
    try {
      const auto result = model.propagate(p, o);
      leak.values(r, c) = leakage_from_11(result).total;
      const Matrix4c m = project_computational(result);
      phase.values(r, c) = (m.diagonal().cwiseAbs().array() > 0.1).all() ? phase_degrees(conditional_phase(m)) : kNaN;
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("grid point (detune {:.6g}, peak {:.6g}): {}", o.q2_detune, p.peak_value,
                                        e.what()));
    }
  });
  return {std::move(leak), std::move(phase)};
}

ScanResult leakage_scan(const GateModel& model, const ScanGrid& grid, const PulseShapeSpec& pulse,
                        const GateOptions& options, int workers) {
  return leakage_phase_scan(model, grid, pulse, options, workers).first;
}

ScanResult phase_scan(const GateModel& model, const ScanGrid& grid, const PulseShapeSpec& pulse,
                      const GateOptions& options, int workers) {
  return leakage_phase_scan(model, grid, pulse, options, workers).second;
}

RepeatedGatePoint repeated_gate_point(const HamiltonianTerms& terms, const PropagationResult& single, int n) {
  if (n < 1) throw Error("invalid_argument", "gate count must be positive");
  // back-to-back gates compose in the lab frame
  const MatrixXc lab = frame_rotation(single.basis, terms, single.duration) * single.propagator;
  MatrixXc power = lab;
  for (int k = 1; k < n; ++k) power = lab * power;
  PropagationResult rep;
  rep.basis = single.basis;
  rep.duration = single.duration * n;
  rep.propagator = frame_rotation(single.basis, terms, rep.duration).adjoint() * power;
  RepeatedGatePoint out;
  out.leakage = leakage_from_11(rep).total;
  const Matrix4c m = project_computational(rep);
  if (!(m.diagonal().cwiseAbs().array() > 0.1).all()) {
    out.deviation_degrees = kNaN;
    return out;
  }
  out.deviation_degrees = rad_to_deg(wrap_angle(conditional_phase(m) - n * kPi));
  return out;
}

RepeatedGateScan repeated_gate_scan(const GateModel& model, const PulseShapeSpec& pulse, const GateOptions& options,
                                    const std::vector<int>& gate_counts, RepeatAxis axis,
                                    const std::vector<Real>& axis_values, int workers) {
  ScanGrid check;
  check.coupling_axis = axis == RepeatAxis::Coupling ? axis_values : std::vector<Real>{pulse.peak_value};
  check.detune_axis = axis == RepeatAxis::Detune ? axis_values : std::vector<Real>{options.q2_detune};
  check.gate_count_axis = gate_counts;
  if (gate_counts.empty()) throw Error("invalid_grid", "gate_count_axis is empty");
  check.validate();

  RepeatedGateScan out;
  const auto rows = static_cast<Eigen::Index>(gate_counts.size());
  const auto cols = static_cast<Eigen::Index>(axis_values.size());
  for (auto* s : {&out.leakage, &out.deviation}) {
    s->row_name = "n_cz";
    s->column_name = axis == RepeatAxis::Coupling ? "peak" : "q2_detune_ghz";
    s->row_axis.assign(gate_counts.begin(), gate_counts.end());
    s->column_axis = axis_values;
    s->values = MatrixXr::Zero(rows, cols);
  }
  out.leakage.kind = ScanKind::Leakage;
  out.deviation.kind = ScanKind::PhaseDeviation;
  parallel_for(axis_values.size(), workers, [&](std::size_t c) {
    PulseShapeSpec p = pulse;
    GateOptions o = options;
    if (axis == RepeatAxis::Coupling)
      p.peak_value = axis_values[c];
    else
      o.q2_detune = axis_values[c];
    const auto single = model.propagate(p, o);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto pt = repeated_gate_point(model.terms(), single, gate_counts[static_cast<std::size_t>(r)]);
      out.leakage.values(r, static_cast<Eigen::Index>(c)) = pt.leakage;
      out.deviation.values(r, static_cast<Eigen::Index>(c)) = pt.deviation_degrees;
    }
  });
  return out;
}

// ---- Ramsey emulation -----------------------------------------------------------

Real ramsey_fringe_phase(const Matrix4c& gate, int control_state, const RamseyOptions& options) {
  if (control_state != 0 && control_state != 1) throw Error("invalid_argument", "control_state must be 0 or 1");
  if (options.shots != 0 && options.shots < 100)
    throw Error("invalid_argument", fmt::format("shots must be 0 (exact) or >= 100, got {}", options.shots));
  if (options.phase_points < 3) throw Error("invalid_argument", "need at least 3 phase points");

  // |q1 q2> index 2 q1 + q2; Q2 after X/2 is (|0> - i|1>)/sqrt2
  Vector4c psi = Vector4c::Zero();
  const Real s = 1.0 / std::sqrt(2.0);
  psi(2 * control_state + 0) = s;
  psi(2 * control_state + 1) = Complex(0.0, -s);
  psi = gate * psi;

  std::mt19937_64 rng(options.seed * 2 + static_cast<std::uint64_t>(control_state));
  const int k = options.phase_points;
  MatrixXr design(k, 3);
  VectorXr p1(k);
  for (int j = 0; j < k; ++j) {
    const Real phi = kTwoPi * j / k;
    // pi/2 about cos(phi) X + sin(phi) Y on Q2
    Eigen::Matrix2cd r;
    const Complex c(std::cos(kPi / 4), 0.0), m(0.0, -std::sin(kPi / 4));
    r << c, m * std::polar(1.0, -phi), m * std::polar(1.0, phi), c;
    Real prob = 0.0;
    for (int q1 = 0; q1 < 2; ++q1) {
      const Eigen::Vector2cd local(psi(2 * q1), psi(2 * q1 + 1));
      prob += std::norm((r * local)(1));
    }
    if (options.readout) {
      const auto [f00, f11] = *options.readout;
      prob = (1.0 - f00) * (1.0 - prob) + f11 * prob;
    }
    prob = std::clamp(prob, 0.0, 1.0);
    if (options.shots > 0) {
      std::binomial_distribution<int> draw(options.shots, prob);
      prob = static_cast<Real>(draw(rng)) / options.shots;
    }
    design(j, 0) = 1.0;
    design(j, 1) = std::cos(phi);
    design(j, 2) = std::sin(phi);
    p1(j) = prob;
  }
  const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(p1);
  const Real contrast = 2.0 * std::hypot(coef(1), coef(2));
  if (!(contrast >= 0.1))
    throw Error("fit_failed", fmt::format("Ramsey fringe contrast {:.3g} is below 0.1", contrast));
  return std::atan2(coef(2), coef(1));
}

Real ramsey_conditional_phase(const Matrix4c& gate, const RamseyOptions& options) {
  return wrap_angle(ramsey_fringe_phase(gate, 1, options) - ramsey_fringe_phase(gate, 0, options));
}

}  // namespace czsim
