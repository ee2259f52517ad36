// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include <sys/wait.h>

#include <fmt/core.h>

#include "czsim/io.hpp"
#include "czsim/parallel.hpp"

using namespace czsim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// defects of every propagated gate the run reports on
Real worst_defect = 0.0;

void note(const GateReport& r) { worst_defect = std::max(worst_defect, r.unitarity_defect); }

const RunConfig& config() {
  static const RunConfig cfg = load_config(CZSIM_SOURCE_DIR "/configs/default.json");
  return cfg;
}

const GateModel& model() {
  static const GateModel m(config().device);
  return m;
}

int workers() { return default_worker_count(); }

PulseShapeSpec family_pulse(PulseFamily f) {
  PulseShapeSpec p = config().pulse;
  p.family = f;
  return p;
}

const CalibrationResult& slepian45() {
  static const CalibrationResult r = [] {
    const auto c = calibrate_cz(model(), family_pulse(PulseFamily::Slepian), config().gate_options(),
                                config().calibration_options(), CzSearch{}, workers());
    note(c.report);
    return c;
  }();
  return r;
}

GateOptions options_at(const CalibrationResult& r) {
  GateOptions o = config().gate_options();
  o.q2_detune = r.q2_detune;
  return o;
}

Real op_norm(const MatrixXc& a) { return Eigen::JacobiSVD<MatrixXc>(a).singularValues()(0); }

int count_local_maxima(const std::vector<Real>& v) {
  int n = 0;
  for (std::size_t i = 1; i + 1 < v.size(); ++i)
    if (v[i] > v[i - 1] && v[i] > v[i + 1]) ++n;
  return n;
}

// ---- criteria ---------------------------------------------------------------

Outcome waveform_study() {
  const auto& cfg = config();
  auto best = [&](PulseFamily f) {
    const auto r = optimize_pulse(model(), family_pulse(f), cfg.gate_options(), cfg.optimize,
                                  cfg.calibration_options(), CzSearch{}, workers());
    for (const auto& t : r.trials) note(t.report);
    Real top = 0.0;
    for (const auto& t : r.trials) top = std::max(top, t.report.fidelity);
    return std::pair{r, top};
  };
  const auto [slepian, s_top] = best(PulseFamily::Slepian);
  const auto [cosine, c_top] = best(PulseFamily::Cosine);
  const auto [square, q_top] = best(PulseFamily::Square);
  const bool pass = slepian.threshold_met && cosine.threshold_met && q_top < s_top && q_top < c_top;
  return {pass, fmt::format("slepian {:.6f} at {} ns, cosine {:.6f} at {} ns, best square {:.6f} at {} ns",
                            slepian.best.report.fidelity, slepian.best.pulse.length, cosine.best.report.fidelity,
                            cosine.best.pulse.length, q_top, square.best.pulse.length)};
}

Outcome leakage_thresholds() {
  const auto& cfg = config();
  std::vector<Real> lengths;
  for (int l = 20; l <= 80; l += 5) lengths.push_back(l);
  auto sweep = [&](PulseFamily f) {
    const auto rs = length_sweep(model(), family_pulse(f), cfg.gate_options(), lengths, cfg.calibration_options(),
                                 CzSearch{}, 0.99999, workers());
    std::vector<Real> leak;
    for (const auto& r : rs) {
      note(r.report);
      leak.push_back(r.report.leakage_from_11);
    }
    return leak;
  };
  bool pass = true;
  Real worst_smooth = 0.0;
  for (auto f : {PulseFamily::Slepian, PulseFamily::Cosine}) {
    const auto leak = sweep(f);
    for (std::size_t i = 0; i < lengths.size(); ++i)
      if (lengths[i] >= 45.0) worst_smooth = std::max(worst_smooth, leak[i]);
  }
  pass = pass && worst_smooth < 1e-4;
  const auto sq = sweep(PulseFamily::Square);
  const int maxima = count_local_maxima(sq);
  const Real peak = *std::max_element(sq.begin(), sq.end());
  pass = pass && maxima >= 2 && peak >= 5e-4;
  return {pass, fmt::format("smooth leakage >= 45 ns at most {:.2e}; square has {} local maxima, peak {:.2e}",
                            worst_smooth, maxima, peak)};
}

Outcome compensation() {
  const auto& cc = config().compensation;
  const DeviceSpec& d = config().device;
  std::vector<Real> wcs;
  for (int i = 0; i < cc.points; ++i) wcs.push_back(cc.from + (cc.to - cc.from) * i / (cc.points - 1));
  const Real det = config().gate.q2_detune;
  const auto curve = compensation_curve(d, wcs, det);
  const auto ref = dressed_qubit_frequencies(d, zero_coupling_point(d), 0.0, det);
  Real lo = 1e300, hi = -1e300, rlo = 1e300, rhi = -1e300;
  for (const auto& p : curve) {
    lo = std::min(lo, p.q1_shift);
    hi = std::max(hi, p.q1_shift);
    const auto f = dressed_qubit_frequencies(d, p.coupler_frequency, p.q1_offset, p.q2_offset);
    rlo = std::min({rlo, f[0] - ref[0], f[1] - ref[1]});
    rhi = std::max({rhi, f[0] - ref[0], f[1] - ref[1]});
  }
  const Real near = curve.front().q1_shift, span = hi - lo, residual = rhi - rlo;
  const bool pass = near < 0.0 && near == lo && residual < 0.01 * span;
  return {pass, fmt::format("Q1 shift {:.2f} MHz at {} GHz, span {:.2f} MHz, compensated residual {:.2e} MHz",
                            1e3 * near, curve.front().coupler_frequency, 1e3 * span, 1e3 * residual)};
}

Outcome calibration_point() {
  const auto& cal = slepian45();
  const GateOptions o = options_at(cal);
  ScanGrid g;
  for (int i = -10; i <= 10; ++i) g.coupling_axis.push_back(cal.pulse.peak_value * (1.0 - 0.01 * i));
  for (int i = -10; i <= 10; ++i) g.detune_axis.push_back(cal.q2_detune + 0.0005 * i);
  const auto [leak, phase] = leakage_phase_scan(model(), g, cal.pulse, o, workers());
  int hits = 0;
  for (Eigen::Index r = 0; r < leak.values.rows(); ++r)
    for (Eigen::Index c = 0; c < leak.values.cols(); ++c)
      if (leak.values(r, c) < 1e-3 && std::abs(phase.values(r, c) - 180.0) <= 0.5) ++hits;

  std::vector<int> counts;
  for (int n = 1; n <= 10; ++n) counts.push_back(n);
  std::vector<Real> axis;
  for (Real s : {-0.02, -0.01, -0.005, 0.005, 0.01, 0.02}) axis.push_back(cal.pulse.peak_value * (1.0 + s));
  const auto rep = repeated_gate_scan(model(), cal.pulse, o, counts, RepeatAxis::Coupling, axis, workers());
  Real worst = 0.0;
  for (Eigen::Index c = 0; c < rep.deviation.values.cols(); ++c) {
    // least-squares slope through the origin of deviation(N) against N
    Real sxy = 0.0, sxx = 0.0;
    for (std::size_t r = 0; r < counts.size(); ++r) {
      sxy += counts[r] * rep.deviation.values(static_cast<Eigen::Index>(r), c);
      sxx += counts[r] * counts[r];
    }
    const Real injected = rep.deviation.values(0, c);
    worst = std::max(worst, std::abs(sxy / sxx - injected) / std::abs(injected));
  }
  const bool pass = hits > 0 && worst < 0.05;
  return {pass, fmt::format("{} scan points meet leakage < 1e-3 and 180 +- 0.5 deg; worst slope mismatch {:.2f}%",
                            hits, 100 * worst)};
}

Outcome virtual_z() {
  std::mt19937_64 rng(config().seed);
  std::uniform_real_distribution<Real> u(-kPi, kPi);
  Real worst_f = 1.0, worst_angle = 0.0;
  for (int i = 0; i < 100; ++i) {
    const VirtualZAngles truth{u(rng), u(rng)};
    const auto fit = fit_virtual_z(cz_target(truth));
    const auto a = fit.angles.canonical(), b = truth.canonical();
    worst_f = std::min(worst_f, fit.fidelity);
    worst_angle = std::max({worst_angle, std::abs(wrap_angle(a.delta_plus - b.delta_plus)),
                            std::abs(wrap_angle(a.delta_minus - b.delta_minus))});
  }
  return {worst_f >= 1.0 - 1e-6 && worst_angle < 1e-4,
          fmt::format("min fidelity 1 - {:.1e}, max angle error {:.1e} rad", 1.0 - worst_f, worst_angle)};
}

Outcome propagator_properties() {
  const auto& cal = slepian45();
  GateOptions a = options_at(cal), b = a;
  b.dt = a.dt / 2;
  const auto ua = model().propagate(cal.pulse, a), ub = model().propagate(cal.pulse, b);
  note(evaluate_gate(ua));
  note(evaluate_gate(ub));
  const Real change = op_norm(ua.propagator - ub.propagator);
  const GateModel four(config().device.with_levels(4));
  const auto r4 = four.evaluate(cal.pulse, a);
  note(r4);
  const Real df = std::abs(r4.fidelity - cal.report.fidelity);
  return {worst_defect < 1e-9 && change < 1e-6 && df < 5e-4,
          fmt::format("worst defect {:.1e}, dt halving {:.1e}, levels 3 -> 4 |dF| {:.1e}", worst_defect, change, df)};
}

XebOptions bench_options() {
  const auto& b = config().benchmark;
  XebOptions o;
  o.n_qubits = b.qubits;
  o.depths = b.depths;
  o.circuits = b.circuits;
  o.shots = b.shots;
  o.mode = b.mode;
  o.seed = config().seed;
  return o;
}

Outcome xeb_recovery() {
  const XebOptions o = bench_options();
  NoiseSpec noisy;
  noisy.depolarizing_per_cycle = 0.0035;
  const auto r = cz_xeb_pipeline(o, noisy, std::nullopt, workers());
  const auto clean = cz_xeb_pipeline(o, NoiseSpec{}, std::nullopt, workers());
  const Real sigma = clean.xeb_fit.alpha_stderr;
  const bool pass = std::abs(r.xeb_fit.alpha - 0.9965) <= 0.002 && std::abs(clean.xeb_fit.alpha - 1.0) <= 3 * sigma;
  return {pass, fmt::format("p = 0.0035: alpha {:.5f} +- {:.5f}; no noise: alpha {:.5f} +- {:.5f}", r.xeb_fit.alpha,
                            r.xeb_fit.alpha_stderr, clean.xeb_fit.alpha, sigma)};
}

Outcome spb_recovery() {
  const XebOptions o = bench_options();
  bool pass = true;
  std::string detail;
  for (Real p : {0.0, 0.0031, 0.02}) {
    NoiseSpec n;
    n.depolarizing_per_cycle = p;
    const auto r = cz_xeb_pipeline(o, n, std::nullopt, workers());
    const Real gap = std::abs(r.purity_fit.alpha - r.oracle_purity_fit.alpha);
    pass = pass && gap <= 0.005;
    detail += fmt::format("p = {}: purity {:.5f} vs oracle {:.5f}; ", p, r.purity_fit.alpha, r.oracle_purity_fit.alpha);
  }
  // coherent-only: a conditional-phase error on an otherwise perfect CZ, exact probabilities
  Matrix4c gate = cz_matrix();
  gate(3, 3) = -std::polar(1.0, 0.05);
  XebOptions exact = o;
  exact.shots = 0;
  const auto c = cz_xeb_pipeline(exact, NoiseSpec{}, gate, workers());
  const bool coherent = std::abs(c.purity_fit.alpha - c.oracle_purity_fit.alpha) <= 0.005 &&
                        c.xeb_fit.alpha < 1.0 - 3 * c.xeb_fit.alpha_stderr && c.xeb_fit.alpha < c.purity_fidelity;
  pass = pass && coherent;
  detail += fmt::format("coherent: purity {:.5f}, fidelity {:.5f}", c.purity_fit.alpha, c.xeb_fit.alpha);
  return {pass, detail};
}

Outcome predistortion() {
  Real worst = 0.0;
  for (auto f : {PulseFamily::Square, PulseFamily::Slepian, PulseFamily::Cosine})
    for (Real tau : {5.0, 50.0, 500.0})
      for (Real a : {-0.05, 0.1}) {
        PulseShapeSpec p;
        p.family = f;
        p.length = 45.0;
        p.peak_value = -0.0275;
        const auto w = sample_pulse(p, config().solver.dt);
        DistortionModel m;
        m.gain = 0.95;
        m.settling_terms.push_back({a, tau});
        const auto back = apply_distortion(m, predistort(m, w));
        worst = std::max(worst, (back.samples - w.samples).cwiseAbs().maxCoeff() / w.samples.cwiseAbs().maxCoeff());
      }
  return {worst < 1e-6, fmt::format("worst relative round-trip error {:.1e}", worst)};
}

std::uint64_t file_checksum(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return fnv1a64(ss.str());
}

std::map<std::string, std::uint64_t> cli_run(const std::string& cmd, const fs::path& out) {
  fs::remove_all(out);
  const std::string line = fmt::format("{} {} --config {} --output-dir {} > /dev/null 2>&1", CZSIM_CLI, cmd,
                                       CZSIM_SOURCE_DIR "/configs/default.json", out.string());
  const int status = std::system(line.c_str());
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) throw Error("cli_failed", line);
  std::map<std::string, std::uint64_t> sums;
  for (const auto& e : fs::directory_iterator(out)) sums[e.path().filename().string()] = file_checksum(e.path());
  return sums;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "czsim_acceptance";
  int files = 0;
  bool same = true;
  for (const char* cmd : {"gate", "xeb --circuits 20", "spb --circuits 20", "compensate"}) {
    const auto a = cli_run(cmd, root / "a");
    const auto b = cli_run(cmd, root / "b");
    same = same && !a.empty() && a == b;
    files += static_cast<int>(a.size());
  }
  fs::remove_all(root);
  return {same, fmt::format("{} output files compared over gate, xeb, spb and compensate", files)};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "waveform study", waveform_study},
      {2, "leakage thresholds", leakage_thresholds},
      {3, "compensation", compensation},
      {4, "calibration point", calibration_point},
      {5, "virtual-Z recovery", virtual_z},
      {6, "propagator properties", propagator_properties},
      {7, "XEB recovery", xeb_recovery},
      {8, "SPB recovery", spb_recovery},
      {9, "predistortion round trip", predistortion},
      {10, "CLI determinism", determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::printf("%s %2d %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
