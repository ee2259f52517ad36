// czsim command-line front end. Every subcommand reads a JSON run config,
// writes its artifacts under output_dir and prints a JSON summary on stdout.
// Errors go to stderr as {"error": {"kind", "message"}}; usage and config
// problems exit 2, everything else 1.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "czsim/benchmarking.hpp"
#include "czsim/calibration.hpp"
#include "czsim/distortion.hpp"
#include "czsim/io.hpp"
#include "czsim/parallel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace czsim;

namespace {

struct CommonFlags {
  std::string config;
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

struct Context {
  RunConfig cfg;
  int workers = 1;
  fs::path out;
  OutputHeader header;
};

Context make_context(const CommonFlags& f, const std::string& command) {
  Context c;
  c.cfg = load_config(f.config);
  if (f.seed) c.cfg.seed = *f.seed;
  if (!f.output_dir.empty()) c.cfg.output_dir = f.output_dir;
  c.workers = f.threads ? *f.threads : default_worker_count();
  if (c.workers < 1) throw Error("usage", "--threads must be at least 1");
  c.out = c.cfg.output_dir;
  c.header = OutputHeader::from(c.cfg, command);
  return c;
}

/// Coupler-frequency pulses idle at the zero-coupling point unless told otherwise.
PulseShapeSpec resolve_pulse(const GateModel& model, PulseShapeSpec p) {
  if (p.parameterization == Parameterization::CouplerFrequency && p.idle_value == 0.0)
    p.idle_value = model.coupling_map().zero_point();
  return p;
}

CalibrationResult run_gate(const GateModel& model, const RunConfig& cfg, const PulseShapeSpec& pulse,
                           bool peak_given, int workers) {
  const GateOptions o = cfg.gate_options();
  if (!cfg.gate.calibrate) {
    CalibrationResult r;
    r.pulse = pulse;
    r.q2_detune = o.q2_detune;
    r.report = model.evaluate(pulse, o);
    return r;
  }
  if (peak_given) return calibrate_gate(model, pulse, o, cfg.calibration_options());
  return calibrate_cz(model, pulse, o, cfg.calibration_options(), {}, workers);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void emit(const json& summary) { std::cout << summary.dump(2) << std::endl; }

json check_unitarity(const RunConfig& cfg, const GateReport& r) {
  return {{"unitarity_defect", r.unitarity_defect},
          {"within_tolerance", r.unitarity_defect < cfg.solver.unitarity_tolerance}};
}

// ---- gate ----------------------------------------------------------------

int cmd_gate(const CommonFlags& f, const std::optional<std::string>& shape, const std::optional<Real>& length) {
  Context c = make_context(f, "gate");
  PulseShapeSpec pulse = c.cfg.pulse;
  if (shape) pulse.family = parse_pulse_family(*shape);
  if (length) pulse.length = *length;
  const GateModel model(c.cfg.device);
  pulse = resolve_pulse(model, pulse);
  const auto r = run_gate(model, c.cfg, pulse, c.cfg.peak_given, c.workers);

  GateOptions o = c.cfg.gate_options();
  o.q2_detune = r.q2_detune;
  const auto wf = sample_pulse(r.pulse, o.dt);
  std::ostringstream csv;
  write_waveform_csv(csv, wf, c.header);
  write_text(c.out, fmt::format("fig2a_waveform_{}.csv", to_string(r.pulse.family)), csv.str());

  json j = {{"header", c.header.json()},
            {"calibrated", c.cfg.gate.calibrate},
            {"compensate", o.compensate},
            {"result", to_json(r)},
            {"solver", check_unitarity(c.cfg, r.report)}};
  write_text(c.out, "gate_report.json", dump(j));
  emit(j);
  return 0;
}

// ---- sweep ---------------------------------------------------------------

struct SweepFlags {
  std::string kind = "length";
  std::optional<std::string> lengths, shapes, coupling_axis, detune_axis, gate_counts, repeat_axis, repeat_kind;
};

std::string table_csv(const OutputHeader& h, const std::vector<std::string>& columns,
                      const std::vector<std::vector<Real>>& rows) {
  std::ostringstream out;
  h.write_comment(out);
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_real(row[i]);
    out << '\n';
  }
  return out.str();
}

int sweep_length(Context& c, const SweepConfig& sw) {
  const GateModel model(c.cfg.device);
  std::vector<Real> lengths = sw.lengths;
  if (lengths.empty())
    for (Real L = 20.0; L <= 80.0 + 1e-9; L += 5.0) lengths.push_back(L);
  const GateOptions o = c.cfg.gate_options();
  CalibrationOptions copts = c.cfg.calibration_options();

  std::vector<std::string> columns{"length_ns"};
  std::vector<std::vector<Real>> leak_rows(lengths.size()), fid_rows(lengths.size());
  for (std::size_t i = 0; i < lengths.size(); ++i) leak_rows[i] = fid_rows[i] = {lengths[i]};
  json families = json::object();
  for (PulseFamily fam : sw.families) {
    PulseShapeSpec p = c.cfg.pulse;
    p.family = fam;
    p = resolve_pulse(model, p);
    const auto results = length_sweep(model, p, o, lengths, copts, {}, 0.99999, c.workers);
    columns.push_back(to_string(fam));
    json list = json::array();
    std::size_t best = 0;
    for (std::size_t i = 0; i < results.size(); ++i) {
      leak_rows[i].push_back(results[i].report.leakage_from_11);
      fid_rows[i].push_back(results[i].report.fidelity);
      list.push_back(to_json(results[i]));
      if (results[i].report.fidelity > results[best].report.fidelity) best = i;
    }
    families[to_string(fam)] = list;
    std::ostringstream wcsv;
    write_waveform_csv(wcsv, sample_pulse(results[best].pulse, o.dt), c.header);
    write_text(c.out, fmt::format("fig2a_waveform_{}.csv", to_string(fam)), wcsv.str());
  }
  write_text(c.out, "fig2b_leakage.csv", table_csv(c.header, columns, leak_rows));
  write_text(c.out, "fig2b_fidelity.csv", table_csv(c.header, columns, fid_rows));
  json j = {{"header", c.header.json()}, {"kind", "length"}, {"lengths_ns", lengths}, {"families", families}};
  write_text(c.out, "sweep_length.json", dump(j));
  json summary = {{"header", c.header.json()}, {"kind", "length"}, {"files", {"fig2b_leakage.csv", "fig2b_fidelity.csv"}}};
  emit(summary);
  return 0;
}

/// Calibrated operating point used to centre default scan axes.
CalibrationResult centre_point(const GateModel& model, Context& c, const PulseShapeSpec& pulse) {
  return run_gate(model, c.cfg, pulse, c.cfg.peak_given, c.workers);
}

std::vector<Real> around(Real centre, Real half_width, int points) {
  std::vector<Real> v;
  for (int i = 0; i < points; ++i) v.push_back(centre - half_width + 2.0 * half_width * i / (points - 1));
  return v;
}

int sweep_scan(Context& c, const SweepConfig& sw) {
  const GateModel model(c.cfg.device);
  const PulseShapeSpec pulse = resolve_pulse(model, c.cfg.pulse);
  ScanGrid grid{sw.coupling_axis, sw.detune_axis, sw.gate_counts};
  PulseShapeSpec scan_pulse = pulse;
  json centre = nullptr;
  if (grid.coupling_axis.empty() || grid.detune_axis.empty()) {
    const auto r = centre_point(model, c, pulse);
    centre = to_json(r);
    scan_pulse = r.pulse;
    const bool coupling = pulse.parameterization == Parameterization::EffectiveCoupling;
    if (grid.coupling_axis.empty())
      grid.coupling_axis = around(r.pulse.peak_value, coupling ? 0.1 * std::abs(r.pulse.peak_value) : 0.05, 21);
    if (grid.detune_axis.empty()) grid.detune_axis = around(r.q2_detune, 0.005, 21);
  }
  grid.validate();
  const auto [leak, phase] = leakage_phase_scan(model, grid, scan_pulse, c.cfg.gate_options(), c.workers);
  std::ostringstream a, b;
  write_scan_csv(a, leak, c.header);
  write_scan_csv(b, phase, c.header);
  write_text(c.out, "fig4a_leakage.csv", a.str());
  write_text(c.out, "fig4b_phase.csv", b.str());
  json j = {{"header", c.header.json()},
            {"kind", "scan"},
            {"centre", centre},
            {"rows", grid.detune_axis.size()},
            {"columns", grid.coupling_axis.size()},
            {"files", {"fig4a_leakage.csv", "fig4b_phase.csv"}}};
  write_text(c.out, "sweep_scan.json", dump(j));
  emit(j);
  return 0;
}

int sweep_repeated(Context& c, const SweepConfig& sw) {
  const GateModel model(c.cfg.device);
  const PulseShapeSpec pulse = resolve_pulse(model, c.cfg.pulse);
  const auto r = centre_point(model, c, pulse);
  GateOptions o = c.cfg.gate_options();
  o.q2_detune = r.q2_detune;
  std::vector<Real> axis = sw.repeat_axis;
  if (axis.empty()) {
    if (sw.repeat_axis_kind == RepeatAxis::Coupling)
      axis = around(r.pulse.peak_value,
                    pulse.parameterization == Parameterization::EffectiveCoupling
                        ? 0.05 * std::abs(r.pulse.peak_value) : 0.02, 21);
    else
      axis = around(r.q2_detune, 0.003, 21);
  }
  ScanGrid check{sw.repeat_axis_kind == RepeatAxis::Coupling ? axis : std::vector<Real>{0.0},
                 sw.repeat_axis_kind == RepeatAxis::Detune ? axis : std::vector<Real>{0.0}, sw.gate_counts};
  check.validate();
  const auto scan = repeated_gate_scan(model, r.pulse, o, sw.gate_counts, sw.repeat_axis_kind, axis, c.workers);
  std::ostringstream a, b;
  write_scan_csv(a, scan.leakage, c.header);
  write_scan_csv(b, scan.deviation, c.header);
  write_text(c.out, "fig4c_leakage.csv", a.str());
  write_text(c.out, "fig4d_phase_deviation.csv", b.str());
  json j = {{"header", c.header.json()},
            {"kind", "repeated"},
            {"centre", to_json(r)},
            {"files", {"fig4c_leakage.csv", "fig4d_phase_deviation.csv"}}};
  write_text(c.out, "sweep_repeated.json", dump(j));
  emit(j);
  return 0;
}

int cmd_sweep(const CommonFlags& f, const SweepFlags& s) {
  Context c = make_context(f, "sweep");
  SweepConfig sw = c.cfg.sweep;
  if (s.lengths) sw.lengths = parse_real_list(*s.lengths);
  if (s.coupling_axis) sw.coupling_axis = parse_real_list(*s.coupling_axis);
  if (s.detune_axis) sw.detune_axis = parse_real_list(*s.detune_axis);
  if (s.gate_counts) sw.gate_counts = parse_int_list(*s.gate_counts);
  if (s.repeat_axis) sw.repeat_axis = parse_real_list(*s.repeat_axis);
  if (s.repeat_kind) {
    if (*s.repeat_kind == "coupling") sw.repeat_axis_kind = RepeatAxis::Coupling;
    else if (*s.repeat_kind == "detune") sw.repeat_axis_kind = RepeatAxis::Detune;
    else throw Error("usage", "--repeat-kind must be coupling or detune");
  }
  if (s.shapes) {
    if (s.shapes->empty()) throw Error("usage", "empty axis");
    sw.families.clear();
    std::stringstream ss(*s.shapes);
    for (std::string item; std::getline(ss, item, ',');) sw.families.push_back(parse_pulse_family(item));
  }
  if (sw.gate_counts.empty()) throw Error("usage", "empty gate-count axis");
  if (sw.families.empty()) throw Error("usage", "empty shape list");
  if (s.kind == "length") return sweep_length(c, sw);
  if (s.kind == "scan") return sweep_scan(c, sw);
  if (s.kind == "repeated") return sweep_repeated(c, sw);
  throw Error("usage", "--kind must be length, scan or repeated");
}

// ---- optimize --------------------------------------------------------------

int cmd_optimize(const CommonFlags& f, const std::optional<std::string>& shape, const std::optional<Real>& lmin,
                 const std::optional<Real>& lmax, const std::optional<Real>& lstep,
                 const std::optional<Real>& threshold) {
  Context c = make_context(f, "optimize");
  OptimizeOptions oo = c.cfg.optimize;
  if (lmin) oo.length_min = *lmin;
  if (lmax) oo.length_max = *lmax;
  if (lstep) oo.length_step = *lstep;
  if (threshold) oo.threshold = *threshold;
  const GateModel model(c.cfg.device);
  PulseShapeSpec pulse = c.cfg.pulse;
  if (shape) pulse.family = parse_pulse_family(*shape);
  pulse = resolve_pulse(model, pulse);
  const auto r = optimize_pulse(model, pulse, c.cfg.gate_options(), oo, c.cfg.calibration_options(), {}, c.workers);

  json trials = json::array();
  for (const auto& t : r.trials) trials.push_back(to_json(t));
  json warnings = json::array();
  if (!r.threshold_met)
    warnings.push_back(fmt::format("no length in [{}, {}] ns reached fidelity {}; best found is reported",
                                   oo.length_min, oo.length_max, oo.threshold));
  if (r.hit_iteration_cap) warnings.push_back("nelder-mead hit its iteration cap");
  json j = {{"header", c.header.json()},
            {"threshold", oo.threshold},
            {"threshold_met", r.threshold_met},
            {"hit_iteration_cap", r.hit_iteration_cap},
            {"warnings", warnings},
            {"best", to_json(r.best)},
            {"trials", trials}};
  write_text(c.out, "optimize.json", dump(j));
  std::ostringstream csv;
  write_waveform_csv(csv, sample_pulse(r.best.pulse, c.cfg.solver.dt), c.header);
  write_text(c.out, fmt::format("fig2a_waveform_{}.csv", to_string(r.best.pulse.family)), csv.str());
  for (const auto& w : warnings) std::cerr << "warning: " << w.get<std::string>() << '\n';
  emit(j);
  return 0;
}

// ---- xeb / spb ---------------------------------------------------------------

struct BenchFlags {
  std::optional<int> qubits, circuits, shots;
  std::optional<std::string> depths;
  std::optional<Real> noise;
  bool keep = false;
};

int cmd_bench(const CommonFlags& f, const BenchFlags& b, bool purity) {
  Context c = make_context(f, purity ? "spb" : "xeb");
  XebOptions o;
  const auto& bc = c.cfg.benchmark;
  o.n_qubits = b.qubits.value_or(bc.qubits);
  o.depths = b.depths ? parse_int_list(*b.depths) : bc.depths;
  o.circuits = b.circuits.value_or(bc.circuits);
  o.shots = b.shots.value_or(bc.shots);
  o.mode = bc.mode;
  o.seed = c.cfg.seed;
  o.keep_probabilities = b.keep;
  NoiseSpec noise = c.cfg.noise;
  if (b.noise) noise.depolarizing_per_cycle = *b.noise;
  if (o.n_qubits == 1 && noise.readout.size() == 2) noise.readout.resize(1);

  std::optional<Matrix4c> gate;
  json gate_info = "canonical";
  if (bc.device_gate && o.n_qubits == 2) {
    const GateModel model(c.cfg.device);
    const auto r = run_gate(model, c.cfg, resolve_pulse(model, c.cfg.pulse), c.cfg.peak_given, c.workers);
    gate = virtual_z_corrected(r.report.projected_map, r.report.fitted_angles);
    gate_info = to_json(r);
  }
  const auto run = cz_xeb_pipeline(o, noise, gate, c.workers);

  std::vector<std::vector<Real>> rows;
  for (const auto& d : run.per_depth) rows.push_back({Real(d.depth), d.xeb_fidelity, d.purity, d.oracle_purity});
  const std::string tag = o.n_qubits == 1 ? "fig5ab" : "fig5c";
  const std::string name = purity ? tag + "_purity.csv" : tag + "_xeb.csv";
  write_text(c.out, name, table_csv(c.header, {"depth", "xeb_fidelity", "purity", "oracle_purity"}, rows));
  json j = {{"header", c.header.json()}, {"two_qubit_gate", gate_info}, {"run", to_json(run)}};
  write_text(c.out, purity ? "spb.json" : "xeb.json", dump(j));
  json summary = {{"header", c.header.json()},
                  {"cycle_fidelity", run.xeb_fit.alpha},
                  {"cycle_fidelity_stderr", run.xeb_fit.alpha_stderr},
                  {"purity_per_cycle", run.purity_fit.alpha},
                  {"purity_fidelity", run.purity_fidelity},
                  {"control_error", run.control_error},
                  {"file", name}};
  emit(summary);
  return 0;
}

// ---- predistort ----------------------------------------------------------------

int cmd_predistort(const CommonFlags& f, const std::optional<std::string>& input, const std::optional<Real>& idle) {
  Context c = make_context(f, "predistort");
  if (!c.cfg.distortion) throw Error("missing_distortion", "config has no distortion model");
  const DistortionModel& model = *c.cfg.distortion;
  model.validate();

  SampledWaveform ideal;
  Real idle_value = c.cfg.pulse.idle_value;
  if (input) {
    std::ifstream in(*input);
    if (!in) throw Error("input_not_found", fmt::format("cannot open waveform '{}'", *input));
    ideal = read_waveform_csv(in);
  } else {
    PulseShapeSpec p = c.cfg.pulse;
    if (p.parameterization == Parameterization::CouplerFrequency && p.idle_value == 0.0) {
      p.idle_value = GateModel(c.cfg.device).coupling_map().zero_point();
      idle_value = p.idle_value;
    }
    ideal = sample_pulse(p, c.cfg.solver.dt);
  }
  if (idle) idle_value = *idle;

  SampledWaveform excursion = ideal;
  excursion.samples.array() -= idle_value;
  SampledWaveform pre = predistort(model, excursion);
  const SampledWaveform back = apply_distortion(model, pre);
  pre.samples.array() += idle_value;
  const Real scale = excursion.samples.cwiseAbs().maxCoeff();
  const Real err = (back.samples - excursion.samples).cwiseAbs().maxCoeff();
  const Real rel = scale > 0.0 ? err / scale : err;
  if (model.is_identity()) pre.samples = ideal.samples;  // keep the input bit-for-bit

  std::ostringstream csv;
  write_waveform_csv(csv, pre, c.header);
  write_text(c.out, "predistorted.csv", csv.str());
  json j = {{"header", c.header.json()},
            {"samples", pre.size()},
            {"idle_value_ghz", idle_value},
            {"round_trip_max_abs_error", err},
            {"round_trip_max_abs_relative_error", rel},
            {"round_trip_ok", rel < 1e-6},
            {"file", "predistorted.csv"}};
  write_text(c.out, "predistort.json", dump(j));
  emit(j);
  return 0;
}

// ---- compensate ----------------------------------------------------------------

int cmd_compensate(const CommonFlags& f) {
  Context c = make_context(f, "compensate");
  const auto& cc = c.cfg.compensation;
  const DeviceSpec& d = c.cfg.device;
  std::vector<Real> wcs;
  for (int i = 0; i < cc.points; ++i) wcs.push_back(cc.from + (cc.to - cc.from) * i / (cc.points - 1));
  const Real det = c.cfg.gate.q2_detune;
  const auto curve = compensation_curve(d, wcs, det);
  const auto ref = dressed_qubit_frequencies(d, zero_coupling_point(d), 0.0, det);

  std::vector<std::vector<Real>> rows;
  Real lo1 = 0, hi1 = 0, lo2 = 0, hi2 = 0, res1_lo = 0, res1_hi = 0, res2_lo = 0, res2_hi = 0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const auto& p = curve[i];
    const auto held = dressed_qubit_frequencies(d, p.coupler_frequency, p.q1_offset, p.q2_offset);
    const Real r1 = held[0] - ref[0], r2 = held[1] - ref[1];
    rows.push_back({p.coupler_frequency, 1e3 * p.q1_shift, 1e3 * p.q2_shift, 1e3 * p.q1_offset, 1e3 * p.q2_offset,
                    1e3 * r1, 1e3 * r2});
    auto upd = [&](Real& lo, Real& hi, Real v) {
      lo = i ? std::min(lo, v) : v;
      hi = i ? std::max(hi, v) : v;
    };
    upd(lo1, hi1, p.q1_shift);
    upd(lo2, hi2, p.q2_shift);
    upd(res1_lo, res1_hi, r1);
    upd(res2_lo, res2_hi, r2);
  }
  write_text(c.out, "fig3_compensation.csv",
             table_csv(c.header,
                       {"coupler_ghz", "q1_shift_mhz", "q2_shift_mhz", "q1_offset_mhz", "q2_offset_mhz",
                        "q1_residual_mhz", "q2_residual_mhz"},
                       rows));
  const Real span1 = hi1 - lo1, span2 = hi2 - lo2;
  json j = {{"header", c.header.json()},
            {"q2_detune_ghz", det},
            {"reference_ghz", {ref[0], ref[1]}},
            {"q1_uncompensated_span_mhz", 1e3 * span1},
            {"q2_uncompensated_span_mhz", 1e3 * span2},
            {"q1_shift_nearest_resonance_mhz", 1e3 * curve.front().q1_shift},
            {"q1_residual_span_mhz", 1e3 * (res1_hi - res1_lo)},
            {"q2_residual_span_mhz", 1e3 * (res2_hi - res2_lo)},
            {"file", "fig3_compensation.csv"}};
  write_text(c.out, "compensate.json", dump(j));
  emit(j);
  return 0;
}

int exit_code_for(const std::string& kind) {
  return kind == "config_not_found" || kind == "config_invalid" || kind == "usage" ? 2 : 1;
}

void report_error(const std::string& kind, const std::string& message) {
  std::cerr << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"czsim: tunable-coupler CZ gate simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  CommonFlags common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "JSON run config")->required();
    sub->add_option("--output-dir", common.output_dir, "override output_dir");
    sub->add_option("--seed", common.seed, "override seed");
    sub->add_option("--threads", common.threads, "worker threads (default: CZSIM_THREADS or all cores)");
  };

  std::optional<std::string> shape;
  std::optional<Real> length;
  auto* gate = app.add_subcommand("gate", "simulate (and calibrate) one CZ gate");
  add_common(gate);
  gate->add_option("--shape", shape, "square, slepian or cosine");
  gate->add_option("--length-ns", length, "pulse length");

  SweepFlags sf;
  auto* sweep = app.add_subcommand("sweep", "pulse-length sweeps and calibration scans");
  add_common(sweep);
  sweep->add_option("--kind", sf.kind, "length, scan or repeated");
  sweep->add_option("--lengths", sf.lengths, "list a,b,c or range from:to:step (ns)");
  sweep->add_option("--shapes", sf.shapes, "comma-separated families");
  sweep->add_option("--coupling-axis", sf.coupling_axis, "peak values");
  sweep->add_option("--detune-axis", sf.detune_axis, "Q2 detunes (GHz)");
  sweep->add_option("--gate-counts", sf.gate_counts, "repeated-gate counts");
  sweep->add_option("--repeat-axis", sf.repeat_axis, "repeated-gate axis values");
  sweep->add_option("--repeat-kind", sf.repeat_kind, "coupling or detune");

  std::optional<Real> lmin, lmax, lstep, threshold;
  auto* opt = app.add_subcommand("optimize", "shortest calibrated pulse reaching a fidelity threshold");
  add_common(opt);
  opt->add_option("--shape", shape, "square, slepian or cosine");
  opt->add_option("--length-min", lmin, "ns");
  opt->add_option("--length-max", lmax, "ns");
  opt->add_option("--length-step", lstep, "ns");
  opt->add_option("--threshold", threshold, "target fidelity");

  BenchFlags bf;
  auto add_bench = [&](CLI::App* sub) {
    add_common(sub);
    sub->add_option("--qubits", bf.qubits, "1 or 2");
    sub->add_option("--depths", bf.depths, "cycle depths");
    sub->add_option("--circuits", bf.circuits, "circuits per depth");
    sub->add_option("--shots", bf.shots, "shots per circuit (0: exact)");
    sub->add_option("--noise", bf.noise, "global depolarizing probability per cycle");
    sub->add_flag("--keep-probabilities", bf.keep, "store per-circuit distributions");
  };
  auto* xeb = app.add_subcommand("xeb", "cross-entropy benchmarking");
  add_bench(xeb);
  auto* spb = app.add_subcommand("spb", "speckle purity benchmarking");
  add_bench(spb);

  std::optional<std::string> input;
  std::optional<Real> idle;
  auto* pre = app.add_subcommand("predistort", "invert the configured line distortion");
  add_common(pre);
  pre->add_option("--input", input, "waveform CSV (default: sample the config pulse)");
  pre->add_option("--idle", idle, "idle level the line is at rest on");

  auto* comp = app.add_subcommand("compensate", "qubit frequency compensation curve");
  add_common(comp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("usage", e.what());
    return 2;
  }

  try {
    if (!common.config.empty() && !fs::exists(common.config))
      throw Error("config_not_found", fmt::format("cannot open config '{}'", common.config));
    if (gate->parsed()) return cmd_gate(common, shape, length);
    if (sweep->parsed()) return cmd_sweep(common, sf);
    if (opt->parsed()) return cmd_optimize(common, shape, lmin, lmax, lstep, threshold);
    if (xeb->parsed()) return cmd_bench(common, bf, false);
    if (spb->parsed()) return cmd_bench(common, bf, true);
    if (pre->parsed()) return cmd_predistort(common, input, idle);
    if (comp->parsed()) return cmd_compensate(common);
  } catch (const Error& e) {
    report_error(e.kind(), e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    report_error("internal", e.what());
    return 1;
  }
  return 0;
}
