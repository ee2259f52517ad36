#include "czsim/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace czsim {

using nlohmann::json;

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) { return fmt::format("{:016x}", v); }

namespace {

[[noreturn]] void invalid(const std::string& path, const std::string& what) {
  throw Error("config_invalid", path.empty() ? what : path + ": " + what);
}

/// Object reader that remembers which keys were consumed, so leftovers can be
/// reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) invalid(path_, "expected an object");
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }

  Section child(const std::string& key) { return Section(raw(key), sub(key)); }

  Real real(const std::string& key, Real fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) invalid(sub(key), "expected a number");
    const Real x = v.get<Real>();
    if (!std::isfinite(x)) invalid(sub(key), "must be finite");
    return x;
  }

  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) invalid(sub(key), "expected an integer");
    return v.get<int>();
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_boolean()) invalid(sub(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) invalid(sub(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<Real> reals(const std::string& key, std::vector<Real> fallback);
  std::vector<int> ints(const std::string& key, std::vector<int> fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_array()) invalid(sub(key), "expected an array of integers");
    std::vector<int> out;
    for (const auto& e : v) {
      if (!e.is_number_integer()) invalid(sub(key), "expected an array of integers");
      out.push_back(e.get<int>());
    }
    return out;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!used_.count(key)) invalid(path_, fmt::format("unknown key '{}'", key));
  }

  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

std::vector<Real> range_values(Real from, Real to, Real step, const std::string& where) {
  if (!(step > 0.0) || to < from) invalid(where, "range needs from <= to and step > 0");
  std::vector<Real> out;
  const auto n = static_cast<long>(std::floor((to - from) / step + 1e-6));
  if (n > 100000) invalid(where, "range has too many points");
  for (long k = 0; k <= n; ++k) out.push_back(from + static_cast<Real>(k) * step);
  return out;
}

std::vector<Real> Section::reals(const std::string& key, std::vector<Real> fallback) {
  if (!has(key)) return fallback;
  const json& v = j_.at(key);
  if (v.is_object()) {
    Section r(v, sub(key));
    const Real from = r.real("from", NAN), to = r.real("to", NAN), step = r.real("step", NAN);
    r.finish();
    if (std::isnan(from) || std::isnan(to) || std::isnan(step)) invalid(sub(key), "range needs from, to and step");
    return range_values(from, to, step, sub(key));
  }
  if (!v.is_array()) invalid(sub(key), "expected an array of numbers or a {from, to, step} range");
  std::vector<Real> out;
  for (const auto& e : v) {
    if (!e.is_number()) invalid(sub(key), "expected an array of numbers");
    out.push_back(e.get<Real>());
  }
  return out;
}

void read_mode(Section s, ModeSpec& m) {
  m.frequency = s.real("frequency_ghz", m.frequency);
  m.anharmonicity = s.real("anharmonicity_ghz", m.anharmonicity);
  m.levels = s.integer("levels", m.levels);
  s.finish();
}

void read_device(Section s, DeviceSpec& d) {
  if (s.has("q1")) read_mode(s.child("q1"), d.modes[0]);
  if (s.has("coupler")) read_mode(s.child("coupler"), d.modes[1]);
  if (s.has("q2")) read_mode(s.child("q2"), d.modes[2]);
  if (s.has("levels")) {
    const int levels = s.integer("levels", 3);
    for (auto& m : d.modes) m.levels = levels;
  }
  if (s.has("couplings")) {
    Section c = s.child("couplings");
    d.couplings.g_1c = c.real("g_1c_ghz", d.couplings.g_1c);
    d.couplings.g_2c = c.real("g_2c_ghz", d.couplings.g_2c);
    d.couplings.g_12 = c.real("g_12_ghz", d.couplings.g_12);
    c.finish();
  }
  d.coupler_max_frequency = s.real("coupler_max_frequency_ghz", d.coupler_max_frequency);
  d.resonance_guard = s.real("resonance_guard_ghz", d.resonance_guard);
  if (s.has("readout")) {
    Section r = s.child("readout");
    const char* names[2] = {"q1", "q2"};
    for (int q = 0; q < 2; ++q) {
      if (!r.has(names[q])) continue;
      Section f = r.child(names[q]);
      d.metadata[q].readout_f00 = f.real("f00", d.metadata[q].readout_f00.value_or(1.0));
      d.metadata[q].readout_f11 = f.real("f11", d.metadata[q].readout_f11.value_or(1.0));
      f.finish();
    }
    r.finish();
  }
  s.finish();
  try {
    d.validate();
  } catch (const Error& e) {
    invalid("device", e.what());
  }
}

template <typename F>
auto parse_enum(const std::string& where, F&& parse, const std::string& text) {
  try {
    return parse(text);
  } catch (const Error& e) {
    invalid(where, e.what());
  }
}

}  // namespace

GateOptions RunConfig::gate_options() const {
  GateOptions o;
  o.dt = solver.dt;
  o.q2_detune = gate.q2_detune;
  o.compensate = gate.compensate;
  o.distortion = distortion;
  o.predistort = predistort;
  o.propagator.max_phase_per_step = solver.max_phase_per_step;
  return o;
}

CalibrationOptions RunConfig::calibration_options() const {
  CalibrationOptions c;
  c.fit_lambda = gate.fit_lambda;
  if (optimize_peak_min) c.peak_min = *optimize_peak_min;
  if (optimize_peak_max) c.peak_max = *optimize_peak_max;
  return c;
}

RunConfig parse_config(const json& doc) {
  RunConfig cfg;
  Section top(doc, "");
  if (!top.has("schema_version")) invalid("", "missing schema_version");
  const int version = top.integer("schema_version", 0);
  if (version != kSchemaVersion)
    invalid("schema_version", fmt::format("unsupported version {} (expected {})", version, kSchemaVersion));

  if (top.has("device")) read_device(top.child("device"), cfg.device);

  if (top.has("solver")) {
    Section s = top.child("solver");
    cfg.solver.dt = s.real("dt_ns", cfg.solver.dt);
    cfg.solver.unitarity_tolerance = s.real("unitarity_tolerance", cfg.solver.unitarity_tolerance);
    cfg.solver.max_phase_per_step = s.real("max_phase_per_step", cfg.solver.max_phase_per_step);
    s.finish();
    if (!(cfg.solver.dt > 0.0)) invalid("solver.dt_ns", "must be positive");
    if (!(cfg.solver.unitarity_tolerance > 0.0)) invalid("solver.unitarity_tolerance", "must be positive");
    if (!(cfg.solver.max_phase_per_step > 0.0)) invalid("solver.max_phase_per_step", "must be positive");
  }

  if (top.has("pulse")) {
    Section s = top.child("pulse");
    PulseShapeSpec& p = cfg.pulse;
    p.family = parse_enum("pulse.family", parse_pulse_family, s.string("family", to_string(p.family)));
    p.length = s.real("length_ns", p.length);
    p.parameterization = parse_enum("pulse.parameterization", parse_parameterization,
                                    s.string("parameterization", to_string(p.parameterization)));
    p.idle_value = s.real("idle_value_ghz", p.idle_value);
    cfg.peak_given = s.has("peak_value_ghz");
    p.peak_value = s.real("peak_value_ghz", p.peak_value);
    p.slepian_coefficients = s.reals("slepian_coefficients", p.slepian_coefficients);
    p.slepian_detuning = s.real("slepian_detuning_ghz", p.slepian_detuning);
    s.finish();
  }

  if (top.has("gate")) {
    Section s = top.child("gate");
    cfg.gate.q2_detune = s.real("q2_detune_ghz", cfg.gate.q2_detune);
    cfg.gate.compensate = s.boolean("compensate", cfg.gate.compensate);
    cfg.gate.calibrate = s.boolean("calibrate", cfg.gate.calibrate);
    cfg.gate.fit_lambda = s.boolean("fit_lambda", cfg.gate.fit_lambda);
    s.finish();
  }

  if (top.has("distortion")) {
    Section s = top.child("distortion");
    DistortionModel m;
    m.gain = s.real("gain", m.gain);
    if (s.has("settling_terms")) {
      const json& terms = s.raw("settling_terms");
      if (!terms.is_array()) invalid("distortion.settling_terms", "expected an array");
      for (std::size_t i = 0; i < terms.size(); ++i) {
        Section t(terms[i], fmt::format("distortion.settling_terms[{}]", i));
        SettlingTerm st;
        st.amplitude = t.real("amplitude", st.amplitude);
        st.tau = t.real("tau_ns", st.tau);
        t.finish();
        m.settling_terms.push_back(st);
      }
    }
    cfg.predistort = s.boolean("predistort", false);
    s.finish();
    cfg.distortion = m;
  }

  if (top.has("noise")) {
    Section s = top.child("noise");
    cfg.noise.depolarizing_per_cycle = s.real("depolarizing_per_cycle", 0.0);
    const std::string readout = s.string("readout", "none");
    if (readout == "device") {
      for (int q = 0; q < 2; ++q)
        cfg.noise.readout.push_back({cfg.device.metadata[q].readout_f00.value_or(1.0),
                                     cfg.device.metadata[q].readout_f11.value_or(1.0)});
    } else if (readout != "none") {
      invalid("noise.readout", "expected \"none\" or \"device\"");
    }
    s.finish();
    if (!(cfg.noise.depolarizing_per_cycle >= 0.0 && cfg.noise.depolarizing_per_cycle <= 1.0))
      invalid("noise.depolarizing_per_cycle", "must lie in [0, 1]");
  }

  if (top.has("benchmark")) {
    Section s = top.child("benchmark");
    auto& b = cfg.benchmark;
    b.qubits = s.integer("qubits", b.qubits);
    b.depths = s.ints("depths", b.depths);
    b.circuits = s.integer("circuits", b.circuits);
    b.shots = s.integer("shots", b.shots);
    const std::string mode = s.string("mode", "density");
    if (mode == "density") b.mode = SimulationMode::Density;
    else if (mode == "statevector") b.mode = SimulationMode::Statevector;
    else invalid("benchmark.mode", "expected \"density\" or \"statevector\"");
    const std::string gate = s.string("two_qubit_gate", "ideal");
    if (gate == "ideal") b.device_gate = false;
    else if (gate == "device") b.device_gate = true;
    else invalid("benchmark.two_qubit_gate", "expected \"ideal\" or \"device\"");
    s.finish();
  }

  if (top.has("sweep")) {
    Section s = top.child("sweep");
    auto& w = cfg.sweep;
    w.lengths = s.reals("lengths_ns", w.lengths);
    if (s.has("families")) {
      const json& f = s.raw("families");
      if (!f.is_array() || f.empty()) invalid("sweep.families", "expected a non-empty array of family names");
      w.families.clear();
      for (const auto& e : f) {
        if (!e.is_string()) invalid("sweep.families", "expected family names");
        w.families.push_back(parse_enum("sweep.families", parse_pulse_family, e.get<std::string>()));
      }
    }
    w.coupling_axis = s.reals("coupling_axis", w.coupling_axis);
    w.detune_axis = s.reals("detune_axis_ghz", w.detune_axis);
    w.gate_counts = s.ints("gate_counts", w.gate_counts);
    w.repeat_axis = s.reals("repeat_axis", w.repeat_axis);
    const std::string kind = s.string("repeat_axis_kind", "coupling");
    if (kind == "coupling") w.repeat_axis_kind = RepeatAxis::Coupling;
    else if (kind == "detune") w.repeat_axis_kind = RepeatAxis::Detune;
    else invalid("sweep.repeat_axis_kind", "expected \"coupling\" or \"detune\"");
    s.finish();
  }

  if (top.has("optimize")) {
    Section s = top.child("optimize");
    auto& o = cfg.optimize;
    o.length_min = s.real("length_min_ns", o.length_min);
    o.length_max = s.real("length_max_ns", o.length_max);
    o.length_step = s.real("length_step_ns", o.length_step);
    o.threshold = s.real("threshold", o.threshold);
    if (s.has("peak_min_ghz")) cfg.optimize_peak_min = s.real("peak_min_ghz", 0.0);
    if (s.has("peak_max_ghz")) cfg.optimize_peak_max = s.real("peak_max_ghz", 0.0);
    s.finish();
  }

  if (top.has("compensation")) {
    Section s = top.child("compensation");
    cfg.compensation.from = s.real("from_ghz", cfg.compensation.from);
    cfg.compensation.to = s.real("to_ghz", cfg.compensation.to);
    cfg.compensation.points = s.integer("points", cfg.compensation.points);
    s.finish();
    if (cfg.compensation.points < 2 || !(cfg.compensation.to > cfg.compensation.from))
      invalid("compensation", "needs from < to and at least 2 points");
  }

  if (top.has("seed")) {
    const json& v = top.raw("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      invalid("seed", "expected a non-negative integer");
    cfg.seed = v.get<std::uint64_t>();
  }
  cfg.output_dir = top.string("output_dir", cfg.output_dir);
  top.finish();

  cfg.canonical = doc.dump();
  cfg.hash = fnv1a64(cfg.canonical);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("config_not_found", fmt::format("cannot open config '{}'", path.string()));
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error("config_invalid", fmt::format("'{}' is not valid JSON: {}", path.string(), e.what()));
  }
  return parse_config(doc);
}

OutputHeader OutputHeader::from(const RunConfig& config, const std::string& command) {
  return {command, hex64(config.hash), config.seed};
}

json OutputHeader::json() const {
  return {{"tool", "czsim"}, {"version", kVersion}, {"command", command}, {"config_hash", config_hash},
          {"seed", seed}};
}

void OutputHeader::write_comment(std::ostream& out) const {
  out << "# czsim " << kVersion << '\n'
      << "# command " << command << '\n'
      << "# config_hash " << config_hash << '\n'
      << "# seed " << seed << '\n';
}

std::string format_real(Real v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void write_waveform_csv(std::ostream& out, const SampledWaveform& w, const OutputHeader& header) {
  header.write_comment(out);
  out << "# parameterization " << to_string(w.parameterization) << '\n';
  out << "# dt_ns " << format_real(w.dt) << '\n';
  out << "t_ns,value_ghz\n";
  for (Eigen::Index k = 0; k < w.size(); ++k)
    out << format_real(w.time(k)) << ',' << format_real(w.samples(k)) << '\n';
}

SampledWaveform read_waveform_csv(std::istream& in) {
  SampledWaveform w;
  w.parameterization = Parameterization::EffectiveCoupling;
  std::optional<Real> dt;
  std::vector<Real> t, v;
  std::string line;
  bool header_seen = false;
  auto fail = [](const std::string& what) { throw Error("invalid_waveform", what); };
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ss(line.substr(1));
      std::string key, value;
      ss >> key >> value;
      if (key == "parameterization") {
        try {
          w.parameterization = parse_parameterization(value);
        } catch (const Error& e) {
          fail(e.what());
        }
      } else if (key == "dt_ns") {
        dt = std::stod(value);
      }
      continue;
    }
    if (!header_seen) {
      if (line != "t_ns,value_ghz") fail("expected header 't_ns,value_ghz', got '" + line + "'");
      header_seen = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) fail("malformed row '" + line + "'");
    Real a = 0, b = 0;
    const auto r1 = std::from_chars(line.data(), line.data() + comma, a);
    const auto r2 = std::from_chars(line.data() + comma + 1, line.data() + line.size(), b);
    if (r1.ec != std::errc() || r2.ec != std::errc()) fail("malformed row '" + line + "'");
    t.push_back(a);
    v.push_back(b);
  }
  if (!header_seen || v.empty()) fail("waveform has no samples");
  if (!dt) dt = t.size() > 1 ? t[1] - t[0] : 2.0 * t[0];
  if (!(*dt > 0.0)) fail("time step must be positive");
  for (std::size_t k = 0; k < t.size(); ++k)
    if (std::abs(t[k] - (static_cast<Real>(k) + 0.5) * *dt) > 1e-6 * *dt)
      fail(fmt::format("row {}: t_ns is not on the uniform grid", k));
  w.dt = *dt;
  w.samples = Eigen::Map<const VectorXr>(v.data(), static_cast<Eigen::Index>(v.size()));
  return w;
}

json to_json(const PulseShapeSpec& p) {
  json j = {{"family", to_string(p.family)},
            {"length_ns", p.length},
            {"parameterization", to_string(p.parameterization)},
            {"idle_value_ghz", p.idle_value},
            {"peak_value_ghz", p.peak_value}};
  if (p.family == PulseFamily::Slepian) {
    j["slepian_coefficients"] = p.slepian_coefficients;
    j["slepian_detuning_ghz"] = p.slepian_detuning;
  }
  return j;
}

namespace {

json nullable(Real v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json to_json(const GateReport& r) {
  json map = json::array();
  for (int i = 0; i < 4; ++i) {
    json row = json::array();
    for (int k = 0; k < 4; ++k) row.push_back({r.projected_map(i, k).real(), r.projected_map(i, k).imag()});
    map.push_back(row);
  }
  const auto a = r.fitted_angles.canonical();
  return {{"fidelity", r.fidelity},
          {"leakage_from_11", r.leakage_from_11},
          {"leakage_per_level", r.leakage_per_level},
          {"conditional_phase_rad", nullable(r.conditional_phase)},
          {"conditional_phase_deg", nullable(std::isfinite(r.conditional_phase) ? phase_degrees(r.conditional_phase)
                                                                                 : r.conditional_phase)},
          {"phase_like", r.phase_like},
          {"virtual_z",
           {{"delta_plus_rad", a.delta_plus},
            {"delta_minus_rad", a.delta_minus},
            {"delta_plus_deg", rad_to_deg(a.delta_plus)},
            {"delta_minus_deg", rad_to_deg(a.delta_minus)}}},
          {"subspace_trace_loss", r.subspace_trace_loss},
          {"unitarity_defect", r.unitarity_defect},
          {"duration_ns", r.duration},
          {"projected_map_re_im", map}};
}

json to_json(const CalibrationResult& r) {
  return {{"pulse", to_json(r.pulse)},
          {"q2_detune_ghz", r.q2_detune},
          {"report", to_json(r.report)},
          {"evaluations", r.evaluations},
          {"hit_iteration_cap", r.hit_iteration_cap}};
}

json to_json(const DecayFit& f) {
  return {{"alpha", f.alpha},
          {"alpha_stderr", f.alpha_stderr},
          {"amplitude", f.amplitude},
          {"amplitude_stderr", f.amplitude_stderr},
          {"pauli_error", f.pauli_error},
          {"average_error", f.average_error},
          {"points_used", f.points_used},
          {"truncated", f.truncated},
          {"conversions", "pauli_error = (1 - alpha)(D^2 - 1)/D^2; average_error = (1 - alpha)(D - 1)/D"}};
}

json to_json(const XebRun& r) {
  json depths = json::array();
  for (const auto& d : r.per_depth)
    depths.push_back({{"depth", d.depth},
                      {"xeb_fidelity", nullable(d.xeb_fidelity)},
                      {"purity", nullable(d.purity)},
                      {"oracle_purity", d.oracle_purity}});
  json j = {{"qubits", r.options.n_qubits},
            {"circuits_per_depth", r.options.circuits},
            {"shots", r.options.shots},
            {"depolarizing_per_cycle", r.noise.depolarizing_per_cycle},
            {"per_depth", depths},
            {"xeb_fit", to_json(r.xeb_fit)},
            {"purity_fit", to_json(r.purity_fit)},
            {"oracle_purity_fit", to_json(r.oracle_purity_fit)},
            {"cycle_fidelity", r.xeb_fit.alpha},
            {"purity_fidelity", r.purity_fidelity},
            {"control_error", r.control_error}};
  if (!r.circuits.empty()) {
    json circuits = json::array();
    for (const auto& c : r.circuits)
      circuits.push_back({{"depth", c.depth},
                          {"index", c.index},
                          {"seed", c.seed},
                          {"ideal", std::vector<Real>(c.ideal.data(), c.ideal.data() + c.ideal.size())},
                          {"measured", std::vector<Real>(c.measured.data(), c.measured.data() + c.measured.size())}});
    j["circuits"] = circuits;
  }
  return j;
}

void write_scan_csv(std::ostream& out, const ScanResult& scan, const OutputHeader& header) {
  header.write_comment(out);
  out << "# kind " << to_string(scan.kind) << '\n';
  out << "# rows " << scan.row_name << ", columns " << scan.column_name << '\n';
  scan.write_csv(out);
}

std::filesystem::path write_text(const std::filesystem::path& dir, const std::string& name, const std::string& text) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("io_error", fmt::format("cannot create '{}': {}", dir.string(), ec.message()));
  const auto path = dir / name;
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("io_error", fmt::format("cannot write '{}'", path.string()));
  return path;
}

std::vector<Real> parse_real_list(const std::string& text) {
  auto number = [&](const std::string& s) {
    Real v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || r.ec != std::errc() || r.ptr != s.data() + s.size())
      throw Error("usage", fmt::format("'{}' is not a number", s));
    return v;
  };
  if (text.empty()) throw Error("usage", "empty axis");
  std::vector<std::string> parts;
  const char sep = text.find(':') != std::string::npos ? ':' : ',';
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, sep);) parts.push_back(item);
  if (sep == ':') {
    if (parts.size() != 3) throw Error("usage", "range must be from:to:step");
    const Real from = number(parts[0]), to = number(parts[1]), step = number(parts[2]);
    if (!(step > 0.0) || to < from) throw Error("usage", "range needs from <= to and step > 0");
    std::vector<Real> out;
    const auto n = static_cast<long>(std::floor((to - from) / step + 1e-6));
    for (long k = 0; k <= n; ++k) out.push_back(from + static_cast<Real>(k) * step);
    return out;
  }
  std::vector<Real> out;
  for (const auto& p : parts) out.push_back(number(p));
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (Real v : parse_real_list(text)) {
    if (v != std::floor(v)) throw Error("usage", fmt::format("'{}' is not an integer", v));
    out.push_back(static_cast<int>(v));
  }
  return out;
}

}  // namespace czsim
