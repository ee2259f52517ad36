#ifndef CZSIM_IO_HPP
#define CZSIM_IO_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "czsim/benchmarking.hpp"
#include "czsim/calibration.hpp"
#include "czsim/device.hpp"
#include "czsim/distortion.hpp"
#include "czsim/gate_metrics.hpp"
#include "czsim/pulse.hpp"

namespace czsim {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

struct SolverConfig {
  Real dt = 0.05;
  Real unitarity_tolerance = 1e-9;
  Real max_phase_per_step = 0.5;
};

struct GateConfig {
  Real q2_detune = 0.0;
  bool compensate = true;
  bool calibrate = true;   // search peak and detune (and lambda_1) before reporting
  bool fit_lambda = true;  // slepian only
};

struct BenchmarkConfig {
  int qubits = 2;
  std::vector<int> depths{1, 3, 5, 8, 12, 17, 23, 30};
  int circuits = 50;
  int shots = 1000;
  SimulationMode mode = SimulationMode::Density;
  bool device_gate = false;  // calibrated device map instead of the canonical CZ
};

struct SweepConfig {
  std::vector<Real> lengths;               // length sweep, ns
  std::vector<PulseFamily> families{PulseFamily::Square, PulseFamily::Slepian, PulseFamily::Cosine};
  std::vector<Real> coupling_axis;         // 2-D scans; peak values
  std::vector<Real> detune_axis;           // GHz
  std::vector<int> gate_counts{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<Real> repeat_axis;           // repeated-gate scan axis values
  RepeatAxis repeat_axis_kind = RepeatAxis::Coupling;
};

struct CompensationConfig {
  Real from = 5.2;  // GHz
  Real to = 7.0;
  int points = 61;
};

/// Fully resolved run configuration. Missing keys take defaults; unknown keys
/// are rejected.
struct RunConfig {
  DeviceSpec device = DeviceSpec::default_device();
  SolverConfig solver;
  PulseShapeSpec pulse;
  bool peak_given = false;
  GateConfig gate;
  std::optional<DistortionModel> distortion;
  bool predistort = false;
  NoiseSpec noise;
  BenchmarkConfig benchmark;
  SweepConfig sweep;
  OptimizeOptions optimize;
  std::optional<Real> optimize_peak_min;
  std::optional<Real> optimize_peak_max;
  CompensationConfig compensation;
  std::uint64_t seed = 0;
  std::string output_dir = "czsim_out";

  std::string canonical;  // normalized JSON text of the input document
  std::uint64_t hash = 0;  // fnv1a64(canonical)

  GateOptions gate_options() const;
  CalibrationOptions calibration_options() const;
};

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

/// Throws Error("config_not_found") or Error("config_invalid").
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const nlohmann::json& doc);

/// Version, config hash and seed, written at the top of every output file.
struct OutputHeader {
  std::string command;
  std::string config_hash;
  std::uint64_t seed = 0;

  static OutputHeader from(const RunConfig& config, const std::string& command);
  nlohmann::json json() const;
  /// "# key value" lines.
  void write_comment(std::ostream& out) const;
};

/// Shortest round-trip representation ({:.17g} fallback) so files are stable.
std::string format_real(Real v);

/// Columns t_ns,value_ghz under the header comments.
void write_waveform_csv(std::ostream& out, const SampledWaveform& w, const OutputHeader& header);
/// Reads the format above; comment lines may be absent. Uniform t_ns spacing
/// is required. Throws Error("invalid_waveform").
SampledWaveform read_waveform_csv(std::istream& in);

nlohmann::json to_json(const PulseShapeSpec& p);
nlohmann::json to_json(const GateReport& r);
nlohmann::json to_json(const CalibrationResult& r);
nlohmann::json to_json(const DecayFit& f);
nlohmann::json to_json(const XebRun& r);

/// ScanResult CSV with header comments.
void write_scan_csv(std::ostream& out, const ScanResult& scan, const OutputHeader& header);

/// Writes text to `dir / name`, creating `dir`. Throws Error("io_error").
std::filesystem::path write_text(const std::filesystem::path& dir, const std::string& name, const std::string& text);

/// Parses "1,2,3" or "from:to:step" (inclusive within step/1e6). Throws
/// Error("usage") on empty or malformed input.
std::vector<Real> parse_real_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

}  // namespace czsim

#endif  // CZSIM_IO_HPP
