#ifndef CZSIM_CALIBRATION_HPP
#define CZSIM_CALIBRATION_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "czsim/common.hpp"
#include "czsim/device.hpp"
#include "czsim/distortion.hpp"
#include "czsim/gate_metrics.hpp"
#include "czsim/propagator.hpp"
#include "czsim/pulse.hpp"

namespace czsim {

// ---- frequency-shift compensation ----------------------------------------

struct CompensationPoint {
  Real coupler_frequency = 0.0;
  Real q1_offset = 0.0;  // bare offsets that hold the dressed qubits fixed (GHz)
  Real q2_offset = 0.0;
  Real q1_shift = 0.0;   // uncompensated dressed shift relative to the reference (GHz)
  Real q2_shift = 0.0;
};

/// Bare qubit offsets at `coupler_frequency` whose dressed 0->1 transitions
/// equal `target` (GHz). Newton on the single-excitation block with
/// Hellmann-Feynman derivatives; throws Error("compensation_failed").
std::array<Real, 2> compensation_offsets(const DeviceSpec& spec, Real coupler_frequency,
                                         const std::array<Real, 2>& target,
                                         std::array<Real, 2> guess = {0.0, 0.0});

/// Reference is the zero-coupling point with Q2 at `q2_detune`, which is also
/// where the offsets are (0, q2_detune) to rounding.
std::vector<CompensationPoint> compensation_curve(const DeviceSpec& spec,
                                                  const std::vector<Real>& coupler_frequencies,
                                                  Real q2_detune = 0.0);

// ---- gate pipeline ---------------------------------------------------------

struct GateOptions {
  Real dt = 0.05;          // ns
  Real q2_detune = 0.0;    // GHz, Q2 offset held for the whole schedule
  bool compensate = true;  // hold dressed qubit frequencies while the coupler moves
  std::optional<DistortionModel> distortion;
  bool predistort = false;  // pre-invert `distortion` before it is applied
  PropagatorOptions propagator;
};

/// Device-bound pulse -> schedule -> propagator pipeline. Holds the Hamiltonian
/// terms and the coupling table so repeated evaluations share them.
class GateModel {
 public:
  explicit GateModel(const DeviceSpec& spec);

  const DeviceSpec& device() const { return spec_; }
  const HamiltonianTerms& terms() const { return terms_; }
  const CouplingMap& coupling_map() const { return map_; }

  /// Zero-coupling point with Q2 detuned; effective-coupling pulses idle here.
  OperatingPoint idle(Real q2_detune) const;

  /// pulse -> optional (pre)distortion -> coupler frequency -> compensation.
  ControlSchedule schedule(const PulseShapeSpec& pulse, const GateOptions& options) const;
  PropagationResult propagate(const PulseShapeSpec& pulse, const GateOptions& options) const;
  GateReport evaluate(const PulseShapeSpec& pulse, const GateOptions& options) const;

 private:
  DeviceSpec spec_;
  HamiltonianTerms terms_;
  CouplingMap map_;
};

struct CalibrationOptions {
  Real peak_step = 0.002;    // initial simplex steps
  Real detune_step = 0.003;
  Real lambda_step = 0.1;
  bool fit_lambda = false;   // slepian only: coefficients {l1, 0, 1 - l1}
  Real peak_min = -1e300;    // search box; the coupling map range is always enforced
  Real peak_max = 1e300;
  Real detune_min = -0.1;
  Real detune_max = 0.1;
  int max_iterations = 300;
};

struct CalibrationResult {
  PulseShapeSpec pulse;
  Real q2_detune = 0.0;
  GateReport report;
  int evaluations = 0;
  bool hit_iteration_cap = false;
};

/// Nelder-Mead on 1 - F over (peak, Q2 detune[, lambda_1]) from the given
/// starting pulse and detune. Points outside the box or the attainable
/// coupling range score 1 + distance, so the simplex walks back inside.
CalibrationResult calibrate_gate(const GateModel& model, const PulseShapeSpec& start, const GateOptions& options,
                                 const CalibrationOptions& copts = {});

struct RoughPoint {
  Real peak = 0.0;
  Real q2_detune = 0.0;
  Real fidelity = 0.0;
};

/// Grid search over (peak, detune); returns up to `keep` points in order of
/// decreasing fidelity (ties by grid index). Points that fail are skipped.
std::vector<RoughPoint> rough_cz_points(const GateModel& model, const PulseShapeSpec& pulse,
                                        const GateOptions& options, const std::vector<Real>& peaks,
                                        const std::vector<Real>& detunes, std::size_t keep = 1, int workers = 1);

struct CzSearch {
  int peak_points = 12;     // rough grid spans (0, attainable extreme] in peak
  int detune_points = 12;
  Real detune_min = -0.07;
  Real detune_max = 0.04;
  int starts = 3;           // best rough points refined by Nelder-Mead
};

/// Rough grid, then calibrate_gate from the best few grid points.
CalibrationResult calibrate_cz(const GateModel& model, const PulseShapeSpec& pulse, const GateOptions& options,
                               const CalibrationOptions& copts = {}, const CzSearch& search = {}, int workers = 1);

/// Calibrates at every length in order. Each length starts from the previous
/// result (peak rescaled by the length ratio for coupling pulses) and falls
/// back to calibrate_cz when that start ends below `warm_accept`.
std::vector<CalibrationResult> length_sweep(const GateModel& model, const PulseShapeSpec& pulse,
                                            const GateOptions& options, const std::vector<Real>& lengths,
                                            const CalibrationOptions& copts = {}, const CzSearch& search = {},
                                            Real warm_accept = 0.99999, int workers = 1);

struct OptimizeOptions {
  Real length_min = 20.0;
  Real length_max = 80.0;
  Real length_step = 5.0;
  Real threshold = 0.999;
};

struct OptimizeResult {
  CalibrationResult best;
  std::vector<CalibrationResult> trials;  // one per length tried, ascending
  bool threshold_met = false;
  bool hit_iteration_cap = false;
};

/// Shortest length on the grid whose calibrated fidelity reaches `threshold`.
/// If none does, the highest-fidelity trial is returned with threshold_met
/// cleared.
OptimizeResult optimize_pulse(const GateModel& model, const PulseShapeSpec& pulse, const GateOptions& options,
                              const OptimizeOptions& oopts, const CalibrationOptions& copts = {},
                              const CzSearch& search = {}, int workers = 1);

/// Peak value whose conditional phase is pi at fixed detune, bracketed in
/// [lo, hi] where the unwrapped phase crosses 180 degrees.
std::optional<Real> calibrate_peak_for_phase(const GateModel& model, const PulseShapeSpec& pulse,
                                             const GateOptions& options, Real lo, Real hi);

/// Conditional phase mapped to [0, 360) degrees so a CZ sits at 180.
Real phase_degrees(Real conditional_phase);

// ---- scans -------------------------------------------------------------------

struct ScanGrid {
  std::vector<Real> coupling_axis;  // peak values, in the pulse's parameterization
  std::vector<Real> detune_axis;    // Q2 detunes, GHz
  std::vector<int> gate_count_axis;

  void validate() const;
};

enum class ScanKind { Leakage, Phase, PhaseDeviation, Population };
std::string to_string(ScanKind kind);

/// values(r, c): rows follow `row_axis`, columns follow `column_axis`.
struct ScanResult {
  ScanKind kind = ScanKind::Leakage;
  std::string row_name;
  std::string column_name;
  std::vector<Real> row_axis;
  std::vector<Real> column_axis;
  MatrixXr values;

  /// First row holds column axis values, first column holds row axis values.
  void write_csv(std::ostream& out) const;
};

/// Rows: detune axis, columns: coupling axis. Leakage from |101> per point.
ScanResult leakage_scan(const GateModel& model, const ScanGrid& grid, const PulseShapeSpec& pulse,
                        const GateOptions& options, int workers = 1);

/// Same grid, conditional phase in degrees on [0, 360) (NaN if not phase-like).
ScanResult phase_scan(const GateModel& model, const ScanGrid& grid, const PulseShapeSpec& pulse,
                      const GateOptions& options, int workers = 1);

/// Both scans from one set of propagations.
std::pair<ScanResult, ScanResult> leakage_phase_scan(const GateModel& model, const ScanGrid& grid,
                                                     const PulseShapeSpec& pulse, const GateOptions& options,
                                                     int workers = 1);

enum class RepeatAxis { Coupling, Detune };

struct RepeatedGateScan {
  ScanResult leakage;    // rows: gate counts
  ScanResult deviation;  // phi(N) - (N - 1) 180 - 180, degrees, wrapped to (-180, 180]
};

/// Applies U^N for every N in `gate_counts` at each axis value.
RepeatedGateScan repeated_gate_scan(const GateModel& model, const PulseShapeSpec& pulse, const GateOptions& options,
                                    const std::vector<int>& gate_counts, RepeatAxis axis,
                                    const std::vector<Real>& axis_values, int workers = 1);

/// Leakage and conditional-phase deviation of U^N from one propagator.
struct RepeatedGatePoint {
  Real leakage = 0.0;
  Real deviation_degrees = 0.0;
};
/// U^N is composed in the lab frame, then moved back to the rotating frame.
RepeatedGatePoint repeated_gate_point(const HamiltonianTerms& terms, const PropagationResult& single, int n);

// ---- Ramsey emulation -----------------------------------------------------------

struct RamseyOptions {
  int phase_points = 24;
  /// 0 means exact probabilities; otherwise >= 100 binomial shots per point.
  int shots = 0;
  std::uint64_t seed = 0;
  /// Q2 readout fidelities (f00, f11); identity when absent.
  std::optional<std::array<Real, 2>> readout;
};

/// Ramsey on Q2 with Q1 in `control_state`: X/2 on Q2, gate, analysis pi/2
/// about an axis at angle phi, P(Q2 = 1) fitted to a + b cos phi + c sin phi.
/// Returns the fitted fringe phase; throws Error("fit_failed") if the
/// contrast is below 0.1.
Real ramsey_fringe_phase(const Matrix4c& gate, int control_state, const RamseyOptions& options);

/// phase(control = 1) - phase(control = 0), wrapped to (-pi, pi].
Real ramsey_conditional_phase(const Matrix4c& gate, const RamseyOptions& options);

}  // namespace czsim

#endif  // CZSIM_CALIBRATION_HPP
