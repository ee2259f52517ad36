#ifndef CZSIM_BENCHMARKING_HPP
#define CZSIM_BENCHMARKING_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "czsim/common.hpp"
#include "czsim/gate_metrics.hpp"

namespace czsim {

/// pi/2 rotations about an equatorial axis at 0, 90, 45 and 135 degrees.
enum class PiHalf { X = 0, Y = 1, W = 2, V = 3 };

std::string to_string(PiHalf g);
Eigen::Matrix2cd pi_half_matrix(PiHalf g);

/// Canonical diag(1, 1, 1, -1).
Matrix4c cz_matrix();

struct RandomCircuit {
  int n_qubits = 2;
  int depth = 0;
  bool include_cz = true;
  std::uint64_t seed = 0;
  /// layers[d][q]; entry 1 is unused for one qubit.
  std::vector<std::array<PiHalf, 2>> layers;
};

/// Each cycle draws, per qubit, uniformly from the three labels that differ
/// from that qubit's previous label (uniform over all four on the first).
RandomCircuit generate_circuit(int n_qubits, int depth, std::uint64_t seed, bool include_cz = true);

/// Columns are prepared states: [[f00, 1 - f11], [1 - f00, f11]].
Eigen::Matrix2d confusion_matrix(Real f00, Real f11);

struct NoiseSpec {
  Real depolarizing_per_cycle = 0.0;
  /// (f00, f11) per qubit; identity when empty.
  std::vector<std::array<Real, 2>> readout;

  void validate(int n_qubits) const;
  bool noiseless() const { return depolarizing_per_cycle == 0.0 && readout.empty(); }
};

enum class SimulationMode { Statevector, Density };

struct CircuitProbabilities {
  VectorXr ideal;  // canonical gates, no noise
  VectorXr noisy;  // actual two-qubit map, depolarizing, then readout confusion
};

/// Outcome index is 2 q1 + q2 (one qubit: q1). `two_qubit_gate` replaces the
/// canonical CZ in the noisy branch; a non-unitary map (leaky projection)
/// returns its lost trace as the maximally mixed state. In statevector mode
/// depolarizing is applied in closed form after the circuit, and lost trace is
/// returned once at the end; both modes agree for unitary gates.
CircuitProbabilities simulate_circuit(const RandomCircuit& circuit, const NoiseSpec& noise,
                                      SimulationMode mode = SimulationMode::Density,
                                      const std::optional<Matrix4c>& two_qubit_gate = std::nullopt);

/// Per-circuit density matrices of the noisy branch before readout, for
/// purity oracles.
MatrixXc circuit_density(const RandomCircuit& circuit, const NoiseSpec& noise,
                         const std::optional<Matrix4c>& two_qubit_gate = std::nullopt);

/// (D sum q p - 1) / (D sum p^2 - 1); throws Error("degenerate") when the
/// denominator is below 1e-6 in magnitude.
Real linear_xeb_fidelity(const VectorXr& ideal, const VectorXr& measured);

/// Ratio of sums over circuits of the same depth.
Real linear_xeb_fidelity(const std::vector<VectorXr>& ideal, const std::vector<VectorXr>& measured);

struct DecayFit {
  Real alpha = 0.0;
  Real alpha_stderr = 0.0;
  Real amplitude = 0.0;
  Real amplitude_stderr = 0.0;
  /// (1 - alpha)(D^2 - 1)/D^2 and (1 - alpha)(D - 1)/D.
  Real pauli_error = 0.0;
  Real average_error = 0.0;
  int points_used = 0;
  bool truncated = false;  // a non-positive value cut the fit to the positive prefix
};

/// Least squares F(d) = A alpha^d (Gauss-Newton from the log-linear fit).
/// NaN values are skipped. Throws Error("too_few_depths") with fewer than 3 usable points.
DecayFit fit_decay(const std::vector<int>& depths, const std::vector<Real>& values, int dimension);

struct SpecklePurity {
  Real purity = 0.0;
  Real purity_fidelity = 0.0;  // sqrt(purity), NaN when purity < 0
};

/// Var(p) D^2 (D + 1)/(D - 1) over all circuits and outcomes. With `shots`
/// > 0 each p^2 is replaced by its unbiased estimate (N p^2 - p)/(N - 1).
/// Throws Error("too_few_circuits") below 10 circuits.
SpecklePurity speckle_purity(const std::vector<VectorXr>& measured, int shots = 0);

struct XebDepth {
  int depth = 0;
  Real xeb_fidelity = 0.0;  // NaN where the ideal distributions are uniform
  Real purity = 0.0;         // measured over ideal speckle; NaN when the ideal speckle < 0.1
  Real oracle_purity = 0.0;  // mean (D Tr rho^2 - 1)/(D - 1) over the same circuits
};

struct XebOptions {
  int n_qubits = 2;
  std::vector<int> depths{1, 3, 5, 8, 12, 17, 23, 30};
  int circuits = 50;
  int shots = 1000;  // 0: exact probabilities
  std::uint64_t seed = 0;
  SimulationMode mode = SimulationMode::Density;
  bool keep_probabilities = false;

  void validate() const;
};

struct CircuitRecord {
  int depth = 0;
  int index = 0;
  std::uint64_t seed = 0;
  VectorXr ideal;
  VectorXr measured;
};

struct XebRun {
  XebOptions options;
  NoiseSpec noise;
  std::vector<XebDepth> per_depth;
  DecayFit xeb_fit;
  DecayFit purity_fit;         // per-cycle purity decay
  DecayFit oracle_purity_fit;
  Real purity_fidelity = 0.0;  // sqrt of the per-cycle purity decay
  Real control_error = 0.0;    // purity_fidelity - xeb alpha
  std::vector<CircuitRecord> circuits;  // filled when keep_probabilities
};

/// Seed of circuit `index` at depth slot `slot`, derived from the run seed.
std::uint64_t circuit_seed(std::uint64_t seed, std::size_t slot, std::size_t index);

/// Random circuits per depth, sampled outcome frequencies, XEB and speckle
/// purity per depth, and decay fits. `two_qubit_gate` is the device map (see
/// virtual_z_corrected); the canonical CZ when absent.
XebRun cz_xeb_pipeline(const XebOptions& options, const NoiseSpec& noise,
                       const std::optional<Matrix4c>& two_qubit_gate = std::nullopt, int workers = 1);

/// Projected map with the fitted single-qubit Z gauge removed, so a good
/// device gate is close to cz_matrix().
Matrix4c virtual_z_corrected(const Matrix4c& projected, const VirtualZAngles& angles);

}  // namespace czsim

#endif  // CZSIM_BENCHMARKING_HPP
