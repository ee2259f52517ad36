#ifndef CZSIM_DEVICE_HPP
#define CZSIM_DEVICE_HPP

#include <array>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "czsim/common.hpp"

namespace czsim {

enum class ModeLabel { Q1 = 0, Coupler = 1, Q2 = 2 };

std::string to_string(ModeLabel label);

/// One Duffing oscillator. Frequencies are the 0->1 transition in GHz.
struct ModeSpec {
  ModeLabel label = ModeLabel::Q1;
  Real frequency = 0.0;
  Real anharmonicity = 0.0;
  int levels = 3;
};

/// Transverse couplings g_ij / 2pi in GHz.
struct CouplingGraph {
  Real g_1c = 0.0;
  Real g_2c = 0.0;
  Real g_12 = 0.0;
};

/// Symmetric-SQUID transmon tuning curve.
struct FluxModel {
  Real max_frequency = 0.0;
  Real anharmonicity = 0.0;
};

/// Table-style quantities with no dynamical role.
struct QubitMetadata {
  std::optional<Real> readout_frequency;
  std::optional<Real> t1_us;
  std::optional<Real> t2_star_us;
  std::optional<Real> dispersive_shift_mhz;
  std::optional<Real> readout_f00;
  std::optional<Real> readout_f11;
};

/// Three modes ordered (Q1, C, Q2). The coupler frequency stored here is
/// only the reference at which the static Hamiltonian is built; gate
/// schedules move it.
struct DeviceSpec {
  std::array<ModeSpec, 3> modes;
  CouplingGraph couplings;
  std::array<std::optional<FluxModel>, 3> flux_models;
  std::array<QubitMetadata, 2> metadata;

  /// Searches for the coupler operating point stay inside this window.
  Real coupler_max_frequency = 7.0;
  /// |w_qubit - w_coupler| below this is treated as resonant.
  Real resonance_guard = 0.010;

  const ModeSpec& mode(ModeLabel l) const { return modes[static_cast<int>(l)]; }
  ModeSpec& mode(ModeLabel l) { return modes[static_cast<int>(l)]; }
  const ModeSpec& q1() const { return mode(ModeLabel::Q1); }
  const ModeSpec& coupler() const { return mode(ModeLabel::Coupler); }
  const ModeSpec& q2() const { return mode(ModeLabel::Q2); }

  /// Throws Error("invalid_device") on the first violated invariant.
  void validate() const;

  /// Idle frequencies, anharmonicities and tuning maxima from the measured
  /// device table; couplings and coupler parameters are configuration
  /// defaults (g_1c = g_2c = 90 MHz, g_12 = 6 MHz, coupler -100 MHz, 7 GHz).
  static DeviceSpec default_device();

  /// Same device with every mode truncated to `levels`.
  DeviceSpec with_levels(int levels) const;
};

/// Bare product label |n_Q1, n_C, n_Q2>.
struct BareLabel {
  int q1 = 0;
  int c = 0;
  int q2 = 0;

  int excitations() const { return q1 + c + q2; }
  std::string str() const;
  auto operator<=>(const BareLabel&) const = default;
};

/// H(t) = static_part + sum_m offset_m(t) * control_parts[m], in rad/ns with
/// offsets in GHz (control parts carry the 2 pi).
/// Block structure: every term conserves the total excitation number, so
/// `sectors` partitions the basis into invariant subspaces.
struct HamiltonianTerms {
  int dimension = 0;
  std::array<int, 3> levels{};
  std::array<Real, 3> reference_frequencies{};  // GHz, the w_m inside static_part
  MatrixXc static_part;
  std::array<MatrixXc, 3> control_parts;
  std::vector<std::vector<int>> sectors;

  int index(const BareLabel& label) const {
    return (label.q1 * levels[1] + label.c) * levels[2] + label.q2;
  }
  BareLabel label(int index) const;

  /// Assemble H for per-mode frequency offsets in GHz.
  MatrixXc assemble(const std::array<Real, 3>& offsets_ghz) const;
};

struct HamiltonianOptions {
  int max_dimension = 125;
};

HamiltonianTerms build_hamiltonian(const DeviceSpec& spec,
                                   const HamiltonianOptions& options = {});

/// Eigenbasis of H at an operating point with maximum-overlap labels.
struct DressedBasis {
  std::map<BareLabel, int> labels;
  std::map<BareLabel, Real> energies;  // GHz
  VectorXr eigenvalues;                // GHz, ascending
  MatrixXc eigenvectors;               // columns; phase fixed so the labelled bare component is real positive
  std::array<Real, 3> offsets{};       // GHz, operating point

  bool has(const BareLabel& l) const { return labels.count(l) != 0; }
  VectorXc state(const BareLabel& l) const;
  Real energy(const BareLabel& l) const;
  /// Dressed 0->1 transition of each mode (GHz).
  std::array<Real, 3> mode_frequencies() const;
};

/// Computational states plus |2,i,0>. Labels outside this set are assigned
/// when unambiguous and skipped otherwise.
std::vector<BareLabel> default_required_labels();

DressedBasis dressed_basis(const HamiltonianTerms& terms,
                           const std::array<Real, 3>& offsets_ghz,
                           const std::vector<BareLabel>& required = default_required_labels());

/// Exchange coupling between the qubits through the coupler at the given
/// coupler frequency (GHz): half the minimum splitting of the qubit-like
/// pair in the single-excitation block, signed by the perturbative estimate.
Real effective_coupling(const DeviceSpec& spec, Real coupler_frequency);

/// Perturbative estimate g_12 + g_1c g_2c (1/D1 + 1/D2) / 2.
Real effective_coupling_estimate(const DeviceSpec& spec, Real coupler_frequency);

/// Coupler frequency above both qubits at which the exchange vanishes.
Real zero_coupling_point(const DeviceSpec& spec);

Real flux_to_frequency(const FluxModel& model, Real flux);

/// Dressed single-excitation qubit frequencies (Q1, Q2) for a coupler
/// frequency and bare qubit offsets; only the 3x3 block is needed.
std::array<Real, 2> dressed_qubit_frequencies(const DeviceSpec& spec, Real coupler_frequency,
                                              Real q1_offset = 0.0, Real q2_offset = 0.0);

}  // namespace czsim

#endif  // CZSIM_DEVICE_HPP
