#ifndef CZSIM_PROPAGATOR_HPP
#define CZSIM_PROPAGATOR_HPP

#include <optional>

#include "czsim/common.hpp"
#include "czsim/device.hpp"
#include "czsim/pulse.hpp"

namespace czsim {

/// Static configuration the gate starts and ends in. Qubit offsets are
/// relative to the device's nominal idle frequencies (GHz).
struct OperatingPoint {
  Real coupler_frequency = 0.0;
  Real q1_offset = 0.0;
  Real q2_offset = 0.0;

  /// Offsets relative to the frequencies the Hamiltonian terms were built at.
  std::array<Real, 3> offsets(const HamiltonianTerms& terms) const {
    return {q1_offset, coupler_frequency - terms.reference_frequencies[1], q2_offset};
  }
};

/// Midpoint: sample k is the control on [k dt, (k+1) dt) and each step is one
/// exact exponential (second order for smooth controls, exact for a truly
/// piecewise-constant line). GaussPairs: samples 2j and 2j+1 are the control at
/// the two Gauss-Legendre nodes of cell j, of length 2 dt, and the cell is
/// integrated with the fourth-order commutator-free Magnus rule. H is affine in
/// the offsets, so that rule is two half-cell exponentials at mixed offsets.
enum class ControlSampling { Midpoint, GaussPairs };

/// Coupler trajectory in absolute GHz; optional qubit offset trajectories
/// replace the idle offsets sample by sample. All waveforms share dt and
/// sample count.
struct ControlSchedule {
  SampledWaveform coupler_trajectory;
  std::optional<SampledWaveform> q1_offsets;
  std::optional<SampledWaveform> q2_offsets;
  OperatingPoint idle;
  ControlSampling sampling = ControlSampling::Midpoint;

  Real total_length() const { return coupler_trajectory.duration(); }
  Real dt() const { return coupler_trajectory.dt; }
  Eigen::Index steps() const { return coupler_trajectory.size(); }
  void validate() const;

  /// Constant schedule that stays at the operating point.
  static ControlSchedule constant(const OperatingPoint& idle, Real dt, Eigen::Index steps);
};

struct PropagatorOptions {
  /// Largest allowed dt * (half spread of a sector's eigenvalues in the idle
  /// rotating frame), rad.
  Real max_phase_per_step = 0.5;
  /// Remove idle evolution at the dressed per-mode frequencies.
  bool rotating_frame = true;
  /// Sectors with more excitations are skipped and left as identity; a
  /// negative value integrates all of them.
  int max_excitations = -1;
};

struct PropagationResult {
  MatrixXc propagator;
  DressedBasis basis;
  Real unitarity_defect = 0.0;
  Real duration = 0.0;
};

PropagationResult propagate(const HamiltonianTerms& terms, const ControlSchedule& schedule,
                            const PropagatorOptions& options = {});

/// Same integrator on a single state (given in the full bare basis).
VectorXc propagate_state(const HamiltonianTerms& terms, const ControlSchedule& schedule,
                         const VectorXc& initial, const PropagatorOptions& options = {});

/// Diagonal (in the dressed basis) rotation exp(-i H_frame t): labelled states
/// rotate at n . (dressed mode frequencies), unlabelled ones at their energy.
MatrixXc frame_rotation(const DressedBasis& basis, const HamiltonianTerms& terms, Real t);

}  // namespace czsim

#endif  // CZSIM_PROPAGATOR_HPP
