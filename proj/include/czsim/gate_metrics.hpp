#ifndef CZSIM_GATE_METRICS_HPP
#define CZSIM_GATE_METRICS_HPP

#include <map>
#include <string>

#include "czsim/common.hpp"
#include "czsim/propagator.hpp"

namespace czsim {

/// Single-qubit Z gauge of a controlled-phase gate, both in (-pi, pi].
struct VirtualZAngles {
  Real delta_plus = 0.0;
  Real delta_minus = 0.0;

  /// (D+, D-) and (D+ + pi, D- + pi) describe the same gate; the canonical
  /// representative has D+ in (-pi/2, pi/2].
  VirtualZAngles canonical() const;
};

/// Computational states in |Q1 Q2> order 00, 01, 10, 11.
const std::array<BareLabel, 4>& computational_labels();

/// diag(1, e^{i(D+ + D-)}, e^{i(D+ - D-)}, e^{i(2D+ + conditional)}). The CZ
/// target uses conditional = -pi.
Matrix4c phase_gate_target(const VirtualZAngles& angles, Real conditional);

Matrix4c cz_target(const VirtualZAngles& angles);

/// M_ij = <dressed_i| U |dressed_j> on the computational block.
Matrix4c project_computational(const PropagationResult& result);

/// (Tr(M^dagger M) + |Tr(T^dagger M)|^2) / 20.
template <typename DerivedM, typename DerivedT>
Real average_gate_fidelity(const Eigen::MatrixBase<DerivedM>& m, const Eigen::MatrixBase<DerivedT>& target) {
  const Real tr_mm = (m.adjoint() * m).trace().real();
  const Real overlap = std::norm((target.adjoint() * m).trace());
  return (tr_mm + overlap) / 20.0;
}

struct VirtualZFit {
  VirtualZAngles angles;
  Real fidelity = 0.0;
};

/// Maximizes fidelity against phase_gate_target(angles, conditional) over both
/// angles with Nelder-Mead, multi-started from the analytic phase guesses.
VirtualZFit fit_virtual_z(const Matrix4c& m, Real conditional = -kPi);

struct LeakageReport {
  Real total = 0.0;
  std::map<std::string, Real> per_level;  // populations of |2,i,0>
};

LeakageReport leakage_from_11(const PropagationResult& result);

/// arg M00 - arg M01 - arg M10 + arg M11 wrapped to (-pi, pi]; within 1e-12
/// of the cut it reports +pi.
Real conditional_phase(const Matrix4c& m);

struct GateReport {
  Matrix4c projected_map = Matrix4c::Zero();
  VirtualZAngles fitted_angles;
  Real fidelity = 0.0;
  Real leakage_from_11 = 0.0;
  std::map<std::string, Real> leakage_per_level;
  /// NaN when some diagonal element of the projected map is <= 0.1.
  Real conditional_phase = 0.0;
  bool phase_like = true;
  Real subspace_trace_loss = 0.0;
  Real unitarity_defect = 0.0;
  Real duration = 0.0;
};

GateReport evaluate_gate(const PropagationResult& result);

}  // namespace czsim

#endif  // CZSIM_GATE_METRICS_HPP
