#include "czsim/gate_metrics.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "czsim/nelder_mead.hpp"

namespace czsim {

VirtualZAngles VirtualZAngles::canonical() const {
  Real p = wrap_angle(delta_plus);
  Real m = delta_minus;
  if (p > kPi / 2) {
    p -= kPi;
    m -= kPi;
  } else if (p <= -kPi / 2) {
    p += kPi;
    m += kPi;
  }
  return {p, wrap_angle(m)};
}

const std::array<BareLabel, 4>& computational_labels() {
  static const std::array<BareLabel, 4> labels{BareLabel{0, 0, 0}, BareLabel{0, 0, 1}, BareLabel{1, 0, 0},
                                               BareLabel{1, 0, 1}};
  return labels;
}

Matrix4c phase_gate_target(const VirtualZAngles& a, Real conditional) {
  Vector4c d;
  d << 1.0, std::polar(1.0, a.delta_plus + a.delta_minus), std::polar(1.0, a.delta_plus - a.delta_minus),
      std::polar(1.0, 2.0 * a.delta_plus + conditional);
  return d.asDiagonal();
}

Matrix4c cz_target(const VirtualZAngles& angles) { return phase_gate_target(angles, -kPi); }

Matrix4c project_computational(const PropagationResult& result) {
  const auto& labels = computational_labels();
  const int n = static_cast<int>(result.propagator.rows());
  Eigen::Matrix<Complex, Eigen::Dynamic, 4> v(n, 4);
  for (int i = 0; i < 4; ++i) v.col(i) = result.basis.state(labels[i]);
  return v.adjoint() * result.propagator * v;
}

VirtualZFit fit_virtual_z(const Matrix4c& m, Real conditional) {
  using Vec = Eigen::VectorXd;
  auto infidelity = [&](const Vec& x) {
    return 1.0 - average_gate_fidelity(m, phase_gate_target({x(0), x(1)}, conditional));
  };
  const Real a1 = std::arg(m(1, 1));
  const Real a2 = std::arg(m(2, 2));
  const Real plus0 = 0.5 * (a1 + a2);
  const Real minus0 = 0.5 * (a1 - a2);

  NelderMeadOptions<Real> opts;
  opts.diameter_tolerance = 1e-11;
  opts.value_spread_tolerance = 1e-15;
  VirtualZFit best;
  best.fidelity = -1.0;
  for (Real sp : {0.0, kPi})
    for (Real sm : {0.0, kPi}) {
      Vec x0(2);
      x0 << plus0 + sp, minus0 + sm;
      Vec steps = Vec::Constant(2, 0.1);
      const auto r = nelder_mead_minimize(infidelity, axis_simplex(x0, steps), opts);
      const Real f = 1.0 - r.value;
      if (f > best.fidelity) {
        best.fidelity = f;
        best.angles = VirtualZAngles{wrap_angle(r.point(0)), wrap_angle(r.point(1))}.canonical();
      }
    }
  best.fidelity = average_gate_fidelity(m, phase_gate_target(best.angles, conditional));
  return best;
}

LeakageReport leakage_from_11(const PropagationResult& result) {
  const VectorXc psi = result.propagator * result.basis.state({1, 0, 1});
  LeakageReport rep;
  Real kept = 0.0;
  for (const auto& l : computational_labels()) kept += std::norm(result.basis.state(l).dot(psi));
  rep.total = std::clamp(1.0 - kept, 0.0, 1.0);
  for (int i = 0; i < 3; ++i) {
    const BareLabel l{2, i, 0};
    if (result.basis.has(l)) rep.per_level[l.str()] = std::norm(result.basis.state(l).dot(psi));
  }
  return rep;
}

Real conditional_phase(const Matrix4c& m) {
  for (int i = 0; i < 4; ++i)
    if (!(std::abs(m(i, i)) > 0.1))
      throw Error("not_phase_like",
                  fmt::format("|M[{0},{0}]| = {1:.3g} <= 0.1; gate is not phase-like", i, std::abs(m(i, i))));
  const Real phi = wrap_angle(std::arg(m(0, 0)) - std::arg(m(1, 1)) - std::arg(m(2, 2)) + std::arg(m(3, 3)));
  // a CZ sits on the branch cut; round-off must not flip it to -pi
  return phi < -kPi + 1e-12 ? kPi : phi;
}

GateReport evaluate_gate(const PropagationResult& result) {
  GateReport rep;
  rep.projected_map = project_computational(result);
  const auto fit = fit_virtual_z(rep.projected_map);
  rep.fitted_angles = fit.angles;
  rep.fidelity = fit.fidelity;
  const auto leak = leakage_from_11(result);
  rep.leakage_from_11 = leak.total;
  rep.leakage_per_level = leak.per_level;
  rep.phase_like = (rep.projected_map.diagonal().cwiseAbs().array() > 0.1).all();
  rep.conditional_phase =
      rep.phase_like ? conditional_phase(rep.projected_map) : std::numeric_limits<Real>::quiet_NaN();
  rep.subspace_trace_loss = 1.0 - (rep.projected_map.adjoint() * rep.projected_map).trace().real() / 4.0;
  rep.unitarity_defect = result.unitarity_defect;
  rep.duration = result.duration;
  return rep;
}

}  // namespace czsim
