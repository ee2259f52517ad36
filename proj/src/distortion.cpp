#include "czsim/distortion.hpp"

#include <cmath>

#include <fmt/format.h>

namespace czsim {

Real DistortionModel::instantaneous_gain() const {
  Real s = 1.0;
  for (const auto& t : settling_terms) s += t.amplitude;
  return gain * s;
}

void DistortionModel::validate() const {
  if (!std::isfinite(gain)) throw Error("invalid_distortion", "gain must be finite");
  for (const auto& t : settling_terms) {
    if (!(t.tau > 0.0) || !std::isfinite(t.tau))
      throw Error("invalid_distortion", fmt::format("time constant must be positive, got {}", t.tau));
    if (!std::isfinite(t.amplitude)) throw Error("invalid_distortion", "amplitude must be finite");
  }
}

namespace {

std::vector<Real> poles(const DistortionModel& model, Real dt) {
  std::vector<Real> z;
  z.reserve(model.settling_terms.size());
  for (const auto& t : model.settling_terms) z.push_back(std::exp(-dt / t.tau));
  return z;
}

}  // namespace

// With x_{-1} = 0 and r_k the exponentially weighted sum of input steps,
//   r_{k,n} = z_k r_{k,n-1} + (x_n - x_{n-1}),   y_n = gain (x_n + sum_k a_k r_{k,n}).
SampledWaveform apply_distortion(const DistortionModel& model, const SampledWaveform& waveform) {
  model.validate();
  if (model.is_identity()) return waveform;
  const auto z = poles(model, waveform.dt);
  const std::size_t m = z.size();
  std::vector<Real> r(m, 0.0);
  SampledWaveform out = waveform;
  Real prev = 0.0;
  for (Eigen::Index n = 0; n < waveform.size(); ++n) {
    const Real x = waveform.samples(n);
    Real acc = x;
    for (std::size_t k = 0; k < m; ++k) {
      r[k] = z[k] * r[k] + (x - prev);
      acc += model.settling_terms[k].amplitude * r[k];
    }
    out.samples(n) = model.gain * acc;
    prev = x;
  }
  return out;
}

SampledWaveform predistort(const DistortionModel& model, const SampledWaveform& ideal) {
  model.validate();
  const Real g0 = model.instantaneous_gain();
  if (std::abs(g0) < 1e-12)
    throw Error("non_invertible", "distortion model has zero instantaneous gain; cannot invert");
  if (model.is_identity()) return ideal;
  const auto z = poles(model, ideal.dt);
  const std::size_t m = z.size();
  Real a_sum = 0.0;
  for (const auto& t : model.settling_terms) a_sum += t.amplitude;
  std::vector<Real> r(m, 0.0);
  SampledWaveform out = ideal;
  Real prev = 0.0;
  for (Eigen::Index n = 0; n < ideal.size(); ++n) {
    // y/gain = x (1 + sum a) + sum a (z r_prev - x_prev)
    Real rhs = ideal.samples(n) / model.gain;
    for (std::size_t k = 0; k < m; ++k)
      rhs -= model.settling_terms[k].amplitude * (z[k] * r[k] - prev);
    const Real x = rhs / (1.0 + a_sum);
    for (std::size_t k = 0; k < m; ++k) r[k] = z[k] * r[k] + (x - prev);
    out.samples(n) = x;
    prev = x;
  }
  return out;
}

}  // namespace czsim
