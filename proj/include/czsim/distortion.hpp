#ifndef CZSIM_DISTORTION_HPP
#define CZSIM_DISTORTION_HPP

#include <vector>

#include "czsim/common.hpp"
#include "czsim/pulse.hpp"

namespace czsim {

struct SettlingTerm {
  Real amplitude = 0.0;  // a_k, dimensionless
  Real tau = 1.0;        // ns
};

/// Linear control line with step response s(t) = gain (1 + sum_k a_k e^{-t/tau_k}).
struct DistortionModel {
  std::vector<SettlingTerm> settling_terms;
  Real gain = 1.0;

  /// Gain seen by the first sample after a step: gain (1 + sum a_k).
  Real instantaneous_gain() const;
  bool is_identity() const { return gain == 1.0 && settling_terms.empty(); }
  void validate() const;
};

/// Distorted line output for a piecewise-constant input starting from rest.
/// Each exponential is discretized by its exact pole z_k = e^{-dt/tau_k}.
SampledWaveform apply_distortion(const DistortionModel& model, const SampledWaveform& waveform);

/// Exact recursive inverse of apply_distortion.
SampledWaveform predistort(const DistortionModel& model, const SampledWaveform& ideal);

}  // namespace czsim

#endif  // CZSIM_DISTORTION_HPP
