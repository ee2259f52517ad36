#ifndef CZSIM_PULSE_HPP
#define CZSIM_PULSE_HPP

#include <string>
#include <vector>

#include "czsim/common.hpp"
#include "czsim/device.hpp"

namespace czsim {

enum class PulseFamily { Square, Slepian, Cosine };
enum class Parameterization { CouplerFrequency, EffectiveCoupling };

std::string to_string(PulseFamily f);
std::string to_string(Parameterization p);
PulseFamily parse_pulse_family(const std::string& s);
Parameterization parse_parameterization(const std::string& s);

struct PulseShapeSpec {
  PulseFamily family = PulseFamily::Slepian;
  Real length = 45.0;  // ns
  Real idle_value = 0.0;
  Real peak_value = 0.0;
  Parameterization parameterization = Parameterization::EffectiveCoupling;
  /// Fourier weights of the control-angle ramp, k = 1, 2, ...
  std::vector<Real> slepian_coefficients{1.0};
  /// Detuning (GHz) between the interacting levels |1,0,1> and |2,0,0>; sets
  /// the control angle theta = atan(2 sqrt2 g / detuning) for slepian pulses
  /// in the effective-coupling parameterization.
  Real slepian_detuning = 0.047;

  void validate() const;
};

/// Piecewise-constant control: sample k holds on [k dt, (k+1) dt) and is
/// the shape evaluated at the cell centre.
struct SampledWaveform {
  Real dt = 0.05;
  VectorXr samples;
  Parameterization parameterization = Parameterization::EffectiveCoupling;

  Eigen::Index size() const { return samples.size(); }
  Real duration() const { return dt * static_cast<Real>(samples.size()); }
  Real time(Eigen::Index k) const { return (static_cast<Real>(k) + 0.5) * dt; }
};

/// Continuous-time shape. Zero-based time; idle outside [0, length].
Real pulse_value(const PulseShapeSpec& spec, Real t);

/// Samples the shape. The step is shrunk to length / ceil(length / dt) so the
/// grid tiles the pulse exactly. Square pulses get one idle sample on each side.
SampledWaveform sample_pulse(const PulseShapeSpec& spec, Real dt);

/// Gauss-Legendre nodes of each cell of the sample_pulse grid, two samples per
/// cell (so the returned dt is half the cell). Feeds the fourth-order
/// integrator; see ControlSampling.
SampledWaveform sample_pulse_gauss(const PulseShapeSpec& spec, Real dt);

/// Cell fractions of the two Gauss-Legendre nodes, 1/2 -+ sqrt(3)/6.
inline constexpr Real kGaussNode1 = 0.5 - 0.28867513459481288225;
inline constexpr Real kGaussNode2 = 0.5 + 0.28867513459481288225;

/// Monotone g_eff(w_c) branch above the qubits, tabulated once per device.
class CouplingMap {
 public:
  explicit CouplingMap(const DeviceSpec& spec, int table_size = 1024);

  const DeviceSpec& device() const { return spec_; }
  Real zero_point() const { return zero_point_; }
  Real min_frequency() const { return lo_; }
  Real max_frequency() const { return hi_; }
  /// Attainable g_eff range over the coupler window.
  Real min_coupling() const { return g_table_.front(); }
  Real max_coupling() const { return g_table_.back(); }

  Real coupling(Real coupler_frequency) const { return effective_coupling(spec_, coupler_frequency); }
  /// Coupler frequency with |g_eff(w) - g| < 1e-6 GHz (typically ~1e-11).
  Real frequency(Real g) const;

 private:
  DeviceSpec spec_;
  Real zero_point_ = 0.0;
  Real lo_ = 0.0;
  Real hi_ = 0.0;
  std::vector<Real> w_table_;
  std::vector<Real> g_table_;
  std::vector<Real> slope_;
};

SampledWaveform coupling_to_frequency(const CouplingMap& map, const SampledWaveform& waveform);
SampledWaveform coupling_to_frequency(const DeviceSpec& spec, const SampledWaveform& waveform);
SampledWaveform frequency_to_coupling(const DeviceSpec& spec, const SampledWaveform& waveform);

}  // namespace czsim

#endif  // CZSIM_PULSE_HPP
