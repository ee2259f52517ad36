#include "czsim/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

namespace czsim {

std::string to_string(PulseFamily f) {
  switch (f) {
    case PulseFamily::Square:
      return "square";
    case PulseFamily::Slepian:
      return "slepian";
    case PulseFamily::Cosine:
      return "cosine";
  }
  return "?";
}

std::string to_string(Parameterization p) {
  return p == Parameterization::CouplerFrequency ? "coupler_frequency" : "effective_coupling";
}

PulseFamily parse_pulse_family(const std::string& s) {
  if (s == "square") return PulseFamily::Square;
  if (s == "slepian") return PulseFamily::Slepian;
  if (s == "cosine") return PulseFamily::Cosine;
  throw Error("unknown_family", "unknown pulse family '" + s + "'");
}

Parameterization parse_parameterization(const std::string& s) {
  if (s == "coupler_frequency") return Parameterization::CouplerFrequency;
  if (s == "effective_coupling") return Parameterization::EffectiveCoupling;
  throw Error("invalid_argument", "unknown parameterization '" + s + "'");
}

namespace {

Real slepian_normalization(const std::vector<Real>& lambda) {
  // value of sum_k lambda_k (1 - cos(2 pi k t / T)) at t = T/2: even k vanish
  Real norm = 0.0;
  for (std::size_t i = 0; i < lambda.size(); i += 2) norm += 2.0 * lambda[i];
  return norm;
}

Real slepian_ramp(const std::vector<Real>& lambda, Real norm, Real x) {
  Real s = 0.0;
  for (std::size_t i = 0; i < lambda.size(); ++i)
    s += lambda[i] * (1.0 - std::cos(kTwoPi * static_cast<Real>(i + 1) * x));
  return s / norm;
}

}  // namespace

void PulseShapeSpec::validate() const {
  if (!(length > 0.0) || !std::isfinite(length))
    throw Error("invalid_pulse", fmt::format("pulse length must be positive, got {}", length));
  if (!std::isfinite(peak_value) || !std::isfinite(idle_value))
    throw Error("invalid_pulse", "pulse values must be finite");
  if (family == PulseFamily::Slepian) {
    if (slepian_coefficients.empty())
      throw Error("invalid_pulse", "slepian pulse needs at least one coefficient");
    if (std::abs(slepian_normalization(slepian_coefficients)) < 1e-12)
      throw Error("invalid_pulse", "slepian coefficients never reach the peak (odd weights sum to 0)");
    if (parameterization == Parameterization::EffectiveCoupling && !(std::abs(slepian_detuning) > 0.0))
      throw Error("invalid_pulse", "slepian_detuning must be nonzero");
  }
}

Real pulse_value(const PulseShapeSpec& spec, Real t) {
  const Real T = spec.length;
  if (t <= 0.0 || t >= T) return spec.idle_value;
  const Real x = t / T;
  switch (spec.family) {
    case PulseFamily::Square:
      return spec.peak_value;
    case PulseFamily::Cosine:
      return spec.idle_value + (spec.peak_value - spec.idle_value) * 0.5 * (1.0 - std::cos(kTwoPi * x));
    case PulseFamily::Slepian: {
      const auto& lambda = spec.slepian_coefficients;
      const Real s = slepian_ramp(lambda, slepian_normalization(lambda), x);
      if (spec.parameterization == Parameterization::CouplerFrequency)
        return spec.idle_value + (spec.peak_value - spec.idle_value) * s;
      const Real d = spec.slepian_detuning;
      const Real scale = 2.0 * std::numbers::sqrt2 / d;
      const Real th_idle = std::atan(scale * spec.idle_value);
      const Real th_peak = std::atan(scale * spec.peak_value);
      return std::tan(th_idle + (th_peak - th_idle) * s) / scale;
    }
  }
  throw Error("unknown_family", "unknown pulse family");
}

SampledWaveform sample_pulse(const PulseShapeSpec& spec, Real dt) {
  spec.validate();
  if (!(dt > 0.0) || dt > spec.length / 20.0 + 1e-12)
    throw Error("dt_too_coarse",
                fmt::format("dt = {} ns is coarser than length/20 = {} ns", dt, spec.length / 20.0));
  const auto n = static_cast<Eigen::Index>(std::ceil(spec.length / dt - 1e-9));
  SampledWaveform w;
  w.dt = spec.length / static_cast<Real>(n);
  w.parameterization = spec.parameterization;
  if (spec.family == PulseFamily::Square) {
    w.samples = VectorXr::Constant(n + 2, spec.peak_value);
    w.samples(0) = spec.idle_value;
    w.samples(n + 1) = spec.idle_value;
    return w;
  }
  // every family is symmetric about T/2; mirroring makes that exact
  w.samples.resize(n);
  for (Eigen::Index k = 0; k < (n + 1) / 2; ++k) {
    w.samples(k) = pulse_value(spec, w.time(k));
    w.samples(n - 1 - k) = w.samples(k);
  }
  return w;
}

SampledWaveform sample_pulse_gauss(const PulseShapeSpec& spec, Real dt) {
  const SampledWaveform cells = sample_pulse(spec, dt);
  const Real h = cells.dt;
  const Eigen::Index n = cells.size();
  const bool square = spec.family == PulseFamily::Square;
  SampledWaveform w;
  w.dt = 0.5 * h;
  w.parameterization = spec.parameterization;
  w.samples.resize(2 * n);
  // square cells are shifted by the idle pad; nodes never straddle an edge
  const Real start = square ? -h : 0.0;
  for (Eigen::Index k = 0; k < (n + 1) / 2; ++k) {
    const Real t0 = start + static_cast<Real>(k) * h;
    const Real a = pulse_value(spec, t0 + kGaussNode1 * h);
    const Real b = pulse_value(spec, t0 + kGaussNode2 * h);
    w.samples(2 * (n - 1 - k)) = b;
    w.samples(2 * (n - 1 - k) + 1) = a;
    w.samples(2 * k) = a;
    w.samples(2 * k + 1) = b;
  }
  return w;
}

CouplingMap::CouplingMap(const DeviceSpec& spec, int table_size) : spec_(spec) {
  spec_.validate();
  zero_point_ = zero_coupling_point(spec_);
  lo_ = std::max(spec_.q1().frequency, spec_.q2().frequency) + spec_.resonance_guard + 1e-6;
  hi_ = spec_.coupler_max_frequency;
  // quadratic spacing packs points where g_eff is steep
  w_table_.resize(table_size);
  g_table_.resize(table_size);
  for (int k = 0; k < table_size; ++k) {
    const Real x = static_cast<Real>(k) / (table_size - 1);
    w_table_[k] = lo_ + (hi_ - lo_) * x * x;
    g_table_[k] = effective_coupling(spec_, w_table_[k]);
  }
  for (int k = 1; k < table_size; ++k)
    if (!(g_table_[k] > g_table_[k - 1]))
      throw Error("non_monotone", "effective coupling is not monotone above the qubits");
  // Fritsch-Carlson slopes dw/dg
  const int n = table_size;
  std::vector<Real> secant(n - 1);
  for (int k = 0; k + 1 < n; ++k) secant[k] = (w_table_[k + 1] - w_table_[k]) / (g_table_[k + 1] - g_table_[k]);
  slope_.assign(n, 0.0);
  slope_[0] = secant[0];
  slope_[n - 1] = secant[n - 2];
  for (int k = 1; k + 1 < n; ++k) slope_[k] = 2.0 / (1.0 / secant[k - 1] + 1.0 / secant[k]);
}

Real CouplingMap::frequency(Real g) const {
  if (g == 0.0) return zero_point_;
  if (g < g_table_.front() || g > g_table_.back())
    throw Error("out_of_range", fmt::format("g_eff = {:.6g} GHz outside attainable [{:.6g}, {:.6g}]", g,
                                            g_table_.front(), g_table_.back()));
  const auto it = std::lower_bound(g_table_.begin(), g_table_.end(), g);
  const auto k = static_cast<std::size_t>(it - g_table_.begin());
  if (*it == g) return w_table_[k];
  const Real a = w_table_[k - 1], b = w_table_[k];

  // monotone cubic Hermite in g; on the default table the residual
  // |g_eff(w) - g| stays near 1e-11 GHz, so no polishing pass is needed
  const Real h = g_table_[k] - g_table_[k - 1];
  const Real s = (g - g_table_[k - 1]) / h;
  const Real h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
  const Real h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
  const Real w = h00 * a + h10 * h * slope_[k - 1] + h01 * b + h11 * h * slope_[k];
  return std::clamp(w, a, b);
}

SampledWaveform coupling_to_frequency(const CouplingMap& map, const SampledWaveform& waveform) {
  if (waveform.parameterization != Parameterization::EffectiveCoupling)
    throw Error("invalid_argument", "waveform is not parameterized as effective coupling");
  SampledWaveform out = waveform;
  out.parameterization = Parameterization::CouplerFrequency;
  // pulses are mostly symmetric, so many samples repeat exactly
  std::map<Real, Real> memo;
  for (Eigen::Index k = 0; k < waveform.size(); ++k) {
    const Real g = waveform.samples(k);
    auto it = memo.find(g);
    if (it != memo.end()) {
      out.samples(k) = it->second;
      continue;
    }
    try {
      const Real w = map.frequency(g);
      memo.emplace(g, w);
      out.samples(k) = w;
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("sample {}: {}", k, e.what()));
    }
  }
  return out;
}

SampledWaveform coupling_to_frequency(const DeviceSpec& spec, const SampledWaveform& waveform) {
  return coupling_to_frequency(CouplingMap(spec), waveform);
}

SampledWaveform frequency_to_coupling(const DeviceSpec& spec, const SampledWaveform& waveform) {
  if (waveform.parameterization != Parameterization::CouplerFrequency)
    throw Error("invalid_argument", "waveform is not parameterized as coupler frequency");
  SampledWaveform out = waveform;
  out.parameterization = Parameterization::EffectiveCoupling;
  for (Eigen::Index k = 0; k < waveform.size(); ++k)
    out.samples(k) = effective_coupling(spec, waveform.samples(k));
  return out;
}

}  // namespace czsim
