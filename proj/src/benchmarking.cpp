#include "czsim/benchmarking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <fmt/format.h>
#include <unsupported/Eigen/KroneckerProduct>

#include "czsim/parallel.hpp"

namespace czsim {

std::string to_string(PiHalf g) {
  switch (g) {
    case PiHalf::X:
      return "X/2";
    case PiHalf::Y:
      return "Y/2";
    case PiHalf::W:
      return "W/2";
    case PiHalf::V:
      return "V/2";
  }
  return "?";
}

Eigen::Matrix2cd pi_half_matrix(PiHalf g) {
  static constexpr std::array<Real, 4> axis{0.0, 0.5 * kPi, 0.25 * kPi, 0.75 * kPi};
  const Real phi = axis[static_cast<int>(g)];
  const Complex mi(0.0, -1.0);
  Eigen::Matrix2cd m;
  m << 1.0, mi * std::polar(1.0, -phi), mi * std::polar(1.0, phi), 1.0;
  return m / std::numbers::sqrt2;
}

Matrix4c cz_matrix() {
  Matrix4c m = Matrix4c::Identity();
  m(3, 3) = -1.0;
  return m;
}

RandomCircuit generate_circuit(int n_qubits, int depth, std::uint64_t seed, bool include_cz) {
  if (n_qubits != 1 && n_qubits != 2) throw Error("invalid_argument", "circuits act on 1 or 2 qubits");
  if (depth < 1) throw Error("invalid_argument", "circuit depth must be at least 1");
  RandomCircuit c;
  c.n_qubits = n_qubits;
  c.depth = depth;
  c.include_cz = include_cz && n_qubits == 2;
  c.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> first(0, 3), other(0, 2);
  c.layers.resize(static_cast<std::size_t>(depth));
  for (int d = 0; d < depth; ++d)
    for (int q = 0; q < 2; ++q) {
      int g;
      if (d == 0) {
        g = first(rng);
      } else {
        const int prev = static_cast<int>(c.layers[d - 1][q]);
        g = other(rng);
        if (g >= prev) ++g;
      }
      c.layers[d][q] = static_cast<PiHalf>(g);
    }
  return c;
}

Eigen::Matrix2d confusion_matrix(Real f00, Real f11) {
  Eigen::Matrix2d c;
  c << f00, 1.0 - f11, 1.0 - f00, f11;
  return c;
}

void NoiseSpec::validate(int n_qubits) const {
  if (!(depolarizing_per_cycle >= 0.0 && depolarizing_per_cycle <= 1.0))
    throw Error("invalid_noise", "depolarizing_per_cycle must lie in [0, 1]");
  if (!readout.empty() && static_cast<int>(readout.size()) != n_qubits)
    throw Error("invalid_noise", fmt::format("readout needs one (f00, f11) pair per qubit ({})", n_qubits));
  for (const auto& f : readout)
    for (Real v : f)
      if (!(v >= 0.0 && v <= 1.0)) throw Error("invalid_noise", "readout fidelities must lie in [0, 1]");
}

namespace {

MatrixXc layer_unitary(const RandomCircuit& c, int d) {
  const auto& l = c.layers[static_cast<std::size_t>(d)];
  if (c.n_qubits == 1) return pi_half_matrix(l[0]);
  return Eigen::kroneckerProduct(pi_half_matrix(l[0]), pi_half_matrix(l[1])).eval();
}

VectorXr apply_readout(const NoiseSpec& noise, int n_qubits, VectorXr p) {
  if (noise.readout.empty()) return p;
  MatrixXr c = confusion_matrix(noise.readout[0][0], noise.readout[0][1]);
  if (n_qubits == 2)
    c = Eigen::kroneckerProduct(c, confusion_matrix(noise.readout[1][0], noise.readout[1][1])).eval();
  return c * p;
}

int dimension_of(int n_qubits) { return n_qubits == 1 ? 2 : 4; }

}  // namespace

MatrixXc circuit_density(const RandomCircuit& circuit, const NoiseSpec& noise,
                         const std::optional<Matrix4c>& two_qubit_gate) {
  const int dim = dimension_of(circuit.n_qubits);
  const Real p = noise.depolarizing_per_cycle;
  const MatrixXc gate = two_qubit_gate ? MatrixXc(*two_qubit_gate) : MatrixXc(cz_matrix());
  const MatrixXc mixed = MatrixXc::Identity(dim, dim) / static_cast<Real>(dim);
  MatrixXc rho = MatrixXc::Zero(dim, dim);
  rho(0, 0) = 1.0;
  for (int d = 0; d < circuit.depth; ++d) {
    const MatrixXc l = layer_unitary(circuit, d);
    rho = l * rho * l.adjoint();
    if (circuit.include_cz) {
      rho = gate * rho * gate.adjoint();
      const Real lost = 1.0 - rho.trace().real();
      rho += lost * mixed;
    }
    rho = (1.0 - p) * rho + p * mixed;
  }
  return rho;
}

CircuitProbabilities simulate_circuit(const RandomCircuit& circuit, const NoiseSpec& noise, SimulationMode mode,
                                      const std::optional<Matrix4c>& two_qubit_gate) {
  noise.validate(circuit.n_qubits);
  const int dim = dimension_of(circuit.n_qubits);
  const MatrixXc cz = cz_matrix();
  const MatrixXc gate = two_qubit_gate ? MatrixXc(*two_qubit_gate) : cz;

  VectorXc ideal = VectorXc::Zero(dim);
  ideal(0) = 1.0;
  VectorXc actual = ideal;
  for (int d = 0; d < circuit.depth; ++d) {
    const MatrixXc l = layer_unitary(circuit, d);
    ideal = l * ideal;
    if (circuit.include_cz) ideal = cz * ideal;
    if (mode == SimulationMode::Statevector) {
      actual = l * actual;
      if (circuit.include_cz) actual = gate * actual;
    }
  }
  CircuitProbabilities out;
  out.ideal = ideal.cwiseAbs2();

  VectorXr noisy;
  if (mode == SimulationMode::Density) {
    noisy = circuit_density(circuit, noise, two_qubit_gate).diagonal().real();
  } else {
    noisy = actual.cwiseAbs2();
    noisy.array() += (1.0 - noisy.sum()) / dim;
    const Real keep = std::pow(1.0 - noise.depolarizing_per_cycle, circuit.depth);
    noisy = keep * noisy + VectorXr::Constant(dim, (1.0 - keep) / dim);
  }
  out.noisy = apply_readout(noise, circuit.n_qubits, noisy);
  return out;
}

Real linear_xeb_fidelity(const VectorXr& ideal, const VectorXr& measured) {
  return linear_xeb_fidelity(std::vector<VectorXr>{ideal}, std::vector<VectorXr>{measured});
}

Real linear_xeb_fidelity(const std::vector<VectorXr>& ideal, const std::vector<VectorXr>& measured) {
  if (ideal.empty() || ideal.size() != measured.size())
    throw Error("invalid_argument", "xeb needs matching, non-empty ideal and measured sets");
  Real num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < ideal.size(); ++i) {
    if (ideal[i].size() != measured[i].size() || ideal[i].size() < 2)
      throw Error("invalid_argument", "probability vectors must share a dimension >= 2");
    const auto dim = static_cast<Real>(ideal[i].size());
    num += dim * ideal[i].dot(measured[i]) - 1.0;
    den += dim * ideal[i].squaredNorm() - 1.0;
  }
  if (std::abs(den) < 1e-6 * static_cast<Real>(ideal.size()))
    throw Error("degenerate", "ideal distribution is too close to uniform for xeb");
  return num / den;
}

DecayFit fit_decay(const std::vector<int>& depths, const std::vector<Real>& values, int dimension) {
  if (depths.size() != values.size()) throw Error("invalid_argument", "depths and values differ in length");
  DecayFit fit;
  // NaN marks an undefined point and is skipped; the first non-positive
  // value ends the usable prefix
  std::vector<std::size_t> use;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (std::isnan(values[i])) continue;
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      fit.truncated = true;
      break;
    }
    use.push_back(i);
  }
  const std::size_t n = use.size();
  if (n < 3) throw Error("too_few_depths", fmt::format("decay fit needs 3 positive points, have {}", n));
  fit.points_used = static_cast<int>(n);

  // log-linear start
  Eigen::MatrixX2d a(n, 2);
  VectorXr y(n), v(n), d(n);
  for (std::size_t k = 0; k < n; ++k) {
    d(k) = depths[use[k]];
    v(k) = values[use[k]];
    a(k, 0) = 1.0;
    a(k, 1) = d(k);
    y(k) = std::log(v(k));
  }
  const Eigen::Vector2d start = a.colPivHouseholderQr().solve(y);
  Real amp = std::exp(start(0)), alpha = std::exp(start(1));

  auto residual = [&](Real amp_, Real alpha_) {
    return VectorXr((amp_ * d.array().unaryExpr([&](Real x) { return std::pow(alpha_, x); }) - v.array()).matrix());
  };
  auto jacobian = [&](Real amp_, Real alpha_) {
    Eigen::MatrixX2d j(n, 2);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(n); ++i) {
      j(i, 0) = std::pow(alpha_, d(i));
      j(i, 1) = d(i) == 0.0 ? 0.0 : amp_ * d(i) * std::pow(alpha_, d(i) - 1.0);
    }
    return j;
  };
  Real sse = residual(amp, alpha).squaredNorm();
  for (int it = 0; it < 100; ++it) {
    const auto j = jacobian(amp, alpha);
    const Eigen::Vector2d step = (j.transpose() * j).ldlt().solve(-j.transpose() * residual(amp, alpha));
    Real scale = 1.0;
    bool improved = false;
    for (int h = 0; h < 30; ++h, scale *= 0.5) {
      const Real a2 = amp + scale * step(0), b2 = alpha + scale * step(1);
      const Real s2 = residual(a2, b2).squaredNorm();
      if (s2 <= sse) {
        improved = s2 < sse;
        amp = a2;
        alpha = b2;
        sse = s2;
        break;
      }
    }
    if (!improved || step.norm() < 1e-15) break;
  }
  const auto j = jacobian(amp, alpha);
  const Real s2 = n > 2 ? sse / static_cast<Real>(n - 2) : 0.0;
  const Eigen::Matrix2d cov = s2 * (j.transpose() * j).inverse();
  fit.amplitude = amp;
  fit.alpha = alpha;
  fit.amplitude_stderr = std::sqrt(std::max(0.0, cov(0, 0)));
  fit.alpha_stderr = std::sqrt(std::max(0.0, cov(1, 1)));
  const auto dim = static_cast<Real>(dimension);
  fit.pauli_error = (1.0 - alpha) * (dim * dim - 1.0) / (dim * dim);
  fit.average_error = (1.0 - alpha) * (dim - 1.0) / dim;
  return fit;
}

SpecklePurity speckle_purity(const std::vector<VectorXr>& measured, int shots) {
  if (measured.size() < 10)
    throw Error("too_few_circuits", fmt::format("speckle purity needs >= 10 circuits, have {}", measured.size()));
  const auto dim = static_cast<Real>(measured.front().size());
  if (dim < 2) throw Error("invalid_argument", "dimension must be at least 2");
  Real second = 0.0, first = 0.0;
  std::size_t count = 0;
  for (const auto& p : measured) {
    if (static_cast<Real>(p.size()) != dim) throw Error("invalid_argument", "circuits differ in dimension");
    for (Eigen::Index s = 0; s < p.size(); ++s) {
      const Real q = p(s);
      second += shots > 1 ? (shots * q * q - q) / (shots - 1.0) : q * q;
      first += q;
      ++count;
    }
  }
  const Real mean = first / count;
  const Real var = second / count - mean * mean;
  SpecklePurity out;
  out.purity = var * dim * dim * (dim + 1.0) / (dim - 1.0);
  out.purity_fidelity = out.purity >= 0.0 ? std::sqrt(out.purity) : std::numeric_limits<Real>::quiet_NaN();
  return out;
}

void XebOptions::validate() const {
  if (n_qubits != 1 && n_qubits != 2) throw Error("invalid_argument", "qubits must be 1 or 2");
  if (depths.size() < 3) throw Error("invalid_argument", "xeb needs at least 3 depths");
  for (std::size_t i = 0; i < depths.size(); ++i)
    if (depths[i] < 1 || (i > 0 && depths[i] <= depths[i - 1]))
      throw Error("invalid_argument", "depths must be positive and strictly increasing");
  if (circuits < 10) throw Error("invalid_argument", "xeb needs at least 10 circuits per depth");
  if (shots < 0 || shots == 1) throw Error("invalid_argument", "shots must be 0 (exact) or >= 2");
}

std::uint64_t circuit_seed(std::uint64_t seed, std::size_t slot, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(slot), static_cast<std::uint32_t>(index)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

XebRun cz_xeb_pipeline(const XebOptions& options, const NoiseSpec& noise,
                       const std::optional<Matrix4c>& two_qubit_gate, int workers) {
  options.validate();
  noise.validate(options.n_qubits);
  const int dim = dimension_of(options.n_qubits);
  const std::size_t per = static_cast<std::size_t>(options.circuits);
  const std::size_t total = options.depths.size() * per;

  std::vector<CircuitRecord> records(total);
  std::vector<Real> oracle(total);
  parallel_for(total, workers, [&](std::size_t i) {
    const std::size_t slot = i / per, index = i % per;
    CircuitRecord& r = records[i];
    r.depth = options.depths[slot];
    r.index = static_cast<int>(index);
    r.seed = circuit_seed(options.seed, slot, index);
    const auto circuit = generate_circuit(options.n_qubits, r.depth, r.seed, true);
    const auto probs = simulate_circuit(circuit, noise, options.mode, two_qubit_gate);
    r.ideal = probs.ideal;
    if (options.shots == 0) {
      r.measured = probs.noisy;
    } else {
      std::mt19937_64 rng(r.seed ^ 0x5bd1e995u);
      std::discrete_distribution<int> outcome(probs.noisy.data(), probs.noisy.data() + probs.noisy.size());
      r.measured = VectorXr::Zero(dim);
      for (int s = 0; s < options.shots; ++s) r.measured(outcome(rng)) += 1.0;
      r.measured /= options.shots;
    }
    const MatrixXc rho = circuit_density(circuit, noise, two_qubit_gate);
    oracle[i] = (dim * (rho * rho).trace().real() - 1.0) / (dim - 1.0);
  });

  XebRun run;
  run.options = options;
  run.noise = noise;
  std::vector<int> purity_depths;
  std::vector<Real> purity_values, oracle_values;
  for (std::size_t slot = 0; slot < options.depths.size(); ++slot) {
    std::vector<VectorXr> ideal, measured;
    Real oracle_sum = 0.0;
    for (std::size_t c = 0; c < per; ++c) {
      ideal.push_back(records[slot * per + c].ideal);
      measured.push_back(records[slot * per + c].measured);
      oracle_sum += oracle[slot * per + c];
    }
    XebDepth d;
    d.depth = options.depths[slot];
    // a single layer of pi/2 gates leaves every outcome equally likely
    try {
      d.xeb_fidelity = linear_xeb_fidelity(ideal, measured);
    } catch (const Error& e) {
      if (e.kind() != "degenerate") throw;
      d.xeb_fidelity = std::numeric_limits<Real>::quiet_NaN();
    }
    // shallow circuits are far from Porter-Thomas, so the measured speckle is
    // normalized by the speckle of the same ideal distributions
    const Real ideal_speckle = speckle_purity(ideal).purity;
    d.purity = ideal_speckle > 0.1 ? speckle_purity(measured, options.shots).purity / ideal_speckle
                                   : std::numeric_limits<Real>::quiet_NaN();
    d.oracle_purity = oracle_sum / static_cast<Real>(per);
    if (std::isfinite(d.purity)) {
      purity_depths.push_back(d.depth);
      purity_values.push_back(d.purity);
      oracle_values.push_back(d.oracle_purity);
    }
    run.per_depth.push_back(d);
  }
  std::vector<int> depths = options.depths;
  std::vector<Real> xeb;
  for (const auto& d : run.per_depth) xeb.push_back(d.xeb_fidelity);
  run.xeb_fit = fit_decay(depths, xeb, dim);
  run.purity_fit = fit_decay(purity_depths, purity_values, dim);
  run.oracle_purity_fit = fit_decay(purity_depths, oracle_values, dim);
  run.purity_fidelity = std::sqrt(std::max(0.0, run.purity_fit.alpha));
  run.control_error = run.purity_fidelity - run.xeb_fit.alpha;
  if (options.keep_probabilities) run.circuits = std::move(records);
  return run;
}

Matrix4c virtual_z_corrected(const Matrix4c& projected, const VirtualZAngles& angles) {
  return cz_matrix() * cz_target(angles).adjoint() * projected;
}

}  // namespace czsim
