#include "czsim/device.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <set>

#include <Eigen/Eigenvalues>

#include "czsim/roots.hpp"

namespace czsim {

std::string to_string(ModeLabel label) {
  switch (label) {
    case ModeLabel::Q1:
      return "Q1";
    case ModeLabel::Coupler:
      return "C";
    case ModeLabel::Q2:
      return "Q2";
  }
  return "?";
}

std::string BareLabel::str() const { return fmt::format("|{},{},{}>", q1, c, q2); }

void DeviceSpec::validate() const {
  std::set<ModeLabel> seen;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const ModeSpec& m = modes[i];
    if (static_cast<std::size_t>(m.label) != i)
      throw Error("invalid_device", "modes must be ordered (Q1, C, Q2)");
    if (!seen.insert(m.label).second)
      throw Error("invalid_device", "duplicate mode label " + to_string(m.label));
    if (m.levels < 3)
      throw Error("invalid_device",
                  fmt::format("mode {} needs at least 3 levels, got {}", to_string(m.label), m.levels));
    if (!(m.frequency > 0.0) || !std::isfinite(m.frequency))
      throw Error("invalid_device", fmt::format("mode {} frequency must be positive", to_string(m.label)));
    if (!std::isfinite(m.anharmonicity))
      throw Error("invalid_device", fmt::format("mode {} anharmonicity not finite", to_string(m.label)));
  }
  for (Real g : {couplings.g_1c, couplings.g_2c, couplings.g_12})
    if (!std::isfinite(g)) throw Error("invalid_device", "coupling strengths must be finite");
  for (const auto& fm : flux_models) {
    if (fm && !(fm->max_frequency > 0.0))
      throw Error("invalid_device", "flux model max_frequency must be positive");
  }
  if (!(resonance_guard > 0.0)) throw Error("invalid_device", "resonance_guard must be positive");
}

DeviceSpec DeviceSpec::default_device() {
  DeviceSpec d;
  d.modes[0] = {ModeLabel::Q1, 5.077, -0.235, 3};
  d.modes[1] = {ModeLabel::Coupler, 7.0, -0.100, 3};
  d.modes[2] = {ModeLabel::Q2, 4.889, -0.235, 3};
  d.couplings = {0.090, 0.090, 0.006};
  d.flux_models[0] = FluxModel{5.299, -0.235};
  d.flux_models[1] = FluxModel{7.0, -0.100};
  d.flux_models[2] = FluxModel{5.211, -0.235};
  d.metadata[0] = {6.403, 20.56, 2.52, 1.05, 0.993, 0.966};
  d.metadata[1] = {6.477, 26.32, 2.16, 0.85, 0.996, 0.974};
  d.coupler_max_frequency = 7.0;
  return d;
}

DeviceSpec DeviceSpec::with_levels(int levels) const {
  DeviceSpec d = *this;
  for (auto& m : d.modes) m.levels = levels;
  return d;
}

BareLabel HamiltonianTerms::label(int index) const {
  BareLabel l;
  l.q2 = index % levels[2];
  index /= levels[2];
  l.c = index % levels[1];
  l.q1 = index / levels[1];
  return l;
}

MatrixXc HamiltonianTerms::assemble(const std::array<Real, 3>& offsets_ghz) const {
  MatrixXc h = static_part;
  for (int m = 0; m < 3; ++m)
    if (offsets_ghz[m] != 0.0) h += offsets_ghz[m] * control_parts[m];
  return h;
}

HamiltonianTerms build_hamiltonian(const DeviceSpec& spec, const HamiltonianOptions& options) {
  spec.validate();
  HamiltonianTerms t;
  long dim = 1;
  for (int m = 0; m < 3; ++m) {
    t.levels[m] = spec.modes[m].levels;
    t.reference_frequencies[m] = spec.modes[m].frequency;
    dim *= t.levels[m];
  }
  if (dim > options.max_dimension)
    throw Error("dimension_overflow",
                fmt::format("Hilbert space dimension {} exceeds cap {}", dim, options.max_dimension));
  t.dimension = static_cast<int>(dim);
  const int n = t.dimension;

  t.static_part = MatrixXc::Zero(n, n);
  for (auto& c : t.control_parts) c = MatrixXc::Zero(n, n);

  // (mode i, mode j, g_ij)
  const std::array<std::tuple<int, int, Real>, 3> pairs{{{0, 1, spec.couplings.g_1c},
                                                         {2, 1, spec.couplings.g_2c},
                                                         {0, 2, spec.couplings.g_12}}};
  for (int k = 0; k < n; ++k) {
    const BareLabel l = t.label(k);
    const std::array<int, 3> occ{l.q1, l.c, l.q2};
    Real diag = 0.0;
    for (int m = 0; m < 3; ++m) {
      const Real w = spec.modes[m].frequency;
      const Real eta = spec.modes[m].anharmonicity;
      diag += w * occ[m] + 0.5 * eta * occ[m] * (occ[m] - 1);
      t.control_parts[m](k, k) = to_angular(static_cast<Real>(occ[m]));
    }
    t.static_part(k, k) = to_angular(diag);
    // b_i^dagger b_j |occ>, hermitian partner filled symmetrically
    for (const auto& [i, j, g] : pairs) {
      if (g == 0.0 || occ[j] == 0 || occ[i] + 1 >= t.levels[i]) continue;
      std::array<int, 3> to = occ;
      to[i] += 1;
      to[j] -= 1;
      const int kk = t.index({to[0], to[1], to[2]});
      const Real amp = to_angular(g) * std::sqrt(static_cast<Real>(occ[i] + 1) * occ[j]);
      t.static_part(kk, k) += amp;
      t.static_part(k, kk) += amp;
    }
  }

  int max_n = 0;
  for (int m = 0; m < 3; ++m) max_n += t.levels[m] - 1;
  t.sectors.assign(max_n + 1, {});
  for (int k = 0; k < n; ++k) t.sectors[t.label(k).excitations()].push_back(k);
  return t;
}

VectorXc DressedBasis::state(const BareLabel& l) const {
  auto it = labels.find(l);
  if (it == labels.end()) throw Error("missing_label", "no dressed state labelled " + l.str());
  return eigenvectors.col(it->second);
}

Real DressedBasis::energy(const BareLabel& l) const {
  auto it = energies.find(l);
  if (it == energies.end()) throw Error("missing_label", "no dressed state labelled " + l.str());
  return it->second;
}

std::array<Real, 3> DressedBasis::mode_frequencies() const {
  const Real e0 = energy({0, 0, 0});
  return {energy({1, 0, 0}) - e0, energy({0, 1, 0}) - e0, energy({0, 0, 1}) - e0};
}

std::vector<BareLabel> default_required_labels() {
  return {{0, 0, 0}, {0, 0, 1}, {1, 0, 0}, {1, 0, 1}, {0, 1, 0}, {2, 0, 0}};
}

DressedBasis dressed_basis(const HamiltonianTerms& terms, const std::array<Real, 3>& offsets_ghz,
                           const std::vector<BareLabel>& required) {
  const MatrixXc h = terms.assemble(offsets_ghz);
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(h);
  if (es.info() != Eigen::Success) throw Error("eigensolver", "Hamiltonian diagonalization failed");

  DressedBasis basis;
  basis.offsets = offsets_ghz;
  basis.eigenvalues = es.eigenvalues() / kTwoPi;
  basis.eigenvectors = es.eigenvectors();
  const int n = terms.dimension;

  std::set<BareLabel> needed(required.begin(), required.end());
  for (int k = 0; k < n; ++k) {
    int best = 0;
    Real best_overlap = -1.0;
    for (int j = 0; j < n; ++j) {
      const Real o = std::norm(basis.eigenvectors(k, j));
      if (o > best_overlap) {
        best_overlap = o;
        best = j;
      }
    }
    const BareLabel l = terms.label(k);
    if (best_overlap <= 0.5) {
      if (needed.count(l))
        throw Error("ambiguous_label",
                    fmt::format("dressed assignment for {} is ambiguous (max overlap {:.4f})", l.str(),
                                best_overlap));
      continue;
    }
    // overlap > 0.5 cannot be claimed by two labels, so this stays a bijection
    basis.labels[l] = best;
    basis.energies[l] = basis.eigenvalues(best);
    const Complex c = basis.eigenvectors(k, best);
    basis.eigenvectors.col(best) *= std::conj(c) / std::abs(c);
  }
  for (const auto& l : required)
    if (!basis.has(l))
      throw Error("missing_label", "required label " + l.str() + " is outside the truncation");
  return basis;
}

namespace {

Eigen::Matrix3d single_excitation_block(const DeviceSpec& spec, Real w1, Real wc, Real w2) {
  const auto& g = spec.couplings;
  Eigen::Matrix3d m;
  m << w1, g.g_1c, g.g_12,  //
      g.g_1c, wc, g.g_2c,   //
      g.g_12, g.g_2c, w2;
  return m;
}

void check_resonance_guard(const DeviceSpec& spec, Real coupler_frequency) {
  for (ModeLabel q : {ModeLabel::Q1, ModeLabel::Q2}) {
    const Real detuning = spec.mode(q).frequency - coupler_frequency;
    if (std::abs(detuning) < spec.resonance_guard)
      throw Error("coupler_resonance",
                  fmt::format("coupler at {:.6f} GHz is within {:.4f} GHz of {}", coupler_frequency,
                              spec.resonance_guard, to_string(q)));
  }
}

}  // namespace

Real effective_coupling_estimate(const DeviceSpec& spec, Real coupler_frequency) {
  const auto& g = spec.couplings;
  const Real d1 = spec.q1().frequency - coupler_frequency;
  const Real d2 = spec.q2().frequency - coupler_frequency;
  return g.g_12 + 0.5 * g.g_1c * g.g_2c * (1.0 / d1 + 1.0 / d2);
}

Real effective_coupling(const DeviceSpec& spec, Real coupler_frequency) {
  check_resonance_guard(spec, coupler_frequency);
  const auto& g = spec.couplings;
  if (g.g_1c == 0.0 && g.g_2c == 0.0) return g.g_12;

  const Real center = 0.5 * (spec.q1().frequency + spec.q2().frequency);
  // signed half splitting: for [[w, g], [g, w]] the lower eigenvector is
  // antisymmetric when g > 0, so the Q1/Q2 amplitude product carries the sign
  auto qubit_pair = [&](Real delta) {
    const Eigen::Matrix3d m =
        single_excitation_block(spec, center + 0.5 * delta, coupler_frequency, center - 0.5 * delta);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
    const auto& v = es.eigenvectors();
    // the qubit-like pair carries the least coupler weight
    int coupler_like = 0;
    for (int j = 1; j < 3; ++j)
      if (std::norm(v(1, j)) > std::norm(v(1, coupler_like))) coupler_like = j;
    std::array<int, 2> idx{};
    int k = 0;
    for (int j = 0; j < 3; ++j)
      if (j != coupler_like) idx[k++] = j;
    const Real half = 0.5 * std::abs(es.eigenvalues()(idx[1]) - es.eigenvalues()(idx[0]));
    const Real lower = v(0, idx[0]) * v(2, idx[0]);
    return std::pair<Real, Real>{half, lower};
  };
  const Real span = 4.0 * (std::abs(g.g_1c) + std::abs(g.g_2c) + std::abs(g.g_12)) +
                    std::abs(g.g_1c * g.g_1c - g.g_2c * g.g_2c) /
                        std::max(std::abs(center - coupler_frequency), 1e-3);
  const auto [delta, value] =
      brent_minimize([&](Real d) { return qubit_pair(d).first; }, -span, span, 1e-13);
  return qubit_pair(delta).second > 0.0 ? -value : value;
}

Real zero_coupling_point(const DeviceSpec& spec) {
  Real lo = std::max(spec.q1().frequency, spec.q2().frequency) + spec.resonance_guard + 1e-6;
  Real hi = spec.coupler_max_frequency;
  if (!(hi > lo)) throw Error("no_root", "coupler search window is empty");
  Real g_lo = effective_coupling(spec, lo);
  const Real g_hi = effective_coupling(spec, hi);
  if ((g_lo > 0) == (g_hi > 0) || g_lo == 0.0 || g_hi == 0.0) {
    if (g_lo == 0.0) return lo;
    if (g_hi == 0.0) return hi;
    throw Error("no_root", fmt::format("effective coupling does not change sign on [{:.4f}, {:.4f}] GHz",
                                       lo, hi));
  }
  for (int it = 0; it < 200; ++it) {
    const Real mid = 0.5 * (lo + hi);
    const Real g_mid = effective_coupling(spec, mid);
    if (std::abs(g_mid) < 1e-10 || hi - lo < 1e-13) return mid;
    if ((g_mid > 0) == (g_lo > 0)) {
      lo = mid;
      g_lo = g_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Real flux_to_frequency(const FluxModel& model, Real flux) {
  if (!(std::abs(flux) < 0.5))
    throw Error("invalid_argument", fmt::format("flux {} outside (-0.5, 0.5) flux quanta", flux));
  const Real c = std::abs(std::cos(kPi * flux));
  return (model.max_frequency - model.anharmonicity) * std::sqrt(c) + model.anharmonicity;
}

std::array<Real, 2> dressed_qubit_frequencies(const DeviceSpec& spec, Real coupler_frequency,
                                              Real q1_offset, Real q2_offset) {
  const Eigen::Matrix3d m = single_excitation_block(spec, spec.q1().frequency + q1_offset,
                                                    coupler_frequency, spec.q2().frequency + q2_offset);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
  const auto& v = es.eigenvectors();
  std::array<Real, 2> out{};
  for (int q = 0; q < 2; ++q) {
    const int row = q == 0 ? 0 : 2;
    int best = 0;
    for (int j = 1; j < 3; ++j)
      if (std::abs(v(row, j)) > std::abs(v(row, best))) best = j;
    out[q] = es.eigenvalues()(best);
  }
  return out;
}

}  // namespace czsim
