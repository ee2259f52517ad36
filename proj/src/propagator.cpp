#include "czsim/propagator.hpp"

#include <cmath>
#include <map>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

namespace czsim {

void ControlSchedule::validate() const {
  if (coupler_trajectory.parameterization != Parameterization::CouplerFrequency)
    throw Error("invalid_schedule", "coupler trajectory must be parameterized as coupler frequency");
  if (!(coupler_trajectory.dt > 0.0)) throw Error("invalid_schedule", "dt must be positive");
  for (const auto* w : {&q1_offsets, &q2_offsets}) {
    if (!*w) continue;
    if ((*w)->size() != coupler_trajectory.size())
      throw Error("invalid_schedule", "qubit offset waveform sample count differs from coupler trajectory");
    if (std::abs((*w)->dt - coupler_trajectory.dt) > 1e-12 * coupler_trajectory.dt)
      throw Error("invalid_schedule", "qubit offset waveform dt differs from coupler trajectory");
  }
  if (sampling == ControlSampling::GaussPairs && coupler_trajectory.size() % 2 != 0)
    throw Error("invalid_schedule", "Gauss-pair sampling needs an even sample count");
}

ControlSchedule ControlSchedule::constant(const OperatingPoint& idle, Real dt, Eigen::Index steps) {
  ControlSchedule s;
  s.idle = idle;
  s.coupler_trajectory.dt = dt;
  s.coupler_trajectory.parameterization = Parameterization::CouplerFrequency;
  s.coupler_trajectory.samples = VectorXr::Constant(steps, idle.coupler_frequency);
  return s;
}

MatrixXc frame_rotation(const DressedBasis& basis, const HamiltonianTerms& terms, Real t) {
  const int n = terms.dimension;
  const auto w = basis.mode_frequencies();
  VectorXr eps = basis.eigenvalues;
  for (const auto& [label, j] : basis.labels)
    eps(j) = label.q1 * w[0] + label.c * w[1] + label.q2 * w[2];
  VectorXc phases(n);
  for (int j = 0; j < n; ++j) phases(j) = std::polar(1.0, -to_angular(eps(j)) * t);
  return basis.eigenvectors * phases.asDiagonal() * basis.eigenvectors.adjoint();
}

namespace {

// couplings are real, so every sector block is real symmetric
struct Sector {
  std::vector<int> index;
  MatrixXr static_block;
  std::array<VectorXr, 3> occupation;  // diagonal of each control part, rad/ns per GHz
};

std::vector<Sector> split_sectors(const HamiltonianTerms& terms, int max_excitations = -1) {
  std::vector<Sector> out;
  for (const auto& idx : terms.sectors) {
    if (idx.empty()) continue;
    if (max_excitations >= 0 && terms.label(idx.front()).excitations() > max_excitations) continue;
    Sector s;
    s.index = idx;
    const auto m = static_cast<Eigen::Index>(idx.size());
    s.static_block.resize(m, m);
    for (Eigen::Index a = 0; a < m; ++a)
      for (Eigen::Index b = 0; b < m; ++b) {
        const Complex v = terms.static_part(idx[a], idx[b]);
        if (v.imag() != 0.0) throw Error("invalid_hamiltonian", "static Hamiltonian must be real symmetric");
        s.static_block(a, b) = v.real();
      }
    for (int c = 0; c < 3; ++c) {
      s.occupation[c].resize(m);
      for (Eigen::Index a = 0; a < m; ++a) s.occupation[c](a) = terms.control_parts[c](idx[a], idx[a]).real();
    }
    out.push_back(std::move(s));
  }
  return out;
}

/// Drives the piecewise-constant integration. Visitor receives
/// (sector number, step exponential) for every step.
template <typename Visitor>
void integrate(const HamiltonianTerms& terms, const ControlSchedule& schedule,
               const PropagatorOptions& options, Visitor&& visit) {
  const auto sectors = split_sectors(terms, options.max_excitations);
  const Real dt = schedule.dt();
  const auto base = schedule.idle.offsets(terms);
  // symmetric pulses revisit every control value, so cache by offsets
  std::map<std::array<Real, 3>, std::vector<MatrixXc>> cache;
  Eigen::SelfAdjointEigenSolver<MatrixXr> es;
  Eigen::SelfAdjointEigenSolver<MatrixXr> es_frame;

  auto offsets_at = [&](Eigen::Index k) {
    return std::array<Real, 3>{
        schedule.q1_offsets ? schedule.q1_offsets->samples(k) : base[0],
        schedule.coupler_trajectory.samples(k) - terms.reference_frequencies[1],
        schedule.q2_offsets ? schedule.q2_offsets->samples(k) : base[2],
    };
  };
  // CFM4 weights: exp(-i h (a1 H1 + a2 H2)) exp(-i h (a2 H1 + a1 H2))
  constexpr Real a1 = 0.25 - 0.28867513459481288225, a2 = 0.25 + 0.28867513459481288225;
  const bool gauss = schedule.sampling == ControlSampling::GaussPairs;

  for (Eigen::Index k = 0; k < schedule.steps(); ++k) {
    std::array<Real, 3> off = offsets_at(k);
    if (gauss) {
      const Eigen::Index j = k - k % 2;
      const auto o1 = offsets_at(j), o2 = offsets_at(j + 1);
      const Real w1 = k % 2 == 0 ? 2 * a2 : 2 * a1;
      for (int c = 0; c < 3; ++c) off[c] = w1 * o1[c] + (1.0 - w1) * o2[c];
    }
    auto it = cache.find(off);
    if (it == cache.end()) {
      std::vector<MatrixXc> step(sectors.size());
      for (std::size_t s = 0; s < sectors.size(); ++s) {
        const Sector& sec = sectors[s];
        VectorXr diag = VectorXr::Zero(static_cast<Eigen::Index>(sec.index.size()));
        for (int c = 0; c < 3; ++c) diag += off[c] * sec.occupation[c];
        MatrixXr h = sec.static_block;
        h.diagonal() += diag;
        // step limit is judged in the frame rotating at the idle mode
        // frequencies; inside a sector only the spread matters
        VectorXr frame = VectorXr::Zero(h.rows());
        for (int c = 0; c < 3; ++c) frame += (terms.reference_frequencies[c] + base[c]) * sec.occupation[c];
        MatrixXr h_rot = h;
        h_rot.diagonal() -= frame;
        // Gershgorin bound first; the exact spread only when it is not enough
        const VectorXr d = h_rot.diagonal();
        const VectorXr radius = h_rot.cwiseAbs().rowwise().sum() - d.cwiseAbs();
        Real half_spread = 0.5 * ((d + radius).maxCoeff() - (d - radius).minCoeff());
        if (dt * half_spread > options.max_phase_per_step) {
          es_frame.compute(h_rot, Eigen::EigenvaluesOnly);
          const VectorXr& mu = es_frame.eigenvalues();
          half_spread = 0.5 * (mu.maxCoeff() - mu.minCoeff());
        }
        if (dt * half_spread > options.max_phase_per_step) {
          const Real suggest = 0.9 * options.max_phase_per_step / half_spread;
          throw Error("step_size",
                      fmt::format("step {}: dt * max|eigenvalue| = {:.3f} rad exceeds {:.3f}; use dt <= {:.4f} ns",
                                  k, dt * half_spread, options.max_phase_per_step, suggest));
        }
        es.compute(h);
        const VectorXr& lam = es.eigenvalues();
        VectorXc ph(lam.size());
        for (Eigen::Index a = 0; a < lam.size(); ++a) ph(a) = std::polar(1.0, -lam(a) * dt);
        const MatrixXc v = es.eigenvectors().cast<Complex>();
        step[s] = v * ph.asDiagonal() * v.transpose();
      }
      it = cache.emplace(off, std::move(step)).first;
    }
    for (std::size_t s = 0; s < sectors.size(); ++s) visit(s, sectors[s], it->second[s]);
  }
}

}  // namespace

PropagationResult propagate(const HamiltonianTerms& terms, const ControlSchedule& schedule,
                            const PropagatorOptions& options) {
  schedule.validate();
  PropagationResult result;
  result.basis = dressed_basis(terms, schedule.idle.offsets(terms));
  result.duration = schedule.total_length();
  const int n = terms.dimension;

  const auto sectors = split_sectors(terms, options.max_excitations);
  std::vector<MatrixXc> blocks;
  for (const auto& s : sectors) {
    const auto m = static_cast<Eigen::Index>(s.index.size());
    blocks.push_back(MatrixXc::Identity(m, m));
  }
  integrate(terms, schedule, options, [&](std::size_t s, const Sector&, const MatrixXc& e) {
    blocks[s] = e * blocks[s];
  });

  // skipped sectors stay identity
  MatrixXc u = MatrixXc::Identity(n, n);
  for (std::size_t s = 0; s < sectors.size(); ++s) {
    const auto& idx = sectors[s].index;
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b < idx.size(); ++b) u(idx[a], idx[b]) = blocks[s](a, b);
  }
  if (options.rotating_frame && schedule.steps() > 0)
    u = frame_rotation(result.basis, terms, result.duration).adjoint() * u;
  result.propagator = std::move(u);
  result.unitarity_defect = unitarity_defect(result.propagator);
  return result;
}

VectorXc propagate_state(const HamiltonianTerms& terms, const ControlSchedule& schedule,
                         const VectorXc& initial, const PropagatorOptions& options) {
  schedule.validate();
  if (initial.size() != terms.dimension)
    throw Error("invalid_argument", "initial state dimension mismatch");
  VectorXc psi = initial;
  integrate(terms, schedule, options, [&](std::size_t, const Sector& sec, const MatrixXc& e) {
    const auto m = static_cast<Eigen::Index>(sec.index.size());
    VectorXc local(m);
    for (Eigen::Index a = 0; a < m; ++a) local(a) = psi(sec.index[a]);
    local = e * local;
    for (Eigen::Index a = 0; a < m; ++a) psi(sec.index[a]) = local(a);
  });
  if (options.rotating_frame && schedule.steps() > 0) {
    const auto basis = dressed_basis(terms, schedule.idle.offsets(terms));
    psi = frame_rotation(basis, terms, schedule.total_length()).adjoint() * psi;
  }
  return psi;
}

}  // namespace czsim
