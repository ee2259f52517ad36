#include <doctest.h>

#include <random>

#include <Eigen/QR>

#include "czsim/gate_metrics.hpp"
#include "czsim/nelder_mead.hpp"
#include "helpers.hpp"

using namespace czsim;
using czsim::testing::default_model;

namespace {

MatrixXc random_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<Real> g;
  MatrixXc a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  Eigen::HouseholderQR<MatrixXc> qr(a);
  return qr.householderQ();
}

Matrix4c z_gauge(Real a, Real b) {
  Vector4c d;
  d << 1.0, std::polar(1.0, b), std::polar(1.0, a), std::polar(1.0, a + b);
  return d.asDiagonal();
}

Real angle_gap(const VirtualZAngles& x, const VirtualZAngles& y) {
  const auto a = x.canonical(), b = y.canonical();
  return std::max(std::abs(wrap_angle(a.delta_plus - b.delta_plus)), std::abs(wrap_angle(a.delta_minus - b.delta_minus)));
}

Matrix4c cz() { return cz_target({0.0, 0.0}); }

PropagationResult idle_result() {
  const auto& model = default_model();
  PropagationResult r;
  r.basis = dressed_basis(model.terms(), model.idle(0.0).offsets(model.terms()));
  r.propagator = MatrixXc::Identity(27, 27);
  return r;
}

}  // namespace

TEST_SUITE("gate_metrics") {

TEST_CASE("CZ target") {
  Vector4c canonical;
  canonical << 1.0, 1.0, 1.0, -1.0;
  CHECK((cz() - Matrix4c(canonical.asDiagonal())).cwiseAbs().maxCoeff() < 1e-15);
  Vector4c half;
  half << 1.0, Complex(0, 1), Complex(0, 1), 1.0;
  CHECK((cz_target({kPi / 2, 0.0}) - Matrix4c(half.asDiagonal())).cwiseAbs().maxCoeff() < 1e-15);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<Real> u(-kPi, kPi);
  for (int i = 0; i < 20; ++i) {
    const Matrix4c t = cz_target({u(rng), u(rng)});
    const Real phi = std::arg(t(0, 0)) - std::arg(t(1, 1)) - std::arg(t(2, 2)) + std::arg(t(3, 3));
    CHECK(std::abs(std::remainder(phi + kPi, kTwoPi)) < 1e-12);
    CHECK(conditional_phase(t) == doctest::Approx(kPi).epsilon(1e-12));
  }
}

TEST_CASE("average gate fidelity") {
  CHECK(average_gate_fidelity(cz(), cz()) == doctest::Approx(1.0));
  CHECK(average_gate_fidelity(Matrix4c::Identity(), cz()) == doctest::Approx(0.4));
  // a map that loses the whole subspace scores 0 under this formula
  CHECK(average_gate_fidelity(Matrix4c::Zero(), cz()) == 0.0);
  // and a map that keeps it but scrambles phases scores at least 0.2
  const Matrix4c swap_like = (Matrix4c() << 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0).finished();
  CHECK(average_gate_fidelity(swap_like, cz()) == doctest::Approx(0.2));
}

TEST_CASE("average gate fidelity is unitarily invariant") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 10; ++i) {
    const Matrix4c m = 0.9 * random_unitary(4, rng);
    const Matrix4c t = random_unitary(4, rng);
    const Matrix4c v = random_unitary(4, rng), w = random_unitary(4, rng);
    CHECK(average_gate_fidelity(m, t) == doctest::Approx(average_gate_fidelity(v * m * w, v * t * w)).epsilon(1e-12));
  }
}

TEST_CASE("projection") {
  SUBCASE("identity") {
    CHECK((project_computational(idle_result()) - Matrix4c::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(leakage_from_11(idle_result()).total < 1e-12);
  }
  SUBCASE("projection contracts") {
    std::mt19937_64 rng(9);
    auto r = idle_result();
    for (int i = 0; i < 5; ++i) {
      r.propagator = random_unitary(27, rng);
      const Matrix4c m = project_computational(r);
      CHECK((m.adjoint() * m).trace().real() <= 4.0 + 1e-12);
    }
  }
  SUBCASE("leakage-free U projects to a unitary") {
    auto r = idle_result();
    std::mt19937_64 rng(13);
    std::normal_distribution<Real> g;
    Matrix4c h;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) h(i, j) = Complex(g(rng), g(rng));
    h = (h + h.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix4c> es(h);
    Vector4c ph;
    for (int i = 0; i < 4; ++i) ph(i) = std::polar(1.0, -es.eigenvalues()(i));
    const Matrix4c u4 = es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
    Eigen::Matrix<Complex, Eigen::Dynamic, 4> v(27, 4);
    for (int i = 0; i < 4; ++i) v.col(i) = r.basis.state(computational_labels()[i]);
    r.propagator = MatrixXc::Identity(27, 27) + v * (u4 - Matrix4c::Identity()) * v.adjoint();
    const Matrix4c m = project_computational(r);
    CHECK(unitarity_defect(m) < 1e-9);
    CHECK((m - u4).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("virtual-Z fit recovers the gauge") {
  const auto fit = fit_virtual_z(cz_target({0.3, -0.7}));
  CHECK(fit.fidelity > 1.0 - 1e-6);
  CHECK(angle_gap(fit.angles, {0.3, -0.7}) < 1e-6);
  const auto canonical = fit_virtual_z(cz());
  CHECK(canonical.fidelity > 1.0 - 1e-9);
  CHECK(angle_gap(canonical.angles, {0.0, 0.0}) < 1e-6);
}

TEST_CASE("fitted fidelity is gauge invariant") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<Real> u(-kPi, kPi);
  // a slightly non-unitary, non-diagonal map
  Matrix4c m = phase_gate_target({0.4, 1.1}, -kPi + 0.3);
  m(1, 2) = 0.05;
  m(2, 1) = -0.05;
  m(3, 3) *= 0.97;
  const Real f0 = fit_virtual_z(m, -kPi + 0.3).fidelity;
  CHECK(f0 < 1.0);
  const Real phi0 = conditional_phase(m);
  for (int i = 0; i < 20; ++i) {
    const Matrix4c g = z_gauge(u(rng), u(rng)) * m * z_gauge(u(rng), u(rng));
    CHECK(fit_virtual_z(g, -kPi + 0.3).fidelity == doctest::Approx(f0).epsilon(1e-9));
    CHECK(conditional_phase(g) == doctest::Approx(phi0).epsilon(1e-12));
  }
}

TEST_CASE("conditional phase") {
  CHECK(conditional_phase(cz()) == doctest::Approx(kPi));
  CHECK(conditional_phase(Matrix4c::Identity()) == 0.0);
  Matrix4c bad = Matrix4c::Identity();
  bad(2, 2) = 0.05;
  try {
    conditional_phase(bad);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == "not_phase_like");
  }
}

TEST_CASE("leakage channels and the trace-loss bound") {
  PulseShapeSpec p;
  p.family = PulseFamily::Square;
  p.length = 20.0;
  p.peak_value = -0.025;
  const auto r = default_model().propagate(p, GateOptions{});
  const auto leak = leakage_from_11(r);
  REQUIRE(leak.per_level.size() == 3);
  Real sum = 0.0;
  for (const auto& [k, v] : leak.per_level) sum += v;
  CHECK(sum <= leak.total + 1e-12);
  CHECK(leak.total > 1e-3);
  const auto rep = evaluate_gate(r);
  CHECK(rep.leakage_from_11 >= 0.0);
  CHECK(rep.leakage_from_11 <= 1.0);
  CHECK(1.0 - rep.fidelity >= rep.subspace_trace_loss / 5.0);
}

TEST_CASE("calibrated 45 ns slepian") {
  const auto& cal = czsim::testing::calibrated_slepian45();
  CHECK(cal.report.fidelity >= 0.999);
  CHECK(cal.report.leakage_from_11 < 1e-4);
  CHECK(cal.report.unitarity_defect < 1e-9);
  CHECK(1.0 - cal.report.fidelity >= cal.report.subspace_trace_loss / 5.0);
}

TEST_CASE("Nelder-Mead") {
  using Vec = Eigen::VectorXd;
  SUBCASE("quadratic from several simplices") {
    auto f = [](const Vec& x) { return (x(0) - 1) * (x(0) - 1) + (x(1) + 2) * (x(1) + 2); };
    for (auto start : {std::array<Real, 2>{0, 0}, {10, -7}, {-3, 4}}) {
      Vec x0(2), s(2);
      x0 << start[0], start[1];
      s << 0.5, -0.3;
      const auto r = nelder_mead_minimize(f, axis_simplex(x0, s));
      CHECK(std::abs(r.point(0) - 1.0) < 1e-6);
      CHECK(std::abs(r.point(1) + 2.0) < 1e-6);
      CHECK_FALSE(r.hit_iteration_cap);
    }
  }
  SUBCASE("Rosenbrock") {
    auto f = [](const Vec& x) { return (1 - x(0)) * (1 - x(0)) + 100 * std::pow(x(1) - x(0) * x(0), 2); };
    Vec x0(2), s(2);
    x0 << -1.2, 1.0;
    s << 0.1, 0.1;
    const auto r = nelder_mead_minimize(f, axis_simplex(x0, s));
    CHECK(std::abs(r.point(0) - 1.0) < 1e-4);
    CHECK(std::abs(r.point(1) - 1.0) < 1e-4);
  }
  SUBCASE("non-smooth |x|") {
    auto f = [](const Vec& x) { return std::abs(x(0)); };
    Vec x0(1), s(1);
    x0 << 3.7;
    s << 1.0;
    const auto r = nelder_mead_minimize(f, axis_simplex(x0, s));
    CHECK(std::abs(r.point(0)) < 1e-6);
  }
  SUBCASE("iteration cap returns the best vertex with a flag") {
    auto f = [](const Vec& x) { return x.squaredNorm(); };
    Vec x0 = Vec::Constant(3, 5.0), s = Vec::Constant(3, 1.0);
    NelderMeadOptions<Real> o;
    o.max_iterations = 4;
    const auto r = nelder_mead_minimize(f, axis_simplex(x0, s), o);
    CHECK(r.hit_iteration_cap);
    CHECK(r.value < 75.0);
  }
  SUBCASE("malformed simplex") {
    auto f = [](const Vec& x) { return x.squaredNorm(); };
    CHECK_THROWS_AS(nelder_mead_minimize(f, Eigen::MatrixXd(Eigen::MatrixXd::Zero(2, 2))), Error);
  }
}

}  // TEST_SUITE
