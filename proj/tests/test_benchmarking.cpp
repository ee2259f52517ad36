#include <doctest.h>

#include <map>

#include "czsim/benchmarking.hpp"

using namespace czsim;

namespace {

VectorXr uniform(int d) { return VectorXr::Constant(d, 1.0 / d); }

}  // namespace

TEST_SUITE("benchmarking") {

TEST_CASE("circuits are seeded and never repeat a label on a qubit") {
  const auto a = generate_circuit(2, 30, 77);
  const auto b = generate_circuit(2, 30, 77);
  const auto c = generate_circuit(2, 30, 78);
  REQUIRE(a.layers.size() == 30);
  CHECK(a.depth == 30);
  CHECK(a.layers == b.layers);
  CHECK(a.layers != c.layers);
  for (std::size_t d = 1; d < a.layers.size(); ++d)
    for (int q = 0; q < 2; ++q) CHECK(a.layers[d][q] != a.layers[d - 1][q]);
  CHECK_FALSE(generate_circuit(1, 5, 1).include_cz);
}

TEST_CASE("label draws are uniform over the three allowed") {
  std::map<std::pair<int, int>, int> counts;
  const int n = 10000;
  for (int s = 0; s < n; ++s) {
    const auto c = generate_circuit(1, 2, 1000 + s);
    ++counts[{static_cast<int>(c.layers[0][0]), static_cast<int>(c.layers[1][0])}];
  }
  // 12 equally likely transitions
  const Real expected = n / 12.0, sd = std::sqrt(n * (1.0 / 12) * (11.0 / 12));
  CHECK(counts.size() == 12);
  for (const auto& [k, v] : counts) {
    CHECK(k.first != k.second);
    CHECK(std::abs(v - expected) < 5 * sd);
  }
}

TEST_CASE("pi/2 gates") {
  const auto x = pi_half_matrix(PiHalf::X);
  CHECK(((x * x) - (Eigen::Matrix2cd() << 0, Complex(0, -1), Complex(0, -1), 0).finished()).cwiseAbs().maxCoeff() <
        1e-15);
  for (auto g : {PiHalf::X, PiHalf::Y, PiHalf::W, PiHalf::V}) {
    const auto m = pi_half_matrix(g);
    CHECK((m.adjoint() * m - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("noise extremes") {
  const auto c = generate_circuit(2, 8, 5);
  NoiseSpec none;
  const auto clean = simulate_circuit(c, none);
  CHECK((clean.noisy - clean.ideal).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(clean.ideal.sum() == doctest::Approx(1.0).epsilon(1e-14));

  NoiseSpec full;
  full.depolarizing_per_cycle = 1.0;
  CHECK((simulate_circuit(c, full).noisy - uniform(4)).cwiseAbs().maxCoeff() < 1e-14);

  // uniform input stays a product of the confusion column sums
  full.readout = {{0.993, 0.966}, {0.996, 0.974}};
  const auto confused = simulate_circuit(c, full).noisy;
  const Real q1 = 0.5 * (0.993 + 1 - 0.966), q2 = 0.5 * (0.996 + 1 - 0.974);
  CHECK(confused(0) == doctest::Approx(q1 * q2).epsilon(1e-12));
  CHECK(confused(3) == doctest::Approx((1 - q1) * (1 - q2)).epsilon(1e-12));

  NoiseSpec bad;
  bad.depolarizing_per_cycle = 1.5;
  CHECK_THROWS_AS(bad.validate(2), Error);
  bad.depolarizing_per_cycle = 0.0;
  bad.readout = {{0.9, 0.9}};
  CHECK_THROWS_AS(bad.validate(2), Error);
}

TEST_CASE("confusion matrix") {
  const auto m = confusion_matrix(0.993, 0.966);
  CHECK(m(0, 0) == 0.993);
  CHECK(m(1, 1) == 0.966);
  CHECK(m(0, 1) == doctest::Approx(0.034));
  CHECK(m.colwise().sum().isApprox(Eigen::RowVector2d::Ones()));
}

TEST_CASE("statevector and density modes agree") {
  NoiseSpec n;
  n.depolarizing_per_cycle = 0.02;
  n.readout = {{0.993, 0.966}, {0.996, 0.974}};
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto c = generate_circuit(2, 12, s);
    const auto a = simulate_circuit(c, n, SimulationMode::Density);
    const auto b = simulate_circuit(c, n, SimulationMode::Statevector);
    CHECK((a.noisy - b.noisy).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("linear XEB") {
  const auto c = generate_circuit(2, 10, 3);
  const VectorXr ideal = simulate_circuit(c, NoiseSpec{}).ideal;
  CHECK(linear_xeb_fidelity(ideal, ideal) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(linear_xeb_fidelity(ideal, uniform(4))) < 1e-12);
  try {
    linear_xeb_fidelity(uniform(4), ideal);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == "degenerate");
  }
}

TEST_CASE("decay fits") {
  const std::vector<int> depths{1, 3, 5, 8, 12, 17, 23, 30};
  std::vector<Real> v;
  for (int d : depths) v.push_back(0.8 * std::pow(0.99, d));
  const auto f = fit_decay(depths, v, 4);
  CHECK(f.alpha == doctest::Approx(0.99).epsilon(1e-10));
  CHECK(f.amplitude == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(f.alpha_stderr < 1e-9);
  CHECK(f.pauli_error == doctest::Approx(0.01 * 15 / 16).epsilon(1e-8));
  CHECK(f.average_error == doctest::Approx(0.01 * 3 / 4).epsilon(1e-8));
  CHECK(f.points_used == 8);

  const auto flat = fit_decay(depths, std::vector<Real>(8, 1.0), 4);
  CHECK(flat.alpha == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<Real> cut = v;
  cut[5] = -0.01;
  const auto t = fit_decay(depths, cut, 4);
  CHECK(t.truncated);
  CHECK(t.points_used == 5);

  std::vector<Real> nan_first = v;
  nan_first[0] = std::numeric_limits<Real>::quiet_NaN();
  CHECK(fit_decay(depths, nan_first, 4).points_used == 7);

  try {
    fit_decay({1, 2}, {0.9, 0.8}, 4);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == "too_few_depths");
  }
}

TEST_CASE("speckle purity") {
  std::vector<VectorXr> mixed(20, uniform(4));
  CHECK(std::abs(speckle_purity(mixed).purity) < 1e-14);

  std::vector<VectorXr> pure;
  for (std::uint64_t s = 0; s < 400; ++s) pure.push_back(simulate_circuit(generate_circuit(2, 20, s), NoiseSpec{}).ideal);
  CHECK(std::abs(speckle_purity(pure).purity - 1.0) < 0.05);

  try {
    speckle_purity(std::vector<VectorXr>(5, uniform(4)));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == "too_few_circuits");
  }
}

TEST_CASE("XEB pipeline") {
  XebOptions o;
  o.circuits = 20;
  o.shots = 0;
  o.seed = 9;

  SUBCASE("noiseless exact run decays at 1") {
    const auto r = cz_xeb_pipeline(o, NoiseSpec{});
    CHECK(std::isnan(r.per_depth[0].xeb_fidelity));
    CHECK(r.xeb_fit.alpha == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.purity_fit.alpha == doctest::Approx(1.0).epsilon(1e-9));
  }

  SUBCASE("depolarizing: purity follows the density-matrix oracle") {
    NoiseSpec n;
    n.depolarizing_per_cycle = 0.01;
    const auto r = cz_xeb_pipeline(o, n);
    // exact probabilities: XEB per depth is the depolarizing survival
    CHECK(r.xeb_fit.alpha == doctest::Approx(0.99).epsilon(1e-9));
    for (const auto& d : r.per_depth)
      if (!std::isnan(d.purity)) CHECK(std::abs(d.purity - d.oracle_purity) < 1e-9);
    CHECK(std::abs(r.purity_fit.alpha - r.oracle_purity_fit.alpha) < 1e-9);
    CHECK(r.purity_fidelity >= r.xeb_fit.alpha - 1e-9);
  }

  SUBCASE("readout confusion lowers the amplitude, not the decay") {
    NoiseSpec n;
    n.depolarizing_per_cycle = 0.005;
    n.readout = {{0.993, 0.966}, {0.996, 0.974}};
    NoiseSpec m = n;
    m.readout.clear();
    const auto a = cz_xeb_pipeline(o, n);
    const auto b = cz_xeb_pipeline(o, m);
    CHECK(std::abs(a.xeb_fit.alpha - b.xeb_fit.alpha) < 2e-3);
    CHECK(a.xeb_fit.amplitude < b.xeb_fit.amplitude - 0.02);
  }

  SUBCASE("deterministic in the seed and worker count") {
    NoiseSpec n;
    n.depolarizing_per_cycle = 0.0035;
    XebOptions s = o;
    s.shots = 1000;
    const auto a = cz_xeb_pipeline(s, n, std::nullopt, 1);
    const auto b = cz_xeb_pipeline(s, n, std::nullopt, 3);
    CHECK(a.xeb_fit.alpha == b.xeb_fit.alpha);
    CHECK(a.purity_fit.alpha == b.purity_fit.alpha);
    s.seed = 10;
    CHECK(cz_xeb_pipeline(s, n).xeb_fit.alpha != a.xeb_fit.alpha);
  }

  SUBCASE("a coherent phase error keeps purity and costs fidelity") {
    Matrix4c gate = cz_matrix();
    gate(3, 3) = -std::polar(1.0, 0.15);
    XebOptions many = o;
    many.circuits = 100;
    const auto r = cz_xeb_pipeline(many, NoiseSpec{}, gate);
    CHECK(r.oracle_purity_fit.alpha == doctest::Approx(1.0).epsilon(1e-12));
    // the speckle estimate scatters with the finite circuit set
    CHECK(std::abs(r.purity_fit.alpha - 1.0) < 0.01);
    CHECK(r.xeb_fit.alpha < 0.999);
  }

  SUBCASE("invalid options") {
    XebOptions bad = o;
    bad.depths = {3, 1, 5};
    CHECK_THROWS_AS(cz_xeb_pipeline(bad, NoiseSpec{}), Error);
    bad = o;
    bad.circuits = 3;
    CHECK_THROWS_AS(bad.validate(), Error);
  }
}

}  // TEST_SUITE
