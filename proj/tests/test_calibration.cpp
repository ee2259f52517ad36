#include <doctest.h>

#include "czsim/calibration.hpp"
#include "czsim/parallel.hpp"
#include "helpers.hpp"

using namespace czsim;
using czsim::testing::calibrated_slepian45;
using czsim::testing::default_model;
using czsim::testing::options_for;

namespace {

std::vector<Real> linspace(Real a, Real b, int n) {
  std::vector<Real> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

Real wrapped_degrees(Real deg) { return std::remainder(deg, 360.0); }

int workers() { return default_worker_count(); }

}  // namespace

TEST_SUITE("calibration") {

TEST_CASE("compensation curve") {
  const DeviceSpec d = DeviceSpec::default_device();
  const Real wz = zero_coupling_point(d);
  auto grid = linspace(5.2, 7.0, 37);
  grid.push_back(wz);
  std::sort(grid.begin(), grid.end());
  const auto curve = compensation_curve(d, grid, 0.003);
  const auto ref = dressed_qubit_frequencies(d, wz, 0.0, 0.003);
  Real lo = 1e300, hi = -1e300, residual = 0.0;
  for (const auto& p : curve) {
    if (p.coupler_frequency == wz) {
      // the reference point is its own solution
      CHECK(std::abs(p.q1_offset) < 1e-13);
      CHECK(std::abs(p.q2_offset - 0.003) < 1e-13);
    }
    const auto f = dressed_qubit_frequencies(d, p.coupler_frequency, p.q1_offset, p.q2_offset);
    CHECK(std::abs(f[0] - ref[0]) < 1e-5);
    CHECK(std::abs(f[1] - ref[1]) < 1e-5);
    residual = std::max({residual, std::abs(f[0] - ref[0]), std::abs(f[1] - ref[1])});
    lo = std::min(lo, p.q1_shift);
    hi = std::max(hi, p.q1_shift);
  }
  CHECK(residual < 0.01 * (hi - lo));

  // below the reference the shift is negative and grows toward the qubits
  Real prev = 0.0;
  for (auto it = curve.rbegin(); it != curve.rend(); ++it) {
    if (it->coupler_frequency >= wz) continue;
    CHECK(it->q1_shift < 0.0);
    CHECK(std::abs(it->q1_shift) > std::abs(prev));
    prev = it->q1_shift;
  }
  CHECK(curve.front().q1_shift < 0.0);
}

TEST_CASE("compensation refuses a resonant coupler") {
  const DeviceSpec d = DeviceSpec::default_device();
  CHECK_THROWS_AS(compensation_curve(d, {d.q1().frequency + 0.002}), Error);
}

TEST_CASE("scan grids are validated") {
  const auto& model = default_model();
  PulseShapeSpec p;
  ScanGrid g;
  g.coupling_axis = {-0.01, -0.02};
  try {
    leakage_scan(model, g, p, GateOptions{});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == "invalid_grid");
  }
  g.detune_axis = {0.0};
  g.coupling_axis = {-0.01, -0.01};
  CHECK_THROWS_AS(g.validate(), Error);
  g.coupling_axis = {-0.02, -0.01};
  CHECK_NOTHROW(g.validate());
}

TEST_CASE("zero peak coupling neither leaks nor builds conditional phase") {
  const auto& model = default_model();
  PulseShapeSpec p;
  p.length = 45.0;
  ScanGrid g;
  g.coupling_axis = {-0.01, 0.0};
  g.detune_axis = {-0.01, 0.0, 0.01};
  const auto [leak, phase] = leakage_phase_scan(model, g, p, GateOptions{}, workers());
  for (int r = 0; r < 3; ++r) {
    CHECK(leak.values(r, 1) < 1e-8);
    // only the residual static ZZ at the idle point remains
    CHECK(std::abs(wrapped_degrees(phase.values(r, 1))) < 0.2);
  }
}

TEST_CASE("calibrated point") {
  const auto& cal = calibrated_slepian45();
  const auto& model = default_model();
  const GateOptions o = options_for(cal);
  CHECK(std::abs(phase_degrees(cal.report.conditional_phase) - 180.0) < 0.5);

  SUBCASE("a rough CZ point exists in the scan around it") {
    ScanGrid g;
    for (int i = -2; i <= 2; ++i) g.coupling_axis.push_back(cal.pulse.peak_value * (1.0 - 0.01 * i));
    for (int i = -2; i <= 2; ++i) g.detune_axis.push_back(cal.q2_detune + 0.001 * i);
    const auto [leak, phase] = leakage_phase_scan(model, g, cal.pulse, o, workers());
    CHECK(leak.values.rows() == 5);
    CHECK(leak.values.cols() == 5);
    bool found = false;
    for (int r = 0; r < 5; ++r)
      for (int c = 0; c < 5; ++c)
        found = found || (leak.values(r, c) < 1e-3 && std::abs(phase.values(r, c) - 180.0) < 5.0);
    CHECK(found);

    // separate scans agree with the combined one
    const auto only_leak = leakage_scan(model, g, cal.pulse, o, 1);
    CHECK((only_leak.values.array() == leak.values.array()).all());
  }

  SUBCASE("phase falls as the coupling grows near the operating point") {
    ScanGrid g;
    for (int i = 0; i <= 10; ++i) g.coupling_axis.push_back(cal.pulse.peak_value * (0.9 + 0.02 * i));
    g.detune_axis = {cal.q2_detune};
    const auto phase = phase_scan(model, g, cal.pulse, o, workers());
    // |peak| grows along the axis; the accumulated phase runs more negative
    for (int c = 1; c < phase.values.cols(); ++c) CHECK(phase.values(0, c) < phase.values(0, c - 1));
  }

  SUBCASE("phase calibration by bisection") {
    const auto peak = calibrate_peak_for_phase(model, cal.pulse, o, cal.pulse.peak_value * 0.95,
                                               cal.pulse.peak_value * 1.05);
    REQUIRE(peak.has_value());
    PulseShapeSpec p = cal.pulse;
    p.peak_value = *peak;
    CHECK(std::abs(phase_degrees(model.evaluate(p, o).conditional_phase) - 180.0) < 0.01);
  }

  SUBCASE("repeated gates") {
    const std::vector<int> counts{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    const std::vector<Real> axis{cal.pulse.peak_value * 1.005, cal.pulse.peak_value, cal.pulse.peak_value * 0.995};
    const auto rep = repeated_gate_scan(model, cal.pulse, o, counts, RepeatAxis::Coupling, axis, workers());
    CHECK(std::abs(rep.deviation.values(0, 1)) < 0.5);
    for (int c = 0; c < 3; ++c) {
      const Real per_gate = rep.deviation.values(0, c);
      const Real l1 = rep.leakage.values(0, c);
      for (int r = 0; r < 10; ++r) {
        const int n = counts[r];
        CHECK(std::abs(rep.deviation.values(r, c) - n * per_gate) < 0.1);
        // coherent worst case
        CHECK(rep.leakage.values(r, c) <= n * n * l1 + 1e-12);
      }
    }
    CHECK(rep.deviation.values(0, 0) < -1.0);
    CHECK(rep.deviation.values(0, 2) > 1.0);
  }

  SUBCASE("Ramsey agrees with the unitary conditional phase") {
    RamseyOptions r;
    r.shots = 10000;
    r.seed = 21;
    const Real ramsey = rad_to_deg(ramsey_conditional_phase(cal.report.projected_map, r));
    CHECK(std::abs(wrapped_degrees(ramsey - rad_to_deg(cal.report.conditional_phase))) < 1.0);
  }
}

TEST_CASE("scans are deterministic across worker counts") {
  const auto& model = default_model();
  PulseShapeSpec p;
  p.length = 30.0;
  ScanGrid g;
  g.coupling_axis = linspace(-0.03, -0.01, 4);
  g.detune_axis = linspace(-0.01, 0.01, 3);
  const auto a = leakage_phase_scan(model, g, p, GateOptions{}, 1);
  const auto b = leakage_phase_scan(model, g, p, GateOptions{}, 3);
  CHECK((a.first.values.array() == b.first.values.array()).all());
  CHECK((a.second.values.array() == b.second.values.array()).all());
}

TEST_CASE("Ramsey emulation") {
  RamseyOptions exact;
  CHECK(std::abs(ramsey_conditional_phase(Matrix4c::Identity(), exact)) < 1e-12);
  const Matrix4c cz = cz_target({0.0, 0.0});
  CHECK(std::abs(ramsey_conditional_phase(cz, exact)) == doctest::Approx(kPi).epsilon(1e-12));

  // binomial phase error of the difference of two fringe fits
  RamseyOptions sampled;
  sampled.shots = 1000;
  sampled.seed = 4;
  const Real sigma = std::sqrt(2.0 / (sampled.phase_points * sampled.shots));
  CHECK(std::abs(wrap_angle(ramsey_conditional_phase(cz, sampled) - kPi)) < 3 * sigma);
  sampled.readout = std::array<Real, 2>{0.996, 0.974};
  CHECK(std::abs(wrap_angle(ramsey_conditional_phase(cz, sampled) - kPi)) < 3 * sigma / 0.97);

  try {
    ramsey_conditional_phase(Matrix4c::Identity() * 0.05, exact);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == "fit_failed");
  }
  sampled.shots = 50;
  CHECK_THROWS_AS(ramsey_conditional_phase(cz, sampled), Error);
}

TEST_CASE("phase in degrees") {
  CHECK(phase_degrees(kPi) == doctest::Approx(180.0));
  CHECK(phase_degrees(-kPi) == doctest::Approx(180.0));
  CHECK(phase_degrees(0.0) == 0.0);
  CHECK(phase_degrees(-0.1) == doctest::Approx(360.0 - rad_to_deg(0.1)));
}

TEST_CASE("slepian optimize reaches 0.999 within [25, 70] ns") {
  PulseShapeSpec p;
  p.family = PulseFamily::Slepian;
  CalibrationOptions c;
  c.fit_lambda = true;
  OptimizeOptions oo;
  oo.length_min = 25.0;
  oo.length_max = 70.0;
  const auto r = optimize_pulse(default_model(), p, GateOptions{}, oo, c, CzSearch{}, workers());
  CHECK(r.threshold_met);
  CHECK(r.best.report.fidelity >= 0.999);
  CHECK(r.best.pulse.length >= 25.0);
  CHECK(r.best.pulse.length <= 70.0);
  for (std::size_t i = 0; i + 1 < r.trials.size(); ++i) CHECK(r.trials[i].report.fidelity < 0.999);
}

TEST_CASE("cosine needs a longer pulse than slepian in coupler frequency") {
  const auto& model = default_model();
  GateOptions o;
  o.compensate = false;
  OptimizeOptions oo;
  oo.length_min = 25.0;
  oo.length_max = 70.0;
  auto run = [&](PulseFamily f) {
    PulseShapeSpec p;
    p.family = f;
    p.parameterization = Parameterization::CouplerFrequency;
    p.idle_value = model.coupling_map().zero_point();
    CalibrationOptions c;
    c.fit_lambda = f == PulseFamily::Slepian;
    return optimize_pulse(model, p, o, oo, c, CzSearch{}, workers());
  };
  const auto s = run(PulseFamily::Slepian);
  const auto c = run(PulseFamily::Cosine);
  REQUIRE(s.threshold_met);
  REQUIRE(c.threshold_met);
  CHECK(c.best.pulse.length > s.best.pulse.length);
}

TEST_CASE("bounds that exclude every viable pulse return the best found") {
  PulseShapeSpec p;
  p.family = PulseFamily::Cosine;
  CalibrationOptions c;
  c.peak_min = -0.003;
  c.peak_max = 0.0;
  OptimizeOptions oo;
  oo.length_min = 25.0;
  oo.length_max = 35.0;
  oo.length_step = 10.0;
  CzSearch s;
  s.peak_points = 4;
  s.detune_points = 4;
  s.starts = 1;
  const auto r = optimize_pulse(default_model(), p, GateOptions{}, oo, c, s, workers());
  CHECK_FALSE(r.threshold_met);
  REQUIRE(r.trials.size() == 2);
  CHECK(r.best.report.fidelity == std::max(r.trials[0].report.fidelity, r.trials[1].report.fidelity));
  CHECK(r.best.pulse.peak_value >= -0.003 - 1e-12);
}

TEST_CASE("length sweep warm start keeps the calibration") {
  PulseShapeSpec p;
  p.family = PulseFamily::Cosine;
  const auto sweep = length_sweep(default_model(), p, GateOptions{}, {50.0, 45.0}, CalibrationOptions{}, CzSearch{},
                                  0.99999, workers());
  REQUIRE(sweep.size() == 2);
  CHECK(sweep[0].pulse.length == 50.0);
  CHECK(sweep[1].pulse.length == 45.0);
  for (const auto& r : sweep) {
    CHECK(r.report.fidelity > 0.9999);
    CHECK(r.report.leakage_from_11 < 1e-4);
  }
}

}  // TEST_SUITE
