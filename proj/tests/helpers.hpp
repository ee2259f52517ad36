#ifndef CZSIM_TESTS_HELPERS_HPP
#define CZSIM_TESTS_HELPERS_HPP

#include <random>

#include "czsim/calibration.hpp"
#include "czsim/parallel.hpp"

namespace czsim::testing {

inline DeviceSpec uncoupled_device() {
  DeviceSpec d = DeviceSpec::default_device();
  d.couplings = {};
  return d;
}

inline const GateModel& default_model() {
  static const GateModel model(DeviceSpec::default_device());
  return model;
}

/// Calibrated 45 ns slepian with lambda_1 fitted, shared by several suites.
inline const CalibrationResult& calibrated_slepian45() {
  static const CalibrationResult result = [] {
    PulseShapeSpec p;
    p.family = PulseFamily::Slepian;
    p.length = 45.0;
    CalibrationOptions c;
    c.fit_lambda = true;
    return calibrate_cz(default_model(), p, GateOptions{}, c, CzSearch{}, default_worker_count());
  }();
  return result;
}

inline GateOptions options_for(const CalibrationResult& r) {
  GateOptions o;
  o.q2_detune = r.q2_detune;
  return o;
}

inline Real op_norm(const MatrixXc& a) {
  Eigen::JacobiSVD<MatrixXc> svd(a);
  return svd.singularValues()(0);
}

}  // namespace czsim::testing

#endif  // CZSIM_TESTS_HELPERS_HPP
