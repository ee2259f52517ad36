#ifndef CZSIM_COMMON_HPP
#define CZSIM_COMMON_HPP

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace czsim {

using Real = double;
using Complex = std::complex<double>;

using MatrixXr = Eigen::MatrixXd;
using VectorXr = Eigen::VectorXd;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;
using Matrix4c = Eigen::Matrix4cd;
using Vector4c = Eigen::Vector4cd;

inline constexpr Real kPi = std::numbers::pi;
inline constexpr Real kTwoPi = 2.0 * std::numbers::pi;

/// GHz (cycles per ns) to rad/ns.
constexpr Real to_angular(Real ghz) noexcept { return kTwoPi * ghz; }
/// rad/ns to GHz.
constexpr Real to_ghz(Real angular) noexcept { return angular / kTwoPi; }

/// Wrap an angle into (-pi, pi].
inline Real wrap_angle(Real x) {
  Real y = std::remainder(x, kTwoPi);
  if (y <= -kPi) y += kTwoPi;
  return y;
}

inline constexpr Real rad_to_deg(Real rad) noexcept { return rad * 180.0 / kPi; }
inline constexpr Real deg_to_rad(Real deg) noexcept { return deg * kPi / 180.0; }

/// Error carrying a short machine-readable kind ("invalid_argument",
/// "step_size", "no_root", ...) alongside the human message. The CLI turns
/// the kind into its error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// max |A - A^dagger|
template <typename Derived>
Real hermiticity_defect(const Eigen::MatrixBase<Derived>& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

/// max |U^dagger U - I|
template <typename Derived>
Real unitarity_defect(const Eigen::MatrixBase<Derived>& u) {
  using Scalar = typename Derived::Scalar;
  const auto n = u.cols();
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (n == 0) return 0.0;
  return (u.adjoint() * u - Mat::Identity(n, n)).cwiseAbs().maxCoeff();
}

}  // namespace czsim

#endif  // CZSIM_COMMON_HPP
