#ifndef CZSIM_NELDER_MEAD_HPP
#define CZSIM_NELDER_MEAD_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "czsim/common.hpp"

namespace czsim {

template <typename Scalar>
struct NelderMeadOptions {
  Scalar reflection = 1.0;
  Scalar expansion = 2.0;
  Scalar contraction = 0.5;
  Scalar shrink = 0.5;
  Scalar diameter_tolerance = 1e-10;
  Scalar value_spread_tolerance = 1e-12;
  /// 0 selects 500 * dimension.
  int max_iterations = 0;
};

template <typename Scalar>
struct NelderMeadResult {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> point;
  Scalar value{};
  int iterations = 0;
  int evaluations = 0;
  bool hit_iteration_cap = false;
};

/// Axis-aligned starting simplex: x0 plus x0 + step_i e_i. Columns are vertices.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> axis_simplex(
    const Eigen::MatrixBase<Derived>& x0, const Eigen::MatrixBase<Derived>& steps) {
  using Scalar = typename Derived::Scalar;
  const auto n = x0.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> s(n, n + 1);
  for (Eigen::Index j = 0; j <= n; ++j) s.col(j) = x0;
  for (Eigen::Index i = 0; i < n; ++i) s(i, i + 1) += steps(i);
  return s;
}

/// Derivative-free simplex minimization. `initial_simplex` holds the n+1
/// vertices as columns. Never throws on non-convergence: the best vertex is
/// returned with `hit_iteration_cap` set.
template <typename Objective, typename Scalar>
NelderMeadResult<Scalar> nelder_mead_minimize(
    Objective&& objective,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& initial_simplex,
    const NelderMeadOptions<Scalar>& options = {}) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = initial_simplex.rows();
  if (initial_simplex.cols() != n + 1)
    throw Error("invalid_argument", "simplex needs dimension + 1 vertices");
  const int max_iter = options.max_iterations > 0 ? options.max_iterations : static_cast<int>(500 * n);

  NelderMeadResult<Scalar> result;
  std::vector<Vec> x(n + 1);
  std::vector<Scalar> f(n + 1);
  auto eval = [&](const Vec& p) {
    ++result.evaluations;
    return static_cast<Scalar>(objective(p));
  };
  for (Eigen::Index j = 0; j <= n; ++j) {
    x[j] = initial_simplex.col(j);
    f[j] = eval(x[j]);
  }
  std::vector<std::size_t> order(n + 1);

  auto sort_vertices = [&] {
    std::iota(order.begin(), order.end(), 0);
    // stable on ties so the earlier vertex stays best
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (std::isnan(f[a])) return false;
      if (std::isnan(f[b])) return true;
      return f[a] < f[b];
    });
    std::vector<Vec> xs(n + 1);
    std::vector<Scalar> fs(n + 1);
    for (std::size_t k = 0; k < order.size(); ++k) {
      xs[k] = std::move(x[order[k]]);
      fs[k] = f[order[k]];
    }
    x = std::move(xs);
    f = std::move(fs);
  };

  int it = 0;
  for (; it < max_iter; ++it) {
    sort_vertices();
    Scalar diameter = 0;
    for (Eigen::Index j = 1; j <= n; ++j) diameter = std::max(diameter, (x[j] - x[0]).norm());
    if (diameter < options.diameter_tolerance) break;
    if (std::abs(f[n] - f[0]) < options.value_spread_tolerance) break;

    Vec centroid = Vec::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) centroid += x[j];
    centroid /= static_cast<Scalar>(n);

    const Vec xr = centroid + options.reflection * (centroid - x[n]);
    const Scalar fr = eval(xr);
    if (fr < f[0]) {
      const Vec xe = centroid + options.expansion * (xr - centroid);
      const Scalar fe = eval(xe);
      if (fe < fr) {
        x[n] = xe;
        f[n] = fe;
      } else {
        x[n] = xr;
        f[n] = fr;
      }
      continue;
    }
    if (fr < f[n - 1]) {
      x[n] = xr;
      f[n] = fr;
      continue;
    }
    if (fr < f[n]) {
      const Vec xc = centroid + options.contraction * (xr - centroid);
      const Scalar fc = eval(xc);
      if (fc <= fr) {
        x[n] = xc;
        f[n] = fc;
        continue;
      }
    } else {
      const Vec xc = centroid + options.contraction * (x[n] - centroid);
      const Scalar fc = eval(xc);
      if (fc < f[n]) {
        x[n] = xc;
        f[n] = fc;
        continue;
      }
    }
    for (Eigen::Index j = 1; j <= n; ++j) {
      x[j] = x[0] + options.shrink * (x[j] - x[0]);
      f[j] = eval(x[j]);
    }
  }
  sort_vertices();
  result.point = x[0];
  result.value = f[0];
  result.iterations = it;
  result.hit_iteration_cap = it >= max_iter;
  return result;
}

}  // namespace czsim

#endif  // CZSIM_NELDER_MEAD_HPP
