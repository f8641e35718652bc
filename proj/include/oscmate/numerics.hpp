#pragma once

// Numerical kernel: finite-difference stencils, quadrature, fixed-step RK4,
// constancy / affine-relation detection and algebraic sphere fitting.
//
// All routines are pure functions of their arguments. Sequence arguments may be
// an Eigen::VectorXd (scalar profiles), std::vector<double> or
// std::vector<Eigen::Vector3d> (point and frame tracks).

#include <oscmate/error.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

namespace oscmate {

using Index = Eigen::Index;
using Vec3 = Eigen::Vector3d;
using Profile = Eigen::VectorXd;
using Points = std::vector<Vec3>;

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline bool is_finite(double x) { return std::isfinite(x); }
template <class Derived>
bool is_finite(const Eigen::MatrixBase<Derived>& x) {
  return x.allFinite();
}

template <class T>
T nan_value() {
  if constexpr (std::is_same_v<T, double>) {
    return kNaN;
  } else {
    return T::Constant(kNaN);
  }
}

/// Ordered, strictly increasing parameter stations (at least 5).
class Grid {
 public:
  explicit Grid(Profile stations);

  /// `n` equally spaced stations on [lo, hi], endpoints included.
  static Grid uniform(double lo, double hi, Index n);

  Index size() const { return s_.size(); }
  double operator[](Index i) const { return s_[i]; }
  double front() const { return s_[0]; }
  double back() const { return s_[s_.size() - 1]; }
  const Profile& stations() const { return s_; }

  /// True when every spacing agrees with the mean spacing to 1e-9 relative.
  bool is_uniform() const { return uniform_; }
  double mean_step() const { return (back() - front()) / static_cast<double>(size() - 1); }

  /// Index of the last station <= x (clamped to [0, size-2]).
  Index bracket(double x) const;

 private:
  Profile s_;
  bool uniform_ = false;
};

struct FitResult {
  Eigen::VectorXd coefficients;
  double residual_rms = 0.0;
  double residual_max = 0.0;
  bool rank_deficient = false;
};

struct ConstancyResult {
  bool is_constant = false;
  double level = 0.0;   // median
  double spread = 0.0;  // max - min
};

struct SphereFit {
  Vec3 center = Vec3::Zero();
  double radius = 0.0;
  double residual_rms = 0.0;
  bool degenerate = false;  // coplanar / collinear input, best-effort result
};

namespace detail {

template <class Values>
using value_t = std::decay_t<decltype(std::declval<const Values&>()[0])>;

template <class Values>
Index length(const Values& v) {
  return static_cast<Index>(v.size());
}

/// Weights of the derivative of the interpolating polynomial through `count`
/// nodes, evaluated at x0 (Fornberg's recursion).
void fornberg_weights(const double* nodes, int count, double x0, int order, double* weights);

/// Five-point weights for station `i` using the window [j, j+5).
void five_point_weights(const Grid& grid, Index j, Index i, int order, double* weights);

template <class Values>
value_t<Values> apply_weights(const Values& v, Index j, const double* w) {
  value_t<Values> acc = w[0] * v[j];
  for (int k = 1; k < 5; ++k) acc = acc + w[k] * v[j + k];
  return acc;
}

void check_stencil_args(const Grid& grid, Index n_values, Index index, int order);

}  // namespace detail

/// Finite-difference derivative (order 1 or 2) of sampled values at station
/// `index`. Five-point stencils: centred and 4th-order accurate in the
/// interior of uniform grids, one-sided at the two stations nearest each end.
/// Polynomials of degree <= 4 are reproduced to rounding everywhere.
template <class Values>
detail::value_t<Values> derivative_stencil(const Grid& grid, const Values& values, Index index,
                                           int order) {
  detail::check_stencil_args(grid, detail::length(values), index, order);
  const Index j = std::clamp<Index>(index - 2, 0, grid.size() - 5);
  double w[5];
  detail::five_point_weights(grid, j, index, order, w);
  return detail::apply_weights(values, j, w);
}

/// Derivative of a whole profile. Non-finite samples split the profile into
/// independent runs; stencils never reach across a gap and runs shorter than
/// five stations come back as NaN.
template <class Values>
Values derivative_profile(const Grid& grid, const Values& values, int order) {
  using V = detail::value_t<Values>;
  const Index n = detail::length(values);
  detail::check_stencil_args(grid, n, 0, order);
  Values out = values;
  Index lo = 0;
  while (lo < n) {
    if (!is_finite(values[lo])) {
      out[lo] = nan_value<V>();
      ++lo;
      continue;
    }
    Index hi = lo;
    while (hi < n && is_finite(values[hi])) ++hi;
    for (Index i = lo; i < hi; ++i) {
      if (hi - lo < 5) {
        out[i] = nan_value<V>();
        continue;
      }
      const Index j = std::clamp<Index>(i - 2, lo, hi - 5);
      double w[5];
      detail::five_point_weights(grid, j, i, order, w);
      out[i] = detail::apply_weights(values, j, w);
    }
    lo = hi;
  }
  return out;
}

/// F(s_i) = init + integral of f from s_0 to s_i. Each interval is integrated
/// with Simpson's rule (f is evaluated at interval midpoints), so the result is
/// O(h^4) on any grid.
Profile cumulative_integral(const std::function<double(double)>& f, const Grid& grid,
                            double init);

/// Cumulative integral of values known only at the stations. Uniform grids use
/// the four-point cubic rule (O(h^4)); non-uniform grids fall back to the
/// trapezoid rule.
template <class Values>
Values cumulative_integral_sampled(const Grid& grid, const Values& f,
                                   const detail::value_t<Values>& init) {
  const Index n = grid.size();
  if (detail::length(f) != n) {
    throw Error(ErrorCode::InvalidArgument, "cumulative_integral: sample count does not match grid");
  }
  for (Index i = 0; i < n; ++i) {
    if (!is_finite(f[i])) {
      throw Error(ErrorCode::NonFinite,
                  "cumulative_integral: non-finite integrand at s=" + std::to_string(grid[i]));
    }
  }
  Values out = f;
  out[0] = init;
  if (!grid.is_uniform()) {
    for (Index i = 0; i + 1 < n; ++i) {
      out[i + 1] = out[i] + (0.5 * (grid[i + 1] - grid[i])) * (f[i] + f[i + 1]);
    }
    return out;
  }
  for (Index i = 0; i + 1 < n; ++i) {
    const double h = grid[i + 1] - grid[i];
    if (i == 0) {
      out[1] = out[0] + (h / 24.0) * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
    } else if (i == n - 2) {
      out[i + 1] =
          out[i] + (h / 24.0) * (f[i - 2] - 5.0 * f[i - 1] + 19.0 * f[i] + 9.0 * f[i + 1]);
    } else {
      out[i + 1] =
          out[i] + (h / 24.0) * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2]);
    }
  }
  return out;
}

/// Classical fixed-step Runge-Kutta on the grid stations. `project`, when
/// given, is applied to the state after every step (used to re-orthonormalize
/// frames). Throws NonFinite naming the last good station.
template <class State, class Field>
std::vector<State> ode_rk4(Field&& field, const Grid& grid, const State& y0,
                           const std::function<void(State&)>& project = {}) {
  std::vector<State> out;
  out.reserve(static_cast<std::size_t>(grid.size()));
  out.push_back(y0);
  if (!is_finite(y0)) throw Error(ErrorCode::NonFinite, "ode_rk4: non-finite initial state");
  for (Index i = 0; i + 1 < grid.size(); ++i) {
    const double s = grid[i];
    const double h = grid[i + 1] - s;
    const State& y = out.back();
    const State k1 = field(s, y);
    const State k2 = field(s + 0.5 * h, State(y + (0.5 * h) * k1));
    const State k3 = field(s + 0.5 * h, State(y + (0.5 * h) * k2));
    const State k4 = field(s + h, State(y + h * k3));
    State next = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (project) project(next);
    if (!is_finite(next)) {
      throw Error(ErrorCode::NonFinite,
                  "ode_rk4: non-finite state after last good station s=" + std::to_string(s));
    }
    out.push_back(std::move(next));
  }
  return out;
}

/// level = median, spread = max - min;
/// constant <=> spread <= tol_abs + tol_rel * max(1, |level|).
ConstancyResult constancy_test(const Profile& values, double tol_rel, double tol_abs);

/// Least squares for features * c = target. A normal system singular to 1e-10
/// relative is reported as rank deficient and the minimum-norm solution is
/// returned.
FitResult affine_fit(const Eigen::MatrixXd& features, const Profile& target);

/// Algebraic least-squares sphere |p|^2 = 2 c.p + k.
SphereFit sphere_fit(const Points& points);

/// Entries of `values` that are finite, in order.
Profile finite_entries(const Profile& values);

/// max |v| over finite entries (0 when none are finite).
double max_abs_finite(const Profile& values);

}  // namespace oscmate
