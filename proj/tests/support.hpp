#pragma once

// Small helpers shared by the test binaries.

#include <oscmate/curve.hpp>

#include <cmath>
#include <optional>
#include <random>

namespace oscmate::testing {

template <class F>
std::optional<ErrorCode> error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

/// Max |a - b| over stations where both are finite.
inline double max_diff(const Profile& a, const Profile& b) {
  double m = 0.0;
  for (Index i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (std::isfinite(a[i]) && std::isfinite(b[i])) m = std::max(m, std::abs(a[i] - b[i]));
  }
  return m;
}

/// Max |a - b| / max(1, |b|) over stations where both are finite.
inline double max_rel_diff(const Profile& a, const Profile& b) {
  double m = 0.0;
  for (Index i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (std::isfinite(a[i]) && std::isfinite(b[i])) {
      m = std::max(m, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
    }
  }
  return m;
}

inline Profile eval_on(const Grid& grid, const std::function<double(double)>& f) {
  Profile out(grid.size());
  for (Index i = 0; i < grid.size(); ++i) out[i] = f(grid[i]);
  return out;
}

/// kappa = <T', N>, tau = -<B', N> from finite differences of the stored frames.
inline std::pair<Profile, Profile> curvatures_from_frames(const SampledCurve& c) {
  const Grid g = c.grid();
  const Points dT = derivative_profile(g, c.tangents(), 1);
  const Points dB = derivative_profile(g, c.binormals(), 1);
  Profile k(g.size()), t(g.size());
  for (Index i = 0; i < g.size(); ++i) {
    const Vec3& N = c.samples[static_cast<std::size_t>(i)].N;
    k[i] = dT[i].dot(N);
    t[i] = -dB[i].dot(N);
  }
  return {k, t};
}

inline Eigen::Matrix3d random_rotation(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  return q.normalized().toRotationMatrix();
}

/// Rigid image x -> R x + t of a parametric curve, derivatives included.
inline Curve moved(const Curve& c, const Eigen::Matrix3d& R, const Vec3& t) {
  Curve out = c;
  out.position = [c, R, t](double s) -> Vec3 { return R * c.position(s) + t; };
  for (int k = 0; k < 3; ++k) {
    if (c.derivative[k]) {
      out.derivative[k] = [d = c.derivative[k], R](double s) -> Vec3 { return R * d(s); };
    }
  }
  return out;
}

/// Unit-speed circular helix (r cos(s/c), r sin(s/c), h s/c), c = sqrt(r^2 + h^2).
inline Curve helix_curve(double r, double h) {
  const double c = std::sqrt(r * r + h * h);
  Curve out;
  out.name = "helix";
  out.unit_speed = true;
  out.domain = {-1e6, 1e6};
  out.position = [=](double s) -> Vec3 {
    return {r * std::cos(s / c), r * std::sin(s / c), h * s / c};
  };
  out.derivative[0] = [=](double s) -> Vec3 {
    return {-r / c * std::sin(s / c), r / c * std::cos(s / c), h / c};
  };
  out.derivative[1] = [=](double s) -> Vec3 {
    return {-r / (c * c) * std::cos(s / c), -r / (c * c) * std::sin(s / c), 0.0};
  };
  out.derivative[2] = [=](double s) -> Vec3 {
    return {r / (c * c * c) * std::sin(s / c), -r / (c * c * c) * std::cos(s / c), 0.0};
  };
  return out;
}

}  // namespace oscmate::testing
