#pragma once

#include <oscmate/numerics.hpp>

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace oscmate {

/// Below this curvature a station is not a Frenet point.
inline constexpr double kKappaMin = 1e-9;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return x >= lo && x <= hi; }
};

using CurveMap = std::function<Vec3(double)>;

/// Parametric space curve. Derivative slots that are left empty are
/// estimated with finite differences of `position`.
struct Curve {
  std::string name;
  CurveMap position;
  std::array<CurveMap, 3> derivative;  // orders 1, 2, 3
  Interval domain;
  bool unit_speed = false;

  bool has_analytic_derivatives() const {
    return derivative[0] && derivative[1] && derivative[2];
  }
};

/// One station of a Frenet curve. Excluded stations carry NaN curvatures.
struct FrenetSample {
  double s = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 T = Vec3::Zero();
  Vec3 N = Vec3::Zero();
  Vec3 B = Vec3::Zero();
  double kappa = kNaN;
  double tau = kNaN;

  bool excluded() const { return !std::isfinite(kappa); }
};

struct SampledCurve {
  std::string name;
  std::vector<FrenetSample> samples;
  std::optional<double> theta0;  // integration constant of the turning angle, if one was used
  std::vector<Interval> excluded;
  Profile theta;  // turning angle per station; empty when not computed

  Index size() const { return static_cast<Index>(samples.size()); }
  Grid grid() const;
  Profile stations() const;
  Profile kappa() const;
  Profile tau() const;
  Points positions() const;
  Points tangents() const;
  Points normals() const;
  Points binormals() const;
  Index valid_count() const;

  /// Rebuild `excluded` from the stations whose curvature is not finite.
  void refresh_excluded();
};

struct AlternativeFrame {
  Vec3 N = Vec3::Zero();
  Vec3 C = Vec3::Zero();
  Vec3 W = Vec3::Zero();
  double f = 0.0;
  double g = 0.0;
};

enum class FrameVector { T, N, B };

/// First three derivatives at parameter t (analytic when the curve supplies
/// them, otherwise nine-point finite differences inside the domain).
std::array<Vec3, 3> derivatives_at(const Curve& curve, double t);

/// Frenet apparatus from the first three derivatives of any regular
/// parametrization. Throws NotFrenet when the curvature is below kKappaMin.
FrenetSample frenet_from_derivatives(double s, const Vec3& position, const Vec3& d1,
                                     const Vec3& d2, const Vec3& d3);

/// Frenet apparatus at parameter s (arc length when `curve.unit_speed`).
FrenetSample frenet_apparatus(const Curve& curve, double s);

/// Unit-speed reparametrization. The arc length is measured from
/// `arc_origin` (a parameter value inside the grid range; defaults to the
/// first station), so the returned curve's parameter is s(t) - s(arc_origin).
Curve arclength_reparametrize(const Curve& curve, const Grid& grid,
                              std::optional<double> arc_origin = std::nullopt);

/// Frenet samples of a curve on a grid of its parameter. Non-Frenet stations
/// are kept with NaN frame and curvatures and reported in `excluded`; if no
/// station is Frenet the call throws NotFrenet.
SampledCurve sample_curve(const Curve& curve, const Grid& grid, const std::string& name = {});

/// Frenet apparatus of a sampled point track, all derivatives by
/// derivative_profile. Works for any regular parametrization of the track.
SampledCurve frenet_from_positions(const Grid& grid, const Points& positions,
                                   const std::string& name = {});

struct OrthonormalFrame {
  Vec3 T = Vec3::UnitX();
  Vec3 N = Vec3::UnitY();
  Vec3 B = Vec3::UnitZ();
};

/// Integrates the Frenet system for prescribed curvature and torsion with
/// RK4, re-orthonormalizing the frame after every step.
SampledCurve synthesize_from_curvatures(const std::function<double(double)>& kappa,
                                        const std::function<double(double)>& tau,
                                        const OrthonormalFrame& initial_frame,
                                        const Vec3& initial_position, const Grid& grid,
                                        const std::string& name = "synthesized");

/// Spherical curve traced by T, N or B, re-labelled by its own arc length.
SampledCurve indicatrix(const SampledCurve& sampled, FrameVector which);

AlternativeFrame alternative_frame(const FrenetSample& sample, double kappa_prime,
                                   double tau_prime);

}  // namespace oscmate
