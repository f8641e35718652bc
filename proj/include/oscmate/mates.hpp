#pragma once

// Osculating mates: beta' = sin(theta) T + cos(theta) N with theta = theta0 + int kappa ds,
// their Frenet apparatus, the inverse recovery of the base curvatures, the
// position-vector decomposition and the OT (osculating-type) construction.

#include <oscmate/curve.hpp>

#include <optional>
#include <vector>

namespace oscmate {

/// Stations where |tau cos(theta)| falls below this are excluded from the mate.
inline constexpr double kMateDeltaMin = 1e-6;

struct SignInterval {
  double lo = 0.0;
  double hi = 0.0;
  int sign = 1;
};

struct MateResult {
  /// Positions beta, frames (Tbar, Nbar = B, Bbar) and curvatures kappa_bar, tau_bar.
  SampledCurve mate;
  Profile kappa_bar;
  Profile tau_bar;
  /// epsilon1 per station (0 at excluded stations) and as maximal sub-intervals.
  std::vector<int> epsilon1;
  std::vector<SignInterval> epsilon1_schedule;
  Profile theta;
  Profile x1;
  Profile x2;
};

struct MateFrame {
  Vec3 T;
  Vec3 N;
  Vec3 B;
};

/// theta(s) = theta0 + int_0^s kappa du. theta0 is the value at s = 0 when the
/// grid contains s = 0, otherwise at the first station.
Profile theta_profile(const SampledCurve& sampled, double theta0);

/// Arc-length station where theta takes the value theta0.
double theta_anchor(const Grid& grid);

MateFrame mate_frame(const FrenetSample& sample, double theta);

/// Builds the osculating mate. beta(s_0) = origin. Throws DegenerateMate for a
/// plane base (tau == 0 everywhere) and NotFrenet when the base has excluded
/// stations.
MateResult osculating_mate(const SampledCurve& sampled, double theta0 = 0.0,
                           const Vec3& origin = Vec3::Zero());

struct InverseCurvatures {
  Profile kappa;
  Profile tau;
  /// +1 / -1 branch of tau = +-sqrt(kappa_bar^2 + tau_bar^2) per station.
  std::vector<int> tau_branch;
  bool tau_sign_ambiguous = false;  // no theta profile supplied: + branch returned
  bool source_plane = false;        // recovered kappa vanishes: base is a plane curve
};

/// kappa = eps1 kbar^2 / (kbar^2 + tbar^2) (tbar/kbar)', tau = +-sqrt(kbar^2 + tbar^2).
/// The tau sign is eps1 * sign(cos theta) when `theta` is given.
InverseCurvatures inverse_curvatures(const Grid& grid, const Profile& kappa_bar,
                                     const Profile& tau_bar, const std::vector<int>& epsilon1,
                                     const std::optional<Profile>& theta = std::nullopt);

InverseCurvatures inverse_curvatures(const MateResult& mate);

struct PositionDecomposition {
  Profile a1, a2, a3;
  Profile d;        // |beta - center|
  Profile h;        // ((d d')' - 1) / (tau cos theta)
  Profile h_sphere; // -1 / (tau cos theta): value of h for a spherical mate
  double reconstruction_error = 0.0;  // max |a1 T + a2 N + a3 B - (beta - center)|
  double a3_vs_h = 0.0;               // max |a3 - h|
  double a2_vs_normal_rate = 0.0;     // max |a2 + h'/tau|
  double a2_vs_scaled_rate = 0.0;     // max |a2 + (h'/tau) (d d')'|
  double a1_rate_residual = 0.0;      // max |a1' - (sin theta - kappa h'/tau)|
};

PositionDecomposition position_decomposition(const MateResult& mate, const SampledCurve& base,
                                             const Vec3& center);

struct OtValidation {
  double rectifying_residual = kNaN;  // max |<beta, N_beta>|
  double consistency_residual = 0.0;  // max |((s+b) cos theta - a sin theta) tau|
  double darboux_residual = kNaN;     // max |sin angle(beta, modified Darboux vector of the mate)|
  FitResult tan_theta_fit;            // tan theta ~ c0 s + c1
  bool tan_theta_affine = false;
  bool consistent = false;            // beta' = sin(theta) T + cos(theta) N to tolerance
};

struct OtMateResult {
  SampledCurve curve;
  OtValidation validation;
};

/// beta = [(s+b) sin theta + a cos theta] T + [(s+b) cos theta - a sin theta] N,
/// evaluated literally, with a record of how far it is from being a rectifying
/// osculating mate.
OtMateResult ot_osculating_mate(const SampledCurve& sampled, double a, double b, double theta0,
                                double tol = 1e-6);

}  // namespace oscmate
