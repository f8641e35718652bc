#pragma once

// Special-curve verdicts decided from (kappa, tau, s) profiles, indicatrix
// curvatures of a mate and the cross-checks between a base curve and its mate.

#include <oscmate/mates.hpp>

#include <map>
#include <optional>
#include <string>

namespace oscmate {

struct Tolerances {
  double rel = 1e-6;
  double abs = 1e-9;

  /// Looser preset for profiles that were themselves estimated from positions.
  static Tolerances finite_difference() { return {1e-3, 1e-6}; }
  double bound(double scale) const { return abs + rel * std::max(1.0, std::abs(scale)); }
};

struct Verdict {
  bool holds = false;
  bool deferred = false;  // the test could not be evaluated on this curve
  double tolerance = 0.0;
  std::optional<ConstancyResult> constancy;
  std::optional<FitResult> fit;
  double statistic = kNaN;  // the quantity compared against `tolerance`
  std::string note;
};

struct ClassificationReport {
  std::string name;
  Tolerances tolerances;
  Index valid_stations = 0;
  std::map<std::string, Verdict> verdicts;
  std::map<std::string, double> constants;

  const Verdict& at(const std::string& key) const { return verdicts.at(key); }
};

/// sigma = kappa^2 / (kappa^2 + tau^2)^(3/2) (tau/kappa)'.
Profile sigma_profile(const Grid& grid, const Profile& kappa, const Profile& tau);

/// mu = (f^2 + g^2)^(3/2) / (f^2 (g/f)') with f, g from the alternative frame.
/// Stations where |sigma'| <= 1e-6 are NaN.
Profile mu_profile(const Grid& grid, const Profile& kappa, const Profile& tau);

/// Throws InsufficientSamples below 20 valid stations.
ClassificationReport classify_report(const SampledCurve& sampled, const Tolerances& tol = {});

/// (tau cos x)' -+ tau^2 sin x cos x sqrt(a^2 tau^2 cos^2 x - 1), the smaller
/// branch per station. NaN where a^2 tau^2 cos^2 x < 1 - 1e-9; a radicand
/// within 1e-9 of zero counts as zero.
Profile mate_spherical_residual(const SampledCurve& sampled, const Profile& theta, double radius);

struct IndicatrixCurvatures {
  Profile kappa_ind;
  Profile tau_ind;
};

/// Curvature and torsion of the tangent, principal normal or binormal
/// indicatrix of a curve with curvatures (kappa_bar, tau_bar), each in the
/// indicatrix's own arc length:
///   T: w/kb,            kb (tb/kb)' / w^2
///   N: sqrt(1+sig^2),   sig' / (w (1+sig^2))
///   B: w/tb,           -kb^2 (tb/kb)' / (tb w^2)
/// with w = sqrt(kb^2 + tb^2) and sig the slant-helix invariant.
IndicatrixCurvatures indicatrix_curvatures(const Grid& grid, const Profile& kappa_bar,
                                           const Profile& tau_bar, FrameVector which);

struct EquivalenceReport {
  bool degenerate = false;  // plane base: no mate
  // Residuals against the base curvatures, as the identities are usually stated.
  double tangent_vs_base = kNaN;   // max |tau_T/kappa_T - eps1 kappa/tau|
  double normal_vs_base = kNaN;    // max |tau_N/kappa_N + sigma|
  double binormal_vs_base = kNaN;  // max |tau_B/kappa_B + eps1 kappa/tau|
  // Residuals against the mate's own invariants.
  double tangent_vs_mate = kNaN;   // max |tau_T/kappa_T - sigma_bar|
  double binormal_vs_mate = kNaN;  // max |tau_B/kappa_B + sigma_bar|
  double normal_vs_mu = kNaN;      // max |tau_N/kappa_N - 1/mu_bar|
  // Verdict pairs.
  bool base_plane = false;
  bool mate_plane = false;
  bool base_helix = false;
  bool mate_slant_helix = false;
  bool tangent_indicatrix_helix = false;
  bool binormal_indicatrix_helix = false;
  bool base_slant_helix = false;
  bool mate_c_slant_helix = false;
  bool normal_indicatrix_helix = false;
};

EquivalenceReport equivalence_report(const SampledCurve& base, const MateResult& mate,
                                     const Tolerances& tol = {});

/// Builds the mate itself; a plane base gives a degenerate report with the
/// (plane, plane) verdict pair.
EquivalenceReport equivalence_from_base(const SampledCurve& base, double theta0 = 0.0,
                                        const Tolerances& tol = {});

struct PredictionCheck {
  bool applicable = true;
  bool predicted = false;  // what the base-side criterion says
  bool observed = false;   // direct verdict
  double residual = kNaN;
  std::string note;

  bool agrees() const { return !applicable || predicted == observed; }
};

struct MateCrossChecks {
  /// Mate Bertrand predicted from (p q')^2 + q^2 of the base.
  PredictionCheck bertrand_from_base;
  /// eps1 c1 sigma_bar +- c2 = 1/sqrt(kb^2 + tb^2) for the base's Bertrand constants.
  PredictionCheck base_bertrand_from_mate;
  /// Mate Mannheim predicted from eps1 cos(theta)/tau constant.
  PredictionCheck mannheim_from_base;
  /// Base Mannheim predicted from eps1 w_bar sigma_bar^3 / (1 + sigma_bar^2) constant.
  PredictionCheck base_mannheim_from_mate;
  /// Base Mannheim predicted from kappa_bar / tau constant.
  PredictionCheck mannheim_curvature_ratio;
  /// Salkowski base: mate Salkowski predicted from tau = eps1 e3 sec(e1 s + e2).
  PredictionCheck salkowski_sec_form;
  /// Residual reports for Salkowski / anti-Salkowski mates.
  double salkowski_tau_ode = kNaN;       // eps1 e4 tb'' - 2 c tb tb'
  double anti_salkowski_kappa_ode = kNaN;  // eps1 e5 kb'' + 2 c kb kb'
};

MateCrossChecks mate_cross_checks(const SampledCurve& base, const MateResult& mate,
                                  const Tolerances& tol = {});

}  // namespace oscmate
