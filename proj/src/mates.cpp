#include <oscmate/mates.hpp>

namespace oscmate {

namespace {

void require_frenet(const SampledCurve& sampled) {
  if (sampled.valid_count() != sampled.size()) {
    throw Error(ErrorCode::NotFrenet,
                "base curve '" + sampled.name + "' has non-Frenet stations; mates need kappa > 0");
  }
}

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

}  // namespace

double theta_anchor(const Grid& grid) {
  return (grid.front() <= 0.0 && grid.back() >= 0.0) ? 0.0 : grid.front();
}

Profile theta_profile(const SampledCurve& sampled, double theta0) {
  require_frenet(sampled);
  const Grid grid = sampled.grid();
  const Profile kappa = sampled.kappa();
  Profile theta = cumulative_integral_sampled(grid, kappa, 0.0);

  // Value of the running integral at the anchor: cubic Hermite with F' = kappa.
  const double anchor = theta_anchor(grid);
  const Index i = grid.bracket(anchor);
  const double h = grid[i + 1] - grid[i];
  const double u = (anchor - grid[i]) / h;
  const double h00 = (1 + 2 * u) * (1 - u) * (1 - u);
  const double h10 = u * (1 - u) * (1 - u);
  const double h01 = u * u * (3 - 2 * u);
  const double h11 = u * u * (u - 1);
  const double at_anchor =
      h00 * theta[i] + h10 * h * kappa[i] + h01 * theta[i + 1] + h11 * h * kappa[i + 1];

  theta.array() += theta0 - at_anchor;
  return theta;
}

MateFrame mate_frame(const FrenetSample& sample, double theta) {
  const double sn = std::sin(theta);
  const double cs = std::cos(theta);
  return {sn * sample.T + cs * sample.N, sample.B, cs * sample.T - sn * sample.N};
}

MateResult osculating_mate(const SampledCurve& sampled, double theta0, const Vec3& origin) {
  require_frenet(sampled);
  const Profile tau = sampled.tau();
  if (tau.cwiseAbs().maxCoeff() < kMateDeltaMin) {
    throw Error(ErrorCode::DegenerateMate,
                "base curve '" + sampled.name + "' is planar (tau = 0): its mate has kappa_bar = 0");
  }
  const Grid grid = sampled.grid();
  const Index n = grid.size();

  MateResult r;
  r.theta = theta_profile(sampled, theta0);
  r.x1 = r.theta.array().sin().matrix();
  r.x2 = r.theta.array().cos().matrix();
  r.kappa_bar = Profile::Constant(n, kNaN);
  r.tau_bar = Profile::Constant(n, kNaN);
  r.epsilon1.assign(static_cast<std::size_t>(n), 0);

  Points tangent(static_cast<std::size_t>(n));
  std::vector<MateFrame> frames;
  frames.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const auto& f = sampled.samples[static_cast<std::size_t>(i)];
    frames.push_back(mate_frame(f, r.theta[i]));
    tangent[static_cast<std::size_t>(i)] = frames.back().T;
    const double signed_kappa = f.tau * r.x2[i];
    if (std::abs(signed_kappa) < kMateDeltaMin) continue;
    const int eps = sign_of(signed_kappa);
    r.epsilon1[static_cast<std::size_t>(i)] = eps;
    r.kappa_bar[i] = eps * signed_kappa;
    r.tau_bar[i] = f.tau * r.x1[i];
  }
  if (std::none_of(r.epsilon1.begin(), r.epsilon1.end(), [](int e) { return e != 0; })) {
    throw Error(ErrorCode::DegenerateMate,
                "tau cos(theta) vanishes at every station of '" + sampled.name + "'");
  }

  // beta' = Tbar depends on s only, so the ODE reduces to a quadrature.
  const Points beta = cumulative_integral_sampled(grid, tangent, origin);

  r.mate.name = sampled.name + "-mate";
  r.mate.theta0 = theta0;
  r.mate.theta = r.theta;
  r.mate.samples.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    FrenetSample f;
    f.s = grid[i];
    f.position = beta[k];
    f.T = frames[k].T;
    f.N = frames[k].N;
    f.B = frames[k].B;
    f.kappa = r.kappa_bar[i];
    f.tau = r.tau_bar[i];
    r.mate.samples.push_back(f);
  }
  r.mate.refresh_excluded();

  for (Index i = 0; i < n; ++i) {
    const int eps = r.epsilon1[static_cast<std::size_t>(i)];
    if (eps == 0) continue;
    if (!r.epsilon1_schedule.empty() && r.epsilon1_schedule.back().sign == eps &&
        r.epsilon1[static_cast<std::size_t>(i - 1)] == eps) {
      r.epsilon1_schedule.back().hi = grid[i];
    } else {
      r.epsilon1_schedule.push_back({grid[i], grid[i], eps});
    }
  }
  return r;
}

InverseCurvatures inverse_curvatures(const Grid& grid, const Profile& kappa_bar,
                                     const Profile& tau_bar, const std::vector<int>& epsilon1,
                                     const std::optional<Profile>& theta) {
  const Index n = grid.size();
  if (kappa_bar.size() != n || tau_bar.size() != n || static_cast<Index>(epsilon1.size()) != n ||
      (theta && theta->size() != n)) {
    throw Error(ErrorCode::InvalidArgument, "inverse_curvatures: profile sizes differ from grid");
  }
  Profile ratio = Profile::Constant(n, kNaN);
  for (Index i = 0; i < n; ++i) {
    if (epsilon1[static_cast<std::size_t>(i)] == 0 || !std::isfinite(kappa_bar[i])) continue;
    if (kappa_bar[i] == 0.0 && tau_bar[i] == 0.0) {
      throw Error(ErrorCode::ZeroDenominator,
                  "kappa_bar^2 + tau_bar^2 = 0 at s=" + std::to_string(grid[i]));
    }
    if (!(kappa_bar[i] > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "inverse_curvatures: kappa_bar must be positive");
    }
    ratio[i] = tau_bar[i] / kappa_bar[i];
  }
  const Profile ratio_rate = derivative_profile(grid, ratio, 1);

  InverseCurvatures r;
  r.kappa = Profile::Constant(n, kNaN);
  r.tau = Profile::Constant(n, kNaN);
  r.tau_branch.assign(static_cast<std::size_t>(n), 0);
  r.tau_sign_ambiguous = !theta.has_value();
  double kappa_scale = 0.0;
  for (Index i = 0; i < n; ++i) {
    if (!std::isfinite(ratio[i])) continue;
    const double w2 = kappa_bar[i] * kappa_bar[i] + tau_bar[i] * tau_bar[i];
    if (!(w2 > 0.0)) {
      throw Error(ErrorCode::ZeroDenominator,
                  "kappa_bar^2 + tau_bar^2 = 0 at s=" + std::to_string(grid[i]));
    }
    const int eps = epsilon1[static_cast<std::size_t>(i)];
    r.kappa[i] = eps * kappa_bar[i] * kappa_bar[i] / w2 * ratio_rate[i];
    int branch = 1;
    if (theta) branch = eps * (std::cos((*theta)[i]) >= 0.0 ? 1 : -1);
    r.tau_branch[static_cast<std::size_t>(i)] = branch;
    r.tau[i] = branch * std::sqrt(w2);
    if (std::isfinite(r.kappa[i])) kappa_scale = std::max(kappa_scale, std::abs(r.kappa[i]));
  }
  const double floor = 1e-6 * std::max(1.0, kappa_scale);
  for (Index i = 0; i < n; ++i) {
    if (std::isfinite(r.kappa[i]) && r.kappa[i] < -floor) {
      throw Error(ErrorCode::NegativeKappaRecovered,
                  "recovered kappa " + std::to_string(r.kappa[i]) + " at s=" +
                      std::to_string(grid[i]) + "; the epsilon1 schedule is inconsistent");
    }
  }
  r.source_plane = kappa_scale <= 1e-6;
  return r;
}

InverseCurvatures inverse_curvatures(const MateResult& mate) {
  return inverse_curvatures(mate.mate.grid(), mate.kappa_bar, mate.tau_bar, mate.epsilon1,
                            mate.theta);
}

PositionDecomposition position_decomposition(const MateResult& mate, const SampledCurve& base,
                                             const Vec3& center) {
  const Index n = base.size();
  if (mate.mate.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "position_decomposition: mate and base grids differ");
  }
  const Grid grid = base.grid();
  PositionDecomposition p;
  p.a1.resize(n);
  p.a2.resize(n);
  p.a3.resize(n);
  p.d.resize(n);
  Profile half_d2(n);
  for (Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const auto& f = base.samples[k];
    const Vec3 rel = mate.mate.samples[k].position - center;
    p.a1[i] = rel.dot(f.T);
    p.a2[i] = rel.dot(f.N);
    p.a3[i] = rel.dot(f.B);
    p.d[i] = rel.norm();
    half_d2[i] = 0.5 * rel.squaredNorm();
    const Vec3 rebuilt = p.a1[i] * f.T + p.a2[i] * f.N + p.a3[i] * f.B;
    p.reconstruction_error = std::max(p.reconstruction_error, (rebuilt - rel).norm());
  }
  // d d' = (d^2 / 2)', so (d d')' is the second derivative of d^2 / 2.
  const Profile dd_rate = derivative_profile(grid, half_d2, 2);
  const Profile tau = base.tau();
  const Profile kappa = base.kappa();
  p.h = Profile::Constant(n, kNaN);
  p.h_sphere = Profile::Constant(n, kNaN);
  for (Index i = 0; i < n; ++i) {
    if (mate.epsilon1[static_cast<std::size_t>(i)] == 0) continue;
    const double denom = tau[i] * mate.x2[i];
    p.h[i] = (dd_rate[i] - 1.0) / denom;
    p.h_sphere[i] = -1.0 / denom;
  }
  const Profile h_rate = derivative_profile(grid, p.h, 1);
  const Profile a1_rate = derivative_profile(grid, p.a1, 1);
  for (Index i = 0; i < n; ++i) {
    if (!std::isfinite(p.h[i]) || !std::isfinite(h_rate[i])) continue;
    const double normal_rate = -h_rate[i] / tau[i];
    p.a3_vs_h = std::max(p.a3_vs_h, std::abs(p.a3[i] - p.h[i]));
    p.a2_vs_normal_rate = std::max(p.a2_vs_normal_rate, std::abs(p.a2[i] - normal_rate));
    p.a2_vs_scaled_rate =
        std::max(p.a2_vs_scaled_rate, std::abs(p.a2[i] - normal_rate * dd_rate[i]));
    p.a1_rate_residual = std::max(
        p.a1_rate_residual, std::abs(a1_rate[i] - (mate.x1[i] + kappa[i] * normal_rate)));
  }
  return p;
}

OtMateResult ot_osculating_mate(const SampledCurve& sampled, double a, double b, double theta0,
                                double tol) {
  if (a == 0.0 || !std::isfinite(a) || !std::isfinite(b)) {
    throw Error(ErrorCode::InvalidArgument, "ot_osculating_mate: a must be finite and non-zero");
  }
  require_frenet(sampled);
  const Grid grid = sampled.grid();
  const Index n = grid.size();
  const Profile theta = theta_profile(sampled, theta0);

  OtMateResult r;
  Points beta(static_cast<std::size_t>(n));
  Profile s_fit(n), tan_fit(n);
  Index fit_rows = 0;
  for (Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const auto& f = sampled.samples[k];
    const double sn = std::sin(theta[i]);
    const double cs = std::cos(theta[i]);
    const double arm = grid[i] + b;
    const double m = arm * sn + a * cs;
    const double normal_part = arm * cs - a * sn;
    beta[k] = m * f.T + normal_part * f.N;
    r.validation.consistency_residual =
        std::max(r.validation.consistency_residual, std::abs(normal_part * f.tau));
    if (std::abs(cs) > kMateDeltaMin) {
      s_fit[fit_rows] = grid[i];
      tan_fit[fit_rows] = sn / cs;
      ++fit_rows;
    }
  }

  try {
    r.curve = frenet_from_positions(grid, beta, sampled.name + "-ot-mate");
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotFrenet) throw;
    r.curve.name = sampled.name + "-ot-mate";
    for (Index i = 0; i < n; ++i) {
      FrenetSample f;
      f.s = grid[i];
      f.position = beta[static_cast<std::size_t>(i)];
      f.T = f.N = f.B = Vec3::Constant(kNaN);
      r.curve.samples.push_back(f);
    }
    r.curve.refresh_excluded();
  }
  r.curve.theta0 = theta0;
  r.curve.theta = theta;

  double rect = kNaN;
  double darboux = kNaN;
  for (Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const auto& g = r.curve.samples[k];
    if (!g.excluded()) {
      const double v = std::abs(beta[k].dot(g.N));
      rect = std::isfinite(rect) ? std::max(rect, v) : v;
    }
    // Modified Darboux vector of the mate: (tau_bar / kappa_bar) Tbar + Bbar.
    const auto& f = sampled.samples[k];
    const double signed_kappa = f.tau * std::cos(theta[i]);
    if (std::abs(signed_kappa) < kMateDeltaMin) continue;
    const MateFrame mf = mate_frame(f, theta[i]);
    const double eps = signed_kappa > 0.0 ? 1.0 : -1.0;
    const Vec3 darboux_vec = (f.tau * std::sin(theta[i]) / (eps * signed_kappa)) * mf.T + mf.B;
    const double denom = beta[k].norm() * darboux_vec.norm();
    if (denom > 0.0) {
      const double v = beta[k].cross(darboux_vec).norm() / denom;
      darboux = std::isfinite(darboux) ? std::max(darboux, v) : v;
    }
  }
  r.validation.rectifying_residual = rect;
  r.validation.darboux_residual = darboux;

  if (fit_rows >= 2) {
    Eigen::MatrixXd features(fit_rows, 2);
    features.col(0) = s_fit.head(fit_rows);
    features.col(1).setOnes();
    const Profile target = tan_fit.head(fit_rows);
    r.validation.tan_theta_fit = affine_fit(features, target);
    r.validation.tan_theta_affine =
        r.validation.tan_theta_fit.residual_max <= tol * std::max(1.0, max_abs_finite(target));
  }
  const double tau_scale = std::max(1.0, sampled.tau().cwiseAbs().maxCoeff());
  r.validation.consistent = r.validation.consistency_residual <= tol * tau_scale;
  return r;
}

}  // namespace oscmate
