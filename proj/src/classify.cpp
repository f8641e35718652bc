#include <oscmate/classify.hpp>

#include <cstdio>

namespace oscmate {

namespace {

constexpr Index kMinStations = 20;

Profile divide(const Profile& a, const Profile& b) {
  Profile out(a.size());
  for (Index i = 0; i < a.size(); ++i) {
    out[i] = (std::isfinite(a[i]) && std::isfinite(b[i]) && b[i] != 0.0) ? a[i] / b[i] : kNaN;
  }
  return out;
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Largest finite |value|, NaN when nothing is finite.
double max_residual(const Profile& r) {
  return finite_entries(r).size() == 0 ? kNaN : max_abs_finite(r);
}

/// Drops `width` stations at both ends of every finite run. Used where a
/// derivative of a derivative is taken: the one-sided stencils at run ends
/// feed a second stencil and their error is amplified by 1/h.
Profile trim_run_edges(const Profile& values, Index width) {
  Profile out = values;
  const Index n = values.size();
  Index lo = 0;
  while (lo < n) {
    if (!std::isfinite(values[lo])) {
      ++lo;
      continue;
    }
    Index hi = lo;
    while (hi < n && std::isfinite(values[hi])) ++hi;
    for (Index i = lo; i < hi; ++i) {
      if (i < lo + width || i >= hi - width) out[i] = kNaN;
    }
    lo = hi;
  }
  return out;
}

constexpr Index kNestedTrim = 4;
constexpr double kRadicandBand = 1e-9;

Verdict deferred_verdict(std::string note) {
  Verdict v;
  v.deferred = true;
  v.note = std::move(note);
  return v;
}

Verdict constancy_verdict(const Profile& values, const Tolerances& tol, bool nonzero_level = false) {
  const Profile finite = finite_entries(values);
  if (finite.size() < kMinStations) {
    return deferred_verdict("fewer than 20 stations where the profile is defined");
  }
  Verdict v;
  const ConstancyResult c = constancy_test(finite, tol.rel, tol.abs);
  v.constancy = c;
  v.statistic = c.spread;
  v.tolerance = tol.bound(c.level);
  v.holds = c.is_constant;
  if (nonzero_level && std::abs(c.level) <= tol.abs) {
    v.holds = false;
    v.note = "constant level is zero";
  }
  return v;
}

Profile epsilon_profile(const MateResult& mate) {
  Profile e(static_cast<Index>(mate.epsilon1.size()));
  for (Index i = 0; i < e.size(); ++i) {
    const int v = mate.epsilon1[static_cast<std::size_t>(i)];
    e[i] = v == 0 ? kNaN : static_cast<double>(v);
  }
  return e;
}

Profile norm2(const Profile& a, const Profile& b) {
  return (a.array().square() + b.array().square()).sqrt().matrix();
}

/// Rows of (features, target) where every entry is finite.
FitResult finite_fit(const Profile& x0, const Profile& x1, const Profile& target) {
  Eigen::MatrixXd features(target.size(), 2);
  Profile y(target.size());
  Index k = 0;
  for (Index i = 0; i < target.size(); ++i) {
    if (!std::isfinite(x0[i]) || !std::isfinite(x1[i]) || !std::isfinite(target[i])) continue;
    features(k, 0) = x0[i];
    features(k, 1) = x1[i];
    y[k] = target[i];
    ++k;
  }
  if (k < kMinStations) {
    throw Error(ErrorCode::InsufficientSamples, "fewer than 20 stations available for a fit");
  }
  return affine_fit(features.topRows(k), y.head(k));
}

}  // namespace

Profile sigma_profile(const Grid& grid, const Profile& kappa, const Profile& tau) {
  const Profile rate = derivative_profile(grid, divide(tau, kappa), 1);
  const Profile w = norm2(kappa, tau);
  return (kappa.array().square() * rate.array() / w.array().cube()).matrix();
}

Profile mu_profile(const Grid& grid, const Profile& kappa, const Profile& tau) {
  const Profile sigma = sigma_profile(grid, kappa, tau);
  const Profile sigma_rate = derivative_profile(grid, sigma, 1);
  const Profile w = norm2(kappa, tau);
  Profile mu = Profile::Constant(grid.size(), kNaN);
  for (Index i = 0; i < mu.size(); ++i) {
    if (!std::isfinite(sigma_rate[i]) || std::abs(sigma_rate[i]) <= 1e-6) continue;
    mu[i] = w[i] * std::pow(1.0 + sigma[i] * sigma[i], 1.5) / sigma_rate[i];
  }
  return mu;
}

ClassificationReport classify_report(const SampledCurve& sampled, const Tolerances& tol) {
  ClassificationReport rep;
  rep.name = sampled.name;
  rep.tolerances = tol;
  rep.valid_stations = sampled.valid_count();
  if (rep.valid_stations < kMinStations) {
    throw Error(ErrorCode::InsufficientSamples,
                "classification needs at least 20 valid stations, got " +
                    std::to_string(rep.valid_stations));
  }
  const Grid grid = sampled.grid();
  const Profile s = sampled.stations();
  const Profile kappa = sampled.kappa();
  const Profile tau = sampled.tau();
  const Index n = grid.size();
  auto& out = rep.verdicts;

  {
    Verdict v;
    v.statistic = max_abs_finite(tau);
    v.tolerance = tol.bound(0.0);
    v.holds = v.statistic <= v.tolerance;
    out["plane"] = v;
  }

  const Profile ratio = divide(tau, kappa);
  out["general_helix"] = constancy_verdict(ratio, tol);
  if (out["general_helix"].holds) rep.constants["helix_ratio"] = out["general_helix"].constancy->level;

  const Profile sigma = sigma_profile(grid, kappa, tau);
  out["slant_helix"] = constancy_verdict(sigma, tol);
  if (out["slant_helix"].holds) rep.constants["sigma"] = out["slant_helix"].constancy->level;

  out["c_slant_helix"] =
      constancy_verdict(trim_run_edges(mu_profile(grid, kappa, tau), kNestedTrim), tol);
  if (out["c_slant_helix"].deferred) {
    out["c_slant_helix"].note = "sigma' vanishes: mu undefined";
  } else if (out["c_slant_helix"].holds) {
    rep.constants["mu"] = out["c_slant_helix"].constancy->level;
  }

  // Spherical: p^2 + (p'q)^2 constant and (p'q)' + p/q = 0, p = 1/kappa, q = 1/tau.
  {
    const double tau_floor = tol.bound(0.0);
    Profile q = Profile::Constant(n, kNaN);
    for (Index i = 0; i < n; ++i) {
      if (std::isfinite(tau[i]) && std::abs(tau[i]) > tau_floor) q[i] = 1.0 / tau[i];
    }
    const Profile p = kappa.cwiseInverse();
    const Profile pq = (derivative_profile(grid, p, 1).array() * q.array()).matrix();
    const Profile value = (p.array().square() + pq.array().square()).matrix();
    const Profile p_over_q = (p.array() / q.array()).matrix();
    const Profile residual = trim_run_edges(
        (derivative_profile(grid, pq, 1).array() + p_over_q.array()).matrix(), kNestedTrim);
    Verdict v = constancy_verdict(value, tol, true);
    if (v.deferred) {
      v.note = "torsion vanishes: p'q undefined";
    } else {
      const double worst = max_residual(residual);
      const double bound = tol.bound(max_abs_finite(p_over_q));
      if (!(worst <= bound)) {
        v.holds = false;
        v.note = "(p'q)' + p/q = " + short_number(worst) + " exceeds " + short_number(bound);
      }
      rep.constants["sphere_radius"] = std::sqrt(std::max(0.0, v.constancy->level));
      rep.constants["sphere_identity_residual"] = worst;
    }
    out["spherical"] = v;
  }

  // Rectifying: tau/kappa affine in s with non-zero slope.
  {
    Verdict v;
    const FitResult fit = finite_fit(s, Profile::Ones(n), ratio);
    const double scale = max_abs_finite(ratio);
    v.fit = fit;
    v.statistic = fit.residual_max;
    v.tolerance = tol.bound(scale);
    const double rise = std::abs(fit.coefficients[0]) * (grid.back() - grid.front());
    v.holds = fit.residual_max <= v.tolerance && rise > v.tolerance;
    if (fit.residual_max <= v.tolerance && !v.holds) v.note = "tau/kappa constant: zero slope";
    rep.constants["rectifying_slope"] = fit.coefficients[0];
    rep.constants["rectifying_intercept"] = fit.coefficients[1];
    out["rectifying"] = v;
  }

  // Bertrand: c1 kappa + c2 tau = 1.
  {
    Verdict v;
    const FitResult fit = finite_fit(kappa, tau, Profile::Ones(n));
    v.fit = fit;
    v.statistic = fit.residual_max;
    v.tolerance = tol.bound(1.0);
    v.holds = fit.residual_max <= v.tolerance && std::abs(fit.coefficients[0]) > tol.abs;
    if (v.holds && fit.rank_deficient) v.note = "constant curvatures: a one-parameter family of constants fits";
    rep.constants["bertrand_c1"] = fit.coefficients[0];
    rep.constants["bertrand_c2"] = fit.coefficients[1];
    out["bertrand"] = v;
  }

  // Mannheim: kappa / (kappa^2 + tau^2) constant and non-zero.
  {
    const Profile lambda = divide(kappa, norm2(kappa, tau).array().square().matrix());
    out["mannheim"] = constancy_verdict(lambda, tol, true);
    if (out["mannheim"].holds) rep.constants["mannheim_lambda"] = out["mannheim"].constancy->level;
  }

  {
    const Verdict k = constancy_verdict(kappa, tol);
    const Verdict t = constancy_verdict(tau, tol);
    Verdict salk = k;
    salk.holds = k.holds && !t.holds;
    salk.note = "tau spread " + short_number(t.statistic);
    Verdict anti = t;
    anti.holds = t.holds && !k.holds;
    anti.note = "kappa spread " + short_number(k.statistic);
    out["salkowski"] = salk;
    out["anti_salkowski"] = anti;
    if (k.holds) rep.constants["kappa"] = k.constancy->level;
    if (t.holds) rep.constants["tau"] = t.constancy->level;
  }
  return rep;
}

Profile mate_spherical_residual(const SampledCurve& sampled, const Profile& theta, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "sphere radius must be positive");
  const Grid grid = sampled.grid();
  const Profile tau = sampled.tau();
  if (theta.size() != grid.size()) {
    throw Error(ErrorCode::InvalidArgument, "theta profile does not match the grid");
  }
  const Profile cos_x = theta.array().cos().matrix();
  const Profile sin_x = theta.array().sin().matrix();
  const Profile lhs = derivative_profile(grid, Profile(tau.array() * cos_x.array()), 1);
  Profile out = Profile::Constant(grid.size(), kNaN);
  for (Index i = 0; i < out.size(); ++i) {
    const double arg = radius * radius * tau[i] * tau[i] * cos_x[i] * cos_x[i] - 1.0;
    if (!std::isfinite(lhs[i]) || arg < -kRadicandBand) continue;
    // The square root turns a 1e-10 error in the radicand into 1e-5; inside
    // the band the radicand is taken as zero.
    const double root = std::abs(arg) <= kRadicandBand ? 0.0 : std::sqrt(arg);
    const double rhs = tau[i] * tau[i] * sin_x[i] * cos_x[i] * root;
    out[i] = std::min(std::abs(lhs[i] - rhs), std::abs(lhs[i] + rhs));
  }
  return out;
}

IndicatrixCurvatures indicatrix_curvatures(const Grid& grid, const Profile& kappa_bar,
                                           const Profile& tau_bar, FrameVector which) {
  const Index n = grid.size();
  if (kappa_bar.size() != n || tau_bar.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "indicatrix_curvatures: profile sizes differ from grid");
  }
  const Profile w = norm2(kappa_bar, tau_bar);
  const Profile rate = derivative_profile(grid, divide(tau_bar, kappa_bar), 1);
  IndicatrixCurvatures r{Profile::Constant(n, kNaN), Profile::Constant(n, kNaN)};
  switch (which) {
    case FrameVector::T:
      for (Index i = 0; i < n; ++i) {
        if (!(kappa_bar[i] > 0.0)) continue;
        r.kappa_ind[i] = w[i] / kappa_bar[i];
        r.tau_ind[i] = kappa_bar[i] * rate[i] / (w[i] * w[i]);
      }
      break;
    case FrameVector::N: {
      const Profile sigma = sigma_profile(grid, kappa_bar, tau_bar);
      const Profile sigma_rate = derivative_profile(grid, sigma, 1);
      for (Index i = 0; i < n; ++i) {
        if (!(kappa_bar[i] > 0.0)) continue;
        const double lift = 1.0 + sigma[i] * sigma[i];
        r.kappa_ind[i] = std::sqrt(lift);
        r.tau_ind[i] = sigma_rate[i] / (w[i] * lift);
      }
      break;
    }
    case FrameVector::B:
      for (Index i = 0; i < n; ++i) {
        if (!(kappa_bar[i] > 0.0) || !std::isfinite(tau_bar[i]) || tau_bar[i] == 0.0) continue;
        r.kappa_ind[i] = w[i] / tau_bar[i];
        r.tau_ind[i] = -kappa_bar[i] * kappa_bar[i] * rate[i] / (tau_bar[i] * w[i] * w[i]);
      }
      break;
  }
  return r;
}

EquivalenceReport equivalence_report(const SampledCurve& base, const MateResult& mate,
                                     const Tolerances& tol) {
  const Grid grid = base.grid();
  const Profile& kb = mate.kappa_bar;
  const Profile& tb = mate.tau_bar;
  const Profile eps = epsilon_profile(mate);

  auto ratio_of = [&](FrameVector v) {
    const IndicatrixCurvatures c = indicatrix_curvatures(grid, kb, tb, v);
    return divide(c.tau_ind, c.kappa_ind);
  };
  const Profile t_ratio = ratio_of(FrameVector::T);
  const Profile n_ratio = ratio_of(FrameVector::N);
  const Profile b_ratio = ratio_of(FrameVector::B);

  const Profile signed_ratio = (eps.array() * divide(base.kappa(), base.tau()).array()).matrix();
  const Profile sigma = sigma_profile(grid, base.kappa(), base.tau());
  const Profile sigma_bar = sigma_profile(grid, kb, tb);
  const Profile mu_bar = mu_profile(grid, kb, tb);

  EquivalenceReport r;
  r.tangent_vs_base = max_residual(t_ratio - signed_ratio);
  r.normal_vs_base = max_residual(n_ratio + sigma);
  r.binormal_vs_base = max_residual(b_ratio + signed_ratio);
  r.tangent_vs_mate = max_residual(t_ratio - sigma_bar);
  r.binormal_vs_mate = max_residual(b_ratio + sigma_bar);
  r.normal_vs_mu = max_residual(n_ratio - mu_bar.cwiseInverse());

  const ClassificationReport base_rep = classify_report(base, tol);
  const ClassificationReport mate_rep = classify_report(mate.mate, tol);
  r.base_plane = base_rep.at("plane").holds;
  r.mate_plane = mate_rep.at("plane").holds;
  r.base_helix = base_rep.at("general_helix").holds;
  r.base_slant_helix = base_rep.at("slant_helix").holds;
  r.mate_slant_helix = mate_rep.at("slant_helix").holds;
  r.mate_c_slant_helix = mate_rep.at("c_slant_helix").holds;
  r.tangent_indicatrix_helix = constancy_verdict(t_ratio, tol).holds;
  r.binormal_indicatrix_helix = constancy_verdict(b_ratio, tol).holds;
  r.normal_indicatrix_helix = constancy_verdict(n_ratio, tol).holds;
  return r;
}

EquivalenceReport equivalence_from_base(const SampledCurve& base, double theta0,
                                        const Tolerances& tol) {
  try {
    const MateResult mate = osculating_mate(base, theta0);
    return equivalence_report(base, mate, tol);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateMate) throw;
    EquivalenceReport r;
    r.degenerate = true;
    r.base_plane = classify_report(base, tol).at("plane").holds;
    // tau = 0 makes kappa_bar vanish: the mate is a straight line, a plane curve.
    r.mate_plane = true;
    return r;
  }
}

MateCrossChecks mate_cross_checks(const SampledCurve& base, const MateResult& mate,
                                  const Tolerances& tol) {
  const Grid grid = base.grid();
  const Index n = grid.size();
  const Profile s = base.stations();
  const Profile kappa = base.kappa();
  const Profile tau = base.tau();
  const Profile& kb = mate.kappa_bar;
  const Profile& tb = mate.tau_bar;
  const Profile eps = epsilon_profile(mate);
  const Profile w_bar = norm2(kb, tb);
  const Profile sigma_bar = sigma_profile(grid, kb, tb);
  const ClassificationReport base_rep = classify_report(base, tol);
  const ClassificationReport mate_rep = classify_report(mate.mate, tol);

  MateCrossChecks c;

  {
    const double tau_floor = tol.bound(0.0);
    Profile q = Profile::Constant(n, kNaN);
    for (Index i = 0; i < n; ++i) {
      if (std::abs(tau[i]) > tau_floor) q[i] = 1.0 / tau[i];
    }
    const Profile pq = (derivative_profile(grid, q, 1).array() / kappa.array()).matrix();
    const Verdict v =
        constancy_verdict((pq.array().square() + q.array().square()).matrix(), tol, true);
    auto& chk = c.bertrand_from_base;
    chk.applicable = !v.deferred;
    chk.predicted = v.holds;
    chk.observed = mate_rep.at("bertrand").holds;
    chk.residual = v.statistic;
    chk.note = "spread of (p q')^2 + q^2";
  }

  {
    auto& chk = c.base_bertrand_from_mate;
    const Profile lhs = (eps.array() * sigma_bar.array()).matrix();
    const Profile rhs = w_bar.cwiseInverse();
    const FitResult fit = finite_fit(lhs, Profile::Ones(n), rhs);
    chk.predicted = fit.residual_max <= tol.bound(max_abs_finite(rhs)) &&
                    std::abs(fit.coefficients[0]) > tol.abs;
    chk.observed = base_rep.at("bertrand").holds;
    if (chk.observed) {
      const double c1 = base_rep.constants.at("bertrand_c1");
      const double c2 = base_rep.constants.at("bertrand_c2");
      const Profile core = (c1 * lhs - rhs);
      chk.residual = std::min(max_residual(core.array() + c2), max_residual(core.array() - c2));
      chk.note = "residual uses the base's Bertrand constants, better global sign branch";
    } else {
      chk.residual = fit.residual_max;
      chk.note = "residual of the least-squares fit of the mate-side relation";
    }
  }

  {
    auto& chk = c.mannheim_from_base;
    const Profile value = (eps.array() * mate.x2.array() / tau.array()).matrix();
    const Verdict v = constancy_verdict(value, tol, true);
    chk.applicable = !v.deferred;
    chk.predicted = v.holds;
    chk.observed = mate_rep.at("mannheim").holds;
    chk.residual = v.statistic;
  }

  {
    auto& chk = c.base_mannheim_from_mate;
    const Profile value = (eps.array() * w_bar.array() * sigma_bar.array().cube() /
                           (1.0 + sigma_bar.array().square()))
                              .matrix();
    const Verdict v = constancy_verdict(value, tol, true);
    chk.applicable = !v.deferred;
    chk.predicted = v.holds;
    chk.observed = base_rep.at("mannheim").holds;
    chk.residual = v.statistic;
  }

  {
    auto& chk = c.mannheim_curvature_ratio;
    const Profile value = divide(kb, tau).cwiseAbs();
    const Verdict v = constancy_verdict(value, tol, true);
    chk.applicable = !v.deferred;
    chk.predicted = v.holds;
    chk.observed = base_rep.at("mannheim").holds;
    chk.residual = v.statistic;
  }

  {
    auto& chk = c.salkowski_sec_form;
    chk.applicable = base_rep.at("salkowski").holds;
    chk.observed = mate_rep.at("salkowski").holds;
    if (chk.applicable) {
      const double e1 = base_rep.constants.at("kappa");
      const double e2 = mate.mate.theta0.value_or(0.0) - e1 * theta_anchor(grid);
      const double e3 = constancy_test(finite_entries(kb), tol.rel, tol.abs).level;
      Profile r(n);
      for (Index i = 0; i < n; ++i) {
        r[i] = tau[i] - eps[i] * e3 / std::cos(e1 * s[i] + e2);
      }
      chk.residual = max_residual(r);
      chk.predicted = chk.residual <= tol.bound(max_abs_finite(tau));
      chk.note = "e1=" + short_number(e1) + " e2=" + short_number(e2) + " e3=" + short_number(e3);
    }
  }

  const double c_level = constancy_test(finite_entries(kappa), tol.rel, tol.abs).level;
  if (mate_rep.at("salkowski").holds) {
    const double e4 = mate_rep.constants.at("kappa");
    const Profile d1 = derivative_profile(grid, tb, 1);
    const Profile d2 = derivative_profile(grid, tb, 2);
    c.salkowski_tau_ode = max_residual(
        (eps.array() * e4 * d2.array() - 2.0 * c_level * tb.array() * d1.array()).matrix());
  }
  if (mate_rep.at("anti_salkowski").holds) {
    const double e5 = mate_rep.constants.at("tau");
    const Profile d1 = derivative_profile(grid, kb, 1);
    const Profile d2 = derivative_profile(grid, kb, 2);
    c.anti_salkowski_kappa_ode = max_residual(
        (eps.array() * e5 * d2.array() + 2.0 * c_level * kb.array() * d1.array()).matrix());
  }
  return c;
}

}  // namespace oscmate
