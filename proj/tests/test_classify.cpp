#include <catch_amalgamated.hpp>

#include <oscmate/catalog.hpp>
#include <oscmate/classify.hpp>

#include "support.hpp"

#include <cmath>
#include <numbers>

using namespace oscmate;
using namespace oscmate::testing;
using Catch::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

SampledCurve sphelix() { return catalog_curve("paper_spherical_helix").sample(); }

SampledCurve synth(std::function<double(double)> k, std::function<double(double)> t, double lo,
                   double hi, Index n, const std::string& name = "synth") {
  return synthesize_from_curvatures(std::move(k), std::move(t), {}, Vec3::Zero(),
                                    Grid::uniform(lo, hi, n), name);
}

// Slant helix with kappa = 1 and sigma = c: tau = u / sqrt(1 - u^2), u = c s + d.
// With c = d = 0.5 on [-0.6, 0.8], tau stays in [0.2, 2.1].
SampledCurve slant_base(double c, double d = 0.5) {
  return synth([](double) { return 1.0; },
               [c, d](double s) { return (c * s + d) / std::sqrt(1 - (c * s + d) * (c * s + d)); },
               -0.6, 0.8, 1401);
}

// Bertrand base 0.5 kappa + 0.8 tau = 1 with non-constant curvatures.
SampledCurve bertrand_base() {
  return synth([](double s) { return 1.2 - 0.32 * std::sin(s); },
               [](double s) { return 0.5 + 0.2 * std::sin(s); }, -1, 1, 2001, "bertrand");
}

}  // namespace

TEST_CASE("sigma profiles") {
  const Grid g = Grid::uniform(-1, 1, 201);
  const Profile half = Profile::Constant(g.size(), 0.5);
  CHECK(sigma_profile(g, half, half).cwiseAbs().maxCoeff() < 1e-12);

  const Profile kb = Profile::Ones(g.size());
  const Grid e = Grid::uniform(-0.9, 0.9, 1801);
  const Profile tb = eval_on(e, [](double s) { return -s / std::sqrt(1 - s * s); });
  CHECK(max_diff(sigma_profile(e, Profile::Ones(e.size()), tb), Profile::Constant(e.size(), -1.0)) <
        1e-6);

  // Mate of the circular helix: sigma_bar = eps1.
  const Grid h = Grid::uniform(-2, 2, 2001);
  const Profile khb = eval_on(h, [](double s) { return std::abs(std::cos(s / 2)) / 2; });
  const Profile thb = eval_on(h, [](double s) { return std::sin(s / 2) / 2; });
  CHECK(max_diff(sigma_profile(h, khb, thb), Profile::Ones(h.size())) < 1e-8);
}

TEST_CASE("mu profiles") {
  SECTION("constant sigma leaves mu undefined and the verdict deferred") {
    const SampledCurve c = slant_base(0.5);
    const Profile mu = mu_profile(c.grid(), c.kappa(), c.tau());
    // Nested one-sided stencils at the 4 end stations are not trusted.
    CHECK(finite_entries(mu.segment(4, mu.size() - 8)).size() == 0);
    const ClassificationReport r = classify_report(c);
    CHECK(r.at("slant_helix").holds);
    CHECK(r.constants.at("sigma") == Approx(0.5).margin(1e-6));
    CHECK(r.at("c_slant_helix").deferred);
    CHECK_FALSE(r.at("c_slant_helix").holds);
  }
  SECTION("random curves are not C-slant helices") {
    const SampledCurve c = catalog_curve("random_frenet", {{"seed", 4}}).sample();
    const Profile mu = mu_profile(c.grid(), c.kappa(), c.tau());
    CHECK(finite_entries(mu).size() > 100);
    CHECK_FALSE(classify_report(c).at("c_slant_helix").holds);
  }
}

TEST_CASE("verdicts on the catalog") {
  SECTION("circular helix") {
    const ClassificationReport r = classify_report(catalog_curve("circular_helix").sample());
    CHECK_FALSE(r.at("plane").holds);
    CHECK(r.at("general_helix").holds);
    CHECK(r.at("slant_helix").holds);
    CHECK(r.constants.at("sigma") == Approx(0.0).margin(1e-9));
    CHECK(r.at("bertrand").holds);
    REQUIRE(r.at("bertrand").fit.has_value());
    CHECK(r.at("bertrand").fit->rank_deficient);
    CHECK(r.at("mannheim").holds);
    CHECK(r.constants.at("mannheim_lambda") == Approx(1.0).margin(1e-9));
    CHECK(r.at("mannheim").constancy->spread < 1e-9);
    CHECK_FALSE(r.at("spherical").holds);
    CHECK_FALSE(r.at("rectifying").holds);
    CHECK_FALSE(r.at("salkowski").holds);
  }
  SECTION("spherical helix") {
    const ClassificationReport r = classify_report(sphelix());
    CHECK(r.at("spherical").holds);
    CHECK(r.constants.at("sphere_radius") == Approx(1.0).margin(1e-6));
    CHECK(r.at("general_helix").holds);
    CHECK(r.constants.at("helix_ratio") == Approx(-1.0).margin(1e-9));
    CHECK_FALSE(r.at("plane").holds);
  }
  SECTION("planar circle") {
    const ClassificationReport r = classify_report(catalog_curve("planar_circle").sample());
    CHECK(r.at("plane").holds);
    CHECK(r.at("spherical").deferred);
  }
  SECTION("salkowski and anti-salkowski") {
    CHECK(classify_report(catalog_curve("salkowski").sample()).at("salkowski").holds);
    const ClassificationReport rb = classify_report(catalog_curve("rectifying_base").sample());
    CHECK(rb.at("anti_salkowski").holds);
    CHECK_FALSE(rb.at("salkowski").holds);
    CHECK_FALSE(rb.at("rectifying").holds);  // tau/kappa = 1 + s^2
  }
  SECTION("random curve") {
    const ClassificationReport r = classify_report(catalog_curve("random_frenet", {{"seed", 1}}).sample());
    for (const char* key : {"plane", "general_helix", "slant_helix", "spherical", "rectifying",
                            "bertrand", "mannheim", "salkowski", "anti_salkowski"}) {
      INFO(key);
      CHECK_FALSE(r.at(key).holds);
    }
  }
  SECTION("expected verdicts recorded in the catalog") {
    for (const auto& info : catalog_entries()) {
      const CatalogCurve cc = info.name == "random_frenet" ? catalog_curve(info.name, {{"seed", 0}})
                                                           : catalog_curve(info.name);
      const ClassificationReport r = classify_report(cc.sample());
      for (const auto& [key, value] : cc.expected_verdicts) {
        INFO(info.name << " " << key);
        CHECK(r.at(key).holds == value);
      }
    }
  }
}

TEST_CASE("verdicts on mates") {
  SECTION("mate of spherical helix") {
    const MateResult m = osculating_mate(sphelix(), 0.0);
    const ClassificationReport r = classify_report(m.mate);
    CHECK(r.at("salkowski").holds);
    CHECK(r.at("salkowski").constancy->spread < 1e-5);
    CHECK(r.at("slant_helix").holds);
    CHECK(r.constants.at("sigma") == Approx(-1.0).margin(1e-6));
    // kappa_bar constant with tau_bar != 0: no constant-curvature spherical curve other
    // than a circle exists, so this mate is not spherical.
    CHECK_FALSE(r.at("spherical").holds);
  }
  SECTION("mate of a rectifying base is rectifying") {
    const MateResult m = osculating_mate(catalog_curve("rectifying_base").sample(), 0.0);
    const ClassificationReport r = classify_report(m.mate);
    CHECK(r.at("rectifying").holds);
    CHECK(r.constants.at("rectifying_slope") == Approx(1.0).margin(1e-6));
  }
  SECTION("mate of the salkowski entry is a salkowski curve with unit curvature") {
    const MateResult m = osculating_mate(catalog_curve("salkowski").sample(), 0.0);
    const ClassificationReport r = classify_report(m.mate);
    CHECK(r.at("salkowski").holds);
    CHECK(r.constants.at("kappa") == Approx(1.0).margin(1e-9));
  }
}

TEST_CASE("spherical double characterization splits on constant-curvature curves") {
  // p = 1/kappa constant makes p^2 + (p'q)^2 constant while (p'q)' + p/q = tau/kappa.
  const SampledCurve c = catalog_curve("circular_helix").sample();
  const Grid g = c.grid();
  const Profile p = c.kappa().cwiseInverse();
  const Profile q = c.tau().cwiseInverse();
  const Profile pq = (derivative_profile(g, p, 1).array() * q.array()).matrix();
  const Profile first = (p.array().square() + pq.array().square()).matrix();
  const Profile second = (derivative_profile(g, pq, 1).array() + p.array() / q.array()).matrix();
  CHECK(constancy_test(first, 1e-6, 1e-9).is_constant);
  CHECK(second.cwiseAbs().minCoeff() == Approx(1.0).margin(1e-9));
  CHECK_FALSE(classify_report(c).at("spherical").holds);
}

TEST_CASE("mate spherical residual") {
  const SampledCurve e = sphelix();
  const Profile theta = theta_profile(e, 0.0);
  CHECK(max_abs_finite(mate_spherical_residual(e, theta, 1.0)) < 1e-6);
  CHECK(finite_entries(mate_spherical_residual(e, theta, 1.0)).size() == e.size());

  // tau cos(theta) = 1 on the salkowski entry, so a = 1 zeroes both sides.
  const SampledCurve s = catalog_curve("salkowski").sample();
  CHECK(max_abs_finite(mate_spherical_residual(s, theta_profile(s, 0.0), 1.0)) < 1e-6);

  const SampledCurve h = catalog_curve("circular_helix").sample();
  const Profile r = finite_entries(mate_spherical_residual(h, theta_profile(h, 0.0), 10.0));
  REQUIRE(r.size() > 100);
  std::vector<double> mags(r.data(), r.data() + r.size());
  for (auto& v : mags) v = std::abs(v);
  std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
  CHECK(mags[mags.size() / 2] > 1e-2);

  CHECK(error_of([&] { mate_spherical_residual(e, theta, -1.0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("indicatrix curvature formulas") {
  const Grid g = Grid::uniform(0, 1, 101);
  const Profile c = Profile::Constant(101, 0.7);
  const IndicatrixCurvatures t = indicatrix_curvatures(g, c, c, FrameVector::T);
  CHECK(max_diff(t.kappa_ind, Profile::Constant(101, std::sqrt(2.0))) < 1e-12);
  CHECK(t.tau_ind.cwiseAbs().maxCoeff() < 1e-12);

  const MateResult m = osculating_mate(sphelix(), 0.0);
  const Grid e = m.mate.grid();
  const IndicatrixCurvatures ti = indicatrix_curvatures(e, m.kappa_bar, m.tau_bar, FrameVector::T);
  const IndicatrixCurvatures bi = indicatrix_curvatures(e, m.kappa_bar, m.tau_bar, FrameVector::B);
  const Profile rt = (ti.tau_ind.array() / ti.kappa_ind.array()).matrix();
  const Profile rb = (bi.tau_ind.array() / bi.kappa_ind.array()).matrix();
  CHECK(max_diff(rt, Profile::Constant(e.size(), -1.0)) < 1e-6);
  CHECK(max_diff(rb, Profile::Constant(e.size(), 1.0)) < 1e-6);
}

TEST_CASE("indicatrix curvature formulas match numerically traced indicatrices") {
  const SampledCurve c = catalog_curve("random_frenet", {{"seed", 6}}).sample();
  const Grid g = c.grid();
  for (FrameVector which : {FrameVector::T, FrameVector::N, FrameVector::B}) {
    INFO(static_cast<int>(which));
    const IndicatrixCurvatures formula = indicatrix_curvatures(g, c.kappa(), c.tau(), which);
    const SampledCurve traced = indicatrix(c, which);
    REQUIRE(traced.size() == c.size());
    double worst_k = 0, worst_t = 0;
    for (Index i = 20; i < g.size() - 20; ++i) {
      const auto& f = traced.samples[static_cast<std::size_t>(i)];
      worst_k = std::max(worst_k, std::abs(f.kappa - formula.kappa_ind[i]) / formula.kappa_ind[i]);
      worst_t = std::max(worst_t, std::abs(f.tau - formula.tau_ind[i]) /
                                      std::max(1.0, std::abs(formula.tau_ind[i])));
    }
    CHECK(worst_k < 1e-3);
    CHECK(worst_t < 1e-3);
  }
}

TEST_CASE("binormal-type formulas do not describe the principal normal indicatrix") {
  const SampledCurve c = catalog_curve("random_frenet", {{"seed", 6}}).sample();
  const IndicatrixCurvatures b = indicatrix_curvatures(c.grid(), c.kappa(), c.tau(), FrameVector::B);
  const SampledCurve n = indicatrix(c, FrameVector::N);
  double gap = 0;
  for (Index i = 20; i < c.size() - 20; ++i) {
    gap = std::max(gap, std::abs(n.samples[static_cast<std::size_t>(i)].kappa - b.kappa_ind[i]));
  }
  CHECK(gap > 0.1);
}

TEST_CASE("equivalence reports") {
  SECTION("circular helix base") {
    const EquivalenceReport r =
        equivalence_from_base(catalog_curve("circular_helix").sample(), 0.0);
    CHECK_FALSE(r.degenerate);
    CHECK(r.tangent_vs_base < 1e-4);
    CHECK(r.normal_vs_base < 1e-4);
    CHECK(r.binormal_vs_base < 1e-4);
    CHECK(r.tangent_vs_mate < 1e-6);
    CHECK(r.binormal_vs_mate < 1e-6);
    CHECK(r.base_helix);
    CHECK(r.mate_slant_helix);
    CHECK(r.tangent_indicatrix_helix);
    CHECK(r.binormal_indicatrix_helix);
  }
  SECTION("plane base") {
    const EquivalenceReport r = equivalence_from_base(catalog_curve("planar_circle").sample());
    CHECK(r.degenerate);
    CHECK(r.base_plane);
    CHECK(r.mate_plane);
  }
  SECTION("non-helix base") {
    const SampledCurve c = synth([](double) { return 1.0; }, [](double s) { return s; }, -1, 1, 2001);
    const EquivalenceReport r = equivalence_from_base(c);
    CHECK_FALSE(r.base_helix);
    CHECK_FALSE(r.mate_slant_helix);
  }
  SECTION("spherical helix base: kappa/tau identities carry the sign of tau") {
    const EquivalenceReport r = equivalence_from_base(sphelix());
    CHECK(r.tangent_vs_mate < 1e-6);
    CHECK(r.binormal_vs_mate < 1e-6);
    CHECK(r.tangent_vs_base == Approx(2.0).margin(1e-4));
    CHECK(r.binormal_vs_base == Approx(2.0).margin(1e-4));
    CHECK(r.base_helix);
    CHECK(r.mate_slant_helix);
  }
  SECTION("slant helix base: mate is C-slant with 1/mu_bar = -sigma") {
    const EquivalenceReport r = equivalence_from_base(slant_base(0.5));
    CHECK(r.base_slant_helix);
    CHECK(r.mate_c_slant_helix);
    CHECK(r.normal_indicatrix_helix);
    CHECK(r.normal_vs_base < 1e-3);
    CHECK(r.normal_vs_mu < 1e-3);
  }
  SECTION("principal normal identity flips sign where cos(theta) < 0") {
    const SampledCurve c = catalog_curve("random_frenet", {{"seed", 8}}).sample();
    const EquivalenceReport plus = equivalence_from_base(c, 0.0);
    const EquivalenceReport minus = equivalence_from_base(c, kPi);
    CHECK(plus.normal_vs_base < 1e-4);
    const Profile sigma = sigma_profile(c.grid(), c.kappa(), c.tau());
    CHECK(minus.normal_vs_base == Approx(2 * max_abs_finite(sigma)).epsilon(1e-2));
    CHECK(minus.normal_vs_mu < 1e-4);
  }
}

TEST_CASE("classification is invariant under rigid motions") {
  const CatalogCurve cc = catalog_curve("paper_spherical_helix");
  const Grid tg = Grid::uniform(-1.2, 1.2, 2401);
  const Grid sg = Grid::uniform(-0.9, 0.9, 1801);
  const SampledCurve ref = sample_curve(arclength_reparametrize(*cc.curve, tg, 0.0), sg);
  const ClassificationReport r0 = classify_report(ref);
  const Profile sigma0 = sigma_profile(sg, ref.kappa(), ref.tau());
  for (std::uint64_t seed : {21u, 22u, 23u}) {
    const Curve m = moved(*cc.curve, random_rotation(seed), Vec3(1, -4, 0.5));
    const SampledCurve c = sample_curve(arclength_reparametrize(m, tg, 0.0), sg);
    CHECK(max_diff(c.kappa(), ref.kappa()) < 1e-9);
    CHECK(max_diff(c.tau(), ref.tau()) < 1e-9);
    CHECK(max_diff(sigma_profile(sg, c.kappa(), c.tau()), sigma0) < 1e-9);
    const ClassificationReport r = classify_report(c);
    for (const auto& [key, v] : r0.verdicts) {
      INFO(key);
      CHECK(r.at(key).holds == v.holds);
    }
  }
  for (std::uint64_t seed : {31u, 32u}) {
    const Curve h = moved(helix_curve(0.7, 1.9), random_rotation(seed), Vec3(2, 2, 2));
    const ClassificationReport r = classify_report(sample_curve(h, Grid::uniform(-2, 2, 801)));
    CHECK(r.at("general_helix").holds);
    CHECK(r.at("bertrand").holds);
    CHECK(r.at("mannheim").holds);
  }
}

TEST_CASE("cross checks between a base and its mate") {
  SECTION("circular helix") {
    const SampledCurve base = catalog_curve("circular_helix").sample(-3, 3, 3001);
    const MateCrossChecks x = mate_cross_checks(base, osculating_mate(base, 0.0));
    // (p q')^2 + q^2 is constant for every helix, yet the mate is not Bertrand.
    CHECK(x.bertrand_from_base.predicted);
    CHECK_FALSE(x.bertrand_from_base.observed);
    // kappa_bar / tau = |cos theta| is never constant on a Frenet base.
    CHECK_FALSE(x.mannheim_curvature_ratio.predicted);
    CHECK(x.mannheim_curvature_ratio.observed);
    CHECK_FALSE(x.mannheim_curvature_ratio.agrees());
  }
  SECTION("Bertrand base with non-constant curvatures") {
    const SampledCurve base = bertrand_base();
    const ClassificationReport r = classify_report(base);
    CHECK(r.at("bertrand").holds);
    CHECK_FALSE(r.at("bertrand").fit->rank_deficient);
    CHECK(r.constants.at("bertrand_c1") == Approx(0.5).margin(1e-6));
    CHECK(r.constants.at("bertrand_c2") == Approx(0.8).margin(1e-6));
    const MateCrossChecks x = mate_cross_checks(base, osculating_mate(base, 0.0));
    CHECK(x.base_bertrand_from_mate.observed);
    CHECK(x.base_bertrand_from_mate.residual < 1e-3);
  }
  SECTION("salkowski base: sec form of the torsion") {
    const SampledCurve base = catalog_curve("salkowski").sample();
    const MateCrossChecks x = mate_cross_checks(base, osculating_mate(base, 0.0));
    CHECK(x.salkowski_sec_form.applicable);
    CHECK(x.salkowski_sec_form.observed);
    CHECK(x.salkowski_sec_form.residual < 1e-6);
    CHECK(x.salkowski_sec_form.agrees());
    CHECK(std::isfinite(x.salkowski_tau_ode));
  }
}

TEST_CASE("classification needs enough stations") {
  const SampledCurve c = catalog_curve("circular_helix").sample(-1, 1, 15);
  CHECK(error_of([&] { classify_report(c); }) == ErrorCode::InsufficientSamples);
}
