#include <catch_amalgamated.hpp>

#include <oscmate/catalog.hpp>
#include <oscmate/curve.hpp>

#include "support.hpp"

#include <cmath>
#include <numbers>

using namespace oscmate;
using namespace oscmate::testing;
using Catch::Approx;

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

// The spherical helix in its own parameter t, positions only.
Curve spherical_helix_positions_only() {
  Curve c;
  c.name = "sph";
  c.domain = {-1.55, 1.55};
  c.position = [](double t) -> Vec3 {
    const double r = kSqrt2;
    return {std::sin(t) / r, std::cos(t) * std::cos(r * t) + std::sin(t) * std::sin(r * t) / r,
            -std::cos(t) * std::sin(r * t) + std::sin(t) * std::cos(r * t) / r};
  };
  return c;
}

// Closed-form Frenet frame of the spherical helix in arc length.
struct Ex17Frame {
  Vec3 T, N, B;
};
Ex17Frame ex17_frame(double s) {
  const double u = kSqrt2 * std::asin(s);
  return {Vec3(1, -std::sin(u), -std::cos(u)) * (kSqrt2 / 2), Vec3(0, -std::cos(u), std::sin(u)),
          Vec3(1, std::sin(u), std::cos(u)) * (-kSqrt2 / 2)};
}

void check_orthonormal(const FrenetSample& f) {
  CHECK(std::abs(f.T.norm() - 1) < 1e-9);
  CHECK(std::abs(f.N.norm() - 1) < 1e-9);
  CHECK(std::abs(f.B.norm() - 1) < 1e-9);
  CHECK(std::abs(f.T.dot(f.N)) < 1e-9);
  CHECK(std::abs(f.T.dot(f.B)) < 1e-9);
  CHECK(std::abs(f.N.dot(f.B)) < 1e-9);
  Eigen::Matrix3d m;
  m << f.T, f.N, f.B;
  CHECK(m.determinant() == Approx(1.0).margin(1e-9));
}

}  // namespace

TEST_CASE("frenet_apparatus of the unit-speed circular helix") {
  const FrenetSample f = frenet_apparatus(helix_curve(1, 1), 0.0);
  CHECK((f.T - Vec3(0, 1 / kSqrt2, 1 / kSqrt2)).norm() < 1e-14);
  CHECK((f.N - Vec3(-1, 0, 0)).norm() < 1e-14);
  CHECK(f.kappa == Approx(0.5).epsilon(1e-14));
  CHECK(f.tau == Approx(0.5).epsilon(1e-14));

  Curve fd = helix_curve(1, 1);
  fd.derivative = {};
  const FrenetSample g = frenet_apparatus(fd, 0.3);
  const FrenetSample a = frenet_apparatus(helix_curve(1, 1), 0.3);
  CHECK(std::abs(g.kappa - 0.5) < 1e-6);
  CHECK(std::abs(g.tau - 0.5) < 1e-5);
  CHECK((g.N - a.N).norm() < 1e-6);
}

TEST_CASE("spherical helix curvatures at s = 0 and s = 0.5") {
  const CatalogCurve cc = catalog_curve("paper_spherical_helix");
  const SampledCurve c = cc.sample(Grid::uniform(-0.5, 0.5, 101));
  const FrenetSample& mid = c.samples[50];
  CHECK(std::abs(mid.s) < 1e-15);
  CHECK(mid.kappa == Approx(1.0).epsilon(1e-9));
  CHECK(mid.tau == Approx(-1.0).epsilon(1e-9));
  CHECK((mid.N - Vec3(0, -1, 0)).norm() < 1e-9);
  const FrenetSample& end = c.samples[100];
  CHECK(end.kappa == Approx(1 / std::sqrt(0.75)).epsilon(1e-8));
  CHECK(end.tau == Approx(-1 / std::sqrt(0.75)).epsilon(1e-8));
}

TEST_CASE("spherical helix frames match the closed forms") {
  const SampledCurve c = catalog_curve("paper_spherical_helix").sample(Grid::uniform(-0.9, 0.9, 181));
  for (const auto& f : c.samples) {
    const Ex17Frame e = ex17_frame(f.s);
    CHECK((f.T - e.T).norm() < 1e-7);
    CHECK((f.N - e.N).norm() < 1e-7);
    CHECK((f.B - e.B).norm() < 1e-7);
    CHECK(std::abs(f.position.norm() - 1) < 1e-10);
    check_orthonormal(f);
  }
}

TEST_CASE("straight line is not Frenet") {
  Curve line;
  line.unit_speed = true;
  line.domain = {-10, 10};
  line.position = [](double s) -> Vec3 { return Vec3(s, 2 * s, 0) / std::sqrt(5.0); };
  CHECK(error_of([&] { frenet_apparatus(line, 0.0); }) == ErrorCode::NotFrenet);
  CHECK(error_of([&] { sample_curve(line, Grid::uniform(-1, 1, 21)); }) == ErrorCode::NotFrenet);
  CHECK(error_of([&] { frenet_apparatus(line, 11.0); }) == ErrorCode::OutOfDomain);
}

TEST_CASE("isolated inflection goes to excluded") {
  Curve cubic;
  cubic.domain = {-2, 2};
  cubic.position = [](double t) -> Vec3 { return {t, t * t * t, 0.1 * t}; };
  cubic.derivative[0] = [](double t) -> Vec3 { return {1, 3 * t * t, 0.1}; };
  cubic.derivative[1] = [](double t) -> Vec3 { return {0, 6 * t, 0}; };
  cubic.derivative[2] = [](double) -> Vec3 { return {0, 6, 0}; };
  const SampledCurve c = sample_curve(cubic, Grid::uniform(-1, 1, 21));
  REQUIRE(c.excluded.size() == 1);
  CHECK(c.excluded[0].contains(0.0));
  CHECK(c.samples[10].excluded());
  CHECK(c.valid_count() == 20);
}

TEST_CASE("arclength_reparametrize") {
  SECTION("unit-speed input is unchanged") {
    const Curve h = helix_curve(2, 0.5);
    Curve plain = h;
    plain.unit_speed = false;
    const Curve r = arclength_reparametrize(plain, Grid::uniform(-3, 3, 601), 0.0);
    for (double s : {-2.9, -1.0, 0.0, 0.37, 2.5}) {
      CHECK((r.position(s) - h.position(s)).norm() < 1e-10);
    }
  }
  SECTION("constant speed 2") {
    Curve c;
    c.domain = {-4, 4};
    c.position = [](double t) -> Vec3 { return {std::cos(2 * t), std::sin(2 * t), 0}; };
    const Curve r = arclength_reparametrize(c, Grid::uniform(0, 2, 401), 0.0);
    for (double s : {0.1, 1.0, 3.9}) {
      CHECK((r.position(s) - c.position(s / 2)).norm() < 1e-9);
      CHECK(std::abs(derivatives_at(r, s)[0].norm() - 1) < 1e-9);
    }
  }
  SECTION("spherical helix: s = sin t") {
    const Curve c = spherical_helix_positions_only();
    const Curve r = arclength_reparametrize(c, Grid::uniform(-1.5, 1.5, 3001), 0.0);
    for (double t : {-1.4, -0.7, 0.0, 0.2, 1.1, 1.45}) {
      CHECK((r.position(std::sin(t)) - c.position(t)).norm() < 1e-8);
    }
    const Grid g = Grid::uniform(-0.95, 0.95, 39);
    for (Index i = 0; i < g.size(); ++i) {
      CHECK(std::abs(derivatives_at(r, g[i])[0].norm() - 1) < 1e-8);
    }
  }
  SECTION("vanishing speed") {
    Curve cusp;
    cusp.domain = {-1, 1};
    cusp.position = [](double t) -> Vec3 { return {t * t * t, t * t, 0}; };
    cusp.derivative[0] = [](double t) -> Vec3 { return {3 * t * t, 2 * t, 0}; };
    CHECK(error_of([&] { arclength_reparametrize(cusp, Grid::uniform(-1, 1, 21)); }) ==
          ErrorCode::Irregular);
  }
}

TEST_CASE("Frenet equations hold on analytic catalog curves") {
  for (const char* name : {"circular_helix", "paper_spherical_helix", "planar_circle"}) {
    const CatalogCurve cc = catalog_curve(name);
    const Grid g = Grid::uniform(-0.9, 0.9, 1801);  // step 1e-3
    const SampledCurve c = cc.sample(g);
    const Points dT = derivative_profile(g, c.tangents(), 1);
    const Points dN = derivative_profile(g, c.normals(), 1);
    const Points dB = derivative_profile(g, c.binormals(), 1);
    double worst = 0;
    for (Index i = 0; i < g.size(); ++i) {
      const auto& f = c.samples[static_cast<std::size_t>(i)];
      check_orthonormal(f);
      worst = std::max({worst, (dT[i] - f.kappa * f.N).norm(),
                        (dN[i] + f.kappa * f.T - f.tau * f.B).norm(), (dB[i] + f.tau * f.N).norm()});
    }
    INFO(name);
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("curvatures are invariant under rigid motions") {
  const Curve h = helix_curve(1.3, 0.4);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Eigen::Matrix3d R = random_rotation(seed);
    const Curve m = moved(h, R, Vec3(3, -2, 7));
    for (double s : {-1.0, 0.0, 2.0}) {
      const FrenetSample a = frenet_apparatus(h, s);
      const FrenetSample b = frenet_apparatus(m, s);
      CHECK(std::abs(a.kappa - b.kappa) < 1e-12);
      CHECK(std::abs(a.tau - b.tau) < 1e-12);
      CHECK((R * a.N - b.N).norm() < 1e-12);
    }
  }
}

TEST_CASE("frenet_from_positions works for any regular parametrization") {
  const Curve h = helix_curve(1, 1);
  const Grid tg = Grid::uniform(-1, 1, 2001);
  Points p;
  for (Index i = 0; i < tg.size(); ++i) p.push_back(h.position(3 * tg[i] + tg[i] * tg[i]));
  const SampledCurve c = frenet_from_positions(tg, p, "reparam");
  for (Index i = 5; i < tg.size() - 5; i += 50) {
    CHECK(std::abs(c.samples[static_cast<std::size_t>(i)].kappa - 0.5) < 1e-7);
    CHECK(std::abs(c.samples[static_cast<std::size_t>(i)].tau - 0.5) < 1e-6);
  }
}

TEST_CASE("synthesize_from_curvatures") {
  SECTION("unit circle closes after 2 pi") {
    const Grid g = Grid::uniform(0, 2 * std::numbers::pi, 2001);
    const SampledCurve c = synthesize_from_curvatures([](double) { return 1.0; },
                                                      [](double) { return 0.0; }, {}, Vec3::Zero(), g);
    CHECK((c.samples.back().position - c.samples.front().position).norm() < 1e-6);
    for (const auto& f : c.samples) CHECK(std::abs(f.position.z()) < 1e-12);
  }
  SECTION("constant curvatures give a circular helix") {
    const Grid g = Grid::uniform(0, 4, 4001);
    const SampledCurve c = synthesize_from_curvatures([](double) { return 0.5; },
                                                      [](double) { return 0.5; }, {}, Vec3::Zero(), g);
    const auto [k, t] = curvatures_from_frames(c);
    CHECK((k.array() - 0.5).abs().maxCoeff() < 1e-7);
    CHECK((t.array() - 0.5).abs().maxCoeff() < 1e-7);
  }
  SECTION("spherical helix curvatures give a congruent curve") {
    const Grid g = Grid::uniform(-0.9, 0.9, 3601);
    const SampledCurve syn = synthesize_from_curvatures(
        [](double s) { return 1 / std::sqrt(1 - s * s); },
        [](double s) { return -1 / std::sqrt(1 - s * s); }, {}, Vec3::Zero(), g);
    const SampledCurve ref = catalog_curve("paper_spherical_helix").sample(g);
    const auto [k, t] = curvatures_from_frames(syn);
    CHECK(max_diff(k, ref.kappa()) < 1e-6);
    CHECK(max_diff(t, ref.tau()) < 1e-6);
    // Congruence: pairwise distances agree.
    double worst = 0;
    for (Index i = 0; i < g.size(); i += 120) {
      for (Index j = i + 60; j < g.size(); j += 170) {
        const double a = (syn.samples[i].position - syn.samples[j].position).norm();
        const double b = (ref.samples[i].position - ref.samples[j].position).norm();
        worst = std::max(worst, std::abs(a - b));
      }
    }
    CHECK(worst < 1e-8);
  }
  SECTION("errors") {
    const Grid g = Grid::uniform(-1, 1, 11);
    auto one = [](double) { return 1.0; };
    CHECK(error_of([&] {
            synthesize_from_curvatures([](double s) { return s; }, one, {}, Vec3::Zero(), g);
          }) == ErrorCode::NonPositiveKappa);
    OrthonormalFrame skew;
    skew.B = -skew.B;
    CHECK(error_of([&] { synthesize_from_curvatures(one, one, skew, Vec3::Zero(), g); }) ==
          ErrorCode::InvalidArgument);
  }
}

TEST_CASE("round trip error shrinks at fourth order") {
  auto err = [](Index n) {
    const Grid g = Grid::uniform(0, 2, n);
    auto k = [](double s) { return 1 + 0.3 * std::sin(2 * s); };
    auto t = [](double s) { return 0.5 + 0.2 * std::cos(3 * s); };
    const SampledCurve c = synthesize_from_curvatures(k, t, {}, Vec3::Zero(), g);
    // Compare positions against a much finer reference at the shared endpoint.
    return c.samples.back().position;
  };
  const Vec3 ref = err(16001);
  const double e1 = (err(101) - ref).norm();
  const double e2 = (err(201) - ref).norm();
  CHECK(e1 / e2 > 12.0);
}

TEST_CASE("indicatrices") {
  const SampledCurve helix = catalog_curve("circular_helix").sample(Grid::uniform(-3, 3, 601));
  const SampledCurve ti = indicatrix(helix, FrameVector::T);
  for (const auto& f : ti.samples) {
    CHECK(std::abs(f.position.norm() - 1) < 1e-9);
    CHECK(std::abs(f.position.z() - ti.samples[0].position.z()) < 1e-6);
  }
  // Own arc length: unit-speed track.
  const Points p = ti.positions();
  for (std::size_t i = 1; i < p.size(); ++i) {
    const double ds = ti.samples[i].s - ti.samples[i - 1].s;
    CHECK((p[i] - p[i - 1]).norm() == Approx(ds).epsilon(1e-4));
  }

  const SampledCurve circle = catalog_curve("planar_circle").sample();
  const SampledCurve ni = indicatrix(circle, FrameVector::N);
  for (const auto& f : ni.samples) {
    CHECK(std::abs(f.position.norm() - 1) < 1e-9);
    CHECK(std::abs(f.position.z()) < 1e-12);
  }
  CHECK(error_of([&] { indicatrix(circle, FrameVector::B); }) == ErrorCode::DegenerateIndicatrix);
}

TEST_CASE("alternative frame") {
  FrenetSample plane;
  plane.kappa = 1.0;
  plane.tau = 0.0;
  AlternativeFrame a = alternative_frame(plane, 0.0, 0.0);
  CHECK((a.W - plane.B).norm() < 1e-15);
  CHECK((a.C - plane.B.cross(plane.N)).norm() < 1e-15);
  CHECK((a.C + plane.T).norm() < 1e-15);
  CHECK(a.f == 1.0);

  const FrenetSample h = frenet_apparatus(helix_curve(1, 1), 0.4);
  a = alternative_frame(h, 0.0, 0.0);
  CHECK(a.f == Approx(kSqrt2 / 2));
  CHECK(std::abs(a.g) < 1e-15);

  const SampledCurve ex = catalog_curve("paper_spherical_helix").sample(Grid::uniform(-0.5, 0.5, 101));
  const FrenetSample& f0 = ex.samples[50];
  a = alternative_frame(f0, 0.0, 0.0);  // kappa' = tau' = 0 at s = 0
  CHECK((a.W - (f0.B - f0.T) / kSqrt2).norm() < 1e-9);
  CHECK(a.f == Approx(kSqrt2).epsilon(1e-9));
  CHECK(std::abs(a.C.dot(a.N)) < 1e-12);

  FrenetSample zero;
  zero.kappa = 0.0;
  zero.tau = 0.0;
  CHECK(error_of([&] { alternative_frame(zero, 0, 0); }) == ErrorCode::ZeroSpeedFrame);
}

TEST_CASE("alternative frame derivatives match N' = fC, W' = -gC") {
  const SampledCurve c = catalog_curve("random_frenet", {{"seed", 5}}).sample();
  const Grid g = c.grid();
  const Profile dk = derivative_profile(g, c.kappa(), 1);
  const Profile dt = derivative_profile(g, c.tau(), 1);
  Points W, C, N;
  std::vector<AlternativeFrame> frames;
  for (Index i = 0; i < g.size(); ++i) {
    frames.push_back(alternative_frame(c.samples[static_cast<std::size_t>(i)], dk[i], dt[i]));
    W.push_back(frames.back().W);
    C.push_back(frames.back().C);
    N.push_back(frames.back().N);
  }
  const Points dW = derivative_profile(g, W, 1);
  const Points dN = derivative_profile(g, N, 1);
  const Points dC = derivative_profile(g, C, 1);
  double worst = 0;
  for (Index i = 10; i < g.size() - 10; ++i) {
    const auto& a = frames[static_cast<std::size_t>(i)];
    worst = std::max({worst, (dN[i] - a.f * a.C).norm(), (dW[i] + a.g * a.C).norm(),
                      (dC[i] + a.f * a.N - a.g * a.W).norm()});
  }
  CHECK(worst < 1e-5);
}
