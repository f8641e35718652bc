#include <oscmate/curve.hpp>

#include <memory>
#include <sstream>

namespace oscmate {

// ---------------------------------------------------------------------------
// SampledCurve

Profile SampledCurve::stations() const {
  Profile s(size());
  for (Index i = 0; i < size(); ++i) s[i] = samples[static_cast<std::size_t>(i)].s;
  return s;
}

Grid SampledCurve::grid() const { return Grid(stations()); }

Profile SampledCurve::kappa() const {
  Profile k(size());
  for (Index i = 0; i < size(); ++i) k[i] = samples[static_cast<std::size_t>(i)].kappa;
  return k;
}

Profile SampledCurve::tau() const {
  Profile t(size());
  for (Index i = 0; i < size(); ++i) t[i] = samples[static_cast<std::size_t>(i)].tau;
  return t;
}

namespace {
template <class Member>
Points collect(const std::vector<FrenetSample>& samples, Member member) {
  Points out;
  out.reserve(samples.size());
  for (const auto& f : samples) out.push_back(f.*member);
  return out;
}
}  // namespace

Points SampledCurve::positions() const { return collect(samples, &FrenetSample::position); }
Points SampledCurve::tangents() const { return collect(samples, &FrenetSample::T); }
Points SampledCurve::normals() const { return collect(samples, &FrenetSample::N); }
Points SampledCurve::binormals() const { return collect(samples, &FrenetSample::B); }

Index SampledCurve::valid_count() const {
  Index n = 0;
  for (const auto& f : samples) n += f.excluded() ? 0 : 1;
  return n;
}

void SampledCurve::refresh_excluded() {
  excluded.clear();
  std::size_t i = 0;
  while (i < samples.size()) {
    if (!samples[i].excluded()) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < samples.size() && samples[j + 1].excluded()) ++j;
    excluded.push_back({samples[i].s, samples[j].s});
    i = j + 1;
  }
}

// ---------------------------------------------------------------------------
// Frenet apparatus

namespace {

void check_in_domain(const Curve& curve, double t) {
  const double slack = 1e-12 * std::max(1.0, std::abs(curve.domain.hi - curve.domain.lo));
  if (!(t >= curve.domain.lo - slack && t <= curve.domain.hi + slack)) {
    std::ostringstream msg;
    msg << "parameter " << t << " outside domain [" << curve.domain.lo << ", " << curve.domain.hi
        << "] of curve '" << curve.name << "'";
    throw Error(ErrorCode::OutOfDomain, msg.str());
  }
}

std::array<Vec3, 3> finite_difference_derivatives(const Curve& curve, double t) {
  const double lo = curve.domain.lo;
  const double hi = curve.domain.hi;
  const double h = std::min(2e-3, (hi - lo) / 16.0);
  if (!(h > 0.0)) throw Error(ErrorCode::OutOfDomain, "curve domain too short for differencing");
  Index left = std::min<Index>(4, static_cast<Index>(std::floor((t - lo) / h)));
  Index right = 8 - left;
  if (t + static_cast<double>(right) * h > hi) {
    right = static_cast<Index>(std::floor((hi - t) / h));
    left = 8 - right;
  }
  Profile stations(9);
  Points pts(9);
  for (Index k = 0; k < 9; ++k) {
    stations[k] = t + static_cast<double>(k - left) * h;
    pts[static_cast<std::size_t>(k)] = curve.position(stations[k]);
  }
  const Grid grid(stations);
  Points second(9);
  for (Index k = 0; k < 9; ++k) {
    second[static_cast<std::size_t>(k)] = derivative_stencil(grid, pts, k, 2);
  }
  return {derivative_stencil(grid, pts, left, 1), second[static_cast<std::size_t>(left)],
          derivative_stencil(grid, second, left, 1)};
}

}  // namespace

std::array<Vec3, 3> derivatives_at(const Curve& curve, double t) {
  check_in_domain(curve, t);
  if (curve.has_analytic_derivatives()) {
    return {curve.derivative[0](t), curve.derivative[1](t), curve.derivative[2](t)};
  }
  return finite_difference_derivatives(curve, t);
}

FrenetSample frenet_from_derivatives(double s, const Vec3& position, const Vec3& d1,
                                     const Vec3& d2, const Vec3& d3) {
  const double speed = d1.norm();
  if (!(speed > 1e-14)) {
    throw Error(ErrorCode::Irregular, "vanishing speed at s=" + std::to_string(s));
  }
  const Vec3 cross = d1.cross(d2);
  const double cn = cross.norm();
  const double kappa = cn / (speed * speed * speed);
  if (!(kappa >= kKappaMin)) {
    throw Error(ErrorCode::NotFrenet,
                "curvature " + std::to_string(kappa) + " below threshold at s=" + std::to_string(s));
  }
  FrenetSample f;
  f.s = s;
  f.position = position;
  f.T = d1 / speed;
  f.B = cross / cn;
  f.N = f.B.cross(f.T);
  f.kappa = kappa;
  f.tau = cross.dot(d3) / (cn * cn);
  return f;
}

FrenetSample frenet_apparatus(const Curve& curve, double s) {
  const auto d = derivatives_at(curve, s);
  return frenet_from_derivatives(s, curve.position(s), d[0], d[1], d[2]);
}

// ---------------------------------------------------------------------------
// Arc-length reparametrization

namespace {

struct ArcTable {
  Curve base;
  Grid grid;
  Profile length;  // arc length from grid start at each station
  double origin_offset = 0.0;

  double speed(double t) const { return derivatives_at(base, t)[0].norm(); }

  double length_at(double t) const {
    static constexpr double x[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                    0.5384693101056831, 0.9061798459386640};
    static constexpr double w[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                    0.4786286704993665, 0.2369268850561891};
    const Index i = grid.bracket(t);
    const double a = grid[i];
    const double half = 0.5 * (t - a);
    const double mid = 0.5 * (t + a);
    double sum = 0.0;
    for (int k = 0; k < 5; ++k) sum += w[k] * speed(mid + half * x[k]);
    return length[i] + half * sum;
  }

  double parameter_at(double s) const {
    const double target = s + origin_offset;
    const double lo = length[0];
    const double hi = length[length.size() - 1];
    const double slack = 1e-12 * std::max(1.0, hi - lo);
    if (target < lo - slack || target > hi + slack) {
      throw Error(ErrorCode::OutOfDomain,
                  "arc length " + std::to_string(s) + " outside reparametrized domain");
    }
    const double* begin = length.data();
    const double* end = begin + length.size();
    Index i = static_cast<Index>(std::upper_bound(begin, end, target) - begin) - 1;
    i = std::clamp<Index>(i, 0, length.size() - 2);
    double ta = grid[i];
    double tb = grid[i + 1];
    const double frac = (target - length[i]) / (length[i + 1] - length[i]);
    double t = ta + std::clamp(frac, 0.0, 1.0) * (tb - ta);
    for (int iter = 0; iter < 60; ++iter) {
      const double residual = length_at(t) - target;
      if (std::abs(residual) < 1e-13 * std::max(1.0, std::abs(target))) break;
      if (residual > 0.0) {
        tb = t;
      } else {
        ta = t;
      }
      double next = t - residual / speed(t);
      if (!(next > ta && next < tb)) next = 0.5 * (ta + tb);
      t = next;
    }
    return t;
  }
};

}  // namespace

Curve arclength_reparametrize(const Curve& curve, const Grid& grid,
                              std::optional<double> arc_origin) {
  check_in_domain(curve, grid.front());
  check_in_domain(curve, grid.back());
  auto table = std::make_shared<ArcTable>(ArcTable{curve, grid, Profile(), 0.0});

  const auto speed = [&](double t) {
    const double v = table->speed(t);
    if (!(v > 1e-12)) {
      throw Error(ErrorCode::Irregular, "vanishing speed at t=" + std::to_string(t));
    }
    return v;
  };
  table->length = cumulative_integral(speed, grid, 0.0);
  if (arc_origin) {
    if (*arc_origin < grid.front() || *arc_origin > grid.back()) {
      throw Error(ErrorCode::OutOfDomain, "arc-length origin outside the grid range");
    }
    table->origin_offset = table->length_at(*arc_origin);
  }

  Curve out;
  out.name = curve.name;
  out.unit_speed = true;
  out.domain = {table->length[0] - table->origin_offset,
                table->length[table->length.size() - 1] - table->origin_offset};
  out.position = [table](double s) { return table->base.position(table->parameter_at(s)); };

  // Chain rule from parameter derivatives r', r'', r''' to arc-length ones.
  auto chain = [table](double s) {
    const double t = table->parameter_at(s);
    const auto r = derivatives_at(table->base, t);
    const double v = r[0].norm();
    const double v1 = r[0].dot(r[1]) / v;
    const double v2 = (r[1].squaredNorm() + r[0].dot(r[2])) / v - v1 * v1 / v;
    const Vec3 u = r[0] / v;
    const Vec3 u1 = r[1] / v - r[0] * (v1 / (v * v));
    const Vec3 u2 = r[2] / v - r[1] * (2.0 * v1 / (v * v)) -
                    r[0] * (v2 / (v * v) - 2.0 * v1 * v1 / (v * v * v));
    return std::array<Vec3, 3>{u, u1 / v, (u2 - u1 * (v1 / v)) / (v * v)};
  };
  out.derivative[0] = [chain](double s) { return chain(s)[0]; };
  out.derivative[1] = [chain](double s) { return chain(s)[1]; };
  out.derivative[2] = [chain](double s) { return chain(s)[2]; };
  return out;
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

FrenetSample excluded_sample(double s, const Vec3& position) {
  FrenetSample f;
  f.s = s;
  f.position = position;
  f.T = f.N = f.B = Vec3::Constant(kNaN);
  return f;
}

bool is_regularity_failure(const Error& e) {
  return e.code() == ErrorCode::NotFrenet || e.code() == ErrorCode::Irregular;
}

}  // namespace

SampledCurve sample_curve(const Curve& curve, const Grid& grid, const std::string& name) {
  SampledCurve out;
  out.name = name.empty() ? curve.name : name;
  out.samples.reserve(static_cast<std::size_t>(grid.size()));
  for (Index i = 0; i < grid.size(); ++i) {
    const double s = grid[i];
    try {
      out.samples.push_back(frenet_apparatus(curve, s));
    } catch (const Error& e) {
      if (!is_regularity_failure(e)) throw;
      out.samples.push_back(excluded_sample(s, curve.position(s)));
    }
  }
  if (out.valid_count() == 0) {
    throw Error(ErrorCode::NotFrenet, "curve '" + out.name + "' has no Frenet station on the grid");
  }
  out.refresh_excluded();
  return out;
}

SampledCurve frenet_from_positions(const Grid& grid, const Points& positions,
                                   const std::string& name) {
  const Points d1 = derivative_profile(grid, positions, 1);
  const Points d2 = derivative_profile(grid, positions, 2);
  const Points d3 = derivative_profile(grid, d2, 1);
  SampledCurve out;
  out.name = name;
  out.samples.reserve(positions.size());
  for (Index i = 0; i < grid.size(); ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (!d1[k].allFinite() || !d2[k].allFinite() || !d3[k].allFinite()) {
      out.samples.push_back(excluded_sample(grid[i], positions[k]));
      continue;
    }
    try {
      out.samples.push_back(frenet_from_derivatives(grid[i], positions[k], d1[k], d2[k], d3[k]));
    } catch (const Error& e) {
      if (!is_regularity_failure(e)) throw;
      out.samples.push_back(excluded_sample(grid[i], positions[k]));
    }
  }
  if (out.valid_count() == 0) {
    throw Error(ErrorCode::NotFrenet, "point track '" + name + "' has no Frenet station");
  }
  out.refresh_excluded();
  return out;
}

// ---------------------------------------------------------------------------
// Synthesis from prescribed curvatures

SampledCurve synthesize_from_curvatures(const std::function<double(double)>& kappa,
                                        const std::function<double(double)>& tau,
                                        const OrthonormalFrame& frame,
                                        const Vec3& initial_position, const Grid& grid,
                                        const std::string& name) {
  Eigen::Matrix3d m;
  m << frame.T, frame.N, frame.B;
  if (!m.allFinite() || !(m.transpose() * m).isApprox(Eigen::Matrix3d::Identity(), 1e-9) ||
      std::abs(m.determinant() - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument, "initial frame is not orthonormal and right-handed");
  }

  const auto curvatures = [&](double s) {
    const double k = kappa(s);
    const double t = tau(s);
    if (!std::isfinite(k) || !std::isfinite(t)) {
      throw Error(ErrorCode::NonFinite, "non-finite curvature at s=" + std::to_string(s));
    }
    if (!(k > 0.0)) {
      throw Error(ErrorCode::NonPositiveKappa,
                  "prescribed curvature " + std::to_string(k) + " at s=" + std::to_string(s));
    }
    return std::pair{k, t};
  };

  using State = Eigen::Matrix<double, 12, 1>;
  const auto field = [&](double s, const State& y) {
    const auto [k, t] = curvatures(s);
    State dy;
    dy.segment<3>(0) = y.segment<3>(3);
    dy.segment<3>(3) = k * y.segment<3>(6);
    dy.segment<3>(6) = -k * y.segment<3>(3) + t * y.segment<3>(9);
    dy.segment<3>(9) = -t * y.segment<3>(6);
    return dy;
  };
  const std::function<void(State&)> reorthonormalize = [](State& y) {
    Vec3 T = y.segment<3>(3).normalized();
    Vec3 N = y.segment<3>(6);
    N = (N - N.dot(T) * T).normalized();
    y.segment<3>(3) = T;
    y.segment<3>(6) = N;
    y.segment<3>(9) = T.cross(N);
  };

  State y0;
  y0 << initial_position, frame.T, frame.N, frame.B;
  const auto states = ode_rk4(field, grid, y0, reorthonormalize);

  SampledCurve out;
  out.name = name;
  out.samples.reserve(states.size());
  for (Index i = 0; i < grid.size(); ++i) {
    const State& y = states[static_cast<std::size_t>(i)];
    const auto [k, t] = curvatures(grid[i]);
    FrenetSample f;
    f.s = grid[i];
    f.position = y.segment<3>(0);
    f.T = y.segment<3>(3);
    f.N = y.segment<3>(6);
    f.B = y.segment<3>(9);
    f.kappa = k;
    f.tau = t;
    out.samples.push_back(f);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Indicatrices and the alternative frame

SampledCurve indicatrix(const SampledCurve& sampled, FrameVector which) {
  if (sampled.valid_count() != sampled.size()) {
    throw Error(ErrorCode::InvalidArgument, "indicatrix needs frames at every station");
  }
  const Grid grid = sampled.grid();
  const Profile k = sampled.kappa();
  const Profile t = sampled.tau();
  Points points;
  Profile speed;
  const char* label = "T";
  switch (which) {
    case FrameVector::T:
      points = sampled.tangents();
      speed = k;
      break;
    case FrameVector::N:
      points = sampled.normals();
      speed = (k.array().square() + t.array().square()).sqrt().matrix();
      label = "N";
      break;
    case FrameVector::B:
      points = sampled.binormals();
      speed = t.cwiseAbs();
      label = "B";
      break;
  }
  if (speed.maxCoeff() < 1e-12) {
    throw Error(ErrorCode::DegenerateIndicatrix,
                std::string(label) + " is stationary along '" + sampled.name + "'");
  }
  const Profile arc = cumulative_integral_sampled(grid, speed, 0.0);
  for (Index i = 0; i + 1 < arc.size(); ++i) {
    if (!(arc[i + 1] > arc[i])) {
      throw Error(ErrorCode::DegenerateIndicatrix,
                  std::string(label) + " is stationary on a sub-interval of '" + sampled.name + "'");
    }
  }
  SampledCurve out = frenet_from_positions(grid, points, sampled.name + "-" + label + "-indicatrix");
  for (Index i = 0; i < out.size(); ++i) out.samples[static_cast<std::size_t>(i)].s = arc[i];
  out.refresh_excluded();
  return out;
}

AlternativeFrame alternative_frame(const FrenetSample& sample, double kappa_prime,
                                   double tau_prime) {
  const double k = sample.kappa;
  const double t = sample.tau;
  const double w2 = k * k + t * t;
  if (!(w2 > 0.0)) {
    throw Error(ErrorCode::ZeroSpeedFrame, "alternative frame undefined for kappa = tau = 0");
  }
  const double w = std::sqrt(w2);
  AlternativeFrame a;
  a.N = sample.N;
  a.W = (t * sample.T + k * sample.B) / w;
  a.C = a.W.cross(a.N);
  a.f = w;
  a.g = (k * tau_prime - t * kappa_prime) / w2;
  return a;
}

}  // namespace oscmate
