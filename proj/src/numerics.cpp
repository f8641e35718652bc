#include <oscmate/numerics.hpp>

#include <array>
#include <sstream>

namespace oscmate {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotFrenet: return "NotFrenet";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::Irregular: return "Irregular";
    case ErrorCode::NonPositiveKappa: return "NonPositiveKappa";
    case ErrorCode::DegenerateIndicatrix: return "DegenerateIndicatrix";
    case ErrorCode::ZeroSpeedFrame: return "ZeroSpeedFrame";
    case ErrorCode::DegenerateMate: return "DegenerateMate";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::NegativeKappaRecovered: return "NegativeKappaRecovered";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownFunction: return "UnknownFunction";
    case ErrorCode::DomainFault: return "DomainFault";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ArgumentError: return "ArgumentError";
  }
  return "Unknown";
}

Grid::Grid(Profile stations) : s_(std::move(stations)) {
  if (s_.size() < 5) {
    throw Error(ErrorCode::InvalidGrid, "grid needs at least 5 stations, got " +
                                            std::to_string(s_.size()));
  }
  if (!s_.allFinite()) throw Error(ErrorCode::InvalidGrid, "grid has non-finite stations");
  for (Index i = 0; i + 1 < s_.size(); ++i) {
    if (!(s_[i + 1] > s_[i])) {
      std::ostringstream msg;
      msg << "grid stations are not strictly increasing at index " << i + 1;
      throw Error(ErrorCode::InvalidGrid, msg.str());
    }
  }
  const double h = mean_step();
  uniform_ = true;
  for (Index i = 0; i + 1 < s_.size(); ++i) {
    if (std::abs((s_[i + 1] - s_[i]) - h) > 1e-9 * h) {
      uniform_ = false;
      break;
    }
  }
}

Grid Grid::uniform(double lo, double hi, Index n) {
  if (n < 5) throw Error(ErrorCode::InvalidGrid, "grid needs at least 5 stations");
  if (!(hi > lo)) throw Error(ErrorCode::InvalidGrid, "grid range must satisfy lo < hi");
  Profile s(n);
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (Index i = 0; i < n; ++i) s[i] = lo + h * static_cast<double>(i);
  s[n - 1] = hi;
  return Grid(std::move(s));
}

Index Grid::bracket(double x) const {
  const double* begin = s_.data();
  const double* end = begin + s_.size();
  const Index i = static_cast<Index>(std::upper_bound(begin, end, x) - begin) - 1;
  return std::clamp<Index>(i, 0, s_.size() - 2);
}

namespace detail {

void fornberg_weights(const double* nodes, int count, double x0, int order, double* weights) {
  // c[k][m]: weight of node k for the m-th derivative.
  std::array<std::array<double, 3>, 8> c{};
  c[0][0] = 1.0;
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  for (int i = 1; i < count; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[i] - nodes[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) {
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  for (int i = 0; i < count; ++i) weights[i] = c[i][order];
}

void five_point_weights(const Grid& grid, Index j, Index i, int order, double* w) {
  if (grid.is_uniform() && i == j + 2) {
    const double h = (grid[j + 4] - grid[j]) / 4.0;
    if (order == 1) {
      const double d = 12.0 * h;
      w[0] = 1.0 / d;
      w[1] = -8.0 / d;
      w[2] = 0.0;
      w[3] = 8.0 / d;
      w[4] = -1.0 / d;
    } else {
      const double d = 12.0 * h * h;
      w[0] = -1.0 / d;
      w[1] = 16.0 / d;
      w[2] = -30.0 / d;
      w[3] = 16.0 / d;
      w[4] = -1.0 / d;
    }
    return;
  }
  // Shift nodes to the evaluation point to keep the recursion well conditioned.
  double nodes[5];
  for (int k = 0; k < 5; ++k) nodes[k] = grid[j + k] - grid[i];
  fornberg_weights(nodes, 5, 0.0, order, w);
}

void check_stencil_args(const Grid& grid, Index n_values, Index index, int order) {
  if (order != 1 && order != 2) {
    throw Error(ErrorCode::InvalidArgument, "derivative_stencil: order must be 1 or 2");
  }
  if (n_values != grid.size()) {
    throw Error(ErrorCode::InvalidArgument, "derivative_stencil: value count does not match grid");
  }
  if (index < 0 || index >= grid.size()) {
    throw Error(ErrorCode::InvalidArgument, "derivative_stencil: index out of range");
  }
}

}  // namespace detail

Profile cumulative_integral(const std::function<double(double)>& f, const Grid& grid,
                            double init) {
  const Index n = grid.size();
  Profile out(n);
  out[0] = init;
  double f_left = f(grid[0]);
  for (Index i = 0; i + 1 < n; ++i) {
    const double a = grid[i];
    const double b = grid[i + 1];
    const double f_mid = f(0.5 * (a + b));
    const double f_right = f(b);
    if (!std::isfinite(f_left) || !std::isfinite(f_mid) || !std::isfinite(f_right)) {
      throw Error(ErrorCode::NonFinite,
                  "cumulative_integral: non-finite integrand on [" + std::to_string(a) + ", " +
                      std::to_string(b) + "]");
    }
    out[i + 1] = out[i] + (b - a) / 6.0 * (f_left + 4.0 * f_mid + f_right);
    f_left = f_right;
  }
  return out;
}

ConstancyResult constancy_test(const Profile& values, double tol_rel, double tol_abs) {
  if (values.size() == 0) throw Error(ErrorCode::InvalidArgument, "constancy_test: empty input");
  if (!values.allFinite()) throw Error(ErrorCode::NonFinite, "constancy_test: non-finite input");
  std::vector<double> sorted(values.data(), values.data() + values.size());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  ConstancyResult r;
  r.level = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  r.spread = sorted.back() - sorted.front();
  r.is_constant = r.spread <= tol_abs + tol_rel * std::max(1.0, std::abs(r.level));
  return r;
}

FitResult affine_fit(const Eigen::MatrixXd& features, const Profile& target) {
  if (features.rows() != target.size()) {
    throw Error(ErrorCode::InvalidArgument, "affine_fit: row count does not match target");
  }
  if (features.cols() < 2) throw Error(ErrorCode::InvalidArgument, "affine_fit: need >= 2 features");
  if (features.rows() < features.cols()) {
    throw Error(ErrorCode::InvalidArgument, "affine_fit: fewer rows than unknowns");
  }
  if (!features.allFinite() || !target.allFinite()) {
    throw Error(ErrorCode::NonFinite, "affine_fit: non-finite input");
  }
  // Singular values of A are square roots of the normal-matrix eigenvalues, so
  // a 1e-10 relative threshold on A^T A is 1e-5 on A.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(1e-5);
  cod.compute(features);

  FitResult r;
  r.coefficients = cod.solve(target);
  r.rank_deficient = cod.rank() < features.cols();
  const Profile residual = features * r.coefficients - target;
  r.residual_rms = std::sqrt(residual.squaredNorm() / static_cast<double>(residual.size()));
  r.residual_max = residual.cwiseAbs().maxCoeff();
  return r;
}

SphereFit sphere_fit(const Points& points) {
  const Index n = static_cast<Index>(points.size());
  if (n < 4) throw Error(ErrorCode::InvalidArgument, "sphere_fit: need at least 4 points");
  Vec3 centroid = Vec3::Zero();
  for (const auto& p : points) {
    if (!p.allFinite()) throw Error(ErrorCode::NonFinite, "sphere_fit: non-finite point");
    centroid += p;
  }
  centroid /= static_cast<double>(n);

  // Work relative to the centroid for conditioning.
  Eigen::MatrixXd a(n, 4);
  Profile b(n);
  for (Index i = 0; i < n; ++i) {
    const Vec3 q = points[static_cast<std::size_t>(i)] - centroid;
    a.row(i) << 2.0 * q.x(), 2.0 * q.y(), 2.0 * q.z(), 1.0;
    b[i] = q.squaredNorm();
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(1e-10);
  cod.compute(a);
  const Eigen::Vector4d x = cod.solve(b);

  SphereFit fit;
  fit.degenerate = cod.rank() < 4;
  const Vec3 c = x.head<3>();
  fit.center = c + centroid;
  fit.radius = std::sqrt(std::max(0.0, x[3] + c.squaredNorm()));
  double sum = 0.0;
  for (const auto& p : points) {
    const double r = (p - fit.center).norm() - fit.radius;
    sum += r * r;
  }
  fit.residual_rms = std::sqrt(sum / static_cast<double>(n));
  return fit;
}

Profile finite_entries(const Profile& values) {
  Profile out(values.size());
  Index k = 0;
  for (Index i = 0; i < values.size(); ++i) {
    if (std::isfinite(values[i])) out[k++] = values[i];
  }
  out.conservativeResize(k);
  return out;
}

double max_abs_finite(const Profile& values) {
  double m = 0.0;
  for (Index i = 0; i < values.size(); ++i) {
    if (std::isfinite(values[i])) m = std::max(m, std::abs(values[i]));
  }
  return m;
}

}  // namespace oscmate
