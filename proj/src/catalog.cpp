#include <oscmate/catalog.hpp>

#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

namespace oscmate {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEndMargin = 1e-3;

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

[[noreturn]] void invalid(const std::string& entry, const std::string& why) {
  throw Error(ErrorCode::InvalidParams, entry + ": " + why);
}

const CatalogInfo& find_info(const std::string& name) {
  for (const auto& e : catalog_entries()) {
    if (e.name == name) return e;
  }
  std::string known;
  for (const auto& e : catalog_entries()) known += (known.empty() ? "" : ", ") + e.name;
  throw Error(ErrorCode::UnknownName, "unknown catalog curve '" + name + "' (known: " + known + ")");
}

std::map<std::string, double> resolve(const CatalogInfo& info,
                                      const std::map<std::string, double>& given) {
  std::map<std::string, double> out;
  for (const auto& [key, value] : given) {
    const bool known = std::any_of(info.params.begin(), info.params.end(),
                                   [&](const CatalogParam& p) { return p.name == key; });
    if (!known) invalid(info.name, "unknown parameter '" + key + "'");
    if (!std::isfinite(value)) invalid(info.name, "parameter '" + key + "' is not finite");
  }
  for (const auto& p : info.params) {
    const auto it = given.find(p.name);
    if (it != given.end()) {
      out[p.name] = it->second;
    } else if (p.default_value) {
      out[p.name] = *p.default_value;
    } else {
      invalid(info.name, "parameter '" + p.name + "' is required");
    }
  }
  return out;
}

/// Uniform double in [0, 1) from the top 53 bits, identical on every platform.
double unit_draw(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

struct SineSeries {
  double base = 0.0;
  std::array<double, 3> amp{}, freq{}, phase{};

  double operator()(double s) const {
    double v = base;
    for (std::size_t j = 0; j < amp.size(); ++j) v += amp[j] * std::sin(freq[j] * s + phase[j]);
    return v;
  }
};

SineSeries random_series(std::mt19937_64& g, double base, double total_amplitude) {
  SineSeries f;
  f.base = base;
  for (std::size_t j = 0; j < 3; ++j) {
    f.amp[j] = (2.0 * unit_draw(g) - 1.0) * total_amplitude / 3.0;
    f.freq[j] = 0.5 + 1.5 * unit_draw(g);
    f.phase[j] = 2.0 * kPi * unit_draw(g);
  }
  return f;
}

Curve spherical_helix_in_t() {
  const double c = std::sqrt(2.0);
  // alpha'(t) = u(t) e(t) with u = cos(t)/sqrt2 and e = (1, -sin(ct), -cos(ct)).
  auto e = [c](double t, int k) -> Vec3 {
    const double sn = std::sin(c * t);
    const double cs = std::cos(c * t);
    switch (k) {
      case 0: return {1.0, -sn, -cs};
      case 1: return {0.0, -c * cs, c * sn};
      default: return {0.0, 2.0 * sn, 2.0 * cs};
    }
  };
  Curve curve;
  curve.name = "paper_spherical_helix";
  curve.domain = {-kPi / 2 + kEndMargin, kPi / 2 - kEndMargin};
  curve.position = [c](double t) {
    return Vec3(std::sin(t) / c, std::cos(t) * std::cos(c * t) + std::sin(t) * std::sin(c * t) / c,
                -std::cos(t) * std::sin(c * t) + std::sin(t) * std::cos(c * t) / c);
  };
  curve.derivative[0] = [c, e](double t) { return Vec3(std::cos(t) / c * e(t, 0)); };
  curve.derivative[1] = [c, e](double t) {
    return Vec3(-std::sin(t) / c * e(t, 0) + std::cos(t) / c * e(t, 1));
  };
  curve.derivative[2] = [c, e](double t) {
    return Vec3(-std::cos(t) / c * e(t, 0) - 2.0 * std::sin(t) / c * e(t, 1) +
                std::cos(t) / c * e(t, 2));
  };
  return curve;
}

}  // namespace

const std::vector<CatalogInfo>& catalog_entries() {
  static const std::vector<CatalogInfo> entries = {
      {"circular_helix", "unit-speed (r cos(s/c), r sin(s/c), h s/c), c = sqrt(r^2+h^2)",
       {{"r", 1.0, "radius, > 0"}, {"h", 1.0, "pitch parameter, != 0"}},
       "r/(r^2+h^2)", "h/(r^2+h^2)"},
      {"paper_spherical_helix",
       "spherical helix on the unit sphere, parameter t with arc length s = sin t",
       {}, "1/sqrt(1-s^2)", "-1/sqrt(1-s^2)"},
      {"planar_circle", "unit-speed circle of radius r in the xy-plane",
       {{"r", 1.0, "radius, > 0"}}, "1/r", "0"},
      {"salkowski", "synthesized, constant curvature with tau = sec(kappa0 s)",
       {{"kappa0", 1.0, "constant curvature, > 0"}}, "kappa0", "sec(kappa0*s)"},
      {"rectifying_base", "synthesized, turning angle arctan((s+b)/a)",
       {{"a", 1.0, "> 0"}, {"b", 0.0, "shift"}, {"tau0", 1.0, "constant torsion, != 0"}},
       "a/(a^2+(s+b)^2)", "tau0"},
      {"random_frenet", "synthesized from seeded smooth kappa in [0.5,1.5] and tau in [0.4,1.2]",
       {{"seed", std::nullopt, "non-negative integer, required"}}, "random", "random"},
  };
  return entries;
}

CatalogCurve catalog_curve(const std::string& entry, const std::map<std::string, double>& given) {
  const CatalogInfo& info = find_info(entry);
  CatalogCurve cc;
  cc.entry = entry;
  cc.params = resolve(info, given);
  cc.name = entry;
  if (!info.params.empty()) {
    std::string list;
    for (const auto& p : info.params) {
      list += (list.empty() ? "" : ",") + p.name + "=" + format_number(cc.params.at(p.name));
    }
    cc.name += ":" + list;
  }
  cc.s_domain = {-kInf, kInf};
  const auto& p = cc.params;

  if (entry == "circular_helix") {
    const double r = p.at("r");
    const double h = p.at("h");
    if (!(r > 0.0)) invalid(entry, "r must be positive");
    if (h == 0.0) invalid(entry, "h must be non-zero (use planar_circle)");
    const double c = std::sqrt(r * r + h * h);
    Curve curve;
    curve.name = cc.name;
    curve.unit_speed = true;
    curve.domain = cc.s_domain;
    curve.position = [=](double s) { return Vec3(r * std::cos(s / c), r * std::sin(s / c), h * s / c); };
    curve.derivative[0] = [=](double s) {
      return Vec3(-r / c * std::sin(s / c), r / c * std::cos(s / c), h / c);
    };
    curve.derivative[1] = [=](double s) {
      return Vec3(-r / (c * c) * std::cos(s / c), -r / (c * c) * std::sin(s / c), 0.0);
    };
    curve.derivative[2] = [=](double s) {
      return Vec3(r / (c * c * c) * std::sin(s / c), -r / (c * c * c) * std::cos(s / c), 0.0);
    };
    cc.curve = curve;
    cc.kappa = [=](double) { return r / (c * c); };
    cc.tau = [=](double) { return h / (c * c); };
    cc.default_range = {-2.0, 2.0};
    cc.default_samples = 4001;
    cc.expected_verdicts = {{"plane", false}, {"general_helix", true}, {"slant_helix", true},
                            {"bertrand", true}, {"mannheim", true}, {"salkowski", false}};
  } else if (entry == "paper_spherical_helix") {
    cc.curve = spherical_helix_in_t();
    cc.curve->name = cc.name;
    cc.s_domain = {std::sin(cc.curve->domain.lo), std::sin(cc.curve->domain.hi)};
    cc.kappa = [](double s) { return 1.0 / std::sqrt(1.0 - s * s); };
    cc.tau = [](double s) { return -1.0 / std::sqrt(1.0 - s * s); };
    cc.default_range = {-0.9, 0.9};
    cc.default_samples = 1801;
    cc.expected_verdicts = {{"plane", false}, {"general_helix", true}, {"spherical", true}};
  } else if (entry == "planar_circle") {
    const double r = p.at("r");
    if (!(r > 0.0)) invalid(entry, "r must be positive");
    Curve curve;
    curve.name = cc.name;
    curve.unit_speed = true;
    curve.domain = cc.s_domain;
    curve.position = [=](double s) { return Vec3(r * std::cos(s / r), r * std::sin(s / r), 0.0); };
    curve.derivative[0] = [=](double s) { return Vec3(-std::sin(s / r), std::cos(s / r), 0.0); };
    curve.derivative[1] = [=](double s) {
      return Vec3(-std::cos(s / r) / r, -std::sin(s / r) / r, 0.0);
    };
    curve.derivative[2] = [=](double s) {
      return Vec3(std::sin(s / r) / (r * r), -std::cos(s / r) / (r * r), 0.0);
    };
    cc.curve = curve;
    cc.kappa = [=](double) { return 1.0 / r; };
    cc.tau = [](double) { return 0.0; };
    cc.default_range = {-3.0, 3.0};
    cc.default_samples = 601;
    cc.expected_verdicts = {{"plane", true}, {"general_helix", true}};
  } else if (entry == "salkowski") {
    const double k0 = p.at("kappa0");
    if (!(k0 > 0.0)) invalid(entry, "kappa0 must be positive");
    cc.synthesized = true;
    const double reach = (kPi / 2 - kEndMargin) / k0;
    cc.s_domain = {-reach, reach};
    cc.kappa = [=](double) { return k0; };
    cc.tau = [=](double s) { return 1.0 / std::cos(k0 * s); };
    cc.default_range = {-1.2 / k0, 1.2 / k0};
    cc.default_samples = 2401;
    cc.expected_verdicts = {{"plane", false}, {"salkowski", true}, {"general_helix", false}};
  } else if (entry == "rectifying_base") {
    const double a = p.at("a");
    const double b = p.at("b");
    const double tau0 = p.at("tau0");
    if (!(a > 0.0)) invalid(entry, "a must be positive");
    if (tau0 == 0.0) invalid(entry, "tau0 must be non-zero");
    cc.synthesized = true;
    cc.kappa = [=](double s) { return a / (a * a + (s + b) * (s + b)); };
    cc.tau = [=](double) { return tau0; };
    cc.default_range = {-2.0, 2.0};
    cc.default_samples = 4001;
    cc.expected_verdicts = {{"plane", false}, {"anti_salkowski", true}};
  } else if (entry == "random_frenet") {
    const double seed = p.at("seed");
    if (!(seed >= 0.0) || seed != std::floor(seed) || seed > 9.007199254740992e15) {
      invalid(entry, "seed must be a non-negative integer");
    }
    std::mt19937_64 g(static_cast<std::uint64_t>(seed));
    const SineSeries kappa = random_series(g, 1.0, 0.5);
    const SineSeries tau = random_series(g, 0.8, 0.4);
    cc.synthesized = true;
    cc.kappa = kappa;
    cc.tau = tau;
    cc.default_range = {-1.0, 1.0};
    cc.default_samples = 2001;
    cc.expected_verdicts = {{"plane", false}, {"general_helix", false}, {"slant_helix", false},
                            {"c_slant_helix", false}};
  }
  return cc;
}

SampledCurve CatalogCurve::sample(const Grid& grid) const {
  if (grid.front() < s_domain.lo || grid.back() > s_domain.hi) {
    throw Error(ErrorCode::OutOfDomain,
                name + ": arc-length range [" + format_number(grid.front()) + ", " +
                    format_number(grid.back()) + "] leaves the domain [" +
                    format_number(s_domain.lo) + ", " + format_number(s_domain.hi) + "]");
  }
  if (synthesized) {
    return synthesize_from_curvatures(kappa, tau, OrthonormalFrame{}, Vec3::Zero(), grid, name);
  }
  if (curve->unit_speed) return sample_curve(*curve, grid, name);
  const Grid t_grid = Grid::uniform(curve->domain.lo, curve->domain.hi, 4001);
  const Curve unit = arclength_reparametrize(*curve, t_grid, 0.0);
  return sample_curve(unit, grid, name);
}

SampledCurve CatalogCurve::sample() const {
  return sample(default_range.lo, default_range.hi, default_samples);
}

SampledCurve CatalogCurve::sample(double s_min, double s_max, Index samples) const {
  return sample(Grid::uniform(s_min, s_max, samples));
}

CatalogCurve parse_catalog_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  find_info(name);
  std::map<std::string, double> params;
  if (colon != std::string::npos) {
    std::size_t pos = colon + 1;
    while (pos <= spec.size()) {
      const auto comma = std::min(spec.find(',', pos), spec.size());
      const std::string item = spec.substr(pos, comma - pos);
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0) invalid(name, "expected key=value, got '" + item + "'");
      const std::string key = item.substr(0, eq);
      const std::string text = item.substr(eq + 1);
      char* end = nullptr;
      const double value = std::strtod(text.c_str(), &end);
      if (text.empty() || end != text.c_str() + text.size()) {
        invalid(name, "parameter '" + key + "' is not a number: '" + text + "'");
      }
      if (params.count(key)) invalid(name, "parameter '" + key + "' given twice");
      params[key] = value;
      pos = comma + 1;
    }
  }
  return catalog_curve(name, params);
}

}  // namespace oscmate
