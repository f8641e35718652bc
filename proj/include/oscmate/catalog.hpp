#pragma once

// Built-in reference curves, addressed as "name" or "name:key=value,...".

#include <oscmate/curve.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace oscmate {

struct CatalogParam {
  std::string name;
  std::optional<double> default_value;  // empty: required
  std::string description;
};

struct CatalogInfo {
  std::string name;
  std::string description;
  std::vector<CatalogParam> params;
  std::string kappa_text;
  std::string tau_text;
};

const std::vector<CatalogInfo>& catalog_entries();

struct CatalogCurve {
  std::string name;  // canonical "name:key=value,..."
  std::string entry;
  std::map<std::string, double> params;
  Interval default_range;
  Index default_samples = 0;
  Interval s_domain;  // admissible arc-length range

  /// Analytic parametrization; unit speed except for paper_spherical_helix,
  /// whose parameter is t with s = sin t. Empty for synthesized entries.
  std::optional<Curve> curve;
  std::function<double(double)> kappa;  // closed-form curvature in s
  std::function<double(double)> tau;
  bool synthesized = false;
  std::map<std::string, bool> expected_verdicts;

  /// Frenet samples on an arc-length grid. Synthesized entries start at the
  /// first station with the standard frame at the origin.
  SampledCurve sample(const Grid& grid) const;
  SampledCurve sample() const;
  SampledCurve sample(double s_min, double s_max, Index samples) const;
};

CatalogCurve catalog_curve(const std::string& entry, const std::map<std::string, double>& params = {});

/// Parses "name:key=value,..." and builds the entry. UnknownName, InvalidParams.
CatalogCurve parse_catalog_spec(const std::string& spec);

}  // namespace oscmate
