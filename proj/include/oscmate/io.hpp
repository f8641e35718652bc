#pragma once

// Sampled-curve exchange formats.
//
// CSV: header s,x,y,z,Tx,Ty,Tz,Nx,Ny,Nz,Bx,By,Bz,kappa,tau,theta, one row per
// station, 17 significant digits, empty cell for a missing value.
// JSON: {"name", "theta0", "excluded": [[lo, hi], ...], "samples": [{"s", "pos",
// "T", "N", "B", "kappa", "tau", "theta"}, ...]} with null for a missing value,
// optionally followed by extra members.

#include <oscmate/curve.hpp>

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace oscmate {

enum class ExportFormat { Csv, Json };

/// Extra top-level JSON members as (key, already serialized JSON value).
using JsonMembers = std::vector<std::pair<std::string, std::string>>;

inline constexpr const char* kCsvHeader = "s,x,y,z,Tx,Ty,Tz,Nx,Ny,Nz,Bx,By,Bz,kappa,tau,theta";

void export_csv(const SampledCurve& curve, std::ostream& out);
void export_json(const SampledCurve& curve, std::ostream& out, const JsonMembers& extra = {});
void export_sampled(const SampledCurve& curve, ExportFormat format, std::ostream& out,
                    const JsonMembers& extra = {});

/// Reads the JSON schema above. Throws IoError on malformed input.
SampledCurve import_json(std::istream& in);
SampledCurve import_json_file(const std::string& path);

enum class ProjectionPlane { XY, XZ, YZ };

/// Orthographic projection as an SVG polyline (one per run of finite
/// positions), image y pointing up, viewBox fitted to the data.
void export_svg(const SampledCurve& curve, ProjectionPlane plane, std::ostream& out);

/// JSON number with 17 significant digits, "null" for NaN or infinity.
std::string json_number(double v);

}  // namespace oscmate
