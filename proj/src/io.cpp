#include <oscmate/io.hpp>

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

namespace oscmate {

std::string json_number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string csv_number(double v) { return std::isfinite(v) ? json_number(v) : std::string(); }

std::string json_vec(const Vec3& v) {
  return "[" + json_number(v.x()) + "," + json_number(v.y()) + "," + json_number(v.z()) + "]";
}

std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

double theta_at(const SampledCurve& c, std::size_t i) {
  return c.theta.size() == c.size() ? c.theta[static_cast<Index>(i)] : kNaN;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

void check_stream(const std::ostream& out) {
  if (!out) throw Error(ErrorCode::IoError, "write failed");
}

}  // namespace

void export_csv(const SampledCurve& curve, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (std::size_t i = 0; i < curve.samples.size(); ++i) {
    const auto& f = curve.samples[i];
    const double row[16] = {f.s,      f.position.x(), f.position.y(), f.position.z(),
                            f.T.x(),  f.T.y(),        f.T.z(),        f.N.x(),
                            f.N.y(),  f.N.z(),        f.B.x(),        f.B.y(),
                            f.B.z(),  f.kappa,        f.tau,          theta_at(curve, i)};
    for (int k = 0; k < 16; ++k) {
      if (k) out << ',';
      out << csv_number(row[k]);
    }
    out << '\n';
  }
  check_stream(out);
}

void export_json(const SampledCurve& curve, std::ostream& out, const JsonMembers& extra) {
  out << "{\"name\":" << json_string(curve.name)
      << ",\"theta0\":" << (curve.theta0 ? json_number(*curve.theta0) : "null") << ",\"excluded\":[";
  for (std::size_t k = 0; k < curve.excluded.size(); ++k) {
    if (k) out << ',';
    out << '[' << json_number(curve.excluded[k].lo) << ',' << json_number(curve.excluded[k].hi) << ']';
  }
  out << "],\"samples\":[";
  for (std::size_t i = 0; i < curve.samples.size(); ++i) {
    const auto& f = curve.samples[i];
    if (i) out << ',';
    out << "\n{\"s\":" << json_number(f.s) << ",\"pos\":" << json_vec(f.position)
        << ",\"T\":" << json_vec(f.T) << ",\"N\":" << json_vec(f.N) << ",\"B\":" << json_vec(f.B)
        << ",\"kappa\":" << json_number(f.kappa) << ",\"tau\":" << json_number(f.tau)
        << ",\"theta\":" << json_number(theta_at(curve, i)) << '}';
  }
  out << "]";
  for (const auto& [key, value] : extra) out << ",\n" << json_string(key) << ':' << value;
  out << "}\n";
  check_stream(out);
}

void export_sampled(const SampledCurve& curve, ExportFormat format, std::ostream& out,
                    const JsonMembers& extra) {
  if (format == ExportFormat::Csv) {
    export_csv(curve, out);
  } else {
    export_json(curve, out, extra);
  }
}

namespace {

double read_number(const nlohmann::json& j, const char* what) {
  if (j.is_null()) return kNaN;
  if (!j.is_number()) throw Error(ErrorCode::IoError, std::string("expected a number for ") + what);
  return j.get<double>();
}

Vec3 read_vec(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw Error(ErrorCode::IoError, std::string("expected a 3-array for ") + what);
  }
  return {read_number(j[0], what), read_number(j[1], what), read_number(j[2], what)};
}

}  // namespace

SampledCurve import_json(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::IoError, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("samples") || !doc["samples"].is_array()) {
    throw Error(ErrorCode::IoError, "JSON curve needs a \"samples\" array");
  }
  SampledCurve c;
  if (doc.contains("name") && doc["name"].is_string()) c.name = doc["name"].get<std::string>();
  if (doc.contains("theta0") && !doc["theta0"].is_null()) c.theta0 = read_number(doc["theta0"], "theta0");
  const auto& samples = doc["samples"];
  Profile theta(static_cast<Index>(samples.size()));
  bool any_theta = false;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& j = samples[i];
    if (!j.is_object()) throw Error(ErrorCode::IoError, "sample " + std::to_string(i) + " is not an object");
    for (const char* key : {"s", "pos", "T", "N", "B", "kappa", "tau"}) {
      if (!j.contains(key)) {
        throw Error(ErrorCode::IoError, "sample " + std::to_string(i) + " lacks \"" + key + "\"");
      }
    }
    FrenetSample f;
    f.s = read_number(j["s"], "s");
    if (!std::isfinite(f.s)) throw Error(ErrorCode::IoError, "sample " + std::to_string(i) + " has no s");
    f.position = read_vec(j["pos"], "pos");
    f.T = read_vec(j["T"], "T");
    f.N = read_vec(j["N"], "N");
    f.B = read_vec(j["B"], "B");
    f.kappa = read_number(j["kappa"], "kappa");
    f.tau = read_number(j["tau"], "tau");
    theta[static_cast<Index>(i)] = j.contains("theta") ? read_number(j["theta"], "theta") : kNaN;
    any_theta = any_theta || std::isfinite(theta[static_cast<Index>(i)]);
    c.samples.push_back(f);
  }
  if (any_theta) c.theta = theta;
  c.refresh_excluded();
  return c;
}

SampledCurve import_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  return import_json(in);
}

void export_svg(const SampledCurve& curve, ProjectionPlane plane, std::ostream& out) {
  auto project = [plane](const Vec3& p) -> std::pair<double, double> {
    switch (plane) {
      case ProjectionPlane::XY: return {p.x(), p.y()};
      case ProjectionPlane::XZ: return {p.x(), p.z()};
      case ProjectionPlane::YZ: return {p.y(), p.z()};
    }
    return {p.x(), p.y()};
  };
  std::vector<std::vector<std::pair<double, double>>> runs(1);
  constexpr double inf = std::numeric_limits<double>::infinity();
  double lo_u = inf, hi_u = -inf, lo_v = inf, hi_v = -inf;
  for (const auto& f : curve.samples) {
    if (!f.position.allFinite()) {
      if (!runs.back().empty()) runs.emplace_back();
      continue;
    }
    auto [u, v] = project(f.position);
    v = -v;  // SVG y grows downwards
    runs.back().emplace_back(u, v);
    lo_u = std::min(lo_u, u);
    hi_u = std::max(hi_u, u);
    lo_v = std::min(lo_v, v);
    hi_v = std::max(hi_v, v);
  }
  if (!(hi_u >= lo_u)) throw Error(ErrorCode::InvalidArgument, "export_svg: no finite positions");
  const double extent = std::max({hi_u - lo_u, hi_v - lo_v, 1e-9});
  const double pad = 0.05 * extent;
  const double width = std::max(hi_u - lo_u, 0.02 * extent) + 2 * pad;
  const double height = std::max(hi_v - lo_v, 0.02 * extent) + 2 * pad;
  const double x0 = 0.5 * (lo_u + hi_u) - 0.5 * width;
  const double y0 = 0.5 * (lo_v + hi_v) - 0.5 * height;
  const double pixels = 800.0 / std::max(width, height);

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << json_number(width * pixels)
      << "\" height=\"" << json_number(height * pixels) << "\" viewBox=\"" << json_number(x0) << ' '
      << json_number(y0) << ' ' << json_number(width) << ' ' << json_number(height) << "\">\n";
  out << "<title>" << xml_escape(curve.name) << "</title>\n";
  for (const auto& run : runs) {
    if (run.empty()) continue;
    out << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" "
           "vector-effect=\"non-scaling-stroke\" points=\"";
    for (std::size_t k = 0; k < run.size(); ++k) {
      if (k) out << ' ';
      out << json_number(run[k].first) << ',' << json_number(run[k].second);
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
  check_stream(out);
}

}  // namespace oscmate
