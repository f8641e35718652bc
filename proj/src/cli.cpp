#include <oscmate/cli.hpp>

#include <oscmate/catalog.hpp>
#include <oscmate/classify.hpp>
#include <oscmate/expr.hpp>
#include <oscmate/io.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace oscmate {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoError: return 4;
    case ErrorCode::SyntaxError:
    case ErrorCode::UnknownFunction:
    case ErrorCode::UnknownName:
    case ErrorCode::InvalidParams:
    case ErrorCode::ArgumentError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidGrid: return 3;
    default: return 2;
  }
}

namespace {

using nlohmann::json;

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json profile_json(const Profile& p) {
  json a = json::array();
  for (Index i = 0; i < p.size(); ++i) a.push_back(number(p[i]));
  return a;
}

json verdict_json(const Verdict& v) {
  json j{{"verdict", v.holds},
         {"deferred", v.deferred},
         {"tolerance_used", number(v.tolerance)},
         {"statistic", number(v.statistic)}};
  json witness = json::object();
  if (v.constancy) {
    witness["kind"] = "constancy";
    witness["level"] = number(v.constancy->level);
    witness["spread"] = number(v.constancy->spread);
  } else if (v.fit) {
    witness["kind"] = "affine_fit";
    witness["coefficients"] = {number(v.fit->coefficients[0]), number(v.fit->coefficients[1])};
    witness["residual_rms"] = number(v.fit->residual_rms);
    witness["residual_max"] = number(v.fit->residual_max);
    witness["rank_deficient"] = v.fit->rank_deficient;
  } else {
    witness["kind"] = "max_abs";
  }
  j["witness"] = witness;
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

json report_json(const ClassificationReport& r) {
  json verdicts = json::object();
  for (const auto& [name, v] : r.verdicts) verdicts[name] = verdict_json(v);
  json constants = json::object();
  for (const auto& [name, v] : r.constants) constants[name] = number(v);
  return {{"name", r.name},
          {"valid_stations", r.valid_stations},
          {"tolerances", {{"rel", r.tolerances.rel}, {"abs", r.tolerances.abs}}},
          {"verdicts", verdicts},
          {"constants", constants}};
}

json check_json(const PredictionCheck& c) {
  json j{{"applicable", c.applicable},
         {"predicted", c.predicted},
         {"observed", c.observed},
         {"agrees", c.agrees()},
         {"residual", number(c.residual)}};
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

json equivalence_json(const EquivalenceReport& e) {
  return {{"degenerate", e.degenerate},
          {"residuals",
           {{"tangent_vs_base", number(e.tangent_vs_base)},
            {"normal_vs_base", number(e.normal_vs_base)},
            {"binormal_vs_base", number(e.binormal_vs_base)},
            {"tangent_vs_mate", number(e.tangent_vs_mate)},
            {"binormal_vs_mate", number(e.binormal_vs_mate)},
            {"normal_vs_mu", number(e.normal_vs_mu)}}},
          {"verdicts",
           {{"base_plane", e.base_plane},
            {"mate_plane", e.mate_plane},
            {"base_helix", e.base_helix},
            {"mate_slant_helix", e.mate_slant_helix},
            {"tangent_indicatrix_helix", e.tangent_indicatrix_helix},
            {"binormal_indicatrix_helix", e.binormal_indicatrix_helix},
            {"base_slant_helix", e.base_slant_helix},
            {"mate_c_slant_helix", e.mate_c_slant_helix},
            {"normal_indicatrix_helix", e.normal_indicatrix_helix}}}};
}

json cross_checks_json(const MateCrossChecks& c) {
  return {{"bertrand_from_base", check_json(c.bertrand_from_base)},
          {"base_bertrand_from_mate", check_json(c.base_bertrand_from_mate)},
          {"mannheim_from_base", check_json(c.mannheim_from_base)},
          {"base_mannheim_from_mate", check_json(c.base_mannheim_from_mate)},
          {"mannheim_curvature_ratio", check_json(c.mannheim_curvature_ratio)},
          {"salkowski_sec_form", check_json(c.salkowski_sec_form)},
          {"salkowski_tau_ode", number(c.salkowski_tau_ode)},
          {"anti_salkowski_kappa_ode", number(c.anti_salkowski_kappa_ode)}};
}

struct CurveSource {
  std::string curve;
  std::string in;
  std::optional<double> s_min;
  std::optional<double> s_max;
  std::optional<Index> samples;

  void attach(CLI::App* cmd, bool allow_import) {
    auto* c = cmd->add_option("--curve", curve, "catalog curve, NAME[:key=value,...]");
    if (allow_import) {
      auto* i = cmd->add_option("--in", in, "curve exported as JSON");
      c->excludes(i);
      i->excludes(c);
    } else {
      c->required();
    }
    cmd->add_option("--s-min", s_min, "first arc-length station");
    cmd->add_option("--s-max", s_max, "last arc-length station");
    cmd->add_option("--samples", samples, "number of stations");
  }

  SampledCurve load() const {
    if (!in.empty()) {
      if (s_min || s_max || samples) {
        throw Error(ErrorCode::ArgumentError, "--s-min/--s-max/--samples do not apply to --in");
      }
      return import_json_file(in);
    }
    if (curve.empty()) throw Error(ErrorCode::ArgumentError, "one of --curve or --in is required");
    const CatalogCurve cc = parse_catalog_spec(curve);
    return cc.sample(s_min.value_or(cc.default_range.lo), s_max.value_or(cc.default_range.hi),
                     samples.value_or(cc.default_samples));
  }
};

struct Output {
  std::string format = "json";
  std::string path;

  void attach(CLI::App* cmd, bool with_format) {
    if (with_format) {
      cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    }
    cmd->add_option("--out", path, "output file (default: standard output)");
  }

  ExportFormat export_format() const { return format == "csv" ? ExportFormat::Csv : ExportFormat::Json; }

  template <class Writer>
  void write(std::ostream& fallback, Writer&& writer) const {
    if (path.empty()) {
      writer(fallback);
      return;
    }
    std::ofstream file(path);
    if (!file) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    writer(file);
    file.close();
    if (!file) throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
  }
};

Vec3 parse_origin(const std::string& text) {
  Vec3 v;
  std::stringstream ss(text);
  std::string item;
  int k = 0;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double x = std::strtod(item.c_str(), &end);
    if (k >= 3 || item.empty() || end != item.c_str() + item.size() || !std::isfinite(x)) {
      throw Error(ErrorCode::ArgumentError, "--origin expects X,Y,Z, got '" + text + "'");
    }
    v[k++] = x;
  }
  if (k != 3) throw Error(ErrorCode::ArgumentError, "--origin expects X,Y,Z, got '" + text + "'");
  return v;
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

std::string dump(const json& j) { return j.dump(); }

void list_catalog(std::ostream& out) {
  for (const auto& info : catalog_entries()) {
    std::map<std::string, double> probe;
    for (const auto& p : info.params) {
      if (!p.default_value) probe[p.name] = 0.0;
    }
    const CatalogCurve cc = catalog_curve(info.name, probe);
    out << info.name << "\n  " << info.description << "\n";
    for (const auto& p : info.params) {
      out << "  " << p.name << " = "
          << (p.default_value ? short_number(*p.default_value) : std::string("(required)")) << "  "
          << p.description << "\n";
    }
    out << "  kappa = " << info.kappa_text << ", tau = " << info.tau_text << "\n"
        << "  default s in [" << short_number(cc.default_range.lo) << ", "
        << short_number(cc.default_range.hi) << "], " << cc.default_samples << " samples\n";
  }
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Osculating mates of Frenet curves", "oscmate"};
  app.require_subcommand(1);

  auto* list = app.add_subcommand("list-catalog", "list the built-in curves");

  auto* analyze = app.add_subcommand("analyze", "Frenet apparatus, sigma and mu of a curve");
  CurveSource analyze_src;
  Output analyze_out;
  analyze_src.attach(analyze, true);
  analyze_out.attach(analyze, true);

  auto* mate = app.add_subcommand("mate", "osculating mate of a curve");
  CurveSource mate_src;
  Output mate_out;
  double mate_theta0 = 0.0;
  std::string mate_origin = "0,0,0";
  mate_src.attach(mate, true);
  mate_out.attach(mate, true);
  mate->add_option("--theta0", mate_theta0, "turning angle at s=0 (or at the first station)");
  mate->add_option("--origin", mate_origin, "position of the mate at the first station, X,Y,Z");

  auto* ot = app.add_subcommand("ot-mate", "osculating-type mate built from constants a, b");
  CurveSource ot_src;
  Output ot_out;
  double ot_a = 0.0, ot_b = 0.0, ot_theta0 = 0.0;
  ot_src.attach(ot, true);
  ot_out.attach(ot, true);
  ot->add_option("--a", ot_a, "constant a (non-zero)")->required();
  ot->add_option("--b", ot_b, "constant b")->required();
  ot->add_option("--theta0", ot_theta0, "turning angle at s=0 (or at the first station)");

  auto* cls = app.add_subcommand("classify", "special-curve verdicts as JSON");
  CurveSource cls_src;
  Output cls_out;
  std::string cls_of = "base";
  Tolerances tol;
  double cls_theta0 = 0.0;
  cls_src.attach(cls, true);
  cls_out.attach(cls, false);
  cls->add_option("--of", cls_of, "classify the curve itself or its mate")
      ->check(CLI::IsMember({"base", "mate"}));
  cls->add_option("--tol-rel", tol.rel, "relative tolerance")->check(CLI::NonNegativeNumber);
  cls->add_option("--tol-abs", tol.abs, "absolute tolerance")->check(CLI::NonNegativeNumber);
  cls->add_option("--theta0", cls_theta0, "turning angle of the mate (with --of mate)");

  auto* synth = app.add_subcommand("synth", "integrate a curve from kappa(s) and tau(s)");
  std::string synth_kappa, synth_tau, synth_name = "synthesized";
  double synth_lo = 0.0, synth_hi = 0.0;
  Index synth_n = 1001;
  Output synth_out;
  synth->add_option("--kappa", synth_kappa, "curvature expression in s")->required();
  synth->add_option("--tau", synth_tau, "torsion expression in s")->required();
  synth->add_option("--s-min", synth_lo, "first arc-length station")->required();
  synth->add_option("--s-max", synth_hi, "last arc-length station")->required();
  synth->add_option("--samples", synth_n, "number of stations");
  synth->add_option("--name", synth_name, "curve name in the output");
  synth_out.attach(synth, true);

  auto* svg = app.add_subcommand("export-svg", "orthographic projection of an exported curve");
  std::string svg_in, svg_plane = "xy";
  Output svg_out;
  svg->add_option("--in", svg_in, "curve exported as JSON")->required();
  svg->add_option("--plane", svg_plane, "projection plane")->check(CLI::IsMember({"xy", "xz", "yz"}));
  svg_out.attach(svg, false);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error[" << to_string(ErrorCode::ArgumentError) << "]: " << e.what() << "\n";
    return 3;
  }

  try {
    if (*list) {
      list_catalog(out);
    } else if (*analyze) {
      const SampledCurve c = analyze_src.load();
      const Grid grid = c.grid();
      const JsonMembers extra = {
          {"sigma", dump(profile_json(sigma_profile(grid, c.kappa(), c.tau())))},
          {"mu", dump(profile_json(mu_profile(grid, c.kappa(), c.tau())))}};
      analyze_out.write(out, [&](std::ostream& o) {
        export_sampled(c, analyze_out.export_format(), o, extra);
      });
    } else if (*mate) {
      const SampledCurve base = mate_src.load();
      const MateResult m = osculating_mate(base, mate_theta0, parse_origin(mate_origin));
      json schedule = json::array();
      for (const auto& iv : m.epsilon1_schedule) {
        schedule.push_back({{"lo", iv.lo}, {"hi", iv.hi}, {"sign", iv.sign}});
      }
      const JsonMembers extra = {{"kappa_bar", dump(profile_json(m.kappa_bar))},
                                 {"tau_bar", dump(profile_json(m.tau_bar))},
                                 {"epsilon1", dump(json(m.epsilon1))},
                                 {"epsilon1_schedule", dump(schedule)}};
      mate_out.write(out, [&](std::ostream& o) {
        export_sampled(m.mate, mate_out.export_format(), o, extra);
      });
    } else if (*ot) {
      const SampledCurve base = ot_src.load();
      const OtMateResult r = ot_osculating_mate(base, ot_a, ot_b, ot_theta0);
      const auto& v = r.validation;
      const json validation{
          {"rectifying_residual", number(v.rectifying_residual)},
          {"consistency_residual", number(v.consistency_residual)},
          {"consistent", v.consistent},
          {"darboux_residual", number(v.darboux_residual)},
          {"tan_theta_affine", v.tan_theta_affine},
          {"tan_theta_fit",
           {{"slope", number(v.tan_theta_fit.coefficients.size() ? v.tan_theta_fit.coefficients[0] : kNaN)},
            {"intercept",
             number(v.tan_theta_fit.coefficients.size() ? v.tan_theta_fit.coefficients[1] : kNaN)},
            {"residual_max", number(v.tan_theta_fit.residual_max)},
            {"residual_rms", number(v.tan_theta_fit.residual_rms)}}}};
      ot_out.write(out, [&](std::ostream& o) {
        export_sampled(r.curve, ot_out.export_format(), o, {{"validation", dump(validation)}});
      });
    } else if (*cls) {
      const SampledCurve base = cls_src.load();
      json doc;
      if (cls_of == "mate") {
        const MateResult m = osculating_mate(base, cls_theta0);
        doc = report_json(classify_report(m.mate, tol));
        doc["theta0"] = cls_theta0;
        doc["equivalence"] = equivalence_json(equivalence_report(base, m, tol));
        doc["cross_checks"] = cross_checks_json(mate_cross_checks(base, m, tol));
      } else {
        doc = report_json(classify_report(base, tol));
      }
      cls_out.write(out, [&](std::ostream& o) { o << doc.dump(2) << "\n"; });
    } else if (*synth) {
      const Expr kappa = parse_expr(synth_kappa);
      const Expr tau = parse_expr(synth_tau);
      const Grid grid = Grid::uniform(synth_lo, synth_hi, synth_n);
      const SampledCurve c = synthesize_from_curvatures(expr_function(kappa), expr_function(tau),
                                                        OrthonormalFrame{}, Vec3::Zero(), grid,
                                                        synth_name);
      const JsonMembers extra = {{"kappa_expr", json(print_expr(kappa)).dump()},
                                 {"tau_expr", json(print_expr(tau)).dump()}};
      synth_out.write(out, [&](std::ostream& o) {
        export_sampled(c, synth_out.export_format(), o, extra);
      });
    } else if (*svg) {
      const SampledCurve c = import_json_file(svg_in);
      const ProjectionPlane plane = svg_plane == "xz"   ? ProjectionPlane::XZ
                                    : svg_plane == "yz" ? ProjectionPlane::YZ
                                                        : ProjectionPlane::XY;
      svg_out.write(out, [&](std::ostream& o) { export_svg(c, plane, o); });
    }
  } catch (const Error& e) {
    err << "error[" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e.code());
  }
  return 0;
}

}  // namespace oscmate
