#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "lglab/error.hpp"
#include "lglab/geometry.hpp"
#include "lglab/isoperimetry.hpp"
#include "lglab/metric_spec.hpp"
#include "lglab/parallel.hpp"
#include "lglab/quotient.hpp"
#include "lglab/rigidity.hpp"
#include "lglab/variation.hpp"

using nlohmann::json;
using namespace lglab;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit { kOk = 0, kParse = 2, kPrecondition = 3, kViolation = 4 };

struct Options {
  std::string command;
  std::string spec_path;
  std::string volumes;
  double v = 0.5;
  std::string refine = "on";
  std::string grid;
  std::string out;
  bool json = false;
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse:
      return kParse;
    case ErrorKind::FormulaValidation:
    case ErrorKind::Correction:
      return kViolation;
    default:
      return kPrecondition;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::Parse, "cannot read spec file " + path);
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> parse_volumes(const std::string& text) {
  double a = 0.0, b = 0.0, step = 0.0;
  char c1 = 0, c2 = 0;
  std::istringstream in(text);
  in.imbue(std::locale::classic());
  if (!(in >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || !in.eof()) {
    throw Error(ErrorKind::Parse, "--volumes expects a:b:step, got '" + text + "'");
  }
  if (!(step > 0.0) || b < a) {
    throw Error(ErrorKind::Parse, "--volumes needs step > 0 and a <= b");
  }
  const long n = std::lround(std::floor((b - a) / step + 1e-9)) + 1;
  std::vector<double> out;
  for (long q = 0; q < n; ++q) {
    // Round to 12 digits so 0.1 + 2 * 0.1 prints and compares as 0.3.
    out.push_back(std::round((a + q * step) * 1e12) / 1e12);
  }
  for (double v : out) {
    if (!(v > 0.0 && v < 1.0)) {
      throw Error(ErrorKind::Precondition, "volume fractions must lie in (0, 1)");
    }
  }
  return out;
}

void apply_grid_override(MetricSpec& spec, const std::string& grid) {
  if (grid.empty()) {
    return;
  }
  int nt = 0, np = 0;
  char x = 0;
  std::istringstream in(grid);
  if (!(in >> nt >> x >> np) || (x != 'x' && x != 'X') || !in.eof()) {
    throw Error(ErrorKind::Parse, "--grid expects NxM, got '" + grid + "'");
  }
  try {
    SphereGrid check(nt, np);
  } catch (const Error& e) {
    throw Error(ErrorKind::Parse, std::string("--grid: ") + e.what());
  }
  spec.n_theta = nt;
  spec.n_phi = np;
}

std::string fmt12(double x) {
  if (!std::isfinite(x)) {
    return "nan";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

json point_json(const Vec3& p) {
  double theta = 0.0, phi = 0.0;
  to_spherical(p, theta, phi);
  return {theta, phi};
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(ErrorKind::Precondition, "cannot write " + tmp.string());
    }
    out << text;
    out.flush();
    if (!out) {
      throw Error(ErrorKind::Precondition, "write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, target);
}

json base_report(const Options& opt, const MetricSpec& spec) {
  json r;
  r["command"] = opt.command;
  r["tool_version"] = kVersion;
  r["spec_digest"] = spec_digest(spec);
  r["spec"] = json::parse(canonical_json(spec));
  r["refine"] = opt.refine == "on";
  r["tolerances"] = {
      {"sweep_fraction", SweepOptions{}.fraction_tolerance},
      {"sweep_center_stride", SweepOptions{}.center_stride},
      {"boundary_vertices", kCapBoundaryVertices},
      {"flow_curvature", RefineOptions{}.curvature_tolerance},
      {"flow_fraction", RefineOptions{}.fraction_tolerance},
      {"flow_max_steps", RefineOptions{}.max_steps},
      {"hypothesis_slack", kHypothesisSlack},
      {"margin", kMarginTolerance},
      {"admissibility", kAdmissibilityTolerance},
      {"factor_relation", kFactorTolerance},
  };
  return r;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---- commands ---------------------------------------------------------------

int cmd_profile(const Options& opt, const MetricSpec& spec, const ConformalMetric& m) {
  const std::vector<double> volumes =
      parse_volumes(opt.volumes.empty() ? "0.1:0.9:0.1" : opt.volumes);
  ProfileCurve profile = cap_sweep(m, volumes);
  const bool refine = opt.refine == "on";
  int code = kOk;
  json rows = json::array();
  std::ostringstream csv;
  csv << "v,area,normalized,model_value,margin,witness_kind,refined\r\n";
  for (ProfileSample& s : profile.samples) {
    std::string kind;
    if (!s.witness) {
      code = kViolation;
      kind = "error";
    } else {
      kind = s.witness->complement ? "cap_complement" : "cap";
      if (refine) {
        RefineResult rr = curve_flow_refine(m, *s.witness, s.v);
        if (rr.improved) {
          s.area = rr.final_area;
          s.normalized = rr.final_area / profile.total_volume;
          s.refined = true;
          kind = "curve";
        }
      }
    }
    const double model = model_profile(s.v, m.K());
    const double margin = s.witness ? s.normalized - model : std::nan("");
    csv << fmt12(s.v) << ',' << (s.witness ? fmt12(s.area) : "") << ','
        << (s.witness ? fmt12(s.normalized) : "") << ',' << fmt12(model) << ','
        << (s.witness ? fmt12(margin) : "") << ',' << kind << ',' << (s.refined ? 1 : 0)
        << "\r\n";
    json row = {{"v", s.v},          {"model_value", model}, {"witness_kind", kind},
                {"refined", s.refined}};
    if (s.witness) {
      row["area"] = s.area;
      row["normalized"] = s.normalized;
      row["margin"] = margin;
    } else {
      row["error"] = s.error;
    }
    rows.push_back(row);
  }
  if (opt.json) {
    json r = base_report(opt, spec);
    r["total_volume"] = profile.total_volume;
    r["rows"] = rows;
    r["exit_code"] = code;
    write_output(opt.out, dump(r));
  } else {
    write_output(opt.out, csv.str());
  }
  return code;
}

int cmd_check_lg(const Options& opt, const MetricSpec& spec, const ConformalMetric& m) {
  const std::vector<double> volumes =
      parse_volumes(opt.volumes.empty() ? "0.1:0.9:0.1" : opt.volumes);
  const CurvatureField k = gauss_curvature(m);
  if (k.min_value < m.K() - kHypothesisSlack) {
    std::cerr << "hypothesis refused: min Gauss curvature " << fmt12(k.min_value)
              << " is below K = " << fmt12(m.K()) << " at node " << k.argmin << "\n";
    return kPrecondition;
  }
  const LevyGromovReport rep = check_levy_gromov(m, volumes, opt.refine == "on");
  const int code = rep.pass ? kOk : kViolation;
  if (opt.json) {
    json r = base_report(opt, spec);
    r["curvature_min"] = rep.curvature_min;
    r["K"] = rep.K;
    json entries = json::array();
    for (const auto& e : rep.entries) {
      entries.push_back({{"v", e.v}, {"value", e.value}, {"model", e.model}, {"margin", e.margin}});
    }
    r["entries"] = entries;
    r["min_margin"] = rep.min_margin;
    r["verdict"] = rep.pass ? "PASS" : "FAIL";
    r["exit_code"] = code;
    write_output(opt.out, dump(r));
  } else {
    std::ostringstream s;
    s << "v,value,model,margin\n";
    for (const auto& e : rep.entries) {
      s << fmt12(e.v) << ',' << fmt12(e.value) << ',' << fmt12(e.model) << ',' << fmt12(e.margin)
        << '\n';
    }
    s << "verdict: " << (rep.pass ? "PASS" : "FAIL") << " (min margin " << fmt12(rep.min_margin)
      << ")\n";
    write_output(opt.out, s.str());
  }
  return code;
}

int cmd_variation(const Options& opt, const MetricSpec& spec, const ConformalMetric& m) {
  const double v = opt.v;
  if (!(v > 0.0 && v < 1.0)) {
    throw Error(ErrorKind::Precondition, "--v must lie in (0, 1)");
  }
  const LgValue lg = lg_functional(m, v, opt.refine == "on");
  const Region region = polygon_region(m, lg.witness);
  const DescentPerturbation p = build_descent_perturbation(m, region, 0);
  const NormalField nf = make_normal_field(m, region.boundary, 0, std::max(0.2, p.radius));
  const VariationReport rep = descent_slope(m, region, p.u, nf);
  const VolumeCorrection corr = volume_correction(m, region, p.u, nf);
  const Field control = with_region_integral(m, region, p, 0.1);
  const VolumeCorrection negative = volume_correction(m, region, control, nf);

  double max_residual = 0.0;
  for (double r : p.constraint_residuals) {
    max_residual = std::max(max_residual, std::abs(r));
  }
  const bool ok = rep.bound_satisfied && max_residual < 1e-8 && corr.exponent >= 1.9 &&
                  negative.exponent < 1.5;
  const int code = ok ? kOk : kViolation;

  json r = base_report(opt, spec);
  r["v"] = v;
  r["region_fraction"] = region.volume_fraction;
  r["perturbation"] = {{"vertex", p.vertex},
                       {"center", point_json(p.support_center)},
                       {"radius", p.radius},
                       {"support_radius", p.support_radius},
                       {"constraint_residuals", p.constraint_residuals}};
  r["normal_field_radius"] = nf.support_radius;
  r["conformal"] = {{"dV_dt", rep.conformal.dV_dt},         {"dV_dt_fd", rep.conformal.dV_dt_fd},
                    {"dA_dt", rep.conformal.dA_dt},         {"dA_dt_fd", rep.conformal.dA_dt_fd},
                    {"dVM_dt", rep.conformal.dVM_dt},       {"dVM_dt_fd", rep.conformal.dVM_dt_fd}};
  if (rep.flow_checked) {
    r["flow"] = {{"dV_ds", rep.flow.dV_ds},       {"dV_ds_fd", rep.flow.dV_ds_fd},
                 {"dA_ds", rep.flow.dA_ds},       {"dA_ds_fd", rep.flow.dA_ds_fd},
                 {"lambda", rep.flow.lambda}};
  } else {
    r["flow"] = nullptr;
  }
  json samples = json::array();
  for (const auto& cs : corr.samples) {
    samples.push_back({{"t", cs.t}, {"s", cs.s}});
  }
  r["s_of_t"] = samples;
  r["s_exponent"] = std::isfinite(corr.exponent) ? json(corr.exponent) : json("inf");
  r["negative_control_exponent"] =
      std::isfinite(negative.exponent) ? json(negative.exponent) : json("inf");
  r["slope_t"] = rep.t_samples;
  r["lg_values"] = rep.lg_values;
  r["lg_at_zero"] = rep.lg_at_zero;
  r["measured_slope"] = rep.measured_slope;
  r["richardson_slope"] = rep.richardson_slope;
  r["paper_bound"] = rep.paper_bound;
  r["bound_satisfied"] = rep.bound_satisfied;
  r["verdict"] = ok ? "PASS" : "FAIL";
  r["exit_code"] = code;
  write_output(opt.out, dump(r));
  return code;
}

json certificate_json(const AdmissibilityCertificate& c) {
  return {{"t_checked", c.t_checked},   {"min_slack", c.min_slack},
          {"witness_node", c.witness_node}, {"witness_t", c.witness_t},
          {"verdict", to_string(c.verdict)}};
}

int cmd_rigidity(const Options& opt, const MetricSpec& spec, const ConformalMetric& m) {
  const std::vector<double> volumes = opt.volumes.empty() ? std::vector<double>{0.3}
                                                          : parse_volumes(opt.volumes);
  ProbeOptions po;
  po.refine = opt.refine == "on";
  const RigidityVerdict verdict = rigidity_probe(m, volumes, po);
  json r = base_report(opt, spec);
  r["volumes"] = volumes;
  json points = json::array();
  for (const auto& p : verdict.probed_points) {
    points.push_back({{"v", p.v},
                      {"vertex", p.vertex},
                      {"point", point_json(p.point)},
                      {"slack", p.slack},
                      {"status", p.status}});
  }
  r["probed_points"] = points;
  r["descent_found"] = verdict.descent_found;
  r["conclusion"] = to_string(verdict.conclusion);
  if (verdict.descent_witness) {
    const DescentWitness& w = *verdict.descent_witness;
    json nodes = json::array();
    json values = json::array();
    for (std::size_t k = 0; k < w.perturbation.u.size(); ++k) {
      if (w.perturbation.u[k] != 0.0) {
        nodes.push_back(k);
        values.push_back(w.perturbation.u[k]);
      }
    }
    r["witness"] = {{"v", w.v},
                    {"vertex", w.perturbation.vertex},
                    {"center", point_json(w.perturbation.support_center)},
                    {"radius", w.perturbation.radius},
                    {"constraint_residuals", w.perturbation.constraint_residuals},
                    {"t_star", w.t_star},
                    {"slope_t", w.t_samples},
                    {"measured_slope", w.report.measured_slope},
                    {"paper_bound", w.report.paper_bound},
                    {"certificate", certificate_json(w.certificate)},
                    {"perturbation_nodes", nodes},
                    {"perturbation_values", values}};
  } else {
    r["witness"] = nullptr;
  }
  r["exit_code"] = kOk;
  write_output(opt.out, dump(r));
  return kOk;
}

int cmd_rp2(const Options& opt, const MetricSpec& spec, const ConformalMetric& m) {
  if (m.base() != Base::ProjectivePlane) {
    throw Error(ErrorKind::Precondition, "the rp2 command needs an rp2 spec");
  }
  const std::vector<double> volumes =
      parse_volumes(opt.volumes.empty() ? "0.1:0.5:0.1" : opt.volumes);
  const bool refine = opt.refine == "on";
  const FactorReport rep = factor_relation_check(m, volumes, refine);
  const double pair[2] = {0.3, 0.7};
  const std::vector<LgValue> sym = lg_functional(m, pair, refine);
  const double low = sym[0].value;
  const double high = sym[1].value;
  const bool symmetric = std::abs(low - high) <= 2e-3;
  const bool ok = rep.pass && symmetric;
  const int code = ok ? kOk : kViolation;
  json r = base_report(opt, spec);
  json entries = json::array();
  for (const auto& e : rep.entries) {
    entries.push_back({{"v", e.v},
                       {"downstairs_value", e.downstairs_value},
                       {"upstairs_value", e.upstairs_value},
                       {"ratio", e.ratio},
                       {"upstairs_fraction", e.upstairs_fraction},
                       {"separation", e.separation},
                       {"pass", e.pass}});
  }
  r["entries"] = entries;
  r["symmetry"] = {{"v", {0.3, 0.7}}, {"values", {low, high}}, {"pass", symmetric}};
  r["verdict"] = ok ? "PASS" : "FAIL";
  r["exit_code"] = code;
  write_output(opt.out, dump(r));
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  configure_threads_from_env();
  CLI::App app{"Isoperimetric profiles and Levy-Gromov experiments on conformal spheres"};
  app.set_version_flag("--version", kVersion);
  Options opt;
  app.add_option("command", opt.command, "profile | check-lg | variation | rigidity | rp2")
      ->required()
      ->check(CLI::IsMember({"profile", "check-lg", "variation", "rigidity", "rp2"}));
  app.add_option("--spec", opt.spec_path, "metric specification (JSON)")->required();
  app.add_option("--volumes", opt.volumes, "volume fractions a:b:step");
  app.add_option("--v", opt.v, "volume fraction for the variation command");
  app.add_option("--refine", opt.refine, "flow refinement on|off")
      ->check(CLI::IsMember({"on", "off"}));
  app.add_option("--grid", opt.grid, "grid override NxM (n_theta x n_phi)");
  app.add_option("--out", opt.out, "output file (written atomically)");
  app.add_flag("--json", opt.json, "JSON report instead of CSV for the profile command");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kParse;
  }

  const auto start = std::chrono::steady_clock::now();
  int code = kOk;
  try {
    MetricSpec spec = parse_metric_spec(read_file(opt.spec_path));
    apply_grid_override(spec, opt.grid);
    const ConformalMetric m = build_metric(spec);
    if (opt.command == "profile") {
      code = cmd_profile(opt, spec, m);
    } else if (opt.command == "check-lg") {
      code = cmd_check_lg(opt, spec, m);
    } else if (opt.command == "variation") {
      code = cmd_variation(opt, spec, m);
    } else if (opt.command == "rigidity") {
      code = cmd_rigidity(opt, spec, m);
    } else {
      code = cmd_rp2(opt, spec, m);
    }
  } catch (const Error& e) {
    std::cerr << "lglab: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "lglab: " << e.what() << "\n";
    return kViolation;
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cerr << "lglab " << opt.command << ": exit " << code << ", " << fmt12(elapsed) << " s\n";
  return code;
}
