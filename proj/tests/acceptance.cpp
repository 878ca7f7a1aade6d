// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "lglab/error.hpp"
#include "lglab/geometry.hpp"
#include "lglab/isoperimetry.hpp"
#include "lglab/metric_spec.hpp"
#include "lglab/quotient.hpp"
#include "lglab/rigidity.hpp"
#include "lglab/variation.hpp"

using namespace lglab;

namespace {

constexpr double kProfileRelTol = 1e-3;
constexpr double kProfileSeconds = 60.0;
constexpr double kSymmetryTol = 2e-3;
constexpr double kMarginTol = 1e-6;
constexpr int kMinLgMetrics = 5;
constexpr int kMinTriples = 20;
constexpr double kFdAbsTol = 1e-4;
constexpr double kFdRelTol = 1e-2;
constexpr double kLambdaTol = 1e-3;
constexpr double kSlopeGate = -0.9 / (4.0 * M_PI);
constexpr double kResidualTol = 1e-8;
constexpr double kExponentMin = 1.9;
constexpr double kControlMax = 1.5;
constexpr double kRigiditySeconds = 600.0;
constexpr double kScalingTol = 1e-4;
constexpr double kQuotientTol = 1e-6;
constexpr double kConcentrationEnd = 0.5;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ConformalMetric spec_metric(const std::string& name) {
  return build_metric(parse_metric_spec(read_file(std::string(LGLAB_SPEC_DIR) + "/" + name)));
}

struct RunResult {
  int status = -1;
  std::string out;
};

RunResult run(const std::string& args, const std::string& env = "") {
  RunResult r;
  const std::string cmd = env + std::string(LGLAB_CLI) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

// Parses the profile CSV into (v, normalized) pairs.
std::vector<std::pair<double, double>> parse_profile(const std::string& csv) {
  std::vector<std::pair<double, double>> rows;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::istringstream ls(line);
    std::string v, area, norm;
    std::getline(ls, v, ',');
    std::getline(ls, area, ',');
    std::getline(ls, norm, ',');
    rows.emplace_back(std::stod(v), std::stod(norm));
  }
  return rows;
}

Outcome round_profile() {
  const auto t0 = Clock::now();
  const RunResult r = run("profile --spec " + std::string(LGLAB_SPEC_DIR) + "/round_sphere.json");
  const double secs = seconds_since(t0);
  const auto rows = parse_profile(r.out);
  double worst = 0.0;
  for (auto [v, x] : rows) {
    const double exact = std::sqrt(v * (1.0 - v));
    worst = std::max(worst, std::abs(x - exact) / exact);
  }
  Outcome o;
  o.pass = r.status == 0 && rows.size() == 9 && worst <= kProfileRelTol && secs <= kProfileSeconds;
  o.detail = "max rel err " + fmt("%.2e", worst) + " over " + std::to_string(rows.size()) +
             " volumes (tol 1e-3), " + fmt("%.1f", secs) + " s (limit 60 s)";
  return o;
}

Outcome rp2_profile() {
  const RunResult r = run("profile --spec " + std::string(LGLAB_SPEC_DIR) +
                          "/round_rp2.json --volumes 0.1:0.9:0.1");
  const auto rows = parse_profile(r.out);
  double worst = 0.0;
  double low = NAN;
  double high = NAN;
  int counted = 0;
  for (auto [v, x] : rows) {
    if (v <= 0.5 + 1e-12) {
      const double exact = std::sqrt(v * (2.0 - v));
      worst = std::max(worst, std::abs(x - exact) / exact);
      ++counted;
    }
    if (std::abs(v - 0.3) < 1e-9) low = x;
    if (std::abs(v - 0.7) < 1e-9) high = x;
  }
  const double sym = std::abs(low - high);
  Outcome o;
  o.pass = r.status == 0 && counted == 5 && worst <= kProfileRelTol && sym <= kSymmetryTol;
  o.detail = "max rel err " + fmt("%.2e", worst) + " on v<=0.5 (tol 1e-3), |L(0.3)-L(0.7)| " +
             fmt("%.2e", sym) + " (tol 2e-3)";
  return o;
}

const char* kLgSuite[] = {
    R"({"base":"sphere","K":1,"conformal":[{"type":"harmonic","l":0,"m":0,"coeff":-0.21269446},{"type":"bump","center":[1.0,0.5],"width":1.0,"height":0.004}]})",
    R"({"base":"sphere","K":1,"conformal":[{"type":"harmonic","l":0,"m":0,"coeff":-0.1},{"type":"bump","center":[0.4,2.0],"width":0.8,"height":0.008}]})",
    R"({"base":"sphere","K":1,"conformal":[{"type":"harmonic","l":0,"m":0,"coeff":-0.08},{"type":"harmonic","l":2,"m":0,"coeff":0.004}]})",
    R"({"base":"sphere","K":1,"conformal":[{"type":"harmonic","l":0,"m":0,"coeff":-0.15},{"type":"bump","center":[2.0,1.0],"width":0.7,"height":0.006},{"type":"bump","center":[1.2,4.0],"width":0.9,"height":0.008}]})",
    R"({"base":"sphere","K":1,"conformal":[{"type":"harmonic","l":0,"m":0,"coeff":-0.04},{"type":"harmonic","l":3,"m":-2,"coeff":0.002},{"type":"harmonic","l":1,"m":1,"coeff":0.01}]})",
    R"({"base":"sphere","K":1,"conformal":[{"type":"harmonic","l":0,"m":0,"coeff":-0.01},{"type":"harmonic","l":1,"m":0,"coeff":0.03}]})",
};

Outcome lg_margins() {
  const std::vector<double> vs = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  int certified = 0;
  double worst = INFINITY;
  double kmin = INFINITY;
  for (const char* text : kLgSuite) {
    const ConformalMetric m = build_metric(parse_metric_spec(text));
    const CurvatureField k = gauss_curvature(m);
    if (k.min_value < m.K()) continue;
    ++certified;
    kmin = std::min(kmin, k.min_value);
    worst = std::min(worst, check_levy_gromov(m, vs).min_margin);
  }
  Outcome o;
  o.pass = certified >= kMinLgMetrics && worst >= -kMarginTol;
  o.detail = std::to_string(certified) + " certified metrics (min K " + fmt("%.4f", kmin) +
             "), min margin " + fmt("%.3e", worst) + " (tol -1e-6)";
  return o;
}

Field random_bumps(const SphereGrid& g, std::mt19937_64& rng, int count, double hmax) {
  std::uniform_real_distribution<double> th(0.3, M_PI - 0.3);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> w(0.3, 0.9);
  std::uniform_real_distribution<double> h(-hmax, hmax);
  Field f(g.size(), 0.0);
  for (int b = 0; b < count; ++b) {
    const Vec3 c = from_spherical(th(rng), ph(rng));
    const double width = w(rng);
    const double height = h(rng);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double s = arc_distance(g.node(k), c) / width;
      if (s < 1.0) f[k] += height * std::pow(1.0 - s * s, 4);
    }
  }
  return f;
}

Outcome first_variations() {
  const SphereGrid g(128, 256);
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> th(0.4, M_PI - 0.4);
  std::uniform_real_distribution<double> ph(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> ap(0.5, 2.0);
  std::uniform_real_distribution<double> sh(-0.3, 0.3);

  int conformal_ok = 0;
  double worst_fd = 0.0;
  for (int n = 0; n < kMinTriples + 4; ++n) {
    const ConformalMetric m(Base::Sphere, g, random_bumps(g, rng, 2, 0.3), 1.0);
    const Region r = make_cap_region(m, Cap{from_spherical(th(rng), ph(rng)), ap(rng)}, n % 3 == 0);
    const Field u = random_bumps(g, rng, 3, 1.0);
    try {
      const ConformalVariation cv = first_variation_conformal(m, r, u);
      auto excess = [](double a, double fd) {
        return std::abs(a - fd) / std::max(kFdAbsTol, kFdRelTol * std::abs(a));
      };
      worst_fd = std::max({worst_fd, excess(cv.dV_dt, cv.dV_dt_fd), excess(cv.dA_dt, cv.dA_dt_fd),
                           excess(cv.dVM_dt, cv.dVM_dt_fd)});
      if (excess(cv.dV_dt, cv.dV_dt_fd) <= 1.0 && excess(cv.dA_dt, cv.dA_dt_fd) <= 1.0) {
        ++conformal_ok;
      }
    } catch (const Error&) {
    }
  }

  int flow_ok = 0;
  double worst_lambda = 0.0;
  for (int n = 0; n < kMinTriples; ++n) {
    const double c = sh(rng);
    const ConformalMetric m = ConformalMetric::round(Base::Sphere, g).shifted(c);
    const double a = ap(rng);
    const Region r = make_cap_region(m, Cap{from_spherical(th(rng), ph(rng)), a});
    const NormalField nf = make_normal_field(m, r.boundary, n % r.boundary.size(), 0.3);
    try {
      const FlowVariation fv = first_variation_flow(m, r, nf);
      const double expect = std::exp(-c) / std::tan(a);
      const double err = std::max(std::abs(fv.dA_ds / fv.dV_ds - expect),
                                  std::abs(fv.dA_ds_fd / fv.dV_ds_fd - expect));
      worst_lambda = std::max(worst_lambda, err);
      if (err <= kLambdaTol) ++flow_ok;
    } catch (const Error&) {
    }
  }
  Outcome o;
  o.pass = conformal_ok >= kMinTriples && flow_ok >= kMinTriples;
  o.detail = std::to_string(conformal_ok) + "/" + std::to_string(kMinTriples + 4) +
             " conformal triples within max(1e-4,1e-2|x|) (worst ratio " + fmt("%.2e", worst_fd) +
             "), " + std::to_string(flow_ok) + "/" + std::to_string(kMinTriples) +
             " caps with |dA/dV - cot| <= 1e-3 (worst " + fmt("%.1e", worst_lambda) + ")";
  return o;
}

Outcome slope_bound() {
  const SphereGrid g(256, 512);
  const ConformalMetric m = ConformalMetric::round(Base::Sphere, g);
  bool ok = true;
  std::string detail;
  for (double v : {0.25, 0.5}) {
    const LgValue lg = lg_functional(m, v);
    const Region region = polygon_region(m, lg.witness);
    const DescentPerturbation p = build_descent_perturbation(m, region, 0);
    const NormalField nf = make_normal_field(m, region.boundary, 0, std::max(0.2, p.radius));
    const VariationReport rep = descent_slope(m, region, p.u, nf);
    const VolumeCorrection corr = volume_correction(m, region, p.u, nf);
    const VolumeCorrection control =
        volume_correction(m, region, with_region_integral(m, region, p, 0.1), nf);
    double residual = 0.0;
    for (double x : p.constraint_residuals) residual = std::max(residual, std::abs(x));
    double max_s = 0.0;
    for (const auto& s : corr.samples) max_s = std::max(max_s, std::abs(s.s));
    ok = ok && rep.measured_slope <= kSlopeGate && residual < kResidualTol &&
         corr.exponent >= kExponentMin && control.exponent < kControlMax;
    detail += "v=" + fmt("%.2f", v) + ": slope " + fmt("%.5f", rep.measured_slope) +
              " (gate -0.07162), residual " + fmt("%.1e", residual) + ", exponent " +
              (std::isfinite(corr.exponent) ? fmt("%.3f", corr.exponent)
                                            : "inf (max|s| " + fmt("%.0e", max_s) + ")") +
              ", control " + fmt("%.3f", control.exponent) + "; ";
  }
  return {ok, detail};
}

Outcome rigidity_dichotomy() {
  const auto t0 = Clock::now();
  const std::vector<double> vs = {0.3};
  const RigidityVerdict s2 = rigidity_probe(spec_metric("round_sphere.json"), vs);
  const RigidityVerdict rp2 = rigidity_probe(spec_metric("round_rp2.json"), vs);
  const ConformalMetric slack = spec_metric("slack_bump.json");
  const RigidityVerdict bump = rigidity_probe(slack, vs);
  bool witness_ok = false;
  std::string wdetail = "no witness";
  if (bump.descent_witness) {
    const DescentWitness& w = *bump.descent_witness;
    // Re-validate the witness independently of the probe's own bookkeeping.
    const AdmissibilityCertificate again =
        certify_admissibility(slack, w.perturbation.u, w.certificate.t_checked);
    witness_ok = again.verdict == Admissibility::Admissible && w.report.measured_slope < 0.0 &&
                 w.t_star > 0.0;
    wdetail = "witness t* " + fmt("%.2e", w.t_star) + ", slope " +
              fmt("%.5f", w.report.measured_slope) + ", recertified min slack " +
              fmt("%.3e", again.min_slack);
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = s2.conclusion == Conclusion::NoAdmissibleDescentFound &&
           rp2.conclusion == Conclusion::NoAdmissibleDescentFound &&
           bump.conclusion == Conclusion::NotCritical && witness_ok && secs <= kRigiditySeconds;
  o.detail = std::string("S2 ") + to_string(s2.conclusion) + ", RP2 " + to_string(rp2.conclusion) +
             ", slack bump " + to_string(bump.conclusion) + " (" + wdetail + "), " +
             fmt("%.1f", secs) + " s (limit 600 s)";
  return o;
}

Outcome scaling_descent() {
  const ConformalMetric m = ConformalMetric::round(Base::Sphere, SphereGrid(256, 512)).with_K(0.0);
  const ScalingDescent sd = scaling_descent_nonpositive_K(m, 0.5);
  Outcome o;
  o.pass = std::abs(sd.derivative + 0.5) <= kScalingTol &&
           sd.certificate.verdict == Admissibility::Admissible;
  o.detail = "dL/dt " + fmt("%.7f", sd.derivative) + " vs -0.5 (tol 1e-4), certificate " +
             to_string(sd.certificate.verdict);
  return o;
}

Outcome quotient_identities() {
  double worst = 0.0;
  int regions = 0;
  bool factor_ok = true;
  const std::vector<double> vs = {0.1, 0.2, 0.3, 0.4, 0.5};
  for (const char* name : {"round_rp2.json", "rp2_bumps.json"}) {
    const ConformalMetric m = spec_metric(name);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> th(0.2, M_PI - 0.2);
    std::uniform_real_distribution<double> ph(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> rad(0.2, 0.9);
    for (int n = 0; n < 4; ++n) {
      const Vec3 c = from_spherical(th(rng), ph(rng));
      const double r0 = rad(rng);
      const Curve circle = geodesic_circle(c, r0, 128);
      Curve wobble;
      for (int k = 0; k < 128; ++k) {
        const Vec3 dir = normalized(tangential(c, circle[k]));
        wobble.vertices.push_back(
            sphere_exp(c, dir * (r0 * (1.0 + 0.25 * std::sin(2.0 * M_PI * (n + 2) * k / 128)))));
      }
      const LiftedRegion lr = lift_region(m, make_curve_region(m, wobble));
      worst = std::max({worst, std::abs(lr.upstairs_fraction[0] - 0.5 * lr.downstairs_fraction),
                        std::abs(lr.upstairs_fraction[1] - 0.5 * lr.downstairs_fraction),
                        std::abs(lr.upstairs_area[0] - lr.downstairs_area),
                        std::abs(lr.upstairs_area[1] - lr.downstairs_area)});
      ++regions;
    }
    const FactorReport rep = factor_relation_check(m, vs);
    for (const auto& e : rep.entries) {
      worst = std::max({worst, std::abs(e.upstairs_value - 0.5 * e.downstairs_value),
                        std::abs(e.upstairs_fraction - 0.5 * e.v)});
    }
    factor_ok = factor_ok && rep.pass;
  }
  Outcome o;
  o.pass = factor_ok && worst <= kQuotientTol;
  o.detail = std::to_string(regions) + " test regions + factor relation on v=0.1..0.5 (2 metrics), "
             "max deviation " + fmt("%.2e", worst) + " (tol 1e-6)";
  return o;
}

Outcome concentration() {
  const std::vector<double> vs = {0.2, 0.1, 0.05};
  const ConcentrationResult c = small_volume_concentration(spec_metric("single_bump.json"), vs);
  Outcome o;
  o.pass = c.non_increasing && c.distances.back() < kConcentrationEnd;
  o.detail = "distances " + fmt("%.4f", c.distances[0]) + " -> " + fmt("%.4f", c.distances[1]) +
             " -> " + fmt("%.4f", c.distances[2]) + " rad (slack 10%, end < 0.5)";
  return o;
}

Outcome determinism() {
  const std::string dir = LGLAB_WORK_DIR;
  const std::string specs = LGLAB_SPEC_DIR;
  struct Job {
    std::string args;
    bool to_file;
  };
  const std::vector<Job> jobs = {
      {"profile --spec " + specs + "/single_bump.json --grid 64x128", false},
      {"profile --json --spec " + specs + "/single_bump.json --grid 64x128", false},
      {"check-lg --spec " + specs + "/slack_bump.json --grid 64x128", false},
      {"variation --spec " + specs + "/round_sphere.json --grid 64x128 --v 0.25", true},
      {"rigidity --spec " + specs + "/slack_bump.json --grid 64x128", true},
      {"rp2 --spec " + specs + "/rp2_bumps.json --grid 64x128 --refine off", true},
  };
  int identical = 0;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    std::string out[2];
    for (int rep = 0; rep < 2; ++rep) {
      // The second run caps the thread count; results must not depend on it.
      const std::string env = rep == 0 ? "" : "LGLAB_THREADS=1 ";
      if (jobs[j].to_file) {
        const std::string path = dir + "/determinism_" + std::to_string(j) + "_" +
                                 std::to_string(rep) + ".json";
        const RunResult r = run(jobs[j].args + " --out " + path, env);
        out[rep] = std::to_string(r.status) + "\n" + read_file(path);
      } else {
        const RunResult r = run(jobs[j].args, env);
        out[rep] = std::to_string(r.status) + "\n" + r.out;
      }
    }
    if (out[0] == out[1] && out[0].size() > 2) ++identical;
  }
  Outcome o;
  o.pass = identical == static_cast<int>(jobs.size());
  o.detail = std::to_string(identical) + "/" + std::to_string(jobs.size()) +
             " commands byte-identical across two runs (default and single thread)";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {"C1 round-sphere profile", round_profile},
      {"C2 RP2 profile", rp2_profile},
      {"C3 Levy-Gromov margins", lg_margins},
      {"C4 first-variation formulas", first_variations},
      {"C5 step-one slope bound", slope_bound},
      {"C6 rigidity dichotomy", rigidity_dichotomy},
      {"C7 K<=0 scaling descent", scaling_descent},
      {"C8 quotient identities", quotient_identities},
      {"C9 small-volume concentration", concentration},
      {"C10 determinism", determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed;
}
