#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "lglab/error.hpp"
#include "lglab/geometry.hpp"
#include "lglab/isoperimetry.hpp"
#include "lglab/metric_spec.hpp"

using namespace lglab;

namespace {

ConformalMetric bump_metric(int nt, double theta, double phi, double width, double height,
                            double shift = 0.0) {
  MetricSpec spec;
  spec.n_theta = nt;
  spec.n_phi = 2 * nt;
  spec.conformal.push_back(BumpTerm{theta, phi, width, height});
  if (shift != 0.0) spec.conformal.push_back(HarmonicTerm{0, 0, shift * std::sqrt(4.0 * M_PI)});
  return build_metric(spec);
}

}  // namespace

TEST(CapSweep, RoundSphereMatchesClosedForm) {
  SphereGrid g(128, 256);
  const auto m = ConformalMetric::round(Base::Sphere, g);
  const std::vector<double> vs = {0.1, 0.3, 0.5, 0.7, 0.9};
  const ProfileCurve p = cap_sweep(m, vs);
  ASSERT_EQ(p.samples.size(), vs.size());
  for (const auto& s : p.samples) {
    ASSERT_TRUE(s.witness);
    EXPECT_EQ(s.witness->kind, RegionKind::Cap);
    EXPECT_NEAR(s.normalized, std::sqrt(s.v * (1.0 - s.v)), 1e-6) << "v=" << s.v;
    EXPECT_NEAR(s.witness->volume_fraction, s.v, 1e-8);
  }
}

TEST(CapSweep, RoundProjectivePlaneMatchesClosedForm) {
  SphereGrid g(128, 256);
  const auto m = ConformalMetric::round(Base::ProjectivePlane, g);
  const std::vector<double> vs = {0.1, 0.25, 0.5};
  for (const auto& s : cap_sweep(m, vs).samples) {
    EXPECT_NEAR(s.normalized, std::sqrt(s.v * (2.0 - s.v)), 1e-6) << "v=" << s.v;
  }
}

TEST(CapSweep, ComplementSymmetry) {
  const auto m = bump_metric(64, 1.0, 2.0, 0.8, 0.1);
  const std::vector<double> vs = {0.2, 0.35, 0.65, 0.8};
  const ProfileCurve p = cap_sweep(m, vs);
  EXPECT_NEAR(p.samples[0].normalized, p.samples[3].normalized, 2e-3);
  EXPECT_NEAR(p.samples[1].normalized, p.samples[2].normalized, 2e-3);
}

TEST(LgFunctional, ScalingInvariance) {
  const auto m = bump_metric(64, 0.7, 1.0, 0.9, 0.05);
  const double base = lg_functional(m, 0.3, false).value;
  for (double lambda : {0.5, 2.0}) {
    const double scaled = lg_functional(m.shifted(std::log(lambda)), 0.3, false).value;
    EXPECT_NEAR(scaled, base / lambda, 1e-6) << "lambda=" << lambda;
  }
}

TEST(LgFunctional, BatchMatchesSingle) {
  const auto m = bump_metric(64, 0.7, 1.0, 0.9, 0.05);
  const std::vector<double> vs = {0.4, 0.2};
  const auto batch = lg_functional(m, vs, false);
  EXPECT_EQ(batch[0].value, lg_functional(m, 0.2, false).value);
  EXPECT_EQ(batch[1].value, lg_functional(m, 0.4, false).value);
}

TEST(CurveFlow, WigglyLatitudeRelaxesToEquator) {
  SphereGrid g(64, 128);
  const auto m = ConformalMetric::round(Base::Sphere, g);
  Curve c;
  for (int k = 0; k < 128; ++k) {
    const double s = 2.0 * M_PI * k / 128;
    c.vertices.push_back(from_spherical(M_PI / 2 + 0.05 * std::sin(3.0 * s), s));
  }
  const Region r = make_curve_region(m, reversed(c));
  RefineOptions opt;
  opt.max_steps = 50000;
  const RefineResult rr = curve_flow_refine(m, r, 0.5, opt);
  EXPECT_TRUE(rr.converged);
  EXPECT_TRUE(rr.improved);
  EXPECT_LE(rr.final_area, rr.initial_area + 1e-9);
  EXPECT_NEAR(rr.final_area, 2.0 * M_PI, 1e-3);
  EXPECT_NEAR(rr.region.volume_fraction, 0.5, 1e-6);
}

TEST(CurveFlow, StationaryCapIsReturnedUnchanged) {
  SphereGrid g(64, 128);
  const auto m = ConformalMetric::round(Base::Sphere, g);
  const Region r = make_cap_region(m, Cap{{0, 0, 1}, 1.0});
  const RefineResult rr = curve_flow_refine(m, r, r.volume_fraction);
  EXPECT_TRUE(rr.converged);
  EXPECT_FALSE(rr.improved);
  EXPECT_EQ(rr.steps, 0);
  EXPECT_EQ(rr.final_area, rr.initial_area);
}

TEST(CurveFlow, NeverLengthensTheBoundary) {
  const auto m = bump_metric(64, 1.0, 0.5, 0.5, 0.05);
  RefineOptions opt;
  opt.max_steps = 3000;
  for (double offset : {0.1, 0.3, 0.5}) {
    const Region r = make_cap_region(m, Cap{from_spherical(1.0 + offset, 0.5), 0.6});
    const RefineResult rr = curve_flow_refine(m, r, r.volume_fraction, opt);
    EXPECT_LE(rr.final_area, rr.initial_area + 1e-9) << "offset=" << offset;
  }
}

TEST(CurveFlow, RejectsFarTargets) {
  SphereGrid g(32, 64);
  const auto m = ConformalMetric::round(Base::Sphere, g);
  const Region r = make_cap_region(m, Cap{{0, 0, 1}, 1.0});
  EXPECT_THROW(curve_flow_refine(m, r, r.volume_fraction + 0.1), Error);
}

TEST(LevyGromov, RoundSphereIsTheEqualityCase) {
  SphereGrid g(128, 256);
  const auto m = ConformalMetric::round(Base::Sphere, g);
  const std::vector<double> vs = {0.1, 0.5, 0.9};
  const LevyGromovReport rep = check_levy_gromov(m, vs);
  EXPECT_TRUE(rep.pass);
  for (const auto& e : rep.entries) EXPECT_NEAR(e.margin, 0.0, 1e-6);
}

TEST(LevyGromov, ProjectivePlaneHasPositiveMargin) {
  SphereGrid g(64, 128);
  const auto m = ConformalMetric::round(Base::ProjectivePlane, g);
  const std::vector<double> vs = {0.5};
  const LevyGromovReport rep = check_levy_gromov(m, vs, false);
  EXPECT_NEAR(rep.entries[0].margin, std::sqrt(0.75) - 0.5, 1e-6);
}

TEST(LevyGromov, HypothesisGateRejectsLowCurvature) {
  // A positive shift makes the sphere larger and its curvature exp(-2c) < 1.
  SphereGrid g(32, 64);
  const auto m = ConformalMetric::round(Base::Sphere, g).shifted(0.1);
  const std::vector<double> vs = {0.5};
  try {
    check_levy_gromov(m, vs, false);
    FAIL() << "expected a precondition error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Precondition);
  }
}

TEST(ModelProfile, ScalesWithCurvature) {
  EXPECT_DOUBLE_EQ(model_profile(0.5, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(model_profile(0.5, 4.0), 1.0);
  EXPECT_NEAR(model_profile(0.1, 1.0), 0.3, 1e-15);
}
