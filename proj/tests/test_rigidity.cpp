#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "lglab/error.hpp"
#include "lglab/geometry.hpp"
#include "lglab/metric_spec.hpp"
#include "lglab/rigidity.hpp"

using namespace lglab;

TEST(Admissibility, ZeroFieldKeepsRoundSphereAdmissible) {
  SphereGrid g(32, 64);
  const auto m = ConformalMetric::round(Base::Sphere, g);
  const Field u(g.size(), 0.0);
  const std::vector<double> ts = {-0.1, 0.0, 0.1};
  const auto cert = certify_admissibility(m, u, ts);
  EXPECT_EQ(cert.verdict, Admissibility::Admissible);
  EXPECT_NEAR(cert.min_slack, 0.0, 1e-12);
}

TEST(Admissibility, ConstantFieldSignDecides) {
  // exp(2tc) g has curvature exp(-2tc): admissible iff t c <= 0.
  SphereGrid g(32, 64);
  const auto m = ConformalMetric::round(Base::Sphere, g);
  const Field u(g.size(), 1.0);
  const std::vector<double> neg = {-0.05};
  const std::vector<double> pos = {0.05};
  EXPECT_EQ(certify_admissibility(m, u, neg).verdict, Admissibility::Admissible);
  const auto bad = certify_admissibility(m, u, pos);
  EXPECT_EQ(bad.verdict, Admissibility::Violated);
  EXPECT_NEAR(bad.min_slack, std::exp(-0.1) - 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(bad.witness_t, 0.05);
  const std::vector<double> too_far = {0.2};
  EXPECT_THROW(certify_admissibility(m, u, too_far), Error);
}

TEST(Admissibility, StepSearchFindsLargestCertifiedPowerOfTwo) {
  SphereGrid g(32, 64);
  const auto m = ConformalMetric::round(Base::Sphere, g).shifted(-0.05);
  const Field u(g.size(), 1.0);
  // Curvature exp(-2(t - 0.05)) >= 1 iff t <= 0.05.
  const auto t = admissible_step(m, u);
  ASSERT_TRUE(t);
  EXPECT_DOUBLE_EQ(*t, 1e-3 * 32.0);
}

TEST(ScalingDescent, FlatBoundGivesMinusTheFunctional) {
  SphereGrid g(64, 128);
  const auto m = ConformalMetric::round(Base::Sphere, g).with_K(0.0);
  const ScalingDescent sd = scaling_descent_nonpositive_K(m, 0.5);
  EXPECT_NEAR(sd.derivative, -0.5, 1e-4);
  EXPECT_NEAR(sd.expected, -0.5, 1e-6);
  EXPECT_EQ(sd.certificate.verdict, Admissibility::Admissible);
}

TEST(ScalingDescent, RejectsPositiveBound) {
  SphereGrid g(32, 64);
  const auto m = ConformalMetric::round(Base::Sphere, g);
  try {
    scaling_descent_nonpositive_K(m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Domain);
  }
}

TEST(RigidityProbe, RejectsMetricsViolatingTheBound) {
  SphereGrid g(32, 64);
  const auto m = ConformalMetric::round(Base::Sphere, g).shifted(0.1);
  const std::vector<double> vs = {0.3};
  EXPECT_THROW(rigidity_probe(m, vs), Error);
}

TEST(RigidityProbe, RoundSphereHasNoAdmissibleDescent) {
  SphereGrid g(64, 128);
  const auto m = ConformalMetric::round(Base::Sphere, g);
  const std::vector<double> vs = {0.3};
  ProbeOptions opt;
  opt.points_per_volume = 4;
  const RigidityVerdict r = rigidity_probe(m, vs, opt);
  EXPECT_FALSE(r.descent_found);
  EXPECT_EQ(r.conclusion, Conclusion::NoAdmissibleDescentFound);
  EXPECT_EQ(r.probed_points.size(), 4u);
}

TEST(Concentration, PreconditionOnTiedMaximum) {
  SphereGrid g(32, 64);
  const auto m = ConformalMetric::round(Base::Sphere, g);
  const std::vector<double> vs = {0.1};
  EXPECT_THROW(small_volume_concentration(m, vs, false), Error);
}
