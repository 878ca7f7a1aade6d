#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lglab/conformal_metric.hpp"
#include "lglab/error.hpp"
#include "lglab/geometry.hpp"
#include "lglab/region.hpp"

using namespace lglab;

namespace {

// Area of the geodesic triangle with side lengths a, b, c (L'Huilier).
double triangle_area(double a, double b, double c) {
  const double s = 0.5 * (a + b + c);
  return 4.0 * std::atan(std::sqrt(std::tan(s / 2) * std::tan((s - a) / 2) *
                                   std::tan((s - b) / 2) * std::tan((s - c) / 2)));
}

// Area of the regular geodesic n-gon inscribed in the circle of radius a.
double inscribed_polygon_area(double a, int n) {
  const double side = 2.0 * std::asin(std::sin(a) * std::sin(M_PI / n));
  return n * triangle_area(a, a, side);
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  return normalized(Vec3{d(rng), d(rng), d(rng)});
}

}  // namespace

TEST(InsideFraction, LinearCasesAreExact) {
  CellJet f;
  f.d = 0.0;
  f.fs = 1.0;
  EXPECT_NEAR(inside_fraction(f, 1.0, 1.0, 0.0), 0.5, 1e-15);
  f.d = -0.5;
  EXPECT_NEAR(inside_fraction(f, 1.0, 1.0, 0.0), 0.75, 1e-15);
  f.d = 5.0;
  EXPECT_EQ(inside_fraction(f, 1.0, 1.0, 0.0), 0.0);
  f.d = -5.0;
  EXPECT_EQ(inside_fraction(f, 1.0, 1.0, 0.0), 1.0);
  // Diagonal line through the center: half the square.
  CellJet g;
  g.fs = 1.0;
  g.ft = 1.0;
  EXPECT_NEAR(inside_fraction(g, 1.0, 1.0, 0.0), 0.5, 1e-15);
  // The linear-only overload agrees.
  EXPECT_NEAR(inside_fraction(-0.5, 1.0, 0.0, 1.0, 1.0), 0.75, 1e-15);
}

TEST(InsideFraction, AreaWeightShiftsMass) {
  // Inside = {s < 0}; weight 1 + w s puts less mass on the negative side.
  CellJet f;
  f.fs = 1.0;
  const double w = 0.2;
  const double a = 1.0;
  // Weighted mass of [-a, 0] over total: (a - w a^2 / 2) / (2 a).
  EXPECT_NEAR(inside_fraction(f, a, 1.0, w), (a - 0.5 * w * a * a) / (2.0 * a), 1e-15);
}

TEST(InsideFraction, ComplementProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n = 0; n < 500; ++n) {
    CellJet f{0.3 * u(rng), u(rng), u(rng), 0.1 * u(rng), 0.1 * u(rng), 0.1 * u(rng)};
    CellJet g{-f.d, -f.fs, -f.ft, -f.fss, -f.fst, -f.ftt};
    const double a = 0.5 + 0.4 * u(rng);
    const double b = 0.5 + 0.4 * u(rng);
    const double w = 0.1 * u(rng);
    const double x = inside_fraction(f, a, b, w);
    const double y = inside_fraction(g, a, b, w);
    EXPECT_GE(x, 0.0);
    EXPECT_LE(x, 1.0);
    if (x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0) {
      EXPECT_NEAR(x + y, 1.0, 1e-12);
    }
  }
}

TEST(InsideFraction, MonotoneInOffset) {
  CellJet f;
  f.fs = 0.7;
  f.ft = -0.4;
  f.ftt = 0.05;
  double prev = 1.0;
  for (double d = -2.0; d <= 2.0; d += 0.01) {
    f.d = d;
    const double x = inside_fraction(f, 1.0, 0.8, 0.05);
    EXPECT_LE(x, prev + 1e-15);
    prev = x;
  }
}

TEST(CapIndicator, MatchesClosedFormVolumes) {
  SphereGrid g(256, 512);
  const auto m = ConformalMetric::round(Base::Sphere, g);
  std::mt19937_64 rng(5);
  for (double v : {0.02, 0.1, 0.25, 0.5, 0.8}) {
    const double a = std::acos(1.0 - 2.0 * v);
    for (int rep = 0; rep < 3; ++rep) {
      const Cap cap{random_unit(rng), a};
      EXPECT_NEAR(volume_fraction(m, cap_indicator(g, Base::Sphere, cap)), v, 2e-8);
    }
    const Cap polar{{0, 0, 1}, a};
    EXPECT_NEAR(volume_fraction(m, cap_indicator(g, Base::Sphere, polar)), v, 2e-8);
  }
}

TEST(CapIndicator, ResolutionConvergence) {
  const double v = 0.15;
  const double a = std::acos(1.0 - 2.0 * v);
  const Cap cap{normalized(Vec3{0.4, 0.1, 0.6}), a};
  double prev = 0.0;
  for (int nt : {32, 64, 128}) {
    SphereGrid g(nt, 2 * nt);
    const auto m = ConformalMetric::round(Base::Sphere, g);
    const double err = std::abs(volume_fraction(m, cap_indicator(g, Base::Sphere, cap)) - v);
    if (prev > 0.0) {
      EXPECT_LT(err, prev);
    }
    prev = err;
  }
  EXPECT_LT(prev, 1e-6);
}

TEST(CapIndicator, ProjectivePlaneFractions) {
  // On RP^2 a metric ball of radius a has fraction 1 - cos a.
  SphereGrid g(256, 512);
  const auto m = ConformalMetric::round(Base::ProjectivePlane, g);
  for (double a : {0.3, 0.8, 1.2, M_PI / 2}) {
    const Field w = cap_indicator(g, Base::ProjectivePlane, Cap{normalized(Vec3{1, -1, 2}), a});
    EXPECT_NEAR(volume_fraction(m, w), 1.0 - std::cos(a), 2e-8);
    for (std::size_t k = 0; k < g.size(); ++k) ASSERT_EQ(w[k], w[g.antipode(k)]);
  }
}

TEST(CurveIndicator, PolygonAreasMatchSphericalExcess) {
  SphereGrid g(256, 512);
  const auto m = ConformalMetric::round(Base::Sphere, g);
  std::mt19937_64 rng(9);
  for (double v : {0.05, 0.2, 0.35}) {
    const double a = std::acos(1.0 - 2.0 * v);
    const double exact = inscribed_polygon_area(a, 64) / (4.0 * M_PI);
    for (int rep = 0; rep < 3; ++rep) {
      const Region r = make_curve_region(m, geodesic_circle(random_unit(rng), a, 64));
      EXPECT_NEAR(r.volume_fraction, exact, 1e-7);
    }
  }
}

TEST(CurveIndicator, NonConvexPolygonComplementsItsReverse) {
  SphereGrid g(128, 256);
  const auto m = ConformalMetric::round(Base::Sphere, g);
  Curve star;
  for (int k = 0; k < 40; ++k) {
    const double s = 2.0 * M_PI * k / 40;
    const double rad = 0.5 + 0.15 * std::cos(5.0 * s);
    star.vertices.push_back(from_spherical(rad, s));
  }
  const Region in = make_curve_region(m, star);
  const Region out = make_curve_region(m, reversed(star));
  EXPECT_NEAR(in.volume_fraction + out.volume_fraction, 1.0, 1e-12);
  EXPECT_GT(in.volume_fraction, 0.0);
  EXPECT_LT(in.volume_fraction, 0.2);
}

TEST(BoundaryLength, CapCircleIsExact) {
  SphereGrid g(64, 128);
  const auto m = ConformalMetric::round(Base::Sphere, g);
  for (double a : {0.2, 1.0, 2.5}) {
    EXPECT_NEAR(cap_boundary_length(m, Cap{normalized(Vec3{1, 2, 2}), a}), 2.0 * M_PI * std::sin(a),
                1e-12);
  }
  const Region r = make_cap_region(m, Cap{{0, 1, 0}, 0.7}, true);
  EXPECT_NEAR(region_measures(m, r).boundary_area, 2.0 * M_PI * std::sin(0.7), 1e-12);
}

TEST(Region, MeasuresRejectEmptyRegions) {
  SphereGrid g(32, 64);
  const auto m = ConformalMetric::round(Base::Sphere, g);
  Region r = make_cap_region(m, Cap{{0, 0, 1}, 1.0});
  std::fill(r.indicator.begin(), r.indicator.end(), 0.0);
  EXPECT_THROW(region_measures(m, r), Error);
  EXPECT_THROW(make_cap_region(m, Cap{{0, 0, 1}, 4.0}), Error);
}

TEST(Region, BarycenterOfSmallCapIsNearItsCenter) {
  SphereGrid g(128, 256);
  const auto m = ConformalMetric::round(Base::Sphere, g);
  const Vec3 c = normalized(Vec3{0.2, 0.5, -0.7});
  const Region r = make_cap_region(m, Cap{c, 0.3});
  EXPECT_LT(arc_distance(barycenter(m, r), c), 1e-3);
}
