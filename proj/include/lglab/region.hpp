#pragma once

#include "lglab/conformal_metric.hpp"
#include "lglab/curve.hpp"

namespace lglab {

/// Geodesic ball of the round base metric. On the projective plane a cap
/// stands for the metric ball whose lift is the pair of caps about +-center.
struct Cap {
  Vec3 center;
  double aperture = 0.0;
};

enum class RegionKind { Cap, GridIndicator };

const char* to_string(RegionKind kind);

/// Candidate isoperimetric region.
///
/// `indicator` holds, per node of the full sphere grid, the fraction of the
/// node's cell inside the region (the even lift on the projective plane).
/// `boundary` is one boundary curve with the region on its left; on the
/// projective plane it is one of the two lifted components.
struct Region {
  RegionKind kind = RegionKind::GridIndicator;
  Cap cap;
  bool complement = false;
  Curve boundary;
  Field indicator;
  double volume_fraction = 0.0;
};

/// Number of vertices used for cap boundaries.
inline constexpr int kCapBoundaryVertices = 256;

/// Fraction of the rectangle [-a, a] x [-b, b] where d + gx x + gy y < 0,
/// i.e. the part of a cell on the negative side of a linearized signed
/// distance with value d and gradient (gx, gy) at the cell center.
double inside_fraction(double d, double gx, double gy, double a, double b);

/// Second-order cell model: f(s, t) = d + fs s + ft t + (fss s^2 + 2 fst s t + ftt t^2) / 2
/// on [-a, a] x [-b, b] with area weight proportional to 1 + w s.
struct CellJet {
  double d = 0.0;
  double fs = 0.0;
  double ft = 0.0;
  double fss = 0.0;
  double fst = 0.0;
  double ftt = 0.0;
};

/// Weighted fraction of the cell where f < 0: exact for the linear part,
/// first order in the quadratic part and in w.
double inside_fraction(const CellJet& f, double a, double b, double w);

/// Same, for the intersection of the regions f_k < 0.
double inside_fraction(std::span<const CellJet> jets, double a, double b, double w);

/// Fractional cell weights of a cap (or, on the projective plane, of the
/// pair of caps about +-center).
Field cap_indicator(const SphereGrid& grid, Base base, const Cap& cap);

/// Fractional cell weights of the region left of a closed curve; on the
/// projective plane, of its even lift.
Field curve_indicator(const SphereGrid& grid, Base base, const Curve& boundary);

Region make_cap_region(const ConformalMetric& m, const Cap& cap, bool complement = false,
                       int n_vertices = kCapBoundaryVertices);
Region make_curve_region(const ConformalMetric& m, Curve boundary);

struct RegionMeasures {
  double volume_fraction = 0.0;
  double boundary_area = 0.0;
  double volume = 0.0;
};

/// Volume fraction and boundary length of a region. Throws a domain error
/// for empty or full regions.
RegionMeasures region_measures(const ConformalMetric& m, const Region& r);

/// Length of the boundary circle of a cap, by the periodic midpoint rule
/// on the exact circle rather than on an inscribed polygon.
double cap_boundary_length(const ConformalMetric& m, const Cap& cap, int samples = 512);

/// Boundary length consistent with the region's indicator: the exact
/// circle for caps, the polygon otherwise.
double boundary_length(const ConformalMetric& m, const Region& r);

/// Volume fraction only (indicator-weighted quadrature).
double volume_fraction(const ConformalMetric& m, std::span<const double> indicator);

/// Normalized volume-weighted mean of node positions over the region,
/// projected to the sphere. On the projective plane the component bounded
/// by `boundary` is used.
Vec3 barycenter(const ConformalMetric& m, const Region& r);

}  // namespace lglab
