#include "lglab/quotient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lglab/error.hpp"
#include "lglab/geometry.hpp"
#include "lglab/isoperimetry.hpp"

namespace lglab {

ConformalMetric lift_metric(const ConformalMetric& m) {
  if (m.base() != Base::ProjectivePlane) {
    throw Error(ErrorKind::Domain, "only projective-plane metrics can be lifted");
  }
  ConformalMetric lift(Base::Sphere, m.grid(), m.u(), m.K());
  if (std::abs(lift.total_volume() - 2.0 * m.total_volume()) > 1e-9) {
    throw Error(ErrorKind::FormulaValidation, "lifted volume is not twice the quotient volume");
  }
  const CurvatureField k_down = gauss_curvature(m);
  const CurvatureField k_up = gauss_curvature(lift);
  if (k_down.values != k_up.values) {
    throw Error(ErrorKind::FormulaValidation, "lift changed the curvature field");
  }
  return lift;
}

LiftedRegion lift_region(const ConformalMetric& m, const Region& r) {
  const ConformalMetric lift = lift_metric(m);
  const SphereGrid& grid = m.grid();
  if (r.complement) {
    throw Error(ErrorKind::Domain, "complement regions lift to a connected set");
  }
  const RegionMeasures down = region_measures(m, r);
  if (!(down.volume_fraction > 0.0 && down.volume_fraction <= 0.5 + 1e-9)) {
    throw Error(ErrorKind::Domain, "lift_region needs a volume fraction in (0, 1/2]");
  }
  LiftedRegion out;
  out.downstairs = r;
  out.downstairs_fraction = down.volume_fraction;
  out.downstairs_area = down.boundary_area;

  Region first = r.kind == RegionKind::Cap ? make_cap_region(lift, r.cap, false, static_cast<int>(r.boundary.size()))
                                           : make_curve_region(lift, r.boundary);
  Region second;
  second.kind = first.kind;
  second.cap = Cap{-first.cap.center, first.cap.aperture};
  second.boundary = antipodal_image(first.boundary);
  second.indicator.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    second.indicator[k] = first.indicator[grid.antipode(k)];
  }
  second.volume_fraction = volume_fraction(lift, second.indicator);
  out.upstairs = {std::move(first), std::move(second)};
  for (int q = 0; q < 2; ++q) {
    out.upstairs_fraction[q] = out.upstairs[q].volume_fraction;
    out.upstairs_area[q] = boundary_length(lift, out.upstairs[q]);
  }
  double sep = std::numeric_limits<double>::infinity();
  const Curve& a = out.upstairs[0].boundary;
  const Curve& b = out.upstairs[1].boundary;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      sep = std::min(sep, arc_distance(a[i], b[j]));
    }
  }
  out.separation = sep;
  if (sep < 1e-12) {
    out.separation = 0.0;
    out.warning = "lifted components touch";
  }
  return out;
}

FactorReport factor_relation_check(const ConformalMetric& m, std::span<const double> volumes,
                                   bool refine) {
  const ConformalMetric lift = lift_metric(m);
  FactorReport rep;
  rep.pass = true;
  for (double v : volumes) {
    if (!(v > 0.0 && v <= 0.5)) {
      throw Error(ErrorKind::Domain, "factor relation needs volumes in (0, 1/2]");
    }
  }
  std::vector<double> sorted(volumes.begin(), volumes.end());
  std::sort(sorted.begin(), sorted.end());
  const std::vector<LgValue> values = lg_functional(m, sorted, refine);
  for (std::size_t q = 0; q < sorted.size(); ++q) {
    const double v = sorted[q];
    const LgValue& lg = values[q];
    const LiftedRegion lr = lift_region(m, lg.witness);
    FactorEntry e;
    e.v = v;
    e.downstairs_value = lr.downstairs_area / m.total_volume();
    e.upstairs_value = lr.upstairs_area[0] / lift.total_volume();
    e.ratio = e.upstairs_value / e.downstairs_value;
    e.upstairs_fraction = lr.upstairs_fraction[0];
    e.separation = lr.separation;
    e.pass = std::abs(e.upstairs_value - 0.5 * e.downstairs_value) <= kFactorTolerance &&
             std::abs(e.upstairs_fraction - 0.5 * lr.downstairs_fraction) <= kFactorTolerance &&
             std::abs(lr.upstairs_area[1] - lr.downstairs_area) <= kFactorTolerance;
    rep.pass = rep.pass && e.pass;
    rep.entries.push_back(e);
  }
  return rep;
}

}  // namespace lglab
