#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "conefpp/estimators.hpp"
#include "conefpp/geometry.hpp"
#include "conefpp/metric.hpp"
#include "conefpp/randomness.hpp"

namespace conefpp {

// Sites reached from the origin within time t; the continuum shape is the
// union of sup-norm 1/2 cubes around them, scaled by 1/t.
struct ShapeEstimate {
    double t = 0.0;
    RegionSpec region;
    std::vector<ReachedSite> cells;  // settled order

    double scale() const { return t > 0.0 ? 1.0 / t : 0.0; }
};

ShapeEstimate empirical_shape(const RegionSpec& region, const WeightSource& field, double t,
                              const SearchOptions& opts = {});

// Star-shaped polygon through the points dir / mu(dir), d = 2.
struct LimitShape {
    std::vector<Site> directions;       // angular order
    std::vector<double> radii;          // Euclidean radius 1 / mu(unit direction)
    std::vector<stats::Interval> radii_ci;
    std::vector<Point> polygon;         // vertices; clipped when restricted
    MuReference mu;
    // Set by restrict_shape: the shape is intersected with this cone.
    std::optional<region::ConeInterior> restriction;

    // mu(x), or +infinity outside the restriction cone.
    double gauge(const Point& x) const;
    double gauge(const Site& z) const { return gauge(z.as_point()); }
};

LimitShape make_limit_shape(MuReference mu, double z_level = 1.959963984540054);

// Throws DegenerateShape if zero-weight edges percolate or any per-direction
// interval for mu reaches 0.
LimitShape limit_shape(const DistributionSpec& dist, int d, std::int64_t n, std::size_t replicas,
                       std::uint64_t seed, const EstimatorOptions& opts = {});

// Intersection with the cone B(u, c) without collar; identity when c >= 1.
LimitShape restrict_shape(const LimitShape& ls, const RegionSpec& cone);

struct ShapeDeviation {
    double t = 0.0;
    double epsilon = 0.0;
    bool inner = false;  // (1 - eps) ls inside the empirical shape
    bool outer = false;  // empirical shape inside (1 + eps) ls
    std::size_t missing = 0;  // sites required by `inner` but not reached
    std::size_t excess = 0;   // cells violating `outer`
    double sup = 0.0;         // max |T(0,z) - mu(z)| / |z|_1 over eligible cells
    Site sup_site;
    std::size_t eligible = 0;
    double cutoff = 0.0;      // |z|_1 threshold for the sup statistic
};

inline constexpr double kDefaultCutoffFraction = 0.25;

// The sup statistic uses cells with |z|_1 >= cutoff_fraction * t, interior
// cells only when the shape lives on a cone.
ShapeDeviation shape_deviation(const ShapeEstimate& se, const LimitShape& ls, double epsilon,
                               double cutoff_fraction = kDefaultCutoffFraction);

// Largest relative gap between a polygon vertex and the convex hull of the
// polygon along the same ray.
double polygon_convexity_defect(const LimitShape& ls);

// Fraction of lattice sites inside (1 - eps) times the convex hull of the
// cells that were not reached (d = 2).
double convexity_defect(const ShapeEstimate& se, double epsilon = 0.05);

// Counter-clockwise hull, collinear points dropped.
std::vector<Point> convex_hull(std::vector<Point> pts);

void to_json(nlohmann::json& j, const LimitShape& ls);
void to_json(nlohmann::json& j, const ShapeDeviation& d);

}  // namespace conefpp
