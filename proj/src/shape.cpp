#include "conefpp/shape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <unordered_set>

namespace conefpp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double cross(const Point& o, const Point& a, const Point& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

bool in_cone(const region::ConeInterior& c, const Point& x) {
    if (c.c >= 1.0) return true;
    const double p = x[0] * c.u.unit[0] + x[1] * c.u.unit[1];
    const double n2 = x[0] * x[0] + x[1] * x[1];
    return p >= 0.0 && n2 * (1.0 - c.c * c.c) <= p * p;
}

// Centre of the cell plus four points just inside its corners.
std::array<Point, 5> cube_probes(const Site& z) {
    constexpr double h = 0.4999;
    const double x = static_cast<double>(z[0]), y = static_cast<double>(z[1]);
    return {Point{x, y}, Point{x - h, y - h}, Point{x + h, y - h}, Point{x - h, y + h},
            Point{x + h, y + h}};
}

double wrap(double a) {
    while (a > std::numbers::pi) a -= 2 * std::numbers::pi;
    while (a <= -std::numbers::pi) a += 2 * std::numbers::pi;
    return a;
}

bool inside_convex(const std::vector<Point>& hull, const Point& p) {
    const std::size_t n = hull.size();
    for (std::size_t k = 0; k < n; ++k)
        if (cross(hull[k], hull[(k + 1) % n], p) < -1e-12) return false;
    return true;
}

// Distance from the origin to the hull boundary along `dir` (unit).
double hull_radius(const std::vector<Point>& hull, const Point& dir) {
    double best = kInf;
    const std::size_t n = hull.size();
    for (std::size_t k = 0; k < n; ++k) {
        const Point& a = hull[k];
        const Point& b = hull[(k + 1) % n];
        const double nx = b[1] - a[1], ny = a[0] - b[0];
        const double dn = nx * dir[0] + ny * dir[1];
        if (dn <= 0.0) continue;
        best = std::min(best, (nx * a[0] + ny * a[1]) / dn);
    }
    return best;
}

}  // namespace

ShapeEstimate empirical_shape(const RegionSpec& region, const WeightSource& field, double t,
                              const SearchOptions& opts) {
    CONEFPP_REQUIRE(t >= 0.0, "empirical_shape: negative time");
    ShapeEstimate se;
    se.t = t;
    se.region = region;
    se.cells = reachable_set(region, field, Site::zero(region.dim), t, opts);
    return se;
}

double LimitShape::gauge(const Point& x) const {
    if (restriction && !in_cone(*restriction, x)) return kInf;
    return mu(x);
}

LimitShape make_limit_shape(MuReference mu, double z_level) {
    CONEFPP_REQUIRE(mu.is_fan(), "make_limit_shape: needs a direction fan");
    LimitShape ls;
    struct Row {
        double angle;
        Site z;
        double r;
        stats::Interval ci;
    };
    std::vector<Row> rows;
    for (const auto& e : mu.estimates()) {
        const double lo = e.mean - z_level * e.se;
        if (!(lo > 0.0))
            throw Error(ErrorKind::DegenerateShape,
                        "interval for mu reaches 0 in direction " + e.direction.to_string());
        const double per_euclid = e.direction.euclid() / static_cast<double>(e.direction.l1());
        rows.push_back({std::atan2(static_cast<double>(e.direction[1]), static_cast<double>(e.direction[0])),
                        e.direction, per_euclid / e.mean,
                        {per_euclid / (e.mean + z_level * e.se), per_euclid / lo}});
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.angle < b.angle; });
    for (const auto& r : rows) {
        ls.directions.push_back(r.z);
        ls.radii.push_back(r.r);
        ls.radii_ci.push_back(r.ci);
    }
    ls.polygon = mu.vertices();
    ls.mu = std::move(mu);
    return ls;
}

LimitShape limit_shape(const DistributionSpec& dist, int d, std::int64_t n, std::size_t replicas,
                       std::uint64_t seed, const EstimatorOptions& opts) {
    CONEFPP_REQUIRE(d == 2, "limit_shape: the polygon is built in d = 2");
    return make_limit_shape(estimate_mu_fan(dist, d, n, replicas, seed, opts));
}

LimitShape restrict_shape(const LimitShape& ls, const RegionSpec& cone) {
    region::ConeInterior ci;
    if (const auto* c = std::get_if<region::Cone>(&cone.shape)) {
        ci = {c->u, c->c};
    } else if (const auto* c2 = std::get_if<region::ConeInterior>(&cone.shape)) {
        ci = *c2;
    } else {
        CONEFPP_REQUIRE(false, "restrict_shape: region is not a cone");
    }
    CONEFPP_REQUIRE(cone.dim == 2, "restrict_shape: d = 2 only");
    if (ci.c >= 1.0) return ls;

    LimitShape out = ls;
    out.restriction = ci;
    const double phi = std::atan2(ci.u.unit[1], ci.u.unit[0]);
    const double theta = std::asin(ci.c);
    auto on_ray = [&](double a) {
        const Point dir{std::cos(a), std::sin(a)};
        const double r = 1.0 / ls.mu(dir);
        return Point{r * dir[0], r * dir[1]};
    };
    std::vector<std::pair<double, Point>> inner;
    for (const auto& v : ls.polygon) {
        const double delta = wrap(std::atan2(v[1], v[0]) - phi);
        if (std::abs(delta) < theta) inner.push_back({delta, v});
    }
    std::sort(inner.begin(), inner.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    out.polygon.clear();
    out.polygon.push_back(Point{});
    out.polygon.push_back(on_ray(phi - theta));
    for (const auto& [a, v] : inner) out.polygon.push_back(v);
    out.polygon.push_back(on_ray(phi + theta));
    return out;
}

ShapeDeviation shape_deviation(const ShapeEstimate& se, const LimitShape& ls, double epsilon,
                               double cutoff_fraction) {
    CONEFPP_REQUIRE(se.region.dim == 2, "shape_deviation: d = 2 only");
    CONEFPP_REQUIRE(epsilon > 0.0 && epsilon < 1.0, "shape_deviation: epsilon must lie in (0, 1)");
    ShapeDeviation out;
    out.t = se.t;
    out.epsilon = epsilon;
    out.cutoff = cutoff_fraction * se.t;

    std::unordered_set<std::uint64_t> reached;
    reached.reserve(se.cells.size() * 2);
    for (const auto& c : se.cells) reached.insert(site_key(c.site));

    // Inner inclusion: every cell meeting (1 - eps) t W must be reached.
    const double inner_t = (1.0 - epsilon) * se.t;
    double reach = 0.0;
    for (const auto& v : ls.polygon) reach = std::max({reach, std::abs(v[0]), std::abs(v[1])});
    const auto box = static_cast<std::int64_t>(std::ceil(reach * inner_t)) + 1;
    for (std::int64_t x = -box; x <= box; ++x) {
        for (std::int64_t y = -box; y <= box; ++y) {
            const Site z{x, y};
            double g = kInf;
            for (const auto& p : cube_probes(z)) g = std::min(g, ls.gauge(p));
            if (g > inner_t || !contains(se.region, z)) continue;
            if (!reached.count(site_key(z))) ++out.missing;
        }
    }
    out.inner = out.missing == 0;

    // Outer inclusion, and the sup statistic on eligible cells.
    const double outer_t = (1.0 + epsilon) * se.t;
    out.sup_site = Site::zero(2);
    for (const auto& c : se.cells) {
        const auto probes = cube_probes(c.site);
        bool meets = !ls.restriction;
        if (!meets)
            for (const auto& p : probes) meets = meets || in_cone(*ls.restriction, p);
        if (meets) {
            double g = 0.0;
            for (const auto& p : probes) g = std::max(g, ls.mu(p));
            if (g > outer_t) ++out.excess;
        }
        const auto n1 = c.site.l1();
        if (n1 == 0 || static_cast<double>(n1) < out.cutoff) continue;
        if (se.region.is_cone() && classify(se.region, c.site) != SiteClass::Interior) continue;
        ++out.eligible;
        const double dev = std::abs(c.cost - ls.mu(c.site)) / static_cast<double>(n1);
        if (dev > out.sup) {
            out.sup = dev;
            out.sup_site = c.site;
        }
    }
    out.outer = out.excess == 0;
    return out;
}

std::vector<Point> convex_hull(std::vector<Point> pts) {
    std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) {
        return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
    });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Point> h(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
        h[k++] = p;
    }
    for (std::size_t i = pts.size() - 1, lo = k + 1; i-- > 0;) {
        while (k >= lo && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

double polygon_convexity_defect(const LimitShape& ls) {
    const auto& verts = ls.mu.vertices();
    const auto hull = convex_hull(verts);
    double worst = 0.0;
    for (const auto& v : verts) {
        const double r = std::hypot(v[0], v[1]);
        const double rho = hull_radius(hull, Point{v[0] / r, v[1] / r});
        worst = std::max(worst, 1.0 - r / rho);
    }
    return worst;
}

double convexity_defect(const ShapeEstimate& se, double epsilon) {
    CONEFPP_REQUIRE(se.region.dim == 2, "convexity_defect: d = 2 only");
    CONEFPP_REQUIRE(epsilon >= 0.0 && epsilon < 1.0, "convexity_defect: epsilon must lie in [0, 1)");
    std::vector<Point> pts;
    pts.reserve(se.cells.size());
    std::unordered_set<std::uint64_t> reached;
    for (const auto& c : se.cells) {
        pts.push_back(c.site.as_point());
        reached.insert(site_key(c.site));
    }
    auto hull = convex_hull(std::move(pts));
    if (hull.size() < 3) return 0.0;
    double lo[2] = {kInf, kInf}, hi[2] = {-kInf, -kInf};
    for (auto& p : hull) {
        for (int i = 0; i < 2; ++i) {
            p[i] *= 1.0 - epsilon;
            lo[i] = std::min(lo[i], p[i]);
            hi[i] = std::max(hi[i], p[i]);
        }
    }
    std::size_t inside = 0, holes = 0;
    for (auto x = static_cast<std::int64_t>(std::floor(lo[0])); x <= static_cast<std::int64_t>(std::ceil(hi[0])); ++x) {
        for (auto y = static_cast<std::int64_t>(std::floor(lo[1])); y <= static_cast<std::int64_t>(std::ceil(hi[1])); ++y) {
            const Site z{x, y};
            if (!inside_convex(hull, z.as_point())) continue;
            ++inside;
            if (!reached.count(site_key(z))) ++holes;
        }
    }
    return inside == 0 ? 0.0 : static_cast<double>(holes) / static_cast<double>(inside);
}

void to_json(nlohmann::json& j, const LimitShape& ls) {
    j = nlohmann::json::object();
    nlohmann::json dirs = nlohmann::json::array(), poly = nlohmann::json::array();
    for (std::size_t k = 0; k < ls.directions.size(); ++k)
        dirs.push_back({{"z", ls.directions[k]},
                        {"radius", ls.radii[k]},
                        {"radius_ci", {ls.radii_ci[k].lo, ls.radii_ci[k].hi}}});
    for (const auto& v : ls.polygon) poly.push_back({v[0], v[1]});
    j["directions"] = dirs;
    j["polygon"] = poly;
    if (ls.restriction) j["restriction"] = {{"u", ls.restriction->u.z}, {"c", ls.restriction->c}};
}

void to_json(nlohmann::json& j, const ShapeDeviation& d) {
    j = {{"t", d.t},         {"epsilon", d.epsilon}, {"inner", d.inner},       {"outer", d.outer},
         {"missing", d.missing}, {"excess", d.excess}, {"sup", d.sup},       {"sup_site", d.sup_site},
         {"eligible", d.eligible}, {"cutoff", d.cutoff}};
}

}  // namespace conefpp
