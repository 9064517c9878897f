#include "conefpp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <set>
#include <unordered_set>

namespace conefpp {

namespace {

// Relative slack used by every closed-set membership test; sites on the
// boundary of a closed ball count as inside.
constexpr double kMargin = 1e-9;

double dot(const Point& a, const Point& b, int d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Point& a, int d) { return dot(a, a, d); }

// Is there a >= 0 with |p - a u| <= c a + k?
// Expands to (1 - c^2) a^2 - 2 (t + c k) a + (|p|^2 - k^2) <= 0, t = p.u.
bool in_cone(const Point& p, const Direction& u, double c, double k, int d) {
    const double r2 = norm2(p, d);
    const double c0 = r2 - k * k;
    if (c0 <= kMargin * std::max(1.0, r2)) return true;
    if (c > 1.0) return true;
    const double t = u.dot(p);
    const double b = t + c * k;
    if (c == 1.0) return b > 0.0;
    if (b <= 0.0) return false;
    const double a = 1.0 - c * c;
    const double disc = b * b - a * c0;
    return disc >= -kMargin * std::max({1.0, b * b, a * std::abs(c0)});
}

bool in_region(const RegionSpec& r, const Point& p) {
    const int d = r.dim;
    return std::visit(
        [&](const auto& s) -> bool {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, region::FullLattice>) {
                return true;
            } else if constexpr (std::is_same_v<T, region::Cone>) {
                return in_cone(p, s.u, s.c, s.collar, d);
            } else if constexpr (std::is_same_v<T, region::ConeInterior>) {
                return in_cone(p, s.u, s.c, 0.0, d);
            } else if constexpr (std::is_same_v<T, region::Cylinder>) {
                const Point z = s.axis.as_point();
                const double zz = norm2(z, d);
                const double pz = dot(p, z, d);
                const double perp2 = norm2(p, d) - pz * pz / zz;
                return perp2 <= s.r * s.r + kMargin * std::max(1.0, s.r * s.r);
            } else if constexpr (std::is_same_v<T, region::Capsule>) {
                Point dir{};
                for (int i = 0; i < d; ++i) dir[i] = s.y[i] - s.x[i];
                const double len2 = norm2(dir, d);
                double a = 0.0;
                if (len2 > 0.0) {
                    Point rel{};
                    for (int i = 0; i < d; ++i) rel[i] = p[i] - s.x[i];
                    a = std::clamp(dot(rel, dir, d) / len2, 0.0, 1.0);
                }
                double dist2 = 0.0;
                for (int i = 0; i < d; ++i) {
                    const double e = p[i] - (s.x[i] + a * dir[i]);
                    dist2 += e * e;
                }
                return dist2 <= s.r * s.r + kMargin * std::max(1.0, s.r * s.r);
            } else if constexpr (std::is_same_v<T, region::HalfSpace>) {
                return dot(s.normal, p, d) >= s.offset - kMargin;
            } else if constexpr (std::is_same_v<T, region::LogWedge>) {
                return p[0] >= 0.0 && p[1] >= 0.0 &&
                       p[1] <= s.a * std::log1p(p[0]) + kMargin;
            } else {
                for (int i = 0; i < d; ++i)
                    if (p[i] < static_cast<double>(s.lo[i]) || p[i] > static_cast<double>(s.hi[i]))
                        return false;
                return true;
            }
        },
        r.shape);
}

void check_dim(const RegionSpec& r, int d) {
    CONEFPP_REQUIRE(r.dim == d, "region and site dimensions differ");
}

}  // namespace

Direction Direction::of(const Site& z) {
    CONEFPP_REQUIRE(z.dim >= 2 && z.norm2sq() > 0, "Direction: zero or low-dimensional vector");
    Direction u;
    u.z = z;
    u.norm = z.euclid();
    for (int i = 0; i < z.dim; ++i) u.unit[i] = static_cast<double>(z.x[i]) / u.norm;
    return u;
}

Direction Direction::approximate(std::span<const double> u, std::int64_t scale, double* error) {
    CONEFPP_REQUIRE(u.size() >= 2 && u.size() <= static_cast<std::size_t>(kMaxDim) && scale > 0,
                    "Direction::approximate: bad input");
    double len = 0.0;
    for (double v : u) len += v * v;
    len = std::sqrt(len);
    Site z = Site::zero(static_cast<int>(u.size()));
    for (std::size_t i = 0; i < u.size(); ++i)
        z.x[i] = std::llround(u[i] / len * static_cast<double>(scale));
    Direction dir = of(z);
    if (error) {
        double cosang = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) cosang += dir.unit[i] * u[i] / len;
        *error = std::acos(std::clamp(cosang, -1.0, 1.0));
    }
    return dir;
}

double Direction::dot(const Point& p) const {
    double s = 0.0;
    for (int i = 0; i < z.dim; ++i) s += unit[i] * p[i];
    return s;
}

RegionSpec RegionSpec::lattice(int d) {
    CONEFPP_REQUIRE(d >= 2 && d <= kMaxDim, "unsupported dimension");
    return {d, region::FullLattice{}};
}

RegionSpec RegionSpec::cone(const Site& u, double c) {
    return cone(u, c, default_collar(u.dim));
}

RegionSpec RegionSpec::cone(const Site& u, double c, double collar) {
    CONEFPP_REQUIRE(c > 0.0 && collar >= 0.0, "cone: need c > 0 and collar >= 0");
    return {u.dim, region::Cone{Direction::of(u), c, collar}};
}

RegionSpec RegionSpec::cone_interior(const Site& u, double c) {
    CONEFPP_REQUIRE(c > 0.0, "cone: need c > 0");
    return {u.dim, region::ConeInterior{Direction::of(u), c}};
}

RegionSpec RegionSpec::cylinder(const Site& axis, double r) {
    CONEFPP_REQUIRE(axis.norm2sq() > 0 && r >= 0.0, "cylinder: bad axis or radius");
    return {axis.dim, region::Cylinder{axis, r}};
}

RegionSpec RegionSpec::capsule(const Point& x, const Point& y, double r, int d) {
    CONEFPP_REQUIRE(d >= 2 && d <= kMaxDim && r >= 0.0, "capsule: bad input");
    return {d, region::Capsule{x, y, r}};
}

RegionSpec RegionSpec::half_space(const Point& normal, double offset, int d) {
    CONEFPP_REQUIRE(d >= 2 && d <= kMaxDim, "half-space: bad dimension");
    return {d, region::HalfSpace{normal, offset}};
}

RegionSpec RegionSpec::log_wedge(double a) {
    CONEFPP_REQUIRE(a > 0.0, "log-wedge: need a > 0");
    return {2, region::LogWedge{a}};
}

RegionSpec RegionSpec::box(const Site& lo, const Site& hi) {
    CONEFPP_REQUIRE(lo.dim == hi.dim && lo.dim >= 2, "box: dimension mismatch");
    for (int i = 0; i < lo.dim; ++i) CONEFPP_REQUIRE(lo[i] <= hi[i], "box: lo > hi");
    return {lo.dim, region::Box{lo, hi}};
}

bool RegionSpec::bounded() const {
    return std::holds_alternative<region::Capsule>(shape) ||
           std::holds_alternative<region::Box>(shape);
}

std::string RegionSpec::kind() const {
    static const char* names[] = {"lattice",    "cone",      "cone-interior", "cylinder",
                                  "capsule",    "half-space", "log-wedge",    "box"};
    return names[shape.index()];
}

bool RegionSpec::operator==(const RegionSpec& o) const {
    nlohmann::json a, b;
    to_json(a, *this);
    to_json(b, o);
    return a == b;
}

const char* to_string(SiteClass c) {
    switch (c) {
        case SiteClass::Interior: return "Interior";
        case SiteClass::Boundary: return "Boundary";
        case SiteClass::Outside: return "Outside";
    }
    return "?";
}

bool contains(const RegionSpec& region, const Site& site) {
    check_dim(region, site.dim);
    return in_region(region, site.as_point());
}

bool contains_point(const RegionSpec& region, const Point& p) { return in_region(region, p); }

SiteClass classify(const RegionSpec& cone, const Site& site) {
    const auto* c = std::get_if<region::Cone>(&cone.shape);
    CONEFPP_REQUIRE(c != nullptr, "classify: region is not a cone");
    check_dim(cone, site.dim);
    const Point p = site.as_point();
    if (!in_cone(p, c->u, c->c, c->collar, cone.dim)) return SiteClass::Outside;
    if (in_cone(p, c->u, c->c, 0.0, cone.dim)) return SiteClass::Interior;
    return SiteClass::Boundary;
}

std::vector<Site> neighbors(const RegionSpec& region, const Site& site) {
    CONEFPP_REQUIRE(contains(region, site), "neighbors: site outside region");
    std::vector<Site> out;
    out.reserve(2 * site.dim);
    for (int i = 0; i < site.dim; ++i) {
        for (int sign : {-1, 1}) {
            Site n = site;
            n.x[i] += sign;
            if (contains(region, n)) out.push_back(n);
        }
    }
    return out;
}

std::vector<Site> staircase(const Site& y, const Site& z) {
    CONEFPP_REQUIRE(y.dim == z.dim, "staircase: dimension mismatch");
    const int d = y.dim;
    std::array<std::int64_t, kMaxDim> span{};
    for (int i = 0; i < d; ++i) span[i] = std::llabs(z[i] - y[i]);
    std::vector<Site> path{y};
    path.reserve(static_cast<std::size_t>(l1_distance(y, z)) + 1);
    Site v = y;
    while (!(v == z)) {
        // Advance along the axis with the largest remaining fraction
        // |z_i - v_i| / |z_i - y_i|; ties go to the lowest axis.
        int best = -1;
        for (int i = 0; i < d; ++i) {
            const std::int64_t rem = std::llabs(z[i] - v[i]);
            if (rem == 0) continue;
            if (best < 0) {
                best = i;
                continue;
            }
            const std::int64_t brem = std::llabs(z[best] - v[best]);
            if (static_cast<__int128>(rem) * span[best] > static_cast<__int128>(brem) * span[i])
                best = i;
        }
        v.x[best] += (z[best] > v[best]) ? 1 : -1;
        path.push_back(v);
    }
    return path;
}

double distance_to_segment(const Point& p, const Point& u, double b, double c, int d) {
    const double a = std::clamp(dot(p, u, d), b, c);
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
        const double e = p[i] - a * u[i];
        s += e * e;
    }
    return std::sqrt(s);
}

std::vector<Site> segment_path(const Site& y, const Site& z, const Point& u, double b,
                               double c) {
    const int d = y.dim;
    CONEFPP_REQUIRE(b <= c, "segment_path: empty parameter interval");
    CONEFPP_REQUIRE(std::abs(norm2(u, d) - 1.0) < 1e-9, "segment_path: u must be a unit vector");
    const double reach = std::sqrt(static_cast<double>(d)) * (1.0 + kMargin);
    CONEFPP_REQUIRE(distance_to_segment(y.as_point(), u, b, c, d) <= reach &&
                        distance_to_segment(z.as_point(), u, b, c, d) <= reach,
                    "segment_path: endpoints farther than sqrt(d) from the segment");
    return staircase(y, z);
}

std::vector<std::vector<Site>> disjoint_detours(const Site& v, const Site& w,
                                                const RegionSpec& region) {
    CONEFPP_REQUIRE(adjacent(v, w), "disjoint_detours: sites are not neighbours");
    const int d = v.dim;
    if (!contains(region, v) || !contains(region, w))
        throw Error(ErrorKind::NoDetours, "disjoint_detours: endpoint outside region");

    int k = 0;
    while (v[k] == w[k]) ++k;
    const Site step = w - v;  // +/- e_k

    auto inside = [&](const std::vector<Site>& path) {
        return std::all_of(path.begin(), path.end(),
                           [&](const Site& s) { return contains(region, s); });
    };

    std::vector<std::vector<Site>> paths;
    paths.push_back({v, w});
    for (int j = 0; j < d; ++j) {
        if (j == k) continue;
        for (int sign : {-1, 1}) {
            const Site side = Site::unit(d, j, sign);
            std::vector<Site> p{v, v + side, v + side + step, w};
            if (!inside(p))
                throw Error(ErrorKind::NoDetours,
                            "disjoint_detours: length-3 detour leaves the region at " + v.to_string());
            paths.push_back(std::move(p));
        }
    }
    // The last path leaves v backwards, swings two units sideways and comes
    // back to w from beyond; it touches only the two edges unused above.
    for (int j = 0; j < d; ++j) {
        if (j == k) continue;
        for (int sign : {-1, 1}) {
            const Site side = Site::unit(d, j, sign);
            const Site back = v - step;
            const Site ahead = w + step;
            std::vector<Site> p{v,
                                back,
                                back + side,
                                back + side * 2,
                                v + side * 2,
                                w + side * 2,
                                ahead + side * 2,
                                ahead + side,
                                ahead,
                                w};
            if (inside(p)) {
                paths.push_back(std::move(p));
                return paths;
            }
        }
    }
    throw Error(ErrorKind::NoDetours,
                "disjoint_detours: no room for the long detour around " + v.to_string());
}

std::vector<Site> enumerate_sites(const RegionSpec& region) {
    CONEFPP_REQUIRE(region.bounded(), "enumerate_sites: region is unbounded");
    const int d = region.dim;
    Site lo = Site::zero(d), hi = Site::zero(d);
    if (const auto* b = std::get_if<region::Box>(&region.shape)) {
        lo = b->lo;
        hi = b->hi;
    } else {
        const auto& c = std::get<region::Capsule>(region.shape);
        for (int i = 0; i < d; ++i) {
            lo.x[i] = static_cast<std::int64_t>(std::floor(std::min(c.x[i], c.y[i]) - c.r)) - 1;
            hi.x[i] = static_cast<std::int64_t>(std::ceil(std::max(c.x[i], c.y[i]) + c.r)) + 1;
        }
    }
    std::vector<Site> out;
    Site s = lo;
    while (true) {
        if (contains(region, s)) out.push_back(s);
        int i = d - 1;
        while (i >= 0 && s.x[i] == hi.x[i]) {
            s.x[i] = lo.x[i];
            --i;
        }
        if (i < 0) break;
        ++s.x[i];
    }
    return out;
}

bool verify_connectivity(const Site& z, double r) {
    const int d = z.dim;
    const RegionSpec caps = RegionSpec::capsule(Site::zero(d).as_point(), z.as_point(), r, d);
    const std::vector<Site> sites = enumerate_sites(caps);
    if (sites.empty()) return true;
    std::unordered_set<std::uint64_t> members, seen;
    for (const auto& s : sites) members.insert(site_key(s));
    std::deque<Site> queue{sites.front()};
    seen.insert(site_key(sites.front()));
    while (!queue.empty()) {
        const Site s = queue.front();
        queue.pop_front();
        for (int i = 0; i < d; ++i) {
            for (int sign : {-1, 1}) {
                Site n = s;
                n.x[i] += sign;
                const auto key = site_key(n);
                if (members.count(key) && seen.insert(key).second) queue.push_back(n);
            }
        }
    }
    return seen.size() == members.size();
}

bool is_lattice_path(std::span<const Site> path) {
    for (std::size_t i = 1; i < path.size(); ++i)
        if (!adjacent(path[i - 1], path[i])) return false;
    return true;
}

bool pairwise_edge_disjoint(std::span<const std::vector<Site>> paths) {
    std::set<CanonicalEdge> used;
    for (const auto& p : paths) {
        std::set<CanonicalEdge> mine;
        for (std::size_t i = 1; i < p.size(); ++i) mine.insert(CanonicalEdge::between(p[i - 1], p[i]));
        for (const auto& e : mine)
            if (!used.insert(e).second) return false;
    }
    return true;
}

double partition_search_bound(int d) { return 16.0 * std::sqrt(static_cast<double>(d)); }

namespace {

// Monotone path from a to b moving the differing axes in the order
// axes[rot], axes[rot + 1], ... (cyclically), each one all the way.
std::vector<Site> rotation_path(const Site& a, const Site& b, const std::vector<int>& axes,
                                std::size_t rot) {
    std::vector<Site> p{a};
    Site cur = a;
    for (std::size_t t = 0; t < axes.size(); ++t) {
        const int ax = axes[(rot + t) % axes.size()];
        const int sgn = b[ax] > cur[ax] ? 1 : -1;
        while (cur[ax] != b[ax]) {
            cur.x[ax] += sgn;
            p.push_back(cur);
        }
    }
    return p;
}

}  // namespace

PartitionWitness boundary_partition(const RegionSpec& cone, const Site& z) {
    const auto* c = std::get_if<region::Cone>(&cone.shape);
    CONEFPP_REQUIRE(c != nullptr, "boundary_partition: region is not a cone");
    const int d = cone.dim;
    CONEFPP_REQUIRE(c->u.z == Site::unit(d, 0), "boundary_partition: only u = e1 is supported");
    CONEFPP_REQUIRE(c->c < 1.0, "boundary_partition: requires c < 1");
    CONEFPP_REQUIRE(classify(cone, z) == SiteClass::Boundary,
                    "boundary_partition: site is not a boundary site");

    // Reflect so that the transverse coordinates are non-negative.
    Site zr = z;
    std::array<int, kMaxDim> flip{};
    int q = 0;
    for (int i = 1; i < d; ++i) {
        flip[i] = z[i] < 0 ? -1 : 1;
        zr.x[i] = std::llabs(z[i]);
        if (z[i] != 0) ++q;
    }
    auto unreflect = [&](Site s) {
        for (int i = 1; i < d; ++i) s.x[i] *= flip[i];
        return s;
    };

    const std::int64_t n = z.linf();
    const double bound = partition_search_bound(d);
    const auto budget = static_cast<std::int64_t>(std::floor(bound));

    // Rectangle z1 <= v1 <= n, 0 <= v_i <= z_i on the sup-norm sphere H_n,
    // searched in order of l1 distance within the search bound.
    Site lo = zr, hi = zr;
    hi.x[0] = std::min(n, zr[0] + budget);
    for (int i = 1; i < d; ++i) lo.x[i] = std::max<std::int64_t>(0, zr[i] - budget);
    std::vector<std::pair<std::int64_t, Site>> candidates;
    Site v = lo;
    while (true) {
        const std::int64_t dist = l1_distance(v, zr);
        if (dist <= budget && v.linf() == n) candidates.emplace_back(dist, v);
        int i = d - 1;
        while (i >= 0 && v.x[i] == hi.x[i]) {
            v.x[i] = lo.x[i];
            --i;
        }
        if (i < 0) break;
        ++v.x[i];
    }
    std::sort(candidates.begin(), candidates.end());

    for (const auto& [dist, cand] : candidates) {
        const Site vz = unreflect(cand);
        if (classify(cone, vz) != SiteClass::Interior) continue;
        std::vector<int> axes;
        for (int i = 0; i < d; ++i)
            if (vz[i] != z[i]) axes.push_back(i);
        std::vector<std::vector<Site>> paths;
        for (std::size_t rot = 0; rot < axes.size() && static_cast<int>(paths.size()) < q; ++rot) {
            auto p = rotation_path(z, vz, axes, rot);
            if (std::all_of(p.begin(), p.end(), [&](const Site& s) { return contains(cone, s); }))
                paths.push_back(std::move(p));
        }
        if (static_cast<int>(paths.size()) < q) continue;
        return {q, z, vz, std::move(paths), bound};
    }
    throw Error(ErrorKind::WitnessNotFound,
                "boundary_partition: no interior witness within bound for " + z.to_string());
}

Site halfspace_projection(const Site& site) {
    Site p = site;
    p.x[0] = 0;
    return p;
}

std::vector<std::vector<Site>> projection_paths(const Site& z) {
    const int d = z.dim;
    const Site v = halfspace_projection(z);
    if (z == v) return {};
    const Site toward = Site::unit(d, 0, z[0] > 0 ? -1 : 1);
    const std::int64_t m = std::llabs(z[0]);
    std::vector<std::vector<Site>> paths;
    {
        std::vector<Site> p{z};
        Site cur = z;
        for (std::int64_t t = 0; t < m; ++t) p.push_back(cur = cur + toward);
        paths.push_back(std::move(p));
    }
    for (int j = 1; j < d; ++j) {
        for (int sign : {-1, 1}) {
            const Site side = Site::unit(d, j, sign);
            std::vector<Site> p{z};
            Site cur = z + side;
            p.push_back(cur);
            for (std::int64_t t = 0; t < m; ++t) p.push_back(cur = cur + toward);
            p.push_back(v);
            paths.push_back(std::move(p));
        }
    }
    return paths;
}

namespace {

nlohmann::json site_json(const Site& s) {
    nlohmann::json a = nlohmann::json::array();
    for (int i = 0; i < s.dim; ++i) a.push_back(s[i]);
    return a;
}

nlohmann::json point_json(const Point& p, int d) {
    nlohmann::json a = nlohmann::json::array();
    for (int i = 0; i < d; ++i) a.push_back(p[i]);
    return a;
}

Site site_from(const nlohmann::json& a) {
    if (!a.is_array() || a.size() < 2 || a.size() > static_cast<std::size_t>(kMaxDim))
        throw Error(ErrorKind::Validation, "expected an integer vector of length 2..4");
    Site s = Site::zero(static_cast<int>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) s.x[i] = a[i].get<std::int64_t>();
    return s;
}

Point point_from(const nlohmann::json& a, int d) {
    if (!a.is_array() || static_cast<int>(a.size()) != d)
        throw Error(ErrorKind::Validation, "point has the wrong dimension");
    Point p{};
    for (int i = 0; i < d; ++i) p[i] = a[i].get<double>();
    return p;
}

}  // namespace

void to_json(nlohmann::json& j, const Site& s) { j = site_json(s); }

void from_json(const nlohmann::json& j, Site& s) { s = site_from(j); }

void to_json(nlohmann::json& j, const RegionSpec& r) {
    j = nlohmann::json::object();
    j["kind"] = r.kind();
    j["d"] = r.dim;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, region::Cone>) {
                j["u"] = site_json(s.u.z);
                j["c"] = s.c;
                j["collar"] = s.collar;
            } else if constexpr (std::is_same_v<T, region::ConeInterior>) {
                j["u"] = site_json(s.u.z);
                j["c"] = s.c;
            } else if constexpr (std::is_same_v<T, region::Cylinder>) {
                j["axis"] = site_json(s.axis);
                j["r"] = s.r;
            } else if constexpr (std::is_same_v<T, region::Capsule>) {
                j["x"] = point_json(s.x, r.dim);
                j["y"] = point_json(s.y, r.dim);
                j["r"] = s.r;
            } else if constexpr (std::is_same_v<T, region::HalfSpace>) {
                j["normal"] = point_json(s.normal, r.dim);
                j["offset"] = s.offset;
            } else if constexpr (std::is_same_v<T, region::LogWedge>) {
                j["a"] = s.a;
            } else if constexpr (std::is_same_v<T, region::Box>) {
                j["lo"] = site_json(s.lo);
                j["hi"] = site_json(s.hi);
            }
        },
        r.shape);
}

void from_json(const nlohmann::json& j, RegionSpec& r) {
    try {
        const std::string kind = j.at("kind").get<std::string>();
        const int d = j.value("d", 2);
        if (d < 2 || d > kMaxDim) throw Error(ErrorKind::Validation, "region.d must be in [2, 4]");
        if (kind == "lattice") {
            r = RegionSpec::lattice(d);
        } else if (kind == "cone") {
            const Site u = site_from(j.at("u"));
            r = RegionSpec::cone(u, j.at("c").get<double>(),
                                 j.value("collar", RegionSpec::default_collar(u.dim)));
        } else if (kind == "cone-interior") {
            r = RegionSpec::cone_interior(site_from(j.at("u")), j.at("c").get<double>());
        } else if (kind == "cylinder") {
            r = RegionSpec::cylinder(site_from(j.at("axis")), j.at("r").get<double>());
        } else if (kind == "capsule") {
            r = RegionSpec::capsule(point_from(j.at("x"), d), point_from(j.at("y"), d),
                                    j.at("r").get<double>(), d);
        } else if (kind == "half-space") {
            r = RegionSpec::half_space(point_from(j.at("normal"), d), j.at("offset").get<double>(), d);
        } else if (kind == "log-wedge") {
            r = RegionSpec::log_wedge(j.at("a").get<double>());
        } else if (kind == "box") {
            r = RegionSpec::box(site_from(j.at("lo")), site_from(j.at("hi")));
        } else {
            throw Error(ErrorKind::Validation, "unknown region kind '" + kind + "'");
        }
        if (r.dim != d) throw Error(ErrorKind::Validation, "region.d disagrees with its vectors");
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Validation, std::string("region: ") + e.what());
    } catch (const ContractViolation& e) {
        throw Error(ErrorKind::Validation, std::string("region: ") + e.what());
    }
}

}  // namespace conefpp
