#include "conefpp/verify.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <random>

#include "conefpp/geometry.hpp"

namespace conefpp {

namespace {

void record(CheckResult& c, bool ok, const std::string& what) {
    ++c.cases;
    if (ok) return;
    if (c.failures++ == 0) c.first_failure = what;
}

// Sites of [-r, r]^d in canonical order.
void for_each_in_box(int d, std::int64_t r, const std::function<void(const Site&)>& f) {
    Site s = Site::zero(d);
    for (int i = 0; i < d; ++i) s.x[i] = -r;
    while (true) {
        f(s);
        int i = d - 1;
        while (i >= 0 && s.x[i] == r) s.x[i--] = -r;
        if (i < 0) return;
        ++s.x[i];
    }
}

bool detours_ok(const std::vector<std::vector<Site>>& paths, const Site& v, const Site& w,
                const RegionSpec& region) {
    if (static_cast<int>(paths.size()) != 2 * v.dim || !pairwise_edge_disjoint(paths)) return false;
    for (const auto& p : paths) {
        if (p.front() != v || p.back() != w || !is_lattice_path(p) || p.size() > 10) return false;
        for (const auto& s : p)
            if (!contains(region, s)) return false;
    }
    return true;
}

bool witness_ok(const RegionSpec& cone, const PartitionWitness& w) {
    if (classify(cone, w.v) != SiteClass::Interior || w.v.linf() != w.z.linf()) return false;
    if (static_cast<int>(w.paths.size()) != w.q || !pairwise_edge_disjoint(w.paths)) return false;
    if (static_cast<double>(l1_distance(w.v, w.z)) > w.m_bound) return false;
    for (const auto& p : w.paths) {
        if (p.front() != w.z || p.back() != w.v || !is_lattice_path(p)) return false;
        if (static_cast<std::int64_t>(p.size()) - 1 != l1_distance(w.v, w.z)) return false;
        for (const auto& s : p)
            if (!contains(cone, s)) return false;
    }
    return true;
}

}  // namespace

bool GeometryReport::pass() const {
    return !checks.empty() &&
           std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass(); });
}

GeometryReport verify_geometry(int d, std::uint64_t seed, const GeometryVerifyOptions& opts) {
    CONEFPP_REQUIRE(d == 2 || d == 3, "verify_geometry: d must be 2 or 3");
    GeometryReport rep;
    rep.dim = d;
    const double rd = std::sqrt(static_cast<double>(d));

    CheckResult conn{"connectivity", 0, 0, {}};
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<std::int64_t> coord(-40, 40);
    while (conn.cases < opts.connectivity_pairs) {
        Site z = Site::zero(d);
        for (int i = 0; i < d; ++i) z.x[i] = coord(gen);
        if (z.l1() == 0) continue;
        record(conn, verify_connectivity(z, rd), "capsule to " + z.to_string());
    }
    rep.checks.push_back(conn);

    CheckResult det{"detours", 0, 0, {}};
    const std::int64_t box = opts.direction_box > 0 ? opts.direction_box : (d == 2 ? 3 : 2);
    for_each_in_box(d, box, [&](const Site& z) {
        std::int64_t g = 0;
        for (int i = 0; i < d; ++i) g = std::gcd(g, std::llabs(z[i]));
        if (g != 1) return;
        const Direction u = Direction::of(z);
        Point zero{}, end{};
        for (int i = 0; i < d; ++i) end[i] = u.unit[i] * opts.segment_length;
        const auto sausage = RegionSpec::capsule(zero, end, 4 * rd, d);
        Site far = Site::zero(d);
        for (int i = 0; i < d; ++i) far.x[i] = std::llround(end[i]);
        const auto path = segment_path(Site::zero(d), far, u.unit, 0.0, opts.segment_length);
        for (std::size_t i = 1; i < path.size(); ++i) {
            bool ok = false;
            try {
                ok = detours_ok(disjoint_detours(path[i - 1], path[i], sausage), path[i - 1], path[i], sausage);
            } catch (const Error&) {
            }
            record(det, ok, "step " + path[i - 1].to_string() + " -> " + path[i].to_string() + " along " + z.to_string());
        }
    });
    rep.checks.push_back(det);

    CheckResult part{"partition", 0, 0, {}};
    const auto cone = RegionSpec::cone(Site::unit(d, 0), opts.cone_c);
    for_each_in_box(d, opts.partition_radius, [&](const Site& z) {
        if (classify(cone, z) != SiteClass::Boundary) return;
        bool ok = false;
        try {
            ok = witness_ok(cone, boundary_partition(cone, z));
        } catch (const Error&) {
        }
        record(part, ok, "boundary site " + z.to_string());
    });
    rep.checks.push_back(part);
    return rep;
}

void to_json(nlohmann::json& j, const CheckResult& c) {
    j = {{"name", c.name}, {"cases", c.cases}, {"failures", c.failures}, {"pass", c.pass()}};
    if (!c.first_failure.empty()) j["first_failure"] = c.first_failure;
}

void to_json(nlohmann::json& j, const GeometryReport& r) {
    j = {{"dim", r.dim}, {"pass", r.pass()}, {"checks", r.checks}};
}

}  // namespace conefpp
