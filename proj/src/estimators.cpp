#include "conefpp/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_map>

#include "conefpp/parallel.hpp"

namespace conefpp {

namespace {

void aggregate_into(TimeConstantEstimate& e, Aggregate how) {
    e.aggregate = how;
    if (how == Aggregate::Mean) {
        const auto s = stats::summarize(e.values);
        e.mean = s.mean;
        e.se = s.se;
    } else {
        e.mean = stats::median(e.values);
        e.se = stats::median_stderr(e.values);
    }
}

double l1(const Site& z) { return static_cast<double>(z.l1()); }

// All signed coordinate permutations of z, deduplicated, z first.
std::vector<Site> orbit_of(const Site& z) {
    const int d = z.dim;
    std::vector<int> perm(d);
    std::iota(perm.begin(), perm.end(), 0);
    std::set<Site> seen;
    std::vector<Site> out{z};
    seen.insert(z);
    do {
        for (int mask = 0; mask < (1 << d); ++mask) {
            Site s = Site::zero(d);
            for (int i = 0; i < d; ++i) s.x[i] = z[perm[i]] * ((mask >> i) & 1 ? -1 : 1);
            if (seen.insert(s).second) out.push_back(s);
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    std::sort(out.begin() + 1, out.end());
    return out;
}

bool parallel_to(const Site& z, const Site& dir) {
    // z = lambda dir with lambda > 0.
    double lambda = 0.0;
    for (int i = 0; i < z.dim; ++i) {
        if (dir[i] == 0) {
            if (z[i] != 0) return false;
            continue;
        }
        const double l = static_cast<double>(z[i]) / static_cast<double>(dir[i]);
        if (l <= 0.0) return false;
        if (lambda == 0.0) lambda = l;
        else if (std::abs(l - lambda) > 1e-12 * lambda) return false;
    }
    return lambda > 0.0;
}

std::vector<Site> sites_of_class(const RegionSpec& cone, std::int64_t radius, SiteSet set) {
    const int d = cone.dim;
    std::vector<Site> out;
    Site s = Site::zero(d);
    for (int i = 0; i < d; ++i) s.x[i] = -radius;
    const SiteClass want = set == SiteSet::Interior ? SiteClass::Interior : SiteClass::Boundary;
    while (true) {
        const auto n = s.l1();
        if (n >= 1 && n <= radius && classify(cone, s) == want) out.push_back(s);
        int i = d - 1;
        while (i >= 0 && s.x[i] == radius) {
            s.x[i] = -radius;
            --i;
        }
        if (i < 0) break;
        ++s.x[i];
    }
    return out;
}

}  // namespace

const char* to_string(Aggregate a) { return a == Aggregate::Mean ? "mean" : "median"; }
const char* to_string(SiteSet s) { return s == SiteSet::Interior ? "interior" : "boundary"; }
const char* to_string(Trend t) {
    switch (t) {
        case Trend::Convergent: return "convergent-looking";
        case Trend::Divergent: return "divergent-looking";
        default: return "inconclusive";
    }
}

TimeConstantEstimate estimate_region_constant(const RegionSpec& region, const DistributionSpec& dist,
                                              const Site& z, std::int64_t n, std::size_t replicas,
                                              std::uint64_t seed, const EstimatorOptions& opts) {
    CONEFPP_REQUIRE(n >= 1, "estimate: n must be positive");
    CONEFPP_REQUIRE(replicas >= 2, "estimate: need at least two replicas");
    CONEFPP_REQUIRE(z.dim == region.dim && z.l1() > 0, "estimate: bad direction");
    const Site origin = Site::zero(z.dim);
    std::vector<std::int64_t> scales;
    if (opts.fekete && n % 4 == 0) scales = {n / 4, n / 2};
    scales.push_back(n);

    const auto rows = parallel_map(replicas, opts.jobs, [&](std::size_t k) {
        const WeightField field(replica_seed(seed, k), dist);
        std::vector<double> row;
        for (auto m : scales)
            row.push_back(travel_time(region, field, origin, z * m, opts.search).cost /
                          (static_cast<double>(m) * l1(z)));
        return row;
    });

    TimeConstantEstimate e;
    e.direction = z;
    e.n = n;
    e.replicas = replicas;
    e.region = region;
    e.dist = dist;
    e.seed = seed;
    for (const auto& row : rows) e.values.push_back(row.back());
    aggregate_into(e, opts.aggregate);
    for (std::size_t i = 0; i < scales.size(); ++i) {
        double s = 0.0;
        for (const auto& row : rows) s += row[i];
        e.fekete.push_back({scales[i], s / static_cast<double>(replicas)});
    }
    return e;
}

TimeConstantEstimate estimate_time_constant(const DistributionSpec& dist, const Site& z,
                                            std::int64_t n, std::size_t replicas,
                                            std::uint64_t seed, const EstimatorOptions& opts) {
    return estimate_region_constant(RegionSpec::lattice(z.dim), dist, z, n, replicas, seed, opts);
}

TimeConstantEstimate estimate_cylinder_constant(const DistributionSpec& dist, const Site& z, double r,
                                                std::int64_t n, std::size_t replicas,
                                                std::uint64_t seed, const EstimatorOptions& opts) {
    CONEFPP_REQUIRE(r >= RegionSpec::default_collar(z.dim) - 1e-12,
                    "estimate_cylinder_constant: radius below 4 sqrt(d)");
    return estimate_region_constant(RegionSpec::cylinder(z, r), dist, z, n, replicas, seed, opts);
}

std::vector<std::vector<Site>> direction_fan_orbits(int d) {
    CONEFPP_REQUIRE(d == 2 || d == 3, "direction fan: d must be 2 or 3");
    std::vector<Site> reps;
    if (d == 2) reps = {Site{1, 0}, Site{1, 1}, Site{2, 1}};
    else reps = {Site{1, 0, 0}, Site{1, 1, 0}, Site{1, 1, 1}};
    std::vector<std::vector<Site>> out;
    for (const auto& r : reps) out.push_back(orbit_of(r));
    return out;
}

std::vector<Site> direction_fan(int d) {
    std::vector<Site> out;
    for (const auto& orbit : direction_fan_orbits(d)) out.insert(out.end(), orbit.begin(), orbit.end());
    return out;
}

MuReference MuReference::along(TimeConstantEstimate e) {
    MuReference m;
    m.se_ = e.se;
    m.estimates_.push_back(std::move(e));
    return m;
}

MuReference MuReference::fan(std::vector<TimeConstantEstimate> per_direction) {
    CONEFPP_REQUIRE(per_direction.size() >= 3, "MuReference::fan: need at least 3 directions");
    MuReference m;
    struct Vertex {
        double angle;
        Point v;
    };
    std::vector<Vertex> vs;
    for (const auto& e : per_direction) {
        CONEFPP_REQUIRE(e.direction.dim == 2, "MuReference::fan: d = 2 only");
        if (!(e.mean > 0.0))
            throw Error(ErrorKind::DegenerateShape,
                        "time constant estimate is not positive in direction " + e.direction.to_string());
        m.se_ = std::max(m.se_, e.se);
        const double euclid = e.direction.euclid();
        const double mu_unit = e.mean * l1(e.direction) / euclid;
        Point v{};
        v[0] = static_cast<double>(e.direction[0]) / euclid / mu_unit;
        v[1] = static_cast<double>(e.direction[1]) / euclid / mu_unit;
        vs.push_back({std::atan2(v[1], v[0]), v});
    }
    std::sort(vs.begin(), vs.end(), [](const Vertex& a, const Vertex& b) { return a.angle < b.angle; });
    for (std::size_t k = 1; k < vs.size(); ++k)
        CONEFPP_REQUIRE(vs[k].angle > vs[k - 1].angle, "MuReference::fan: repeated direction");
    const std::size_t n = vs.size();
    for (std::size_t k = 0; k < n; ++k) {
        const Point& a = vs[k].v;
        const Point& b = vs[(k + 1) % n].v;
        const double det = a[0] * b[1] - a[1] * b[0];
        CONEFPP_REQUIRE(det > 0.0, "MuReference::fan: consecutive directions span more than pi");
        Point nrm{};
        nrm[0] = (b[1] - a[1]) / det;
        nrm[1] = (a[0] - b[0]) / det;
        m.angles_.push_back(vs[k].angle);
        m.vertices_.push_back(a);
        m.normals_.push_back(nrm);
    }
    m.estimates_ = std::move(per_direction);
    return m;
}

double MuReference::operator()(const Point& x) const {
    if (x[0] == 0.0 && x[1] == 0.0) return 0.0;
    CONEFPP_REQUIRE(is_fan(), "MuReference: point queries need a direction fan");
    const double ang = std::atan2(x[1], x[0]);
    // Sector k spans [angles_[k], angles_[k+1]); the last wraps around.
    auto it = std::upper_bound(angles_.begin(), angles_.end(), ang);
    std::size_t k = it == angles_.begin() ? angles_.size() - 1
                                          : static_cast<std::size_t>(it - angles_.begin()) - 1;
    const Point& nrm = normals_[k];
    return nrm[0] * x[0] + nrm[1] * x[1];
}

double MuReference::operator()(const Site& z) const {
    if (z.l1() == 0) return 0.0;
    if (!is_fan()) {
        const auto& e = estimates_.front();
        CONEFPP_REQUIRE(parallel_to(z, e.direction),
                        "MuReference: site not parallel to the estimated direction");
        return e.mean * l1(z);
    }
    return (*this)(z.as_point());
}

double bond_percolation_threshold(int d) {
    CONEFPP_REQUIRE(d == 2 || d == 3, "bond_percolation_threshold: d must be 2 or 3");
    return d == 2 ? 0.5 : 0.2488126;
}

MuReference estimate_mu_fan(const DistributionSpec& dist, int d, std::int64_t n,
                            std::size_t replicas, std::uint64_t seed, const EstimatorOptions& opts) {
    CONEFPP_REQUIRE(d == 2, "estimate_mu_fan: polygon gauge is implemented for d = 2");
    if (zero_mass(dist) >= bond_percolation_threshold(d))
        throw Error(ErrorKind::DegenerateShape,
                    "zero-weight edges percolate (P(tau = 0) >= p_c); the time constant vanishes");
    std::vector<TimeConstantEstimate> all;
    for (const auto& orbit : direction_fan_orbits(d)) {
        const Site& rep = orbit.front();
        const std::int64_t m = std::max<std::int64_t>(1, n / rep.l1());
        const auto est = estimate_time_constant(dist, rep, m, replicas, seed, opts);
        for (const auto& member : orbit) {
            TimeConstantEstimate copy = est;
            copy.direction = member;
            all.push_back(std::move(copy));
        }
    }
    return MuReference::fan(std::move(all));
}

DeviationEstimate deviation_probability(const DistributionSpec& dist, const RegionSpec& region,
                                        const Site& z, double epsilon, std::size_t replicas,
                                        const MuReference& mu, std::uint64_t seed,
                                        const EstimatorOptions& opts) {
    CONEFPP_REQUIRE(epsilon > 0.0 && replicas >= 1 && z.l1() > 0, "deviation_probability: bad arguments");
    CONEFPP_REQUIRE(mu.se() < epsilon / 10.0,
                    "deviation_probability: plug-in standard error must be below epsilon / 10");
    const double mu_z = mu(z);
    const double band = epsilon * l1(z);
    const Site origin = Site::zero(z.dim);
    const auto values = parallel_map(replicas, opts.jobs, [&](std::size_t k) {
        const WeightField field(replica_seed(seed, k), dist);
        try {
            return travel_time(region, field, origin, z, opts.search).cost;
        } catch (const BudgetExceeded& b) {
            // Decided anyway when the lower bound already clears the band.
            if (b.lower_bound() > mu_z + band) return std::numeric_limits<double>::infinity();
            throw;
        }
    });
    DeviationEstimate out;
    out.z = z;
    out.epsilon = epsilon;
    out.replicas = replicas;
    out.mu_plugin = mu_z;
    out.mu_se = mu.se();
    out.values = values;
    for (double t : values) out.exceed += std::abs(t - mu_z) > band;
    out.p_hat = static_cast<double>(out.exceed) / static_cast<double>(replicas);
    out.ci = stats::wilson(out.exceed, replicas);
    return out;
}

Trend classify_trend(double slope) {
    if (slope < kConvergentSlope) return Trend::Convergent;
    if (slope > kDivergentSlope) return Trend::Divergent;
    return Trend::Inconclusive;
}

double partial_sum_slope(const std::vector<double>& partial_sums) {
    const auto R = static_cast<std::int64_t>(partial_sums.size()) - 1;
    CONEFPP_REQUIRE(R >= 2, "partial_sum_slope: need R >= 2");
    std::vector<double> x, y;
    for (std::int64_t r = std::max<std::int64_t>(1, R / 2); r <= R; ++r) {
        if (partial_sums[r] <= 0.0) continue;
        x.push_back(std::log(static_cast<double>(r)));
        y.push_back(std::log(partial_sums[r]));
    }
    if (x.size() < 2) return 0.0;
    return stats::ls_slope(x, y);
}

TailSumDiagnostic tail_sum(const DistributionSpec& dist, const RegionSpec& cone, double p,
                           double epsilon, std::int64_t radius, std::size_t replicas,
                           SiteSet site_set, const MuReference& mu, std::uint64_t seed,
                           const EstimatorOptions& opts) {
    CONEFPP_REQUIRE(cone.is_cone(), "tail_sum: region must be a cone");
    CONEFPP_REQUIRE(radius >= 2 && replicas >= 1 && epsilon > 0.0 && p > 0.0, "tail_sum: bad arguments");
    CONEFPP_REQUIRE(mu.se() < epsilon / 10.0,
                    "tail_sum: plug-in standard error must be below epsilon / 10");
    const int d = cone.dim;
    const auto sites = sites_of_class(cone, radius, site_set);
    std::vector<double> centre(sites.size()), band(sites.size());
    double limit = 0.0;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        centre[i] = mu(sites[i]);
        band[i] = epsilon * l1(sites[i]);
        limit = std::max(limit, centre[i] + band[i]);
    }
    const Site origin = Site::zero(d);

    const auto hits = parallel_map(replicas, opts.jobs, [&](std::size_t k) {
        const WeightField field(replica_seed(seed, k), dist);
        // Sites beyond the limit have T > mu(z) + epsilon |z|_1.
        const auto reached = reachable_set(cone, field, origin, limit, opts.search);
        std::unordered_map<std::uint64_t, double> cost;
        cost.reserve(reached.size());
        for (const auto& r : reached) cost.emplace(site_key(r.site), r.cost);
        std::vector<std::uint8_t> row(sites.size());
        for (std::size_t i = 0; i < sites.size(); ++i) {
            auto it = cost.find(site_key(sites[i]));
            const double t = it == cost.end() ? std::numeric_limits<double>::infinity() : it->second;
            row[i] = std::abs(t - centre[i]) > band[i];
        }
        return row;
    });

    TailSumDiagnostic out;
    out.p = p;
    out.epsilon = epsilon;
    out.radius = radius;
    out.replicas = replicas;
    out.site_set = site_set;
    out.mu_se = mu.se();
    out.partial_sums.assign(static_cast<std::size_t>(radius) + 1, 0.0);
    std::vector<double> shell(static_cast<std::size_t>(radius) + 1, 0.0);
    for (std::size_t i = 0; i < sites.size(); ++i) {
        TailSumSite s;
        s.z = sites[i];
        for (const auto& row : hits) s.exceed += row[i];
        s.p_hat = static_cast<double>(s.exceed) / static_cast<double>(replicas);
        s.ci = stats::wilson(s.exceed, replicas);
        const double norm = l1(sites[i]);
        shell[static_cast<std::size_t>(sites[i].l1())] += std::pow(norm, p - d) * s.p_hat;
        out.sites.push_back(s);
    }
    double acc = 0.0;
    for (std::size_t r = 0; r < shell.size(); ++r) out.partial_sums[r] = acc += shell[r];
    out.slope = partial_sum_slope(out.partial_sums);
    out.trend = classify_trend(out.slope);
    return out;
}

LpDeviation lp_deviation(const DistributionSpec& dist, const RegionSpec& region, const Site& z,
                         double p, std::size_t replicas, const MuReference& mu, std::uint64_t seed,
                         const EstimatorOptions& opts) {
    CONEFPP_REQUIRE(p > 0.0 && replicas >= 2 && z.l1() > 0, "lp_deviation: bad arguments");
    const double mu_z = mu(z);
    const Site origin = Site::zero(z.dim);
    LpDeviation out;
    out.z = z;
    out.p = p;
    out.values = parallel_map(replicas, opts.jobs, [&](std::size_t k) {
        const WeightField field(replica_seed(seed, k), dist);
        const double t = travel_time(region, field, origin, z, opts.search).cost;
        return std::pow(std::abs(t - mu_z) / l1(z), p);
    });
    out.value = stats::summarize(out.values).mean;
    out.ci = stats::t_interval(out.values);
    return out;
}

std::vector<TimeConstantEstimate> mu_continuity_probe(const std::vector<DistributionSpec>& path,
                                                      const Site& z, std::int64_t n,
                                                      std::size_t replicas, std::uint64_t seed,
                                                      const EstimatorOptions& opts) {
    std::vector<TimeConstantEstimate> out;
    for (const auto& law : path) out.push_back(estimate_time_constant(law, z, n, replicas, seed, opts));
    return out;
}

void to_json(nlohmann::json& j, const TimeConstantEstimate& e) {
    nlohmann::json fek = nlohmann::json::array();
    for (const auto& f : e.fekete) fek.push_back({{"n", f.n}, {"value", f.value}});
    j = {{"direction", e.direction}, {"n", e.n},          {"replicas", e.replicas},
         {"mean", e.mean},           {"stderr", e.se},    {"aggregate", to_string(e.aggregate)},
         {"values", e.values},       {"fekete", fek},     {"region", e.region},
         {"dist", e.dist},           {"seed", e.seed}};
}

void to_json(nlohmann::json& j, const DeviationEstimate& e) {
    j = {{"z", e.z},
         {"epsilon", e.epsilon},
         {"replicas", e.replicas},
         {"exceed", e.exceed},
         {"p_hat", e.p_hat},
         {"wilson_ci", {e.ci.lo, e.ci.hi}},
         {"mu_plugin", e.mu_plugin},
         {"mu_stderr", e.mu_se},
         {"values", e.values}};
}

void to_json(nlohmann::json& j, const TailSumDiagnostic& t) {
    nlohmann::json sites = nlohmann::json::array();
    for (const auto& s : t.sites)
        sites.push_back({{"z", s.z}, {"exceed", s.exceed}, {"p_hat", s.p_hat}, {"ci", {s.ci.lo, s.ci.hi}}});
    j = {{"p", t.p},
         {"epsilon", t.epsilon},
         {"radius", t.radius},
         {"replicas", t.replicas},
         {"site_set", to_string(t.site_set)},
         {"partial_sums", t.partial_sums},
         {"slope", t.slope},
         {"trend", to_string(t.trend)},
         {"mu_stderr", t.mu_se},
         {"sites", sites}};
}

void to_json(nlohmann::json& j, const LpDeviation& l) {
    j = {{"z", l.z}, {"p", l.p}, {"value", l.value}, {"ci", {l.ci.lo, l.ci.hi}}, {"values", l.values}};
}

}  // namespace conefpp
