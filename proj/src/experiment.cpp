#include "conefpp/experiment.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "conefpp/metric.hpp"
#include "conefpp/parallel.hpp"
#include "conefpp/verify.hpp"

namespace conefpp {

namespace {

using nlohmann::json;

constexpr std::pair<ExperimentKind, const char*> kKinds[] = {
    {ExperimentKind::Mu, "mu"},
    {ExperimentKind::CylinderMu, "cylinder-mu"},
    {ExperimentKind::Deviation, "deviation"},
    {ExperimentKind::TailSum, "tail-sum"},
    {ExperimentKind::Lp, "lp"},
    {ExperimentKind::Shape, "shape"},
    {ExperimentKind::LogWedge, "log-wedge"},
    {ExperimentKind::Dynamical, "dynamical"},
    {ExperimentKind::VerifyGeometry, "verify-geometry"},
    {ExperimentKind::MuContinuity, "mu-continuity"},
};

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorKind::Validation, msg); }

Aggregate aggregate_from(const std::string& s) {
    if (s == "mean") return Aggregate::Mean;
    if (s == "median") return Aggregate::Median;
    invalid("field 'aggregate': expected \"mean\" or \"median\", got \"" + s + "\"");
}

SiteSet site_set_from(const std::string& s) {
    if (s == "interior") return SiteSet::Interior;
    if (s == "boundary") return SiteSet::Boundary;
    invalid("field 'site_set': expected \"interior\" or \"boundary\", got \"" + s + "\"");
}

Site primitive(const Site& z) {
    std::int64_t g = 0;
    for (int i = 0; i < z.dim; ++i) g = std::gcd(g, std::llabs(z[i]));
    Site p = z;
    for (int i = 0; i < z.dim; ++i) p.x[i] /= g;
    return p;
}

// Reads key `k` into `out`, collecting type errors instead of throwing.
template <class T>
void take(const json& j, const char* k, T& out, std::vector<std::string>& errors) {
    if (!j.contains(k)) return;
    try {
        out = j.at(k).get<T>();
    } catch (const std::exception& e) {
        errors.push_back(std::string("field '") + k + "': " + e.what());
    }
}

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : "; ") + x;
    return s;
}

EstimatorOptions estimator_options(const ExperimentConfig& c, int jobs) {
    EstimatorOptions o;
    o.jobs = jobs;
    o.aggregate = c.aggregate;
    o.fekete = c.fekete;
    o.search.cap = c.cap;
    return o;
}

EstimatorOptions plugin_options(const ExperimentConfig& c, int jobs) {
    EstimatorOptions o = estimator_options(c, jobs);
    o.aggregate = c.mu.aggregate;
    o.fekete = false;
    return o;
}

std::uint64_t plugin_seed(std::uint64_t seed) { return replica_seed(seed, std::uint64_t{1} << 40); }

json plugin_json(const MuReference& mu, const ExperimentConfig& c) {
    json per = json::array();
    std::set<std::string> seen;
    for (const auto& e : mu.estimates()) {
        // One entry per distinct estimate (fan orbits share values).
        const std::string key = std::to_string(e.mean) + "/" + std::to_string(e.n);
        if (!seen.insert(key).second) continue;
        per.push_back({{"direction", e.direction}, {"n", e.n}, {"mean", e.mean}, {"stderr", e.se}});
    }
    return {{"n", c.mu.n},
            {"replicas", c.mu.replicas},
            {"aggregate", to_string(c.mu.aggregate)},
            {"stderr", mu.se()},
            {"estimates", per}};
}

MuReference plugin_along(const ExperimentConfig& c, std::uint64_t seed, int jobs) {
    return MuReference::along(estimate_time_constant(c.dist, primitive(c.z), c.mu.n, c.mu.replicas,
                                                     plugin_seed(seed), plugin_options(c, jobs)));
}

MuReference plugin_fan(const ExperimentConfig& c, std::uint64_t seed, int jobs) {
    return estimate_mu_fan(c.dist, c.region.dim, c.mu.n, c.mu.replicas, plugin_seed(seed), plugin_options(c, jobs));
}

struct Csv {
    std::ostringstream os;
    Csv() { os << std::setprecision(17); }
    template <class... Ts>
    void row(const Ts&... xs) {
        bool first = true;
        ((os << (first ? "" : ",") << xs, first = false), ...);
        os << '\n';
    }
};

std::string site_cell(const Site& s) {
    std::string out;
    for (int i = 0; i < s.dim; ++i) out += (i ? " " : "") + std::to_string(s[i]);
    return out;
}

json trend_plot(const std::vector<double>& x, const std::vector<double>& y, bool log_axes,
                const std::string& xlabel, const std::string& ylabel, const std::string& note) {
    return {{"type", "trend"}, {"x", x},         {"y", y},          {"log", log_axes},
            {"xlabel", xlabel}, {"ylabel", ylabel}, {"note", note}};
}

double median_of(std::vector<double> v) { return v.empty() ? 0.0 : stats::median(v); }

RunOutput run_mu(const ExperimentConfig& c, std::uint64_t seed, int jobs) {
    const auto opts = estimator_options(c, jobs);
    const auto e = std::holds_alternative<region::FullLattice>(c.region.shape)
                       ? estimate_time_constant(c.dist, c.direction, c.n, c.replicas, seed, opts)
                       : estimate_region_constant(c.region, c.dist, c.direction, c.n, c.replicas, seed, opts);
    RunOutput out;
    out.result["metrics"] = e;
    Csv csv;
    csv.row("replica", "value");
    for (std::size_t k = 0; k < e.values.size(); ++k) csv.row(k, e.values[k]);
    out.csv = csv.os.str();
    return out;
}

RunOutput run_cylinder(const ExperimentConfig& c, std::uint64_t seed, int jobs) {
    const auto opts = estimator_options(c, jobs);
    const auto lat = estimate_time_constant(c.dist, c.direction, c.n, c.replicas, seed, opts);
    json rows = json::array();
    Csv csv;
    csv.row("r", "replica", "value");
    for (std::size_t k = 0; k < lat.values.size(); ++k) csv.row("inf", k, lat.values[k]);
    std::vector<double> xs, ys;
    bool monotone = true, above = true;
    double prev = std::numeric_limits<double>::infinity(), prev_se = 0.0;
    for (double r : c.radii) {
        const auto e = estimate_cylinder_constant(c.dist, c.direction, r, c.n, c.replicas, seed, opts);
        monotone = monotone && e.mean <= prev + 2 * std::max(e.se, prev_se);
        above = above && e.mean >= lat.mean - 2 * e.se;
        prev = e.mean;
        prev_se = e.se;
        rows.push_back({{"r", r}, {"mean", e.mean}, {"stderr", e.se}, {"values", e.values}});
        for (std::size_t k = 0; k < e.values.size(); ++k) csv.row(r, k, e.values[k]);
        xs.push_back(r);
        ys.push_back(e.mean);
    }
    RunOutput out;
    out.result["metrics"] = {{"lattice", lat},
                             {"cylinders", rows},
                             {"non_increasing_within_2se", monotone},
                             {"above_lattice_within_2se", above}};
    out.result["plot"] = trend_plot(xs, ys, false, "r", "cylinder constant", "lattice " + std::to_string(lat.mean));
    out.csv = csv.os.str();
    return out;
}

RunOutput run_deviation(const ExperimentConfig& c, std::uint64_t seed, int jobs) {
    const auto mu = plugin_along(c, seed, jobs);
    const auto d = deviation_probability(c.dist, c.region, c.z, c.epsilon, c.replicas, mu, seed,
                                         estimator_options(c, jobs));
    RunOutput out;
    out.result["metrics"] = d;
    out.result["metrics"]["mu"] = plugin_json(mu, c);
    Csv csv;
    csv.row("replica", "travel_time");
    for (std::size_t k = 0; k < d.values.size(); ++k) csv.row(k, d.values[k]);
    out.csv = csv.os.str();
    return out;
}

RunOutput run_lp(const ExperimentConfig& c, std::uint64_t seed, int jobs) {
    const auto mu = plugin_along(c, seed, jobs);
    const auto l = lp_deviation(c.dist, c.region, c.z, c.p, c.replicas, mu, seed, estimator_options(c, jobs));
    RunOutput out;
    out.result["metrics"] = l;
    out.result["metrics"]["mu"] = plugin_json(mu, c);
    Csv csv;
    csv.row("replica", "value");
    for (std::size_t k = 0; k < l.values.size(); ++k) csv.row(k, l.values[k]);
    out.csv = csv.os.str();
    return out;
}

RunOutput run_tail_sum(const ExperimentConfig& c, std::uint64_t seed, int jobs) {
    const auto mu = plugin_fan(c, seed, jobs);
    const auto t = tail_sum(c.dist, c.region, c.p, c.epsilon, c.radius, c.replicas, c.site_set, mu, seed,
                            estimator_options(c, jobs));
    RunOutput out;
    out.result["metrics"] = t;
    out.result["metrics"]["mu"] = plugin_json(mu, c);
    std::vector<double> xs, ys;
    for (std::size_t r = 1; r < t.partial_sums.size(); ++r) {
        if (t.partial_sums[r] <= 0.0) continue;
        xs.push_back(static_cast<double>(r));
        ys.push_back(t.partial_sums[r]);
    }
    std::ostringstream note;
    note << "slope " << std::setprecision(3) << t.slope << " on [R/2, R]: " << to_string(t.trend);
    out.result["plot"] = trend_plot(xs, ys, true, "r", "partial sum S(r)", note.str());
    Csv csv;
    csv.row("site", "exceed", "p_hat");
    for (const auto& s : t.sites) csv.row(site_cell(s.z), s.exceed, s.p_hat);
    out.csv = csv.os.str();
    return out;
}

// Row spans of a d = 2 cell set, for plotting.
json outline(const ShapeEstimate& s) {
    std::map<std::int64_t, std::pair<std::int64_t, std::int64_t>> rows;
    for (const auto& cell : s.cells) {
        auto [it, fresh] = rows.try_emplace(cell.site[1], cell.site[0], cell.site[0]);
        if (!fresh) {
            it->second.first = std::min(it->second.first, cell.site[0]);
            it->second.second = std::max(it->second.second, cell.site[0]);
        }
    }
    json out = json::array();
    for (const auto& [y, span] : rows) out.push_back({y, span.first, span.second});
    return out;
}

RunOutput run_shape(const ExperimentConfig& c, std::uint64_t seed, int jobs) {
    auto ls = make_limit_shape(plugin_fan(c, seed, jobs));
    const bool cone = c.region.is_cone();
    if (cone) ls = restrict_shape(ls, c.region);
    const std::size_t nt = c.times.size();
    SearchOptions search;
    search.cap = c.cap;
    json poly = json::array();
    for (const auto& v : ls.polygon) poly.push_back({v[0], v[1]});
    struct Row {
        ShapeDeviation dev;
        double defect = 0.0;
        std::size_t cells = 0;
        json plot;
        std::string cells_csv;
    };
    const auto rows = parallel_map(nt * c.replicas, jobs, [&](std::size_t i) {
        const std::size_t ti = i / c.replicas, k = i % c.replicas;
        const WeightField f(replica_seed(seed, k), c.dist);
        const auto s = empirical_shape(c.region, f, c.times[ti], search);
        Row r;
        r.dev = shape_deviation(s, ls, c.epsilon, c.cutoff_fraction);
        r.defect = cone ? 0.0 : convexity_defect(s);
        r.cells = s.cells.size();
        r.plot = {{"type", "shape"},
                  {"t", c.times[ti]},
                  {"replica", k},
                  {"epsilon", c.epsilon},
                  {"rows", outline(s)},
                  {"polygon", poly}};
        if (ls.restriction) r.plot["cone"] = {{"u", ls.restriction->u.z}, {"c", ls.restriction->c}};
        Csv cells;
        cells.row("x", "y", "time");
        for (const auto& cell : s.cells) cells.row(cell.site[0], cell.site[1], cell.cost);
        r.cells_csv = cells.os.str();
        return r;
    });
    json per_t = json::array();
    Csv csv;
    csv.row("t", "replica", "inner", "outer", "missing", "excess", "sup", "convexity_defect", "cells");
    for (std::size_t ti = 0; ti < nt; ++ti) {
        std::size_t both = 0, inner = 0, outer = 0;
        std::vector<double> sups, defects;
        for (std::size_t k = 0; k < c.replicas; ++k) {
            const auto& r = rows[ti * c.replicas + k];
            inner += r.dev.inner;
            outer += r.dev.outer;
            both += r.dev.inner && r.dev.outer;
            sups.push_back(r.dev.sup);
            defects.push_back(r.defect);
            csv.row(c.times[ti], k, r.dev.inner, r.dev.outer, r.dev.missing, r.dev.excess, r.dev.sup, r.defect,
                    r.cells);
        }
        json e = {{"t", c.times[ti]},       {"inner", inner},
                  {"outer", outer},         {"both", both},
                  {"median_sup", median_of(sups)}, {"sup", sups}};
        if (!cone) e["median_convexity_defect"] = median_of(defects);
        per_t.push_back(e);
    }
    RunOutput out;
    out.result["metrics"] = {{"limit_shape", ls},
                             {"mu", plugin_json(ls.mu, c)},
                             {"polygon_convexity_defect", polygon_convexity_defect(ls)},
                             {"times", per_t}};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::ostringstream stem;
        stem << "shape_t" << c.times[i / c.replicas] << "_r" << i % c.replicas;
        out.files.emplace_back(stem.str() + ".csv", rows[i].cells_csv);
        out.files.emplace_back(stem.str() + ".svg", emit_plot(json{{"plot", rows[i].plot}}));
    }
    out.result["plot"] = rows[(nt - 1) * c.replicas].plot;
    out.csv = csv.os.str();
    return out;
}

RunOutput run_log_wedge(const ExperimentConfig& c, std::uint64_t seed, int jobs) {
    SearchOptions search;
    search.cap = c.cap;
    const std::size_t nn = c.ns.size();
    const auto vals = parallel_map(nn * c.replicas, jobs, [&](std::size_t i) {
        const std::int64_t n = c.ns[i / c.replicas];
        const WeightField f(replica_seed(seed, i % c.replicas), c.dist);
        return travel_time(c.region, f, Site{0, 0}, Site{n, 1}, search).cost / static_cast<double>(n);
    });
    json per_n = json::array();
    std::vector<double> xs, ys;
    Csv csv;
    csv.row("n", "replica", "value");
    for (std::size_t i = 0; i < nn; ++i) {
        std::vector<double> v(vals.begin() + i * c.replicas, vals.begin() + (i + 1) * c.replicas);
        for (std::size_t k = 0; k < v.size(); ++k) csv.row(c.ns[i], k, v[k]);
        const double med = stats::median(v);
        per_n.push_back({{"n", c.ns[i]}, {"median", med}, {"mean", stats::summarize(v).mean}, {"values", v}});
        xs.push_back(static_cast<double>(c.ns[i]));
        ys.push_back(med);
    }
    RunOutput out;
    const double ratio = ys.front() > 0.0 ? ys.back() / ys.front() : 0.0;
    out.result["metrics"] = {{"per_n", per_n}, {"ratio_last_first", ratio}};
    out.result["plot"] = trend_plot(xs, ys, true, "n", "median T(0, n e1 + e2) / n",
                                    "ratio last/first " + std::to_string(ratio));
    out.csv = csv.os.str();
    return out;
}

RunOutput run_dynamical(const ExperimentConfig& c, std::uint64_t seed, int jobs) {
    const auto mu = plugin_along(c, seed, jobs);
    const double mu_z = mu(c.z), band = c.epsilon * static_cast<double>(c.z.l1());
    SearchOptions search;
    search.cap = c.cap;
    struct Row {
        TravelTimeTrajectory tr;
        double start = 0.0;
        std::string steps;
    };
    const auto rows = parallel_map(c.replicas, jobs, [&](std::size_t k) {
        const DynamicalWeightField f(replica_seed(seed, k), c.dist, c.window.hi, c.rate);
        Row r;
        r.tr = sup_travel_time(f, c.region, Site::zero(c.z.dim), c.z, c.window, search);
        r.start = r.tr.values.front();
        Csv steps;
        steps.row("breakpoint", "value");
        for (std::size_t i = 0; i < r.tr.values.size(); ++i) steps.row(r.tr.breakpoints[i], r.tr.values[i]);
        r.steps = steps.os.str();
        if (k != 0) {
            r.tr.breakpoints.clear();
            r.tr.values.clear();
        }
        return r;
    });
    std::size_t dyn_exceed = 0, static_exceed = 0;
    Csv csv;
    csv.row("replica", "start", "sup", "inf", "events", "edges", "recomputes");
    std::vector<double> sups, infs;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& t = rows[k].tr;
        dyn_exceed += std::max(std::abs(t.sup - mu_z), std::abs(t.inf - mu_z)) > band;
        static_exceed += std::abs(rows[k].start - mu_z) > band;
        sups.push_back(t.sup);
        infs.push_back(t.inf);
        csv.row(k, rows[k].start, t.sup, t.inf, t.events, t.edges, t.recomputes);
    }
    const double n = static_cast<double>(c.replicas);
    const auto ci = stats::wilson(dyn_exceed, c.replicas);
    RunOutput out;
    out.result["metrics"] = {{"mu_z", mu_z},
                             {"band", band},
                             {"exceed", dyn_exceed},
                             {"p_hat", dyn_exceed / n},
                             {"ci", {ci.lo, ci.hi}},
                             {"static_exceed", static_exceed},
                             {"static_p_hat", static_exceed / n},
                             {"sup", sups},
                             {"inf", infs},
                             {"mu", plugin_json(mu, c)}};
    const auto& t0 = rows.front().tr;
    out.result["plot"] = {{"type", "trajectory"},
                          {"breakpoints", t0.breakpoints},
                          {"values", t0.values},
                          {"window", {c.window.lo, c.window.hi}},
                          {"hat", t0.hat_cost},
                          {"min", t0.min_cost},
                          {"mu_z", mu_z}};
    out.csv = csv.os.str();
    for (std::size_t k = 0; k < rows.size(); ++k)
        out.files.emplace_back("trajectory_r" + std::to_string(k) + ".csv", rows[k].steps);
    return out;
}

RunOutput run_verify(const ExperimentConfig& c, std::uint64_t seed) {
    const auto rep = verify_geometry(c.region.dim, seed);
    RunOutput out;
    out.result["metrics"] = rep;
    Csv csv;
    csv.row("check", "cases", "failures", "status");
    for (const auto& ch : rep.checks) csv.row(ch.name, ch.cases, ch.failures, ch.pass() ? "PASS" : "FAIL");
    out.csv = csv.os.str();
    return out;
}

RunOutput run_continuity(const ExperimentConfig& c, std::uint64_t seed, int jobs) {
    const auto est = mu_continuity_probe(c.path, c.direction, c.n, c.replicas, seed, estimator_options(c, jobs));
    RunOutput out;
    out.result["metrics"] = {{"estimates", est}};
    Csv csv;
    csv.row("law", "replica", "value");
    for (std::size_t i = 0; i < est.size(); ++i)
        for (std::size_t k = 0; k < est[i].values.size(); ++k) csv.row(i, k, est[i].values[k]);
    out.csv = csv.os.str();
    return out;
}

}  // namespace

const char* to_string(ExperimentKind k) {
    for (const auto& [kind, name] : kKinds)
        if (kind == k) return name;
    return "?";
}

ExperimentKind experiment_kind_from(const std::string& s) {
    for (const auto& [kind, name] : kKinds)
        if (s == name) return kind;
    invalid("field 'experiment': unknown kind \"" + s + "\"");
}

void validate(const ExperimentConfig& c) {
    std::vector<std::string> e;
    const int d = c.region.dim;
    auto need = [&](bool ok, const std::string& msg) {
        if (!ok) e.push_back(msg);
    };
    need(d >= 2 && d <= 3, "field 'region': dimension must be 2 or 3");
    need(c.replicas >= 2, "field 'replicas': need at least 2");
    need(c.cap >= 1000, "field 'cap': must be at least 1000 sites");
    need(c.mu.n >= 1 && c.mu.replicas >= 2, "field 'mu': need n >= 1 and replicas >= 2");
    switch (c.kind) {
        case ExperimentKind::Mu:
        case ExperimentKind::MuContinuity:
            need(c.direction.dim == d && c.direction.l1() > 0, "field 'direction': nonzero site of the region's dimension");
            need(c.n >= 1, "field 'n': must be >= 1");
            if (c.kind == ExperimentKind::MuContinuity) need(!c.path.empty(), "field 'path': at least one law");
            break;
        case ExperimentKind::CylinderMu:
            need(std::holds_alternative<region::FullLattice>(c.region.shape), "field 'region': cylinder-mu runs on the lattice");
            need(c.direction.dim == d && c.direction.l1() > 0, "field 'direction': nonzero site of the region's dimension");
            need(c.n >= 1, "field 'n': must be >= 1");
            need(!c.radii.empty(), "field 'radii': at least one radius");
            for (double r : c.radii) need(r >= 4 * std::sqrt(double(d)), "field 'radii': every radius must be >= 4 sqrt(d)");
            break;
        case ExperimentKind::Deviation:
        case ExperimentKind::Lp:
        case ExperimentKind::Dynamical:
            need(c.z.dim == d && c.z.l1() > 0, "field 'z': nonzero site of the region's dimension");
            if (c.z.dim == d) need(contains(c.region, c.z), "field 'z': site outside the region");
            if (c.kind == ExperimentKind::Lp) need(c.p > 0, "field 'p': must be positive");
            else need(c.epsilon > 0, "field 'epsilon': must be positive");
            if (c.kind == ExperimentKind::Dynamical) {
                need(c.window.lo >= 0 && c.window.lo <= c.window.hi, "field 'window': need 0 <= lo <= hi");
                need(c.rate > 0, "field 'rate': must be positive");
            }
            break;
        case ExperimentKind::TailSum:
            need(c.region.is_cone() && d == 2, "field 'region': tail-sum needs a d = 2 cone");
            need(c.p > 0 && c.epsilon > 0, "fields 'p', 'epsilon': must be positive");
            need(c.radius >= 2, "field 'radius': must be >= 2");
            break;
        case ExperimentKind::Shape:
            need(d == 2, "field 'region': shape experiments are d = 2");
            need(std::holds_alternative<region::FullLattice>(c.region.shape) || c.region.is_cone(),
                 "field 'region': shape runs on the lattice or a cone");
            need(!c.times.empty(), "field 'times': at least one time");
            for (double t : c.times) need(t > 0, "field 'times': times must be positive");
            need(c.epsilon > 0 && c.epsilon < 1, "field 'epsilon': must lie in (0, 1)");
            need(c.cutoff_fraction >= 0, "field 'cutoff_fraction': must be >= 0");
            break;
        case ExperimentKind::LogWedge:
            need(std::holds_alternative<region::LogWedge>(c.region.shape), "field 'region': log-wedge experiments need a log-wedge region");
            need(!c.ns.empty(), "field 'ns': at least one n");
            for (auto n : c.ns) need(n >= 1, "field 'ns': entries must be >= 1");
            break;
        case ExperimentKind::VerifyGeometry:
            break;
    }
    if (!e.empty()) invalid(join(e));
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
    j = json::object();
    j["experiment"] = to_string(c.kind);
    j["region"] = c.region;
    j["dist"] = c.dist;
    j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
    j["direction"] = c.direction;
    j["z"] = c.z;
    j["n"] = c.n;
    j["replicas"] = c.replicas;
    j["aggregate"] = to_string(c.aggregate);
    j["fekete"] = c.fekete;
    j["radii"] = c.radii;
    j["epsilon"] = c.epsilon;
    j["p"] = c.p;
    j["radius"] = c.radius;
    j["site_set"] = to_string(c.site_set);
    j["times"] = c.times;
    j["cutoff_fraction"] = c.cutoff_fraction;
    j["ns"] = c.ns;
    j["window"] = {c.window.lo, c.window.hi};
    j["rate"] = c.rate;
    j["path"] = c.path;
    j["mu"] = {{"n", c.mu.n}, {"replicas", c.mu.replicas}, {"aggregate", to_string(c.mu.aggregate)}};
    j["cap"] = c.cap;
    j["output"] = c.output;
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
    if (!j.is_object()) invalid("config: expected a JSON object");
    static const std::set<std::string> known{
        "experiment", "region", "dist",  "seed",   "direction",       "z",    "n",      "replicas",
        "aggregate",  "fekete", "radii", "epsilon", "p",              "radius", "site_set", "times",
        "cutoff_fraction", "ns", "window", "rate", "path",            "mu",   "cap",    "output"};
    std::vector<std::string> errors;
    for (const auto& [k, v] : j.items())
        if (!known.count(k)) errors.push_back("field '" + k + "': unknown");
    if (!j.contains("experiment")) errors.push_back("field 'experiment': required");
    ExperimentConfig out;
    auto guarded = [&](const char* field, auto&& f) {
        if (!j.contains(field)) return;
        try {
            f(j.at(field));
        } catch (const Error& e) {
            errors.push_back(std::string("field '") + field + "': " + e.what());
        } catch (const std::exception& e) {
            errors.push_back(std::string("field '") + field + "': " + e.what());
        }
    };
    guarded("experiment", [&](const json& v) { out.kind = experiment_kind_from(v.get<std::string>()); });
    guarded("region", [&](const json& v) { out.region = v.get<RegionSpec>(); });
    guarded("dist", [&](const json& v) { out.dist = v.get<DistributionSpec>(); });
    guarded("seed", [&](const json& v) {
        if (v.is_null()) out.seed.reset();
        else if (v.is_number_unsigned()) out.seed = v.get<std::uint64_t>();
        else throw std::invalid_argument("expected a non-negative integer");
    });
    guarded("direction", [&](const json& v) { out.direction = v.get<Site>(); });
    guarded("z", [&](const json& v) { out.z = v.get<Site>(); });
    take(j, "n", out.n, errors);
    take(j, "replicas", out.replicas, errors);
    guarded("aggregate", [&](const json& v) { out.aggregate = aggregate_from(v.get<std::string>()); });
    take(j, "fekete", out.fekete, errors);
    take(j, "radii", out.radii, errors);
    take(j, "epsilon", out.epsilon, errors);
    take(j, "p", out.p, errors);
    take(j, "radius", out.radius, errors);
    guarded("site_set", [&](const json& v) { out.site_set = site_set_from(v.get<std::string>()); });
    take(j, "times", out.times, errors);
    take(j, "cutoff_fraction", out.cutoff_fraction, errors);
    take(j, "ns", out.ns, errors);
    guarded("window", [&](const json& v) {
        const auto w = v.get<std::vector<double>>();
        if (w.size() != 2) throw std::invalid_argument("expected [lo, hi]");
        out.window = {w[0], w[1]};
    });
    take(j, "rate", out.rate, errors);
    guarded("path", [&](const json& v) { out.path = v.get<std::vector<DistributionSpec>>(); });
    guarded("mu", [&](const json& v) {
        for (const auto& [k, x] : v.items())
            if (k != "n" && k != "replicas" && k != "aggregate") throw std::invalid_argument("unknown key '" + k + "'");
        if (v.contains("n")) out.mu.n = v.at("n").get<std::int64_t>();
        if (v.contains("replicas")) out.mu.replicas = v.at("replicas").get<std::size_t>();
        if (v.contains("aggregate")) out.mu.aggregate = aggregate_from(v.at("aggregate").get<std::string>());
    });
    take(j, "cap", out.cap, errors);
    take(j, "output", out.output, errors);
    if (!errors.empty()) invalid(join(errors));
    c = std::move(out);
}

ExperimentConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) invalid("config: cannot read " + file.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        invalid("config: " + std::string(e.what()));
    }
    ExperimentConfig c = j.get<ExperimentConfig>();
    validate(c);
    return c;
}

std::uint64_t resolve_seed(const ExperimentConfig& c, std::optional<std::uint64_t> flag) {
    if (flag) return *flag;
    if (c.seed) return *c.seed;
    if (const char* env = std::getenv("CONEFPP_SEED")) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(env, &used);
            if (used == std::string(env).size()) return v;
        } catch (const std::exception&) {
        }
        invalid("CONEFPP_SEED: not a non-negative integer");
    }
    invalid("field 'seed': no seed in the config, on the command line or in CONEFPP_SEED");
}

std::string config_hash(const ExperimentConfig& c) {
    json j = c;
    j.erase("output");
    const std::string text = j.dump();
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(text.data(), text.size(), md, &len, EVP_sha256(), nullptr);
    std::ostringstream os;
    for (unsigned int i = 0; i < 8; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
}

RunOutput run_experiment(const ExperimentConfig& c, int jobs) {
    validate(c);
    CONEFPP_REQUIRE(c.seed.has_value(), "run_experiment: seed must be resolved");
    const std::uint64_t seed = *c.seed;
    RunOutput out;
    switch (c.kind) {
        case ExperimentKind::Mu: out = run_mu(c, seed, jobs); break;
        case ExperimentKind::CylinderMu: out = run_cylinder(c, seed, jobs); break;
        case ExperimentKind::Deviation: out = run_deviation(c, seed, jobs); break;
        case ExperimentKind::TailSum: out = run_tail_sum(c, seed, jobs); break;
        case ExperimentKind::Lp: out = run_lp(c, seed, jobs); break;
        case ExperimentKind::Shape: out = run_shape(c, seed, jobs); break;
        case ExperimentKind::LogWedge: out = run_log_wedge(c, seed, jobs); break;
        case ExperimentKind::Dynamical: out = run_dynamical(c, seed, jobs); break;
        case ExperimentKind::VerifyGeometry: out = run_verify(c, seed); break;
        case ExperimentKind::MuContinuity: out = run_continuity(c, seed, jobs); break;
    }
    out.result["experiment"] = to_string(c.kind);
    out.result["config"] = c;
    out.result["provenance"] = {{"version", CONEFPP_VERSION}, {"config_hash", config_hash(c)}};
    if (out.result.contains("plot")) out.svg = emit_plot(out.result);
    return out;
}

std::filesystem::path write_outputs(const ExperimentConfig& c, const RunOutput& out) {
    const auto dir = std::filesystem::path(c.output) / to_string(c.kind) / config_hash(c);
    std::filesystem::create_directories(dir);
    auto put = [&](const char* name, const std::string& text) {
        std::ofstream f(dir / name, std::ios::binary);
        f << text;
        if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    };
    put("result.json", out.result.dump(2) + "\n");
    put("data.csv", out.csv);
    if (out.svg) put("plot.svg", *out.svg);
    for (const auto& [name, text] : out.files) put(name.c_str(), text);
    return dir;
}

}  // namespace conefpp
