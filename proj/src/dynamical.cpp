#include "conefpp/dynamical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <unordered_map>

#include "conefpp/parallel.hpp"

namespace conefpp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_window(const DynamicalWeightField& dyn, Window w) {
    CONEFPP_REQUIRE(w.lo >= 0.0 && w.lo <= w.hi && w.hi <= dyn.horizon(),
                    "dynamical: window must lie inside [0, horizon]");
}

// The subgraph induced by the certified sites, with mutable edge weights.
class CertifiedGraph {
public:
    struct Arc {
        std::uint32_t to;
        std::uint32_t edge;
    };

    CertifiedGraph(std::vector<Site> sites) : sites_(std::move(sites)) {
        std::sort(sites_.begin(), sites_.end());
        index_.reserve(sites_.size() * 2);
        for (std::uint32_t i = 0; i < sites_.size(); ++i) index_.emplace(site_key(sites_[i]), i);
        adj_.resize(sites_.size());
        for (std::uint32_t i = 0; i < sites_.size(); ++i) {
            for (int a = 0; a < sites_[i].dim; ++a) {
                const auto it = index_.find(site_key(sites_[i] + Site::unit(sites_[i].dim, a)));
                if (it == index_.end()) continue;
                const auto e = static_cast<std::uint32_t>(edges_.size());
                edges_.push_back({sites_[i], a});
                ends_.push_back({i, it->second});
                adj_[i].push_back({it->second, e});
                adj_[it->second].push_back({i, e});
            }
        }
        weight_.assign(edges_.size(), 0.0);
        on_path_.assign(edges_.size(), 0);
    }

    std::uint32_t index(const Site& s) const { return index_.at(site_key(s)); }
    const std::vector<CanonicalEdge>& edges() const { return edges_; }
    const std::pair<std::uint32_t, std::uint32_t>& ends(std::uint32_t e) const { return ends_[e]; }
    std::size_t size() const { return sites_.size(); }
    const Site& site(std::uint32_t i) const { return sites_[i]; }
    double& weight(std::uint32_t e) { return weight_[e]; }
    bool on_path(std::uint32_t e) const { return on_path_[e] != 0; }

    // Dijkstra from src to dst; marks the edges of one optimal path.
    double shortest(std::uint32_t src, std::uint32_t dst) {
        std::fill(on_path_.begin(), on_path_.end(), 0);
        if (src == dst) return 0.0;
        dist_.assign(sites_.size(), kInf);
        parent_.assign(sites_.size(), UINT32_MAX);
        using Item = std::pair<double, std::uint32_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
        dist_[src] = 0.0;
        pq.push({0.0, src});
        while (!pq.empty()) {
            const auto [d, v] = pq.top();
            pq.pop();
            if (d > dist_[v]) continue;
            if (v == dst) break;
            for (const auto& arc : adj_[v]) {
                const double nd = d + weight_[arc.edge];
                if (nd < dist_[arc.to]) {
                    dist_[arc.to] = nd;
                    parent_[arc.to] = arc.edge;
                    pq.push({nd, arc.to});
                }
            }
        }
        if (dist_[dst] == kInf)
            throw Error(ErrorKind::Unreachable, "dynamical: target unreachable in the certified set");
        for (std::uint32_t v = dst; v != src;) {
            const auto e = parent_[v];
            on_path_[e] = 1;
            v = ends_[e].first == v ? ends_[e].second : ends_[e].first;
        }
        return dist_[dst];
    }

private:
    std::vector<Site> sites_;
    std::unordered_map<std::uint64_t, std::uint32_t> index_;
    std::vector<std::vector<Arc>> adj_;
    std::vector<CanonicalEdge> edges_;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> ends_;
    std::vector<double> weight_;
    std::vector<char> on_path_;
    std::vector<double> dist_;
    std::vector<std::uint32_t> parent_;
};

struct Ring {
    double time;
    std::uint32_t edge;
    std::uint32_t number;  // weight number taken at this ring
};

}  // namespace

WindowEnvelopeWeights::WindowEnvelopeWeights(const DynamicalWeightField& f, Window w, WindowBound which)
    : field_(f), window_(w), which_(which) {
    check_window(f, w);
}

double WindowEnvelopeWeights::weight(const CanonicalEdge& e) const {
    const auto rings = field_.ring_times(e);
    const auto j0 = static_cast<std::size_t>(std::upper_bound(rings.begin(), rings.end(), window_.lo) - rings.begin());
    const auto j1 = static_cast<std::size_t>(std::upper_bound(rings.begin(), rings.end(), window_.hi) - rings.begin());
    if (which_ == WindowBound::Bar) return j1 == j0 ? field_.weight_number(e, j0) : 0.0;
    double lo = kInf, hi = 0.0;
    for (std::size_t j = j0; j <= j1; ++j) {
        const double w = field_.weight_number(e, j);
        lo = std::min(lo, w);
        hi = std::max(hi, w);
    }
    return which_ == WindowBound::Min ? lo : hi;
}

TravelTimeResult travel_time_at(const DynamicalWeightField& dyn, const RegionSpec& region,
                                const Site& src, const Site& dst, double s, const SearchOptions& opts) {
    const SnapshotWeights w(dyn, s);
    return travel_time(region, w, src, dst, opts);
}

EnvelopeCosts envelope_travel_times(const DynamicalWeightField& dyn, const RegionSpec& region,
                                    const Site& src, const Site& dst, double delta,
                                    const SearchOptions& opts) {
    const EnvelopeWeights bar(dyn, delta, Envelope::Bar), hat(dyn, delta, Envelope::Hat);
    return {travel_time(region, bar, src, dst, opts).cost, travel_time(region, hat, src, dst, opts).cost};
}

std::vector<EnvelopeCosts> subwindow_envelopes(const DynamicalWeightField& dyn, const RegionSpec& region,
                                               const Site& src, const Site& dst, Window w, int m,
                                               const SearchOptions& opts) {
    check_window(dyn, w);
    CONEFPP_REQUIRE(m >= 1, "subwindow_envelopes: need at least one subwindow");
    std::vector<EnvelopeCosts> out;
    for (int i = 0; i < m; ++i) {
        const Window sub{w.lo + (w.hi - w.lo) * i / m, i + 1 == m ? w.hi : w.lo + (w.hi - w.lo) * (i + 1) / m};
        const WindowEnvelopeWeights bar(dyn, sub, WindowBound::Bar), hat(dyn, sub, WindowBound::Max);
        out.push_back({travel_time(region, bar, src, dst, opts).cost, travel_time(region, hat, src, dst, opts).cost});
    }
    return out;
}

double TravelTimeTrajectory::at(double s) const {
    CONEFPP_REQUIRE(s >= window.lo && s <= window.hi, "trajectory: time outside the window");
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), s);
    return values[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
}

TravelTimeTrajectory sup_travel_time(const DynamicalWeightField& dyn, const RegionSpec& region,
                                     const Site& src, const Site& dst, Window w,
                                     const SearchOptions& opts) {
    check_window(dyn, w);
    TravelTimeTrajectory tr;
    tr.src = src;
    tr.dst = dst;
    tr.window = w;

    const WindowEnvelopeWeights hi(dyn, w, WindowBound::Max), lo(dyn, w, WindowBound::Min);
    tr.hat_cost = travel_time(region, hi, src, dst, opts).cost;
    tr.min_cost = travel_time(region, lo, src, dst, opts).cost;
    const double bound = tr.hat_cost;

    std::unordered_map<std::uint64_t, double> from_src;
    for (const auto& r : reachable_set(region, lo, src, bound, opts)) from_src.emplace(site_key(r.site), r.cost);
    std::vector<Site> cert;
    std::unordered_map<std::uint64_t, double> to_dst;
    for (const auto& r : reachable_set(region, lo, dst, bound, opts)) {
        const auto it = from_src.find(site_key(r.site));
        if (it == from_src.end() || it->second + r.cost > bound) continue;
        cert.push_back(r.site);
        to_dst.emplace(site_key(r.site), r.cost);
    }

    CertifiedGraph g(std::move(cert));
    tr.sites = g.size();
    tr.edges = g.edges().size();
    std::vector<double> ds(g.size()), dd(g.size());
    for (std::uint32_t i = 0; i < g.size(); ++i) {
        ds[i] = from_src.at(site_key(g.site(i)));
        dd[i] = to_dst.at(site_key(g.site(i)));
    }

    std::vector<Ring> rings;
    for (std::uint32_t e = 0; e < g.edges().size(); ++e) {
        const auto times = dyn.ring_times(g.edges()[e]);
        const auto j0 = static_cast<std::uint32_t>(std::upper_bound(times.begin(), times.end(), w.lo) - times.begin());
        g.weight(e) = dyn.weight_number(g.edges()[e], j0);
        for (auto j = j0; j < times.size() && times[j] <= w.hi; ++j) rings.push_back({times[j], e, j + 1});
    }
    std::sort(rings.begin(), rings.end(), [](const Ring& a, const Ring& b) {
        return a.time < b.time || (a.time == b.time && a.edge < b.edge);
    });
    tr.events = rings.size();

    const auto s = g.index(src), t = g.index(dst);
    double cost = g.shortest(s, t);
    tr.breakpoints.push_back(w.lo);
    tr.values.push_back(cost);

    for (std::size_t k = 0; k < rings.size();) {
        std::size_t end = k;
        while (end < rings.size() && rings[end].time == rings[k].time) ++end;
        bool recompute = end - k > 1;
        for (std::size_t i = k; i < end; ++i) {
            const auto e = rings[i].edge;
            const double old_w = g.weight(e);
            const double new_w = dyn.weight_number(g.edges()[e], rings[i].number);
            g.weight(e) = new_w;
            if (recompute || new_w == old_w) continue;
            if (g.on_path(e)) {
                // A cheaper edge on an optimal path keeps it optimal.
                if (new_w < old_w)
                    cost -= old_w - new_w;
                else
                    recompute = true;
            } else if (new_w < old_w) {
                const auto [a, b] = g.ends(e);
                const double through = std::min(ds[a] + new_w + dd[b], ds[b] + new_w + dd[a]);
                if (through < cost) recompute = true;
            }
        }
        if (recompute) {
            cost = g.shortest(s, t);
            ++tr.recomputes;
        }
        tr.breakpoints.push_back(rings[k].time);
        tr.values.push_back(cost);
        k = end;
    }
    tr.sup = *std::max_element(tr.values.begin(), tr.values.end());
    tr.inf = *std::min_element(tr.values.begin(), tr.values.end());
    return tr;
}

DeviationEstimate dynamical_deviation_probability(const DistributionSpec& dist, const RegionSpec& region,
                                                  const Site& z, double epsilon, std::size_t replicas,
                                                  const MuReference& mu, std::uint64_t seed,
                                                  const DynamicalOptions& dyn, const EstimatorOptions& opts) {
    CONEFPP_REQUIRE(epsilon > 0.0 && replicas >= 1 && z.l1() > 0,
                    "dynamical_deviation_probability: bad arguments");
    CONEFPP_REQUIRE(mu.se() < epsilon / 10.0,
                    "dynamical_deviation_probability: plug-in standard error must be below epsilon / 10");
    const double mu_z = mu(z);
    const double band = epsilon * static_cast<double>(z.l1());
    const Site origin = Site::zero(z.dim);
    const auto values = parallel_map(replicas, opts.jobs, [&](std::size_t k) {
        const DynamicalWeightField field(replica_seed(seed, k), dist, dyn.window.hi, dyn.rate);
        const auto tr = sup_travel_time(field, region, origin, z, dyn.window, opts.search);
        return std::abs(tr.sup - mu_z) >= std::abs(tr.inf - mu_z) ? tr.sup : tr.inf;
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

void to_json(nlohmann::json& j, const TravelTimeTrajectory& t) {
    j = {{"src", t.src},
         {"dst", t.dst},
         {"window", {t.window.lo, t.window.hi}},
         {"breakpoints", t.breakpoints},
         {"values", t.values},
         {"sup", t.sup},
         {"inf", t.inf},
         {"events", t.events},
         {"edges", t.edges},
         {"sites", t.sites},
         {"recomputes", t.recomputes},
         {"hat_cost", t.hat_cost},
         {"min_cost", t.min_cost}};
}

}  // namespace conefpp
