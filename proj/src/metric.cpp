#include "conefpp/metric.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_map>

namespace conefpp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

struct Node {
    Site site;
    double cost;
    std::uint32_t parent;
    std::uint32_t hops;
    bool settled;
};

// Order: cost, then hop count, then canonical site order. The hop count
// keeps zero-cost plateaus expanding breadth-first.
struct Entry {
    double cost;
    std::uint32_t hops;
    std::uint64_t key;
    std::uint32_t idx;
    // std::priority_queue is a max-heap.
    bool operator<(const Entry& o) const {
        if (cost != o.cost) return cost > o.cost;
        if (hops != o.hops) return hops > o.hops;
        return key > o.key;
    }
};

// Best-first search over an implicit induced subgraph. Parents change only on
// strict improvement, so paths are reproducible.
class Search {
public:
    Search(const RegionSpec& region, const WeightSource& field, std::size_t cap, double limit)
        : region_(region),
          field_(field),
          cap_(cap),
          limit_(limit),
          full_(std::holds_alternative<region::FullLattice>(region.shape)),
          weights_(2 * region.dim) {
        index_.reserve(1024);
    }

    void add_source(const Site& s) { discover(s, 0.0, kNone); }

    // Runs until the frontier empties or a target is final. Returns the index
    // of the optimal target, or kNone.
    template <class IsTarget>
    std::uint32_t run(IsTarget&& is_target) {
        for (std::uint32_t i = 0; i < nodes_.size(); ++i)
            if (is_target(nodes_[i].site)) offer_target(i);
        while (!heap_.empty()) {
            const Entry top = heap_.top();
            if (best_target_ != kNone && nodes_[best_target_].cost <= top.cost) return best_target_;
            heap_.pop();
            Node& n = nodes_[top.idx];
            if (n.settled || top.cost > n.cost) continue;
            n.settled = true;
            ++settled_;
            settled_order_.push_back(top.idx);
            expand(top.idx, is_target);
            if (capped) {
                capped_at = top.cost;
                return best_target_;
            }
        }
        return best_target_;
    }

    double frontier_min() const { return heap_.empty() ? kInf : heap_.top().cost; }
    std::size_t settled() const { return settled_; }
    const Node& node(std::uint32_t i) const { return nodes_[i]; }
    const std::vector<std::uint32_t>& settled_order() const { return settled_order_; }

    std::vector<Site> path_to(std::uint32_t idx) const {
        std::vector<Site> path;
        for (std::uint32_t i = idx; i != kNone; i = nodes_[i].parent) path.push_back(nodes_[i].site);
        std::reverse(path.begin(), path.end());
        return path;
    }

    // Set when the cap stopped the search; every site not yet settled has
    // travel time at least capped_at.
    bool capped = false;
    double capped_at = 0.0;

private:
    void offer_target(std::uint32_t i) {
        if (best_target_ == kNone) {
            best_target_ = i;
            return;
        }
        const Node& a = nodes_[i];
        const Node& b = nodes_[best_target_];
        if (a.cost < b.cost || (a.cost == b.cost && site_key(a.site) < site_key(b.site)))
            best_target_ = i;
    }

    std::uint32_t discover(const Site& s, double cost, std::uint32_t parent) {
        const std::uint64_t key = site_key(s);
        auto [it, fresh] = index_.try_emplace(key, static_cast<std::uint32_t>(nodes_.size()));
        if (fresh) {
            if (nodes_.size() >= cap_) {
                index_.erase(it);
                capped = true;
                return kNone;
            }
            const std::uint32_t hops = parent == kNone ? 0 : nodes_[parent].hops + 1;
            nodes_.push_back({s, cost, parent, hops, false});
            heap_.push({cost, hops, key, it->second});
            return it->second;
        }
        Node& n = nodes_[it->second];
        if (!n.settled && cost < n.cost) {
            n.cost = cost;
            n.parent = parent;
            n.hops = nodes_[parent].hops + 1;
            heap_.push({cost, n.hops, key, it->second});
        }
        return it->second;
    }

    template <class IsTarget>
    void expand(std::uint32_t idx, IsTarget&& is_target) {
        const Site here = nodes_[idx].site;
        const double base = nodes_[idx].cost;
        const int d = here.dim;
        field_.incident(here, weights_);
        for (int k = 0; k < d; ++k) {
            for (int side = 0; side < 2; ++side) {
                const double w = weights_[2 * k + side];
                if (!(w < kInf)) continue;
                const double c = base + w;
                if (c > limit_) continue;
                Site nb = here;
                nb.x[k] += side == 0 ? -1 : 1;
                if (!full_ && !contains(region_, nb)) continue;
                const std::uint32_t j = discover(nb, c, idx);
                if (j == kNone) continue;
                if (nodes_[j].parent == idx && nodes_[j].cost == c && is_target(nb)) offer_target(j);
            }
        }
    }

    const RegionSpec& region_;
    const WeightSource& field_;
    std::size_t cap_;
    double limit_;
    bool full_;
    std::vector<double> weights_;
    std::vector<Node> nodes_;
    std::unordered_map<std::uint64_t, std::uint32_t> index_;
    std::priority_queue<Entry> heap_;
    std::vector<std::uint32_t> settled_order_;
    std::size_t settled_ = 0;
    std::uint32_t best_target_ = kNone;
};

double staircase_bound(const RegionSpec& region, const WeightSource& field, const Site& a,
                       const Site& b) {
    const auto path = staircase(a, b);
    for (const auto& s : path)
        if (!contains(region, s)) return kInf;
    const double c = path_cost(field, path);
    return std::isfinite(c) ? c : kInf;
}

std::int64_t level_of(const Site& s) {
    std::int64_t l = 0;
    for (int i = 0; i < s.dim; ++i) l += s[i];
    return l;
}

[[noreturn]] void budget_exceeded(const Search& s) {
    throw BudgetExceeded(s.capped_at, s.settled());
}

}  // namespace

double path_cost(const WeightSource& field, std::span<const Site> path) {
    double total = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) {
        CONEFPP_REQUIRE(adjacent(path[i - 1], path[i]), "path_cost: consecutive sites not adjacent");
        total += field.weight(CanonicalEdge::between(path[i - 1], path[i]));
    }
    return total;
}

TravelTimeResult travel_time(const RegionSpec& region, const WeightSource& field, const Site& src,
                             const Site& dst, const SearchOptions& opts) {
    CONEFPP_REQUIRE(src.dim == region.dim && dst.dim == region.dim,
                    "travel_time: dimension mismatch");
    CONEFPP_REQUIRE(contains(region, src) && contains(region, dst),
                    "travel_time: endpoint outside the region");
    if (src == dst) return {0.0, {}, true, 0};

    const double limit = opts.staircase_bound ? staircase_bound(region, field, src, dst) : kInf;
    Search search(region, field, opts.cap, limit);
    search.add_source(src);
    const auto hit = search.run([&](const Site& s) { return s == dst; });
    if (search.capped && (hit == kNone || search.node(hit).cost > search.capped_at)) {
        if (opts.allow_uncertified && hit != kNone)
            return {search.node(hit).cost, search.path_to(hit), false, search.settled()};
        budget_exceeded(search);
    }
    if (hit == kNone)
        throw Error(ErrorKind::Unreachable,
                    "travel_time: " + dst.to_string() + " unreachable from " + src.to_string());
    return {search.node(hit).cost, search.path_to(hit), true, search.settled()};
}

std::vector<Site> hyperplane_slice(const RegionSpec& region, std::int64_t level) {
    const int d = region.dim;
    std::vector<Site> out;
    if (region.bounded()) {
        for (const auto& s : enumerate_sites(region))
            if (level_of(s) == level) out.push_back(s);
        return out;
    }
    const auto* cyl = std::get_if<region::Cylinder>(&region.shape);
    CONEFPP_REQUIRE(cyl != nullptr, "hyperplane_slice: region must be a cylinder or bounded");
    const Site& z = cyl->axis;
    const std::int64_t zsum = level_of(z);
    CONEFPP_REQUIRE(zsum != 0, "hyperplane_slice: cylinder axis parallel to the hyperplane");
    // The slice is an ellipsoid around the axis point; bound its extent by
    // r / cos(angle between the axis and the hyperplane normal).
    const double a = static_cast<double>(level) / static_cast<double>(zsum);
    const double cosang = std::abs(static_cast<double>(zsum)) / (z.euclid() * std::sqrt(double(d)));
    const auto reach = static_cast<std::int64_t>(std::ceil(cyl->r / cosang)) + 1;
    Site lo = Site::zero(d), hi = Site::zero(d);
    for (int i = 0; i < d - 1; ++i) {
        const auto c = static_cast<std::int64_t>(std::llround(a * static_cast<double>(z[i])));
        lo.x[i] = c - reach;
        hi.x[i] = c + reach;
    }
    Site s = lo;
    while (true) {
        std::int64_t partial = 0;
        for (int i = 0; i < d - 1; ++i) partial += s[i];
        s.x[d - 1] = level - partial;
        if (contains(region, s)) out.push_back(s);
        int i = d - 2;
        while (i >= 0 && s.x[i] == hi.x[i]) {
            s.x[i] = lo.x[i];
            --i;
        }
        if (i < 0) break;
        ++s.x[i];
    }
    std::sort(out.begin(), out.end());
    return out;
}

TravelTimeResult travel_time_to_hyperplane(const RegionSpec& region, const WeightSource& field,
                                           HyperplaneTarget from, HyperplaneTarget to,
                                           const SearchOptions& opts) {
    CONEFPP_REQUIRE(from.level < to.level, "travel_time_to_hyperplane: levels must increase");
    const auto sources = hyperplane_slice(region, from.level);
    const auto sinks = hyperplane_slice(region, to.level);
    if (sources.empty() || sinks.empty())
        throw Error(ErrorKind::EmptySlice, "travel_time_to_hyperplane: empty slice");

    double limit = kInf;
    if (opts.staircase_bound) {
        // Staircase between the slice sites closest to each slice's centre.
        auto centre = [](const std::vector<Site>& v) { return v[v.size() / 2]; };
        limit = staircase_bound(region, field, centre(sources), centre(sinks));
    }
    Search search(region, field, opts.cap, limit);
    for (const auto& s : sources) search.add_source(s);
    const std::int64_t goal = to.level;
    const auto hit = search.run([&](const Site& s) { return level_of(s) == goal; });
    if (search.capped && (hit == kNone || search.node(hit).cost > search.capped_at)) {
        if (opts.allow_uncertified && hit != kNone)
            return {search.node(hit).cost, search.path_to(hit), false, search.settled()};
        budget_exceeded(search);
    }
    if (hit == kNone) throw Error(ErrorKind::Unreachable, "travel_time_to_hyperplane: no path");
    return {search.node(hit).cost, search.path_to(hit), true, search.settled()};
}

std::vector<ReachedSite> reachable_set(const RegionSpec& region, const WeightSource& field,
                                       const Site& src, double t, const SearchOptions& opts) {
    CONEFPP_REQUIRE(t >= 0.0, "reachable_set: negative time");
    CONEFPP_REQUIRE(contains(region, src), "reachable_set: source outside the region");
    Search search(region, field, opts.cap, t);
    search.add_source(src);
    search.run([](const Site&) { return false; });
    if (search.capped) budget_exceeded(search);
    std::vector<ReachedSite> out;
    out.reserve(search.settled());
    for (auto i : search.settled_order()) out.push_back({search.node(i).site, search.node(i).cost});
    return out;
}

std::vector<double> coupled_travel_times(std::span<const RegionSpec> regions,
                                         const WeightSource& field, const Site& src,
                                         const Site& dst, const SearchOptions& opts) {
    std::vector<double> out;
    out.reserve(regions.size());
    for (const auto& r : regions) out.push_back(travel_time(r, field, src, dst, opts).cost);
    return out;
}

void to_json(nlohmann::json& j, const TravelTimeResult& r) {
    nlohmann::json path = nlohmann::json::array();
    for (const auto& s : r.path) {
        nlohmann::json a = nlohmann::json::array();
        for (int i = 0; i < s.dim; ++i) a.push_back(s[i]);
        path.push_back(std::move(a));
    }
    j = {{"cost", r.cost}, {"certified", r.certified}, {"explored", r.explored}, {"path", path}};
}

}  // namespace conefpp
