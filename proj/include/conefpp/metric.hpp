#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <json.hpp>

#include "conefpp/geometry.hpp"
#include "conefpp/randomness.hpp"

namespace conefpp {

inline constexpr std::size_t kDefaultSiteCap = 50'000'000;

struct SearchOptions {
    // Largest number of sites the search may discover.
    std::size_t cap = kDefaultSiteCap;
    // Return an uncertified result instead of throwing when the cap is hit
    // and the destination already has a tentative cost.
    bool allow_uncertified = false;
    // Upper bound from a staircase path inside the region.
    bool staircase_bound = true;
};

struct TravelTimeResult {
    double cost = 0.0;
    std::vector<Site> path;
    bool certified = true;
    std::size_t explored = 0;
};

// The l1 level set z_1 + ... + z_d = level.
struct HyperplaneTarget {
    std::int64_t level = 0;
};

struct ReachedSite {
    Site site;
    double cost = 0.0;
};

// Exact point-to-point travel time over the subgraph induced by `region`.
// Edges with infinite weight are treated as absent. src == dst gives cost 0
// and an empty path.
TravelTimeResult travel_time(const RegionSpec& region, const WeightSource& field, const Site& src,
                             const Site& dst, const SearchOptions& opts = {});

// Multi-source, multi-sink travel time from the slice on level `from` to the
// slice on level `to`. Region must be a cylinder or bounded.
TravelTimeResult travel_time_to_hyperplane(const RegionSpec& region, const WeightSource& field,
                                           HyperplaneTarget from, HyperplaneTarget to,
                                           const SearchOptions& opts = {});

// Sites of the region with level == `level`, in canonical order.
std::vector<Site> hyperplane_slice(const RegionSpec& region, std::int64_t level);

// All sites with travel time <= t from src, in settle order (cost, then
// canonical site order).
std::vector<ReachedSite> reachable_set(const RegionSpec& region, const WeightSource& field,
                                       const Site& src, double t, const SearchOptions& opts = {});

std::vector<double> coupled_travel_times(std::span<const RegionSpec> regions,
                                         const WeightSource& field, const Site& src,
                                         const Site& dst, const SearchOptions& opts = {});

// Sum of weights along the path, in path order.
double path_cost(const WeightSource& field, std::span<const Site> path);

void to_json(nlohmann::json& j, const TravelTimeResult& r);

}  // namespace conefpp
