#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "conefpp/estimators.hpp"
#include "conefpp/metric.hpp"
#include "conefpp/randomness.hpp"

namespace conefpp {

struct Window {
    double lo = 0.0;
    double hi = 1.0;

    bool operator==(const Window&) const = default;
};

enum class WindowBound { Bar, Min, Max };

// Per-edge bounds over a time window [lo, hi]:
//   Bar  weight at lo if the clock stays silent on (lo, hi], else 0
//   Min  smallest weight taken on the window
//   Max  largest weight taken on the window
// Bar <= Min <= weight_at(s) <= Max for every s in the window.
class WindowEnvelopeWeights final : public WeightSource {
public:
    WindowEnvelopeWeights(const DynamicalWeightField& f, Window w, WindowBound which);
    double weight(const CanonicalEdge& e) const override;

private:
    const DynamicalWeightField& field_;
    Window window_;
    WindowBound which_;
};

// Static search in the environment frozen at time s.
TravelTimeResult travel_time_at(const DynamicalWeightField& dyn, const RegionSpec& region,
                                const Site& src, const Site& dst, double s,
                                const SearchOptions& opts = {});

struct EnvelopeCosts {
    double bar = 0.0;
    double hat = 0.0;
};

// Travel times in the bar and hat fields of [0, delta].
EnvelopeCosts envelope_travel_times(const DynamicalWeightField& dyn, const RegionSpec& region,
                                    const Site& src, const Site& dst, double delta,
                                    const SearchOptions& opts = {});

// Bar and hat costs on each of m equal subwindows.
std::vector<EnvelopeCosts> subwindow_envelopes(const DynamicalWeightField& dyn,
                                               const RegionSpec& region, const Site& src,
                                               const Site& dst, Window w, int m,
                                               const SearchOptions& opts = {});

// s -> T^(s)(src, dst) on a window: piecewise constant, right-continuous.
// values[k] holds on [breakpoints[k], breakpoints[k+1]); breakpoints[0] is
// the window start and the rest are clock rings of certified edges.
struct TravelTimeTrajectory {
    Site src;
    Site dst;
    Window window;
    std::vector<double> breakpoints;
    std::vector<double> values;
    double sup = 0.0;
    double inf = 0.0;
    std::size_t events = 0;      // rings inside the window on certified edges
    std::size_t edges = 0;       // certified edges
    std::size_t sites = 0;       // certified sites
    std::size_t recomputes = 0;  // full searches after the initial one
    double hat_cost = 0.0;       // certification bound
    double min_cost = 0.0;       // cost in the window-minimum field

    // Value at time s (window.lo <= s <= window.hi).
    double at(double s) const;
};

// Exact trajectory. Every s-optimal path has its sites in
//   {x : d_min(src, x) + d_min(x, dst) <= T_max(src, dst)},
// where d_min / T_max are travel times in the Min / Max window fields; the
// trajectory is computed on the subgraph induced by that set.
TravelTimeTrajectory sup_travel_time(const DynamicalWeightField& dyn, const RegionSpec& region,
                                     const Site& src, const Site& dst, Window w,
                                     const SearchOptions& opts = {});

struct DynamicalOptions {
    Window window{};
    double rate = 1.0;
};

// Fraction of replicas with sup over the window of |T^(s)(0, z) - mu(z)| >
// epsilon |z|_1. Replica k uses the same seed as the static estimator, so
// its time-0 environment is the static one. `values` holds the T^(s)
// farthest from mu(z).
DeviationEstimate dynamical_deviation_probability(const DistributionSpec& dist,
                                                  const RegionSpec& region, const Site& z,
                                                  double epsilon, std::size_t replicas,
                                                  const MuReference& mu, std::uint64_t seed,
                                                  const DynamicalOptions& dyn = {},
                                                  const EstimatorOptions& opts = {});

void to_json(nlohmann::json& j, const TravelTimeTrajectory& t);

}  // namespace conefpp
