#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "conefpp/geometry.hpp"
#include "conefpp/metric.hpp"
#include "conefpp/randomness.hpp"
#include "conefpp/stats.hpp"

namespace conefpp {

// Mean suits light tails; the median keeps heavy-tailed laws (infinite
// variance or mean) usable as plug-ins.
enum class Aggregate { Mean, Median };

const char* to_string(Aggregate a);

struct EstimatorOptions {
    int jobs = 1;
    SearchOptions search{};
    Aggregate aggregate = Aggregate::Mean;
    // Also estimate at n/4 and n/2 on the same environments.
    bool fekete = true;
};

struct FeketePoint {
    std::int64_t n = 0;
    double value = 0.0;  // replica mean of T(0, n z) / (n |z|_1)
};

// All lengths are l1 lengths: mean is the time per unit l1 distance.
struct TimeConstantEstimate {
    Site direction;
    std::int64_t n = 0;
    std::size_t replicas = 0;
    double mean = 0.0;
    double se = 0.0;
    Aggregate aggregate = Aggregate::Mean;
    std::vector<double> values;
    std::vector<FeketePoint> fekete;
    RegionSpec region;
    DistributionSpec dist;
    std::uint64_t seed = 0;
};

TimeConstantEstimate estimate_time_constant(const DistributionSpec& dist, const Site& z,
                                            std::int64_t n, std::size_t replicas,
                                            std::uint64_t seed, const EstimatorOptions& opts = {});

// Same estimator restricted to an arbitrary region containing the ray.
TimeConstantEstimate estimate_region_constant(const RegionSpec& region, const DistributionSpec& dist,
                                              const Site& z, std::int64_t n, std::size_t replicas,
                                              std::uint64_t seed, const EstimatorOptions& opts = {});

TimeConstantEstimate estimate_cylinder_constant(const DistributionSpec& dist, const Site& z, double r,
                                                std::int64_t n, std::size_t replicas,
                                                std::uint64_t seed, const EstimatorOptions& opts = {});

// The 16 (d = 2) or 26 (d = 3) rational fan directions, grouped into orbits
// of the lattice symmetry group. The first member of each orbit is its
// representative.
std::vector<std::vector<Site>> direction_fan_orbits(int d);
std::vector<Site> direction_fan(int d);

// Plug-in time constant mu(z) used by deviation diagnostics.
class MuReference {
public:
    // Valid only for sites parallel to the estimate's direction.
    static MuReference along(TimeConstantEstimate e);
    // d = 2: gauge of the star-shaped polygon through 1 / mu in each fan
    // direction.
    static MuReference fan(std::vector<TimeConstantEstimate> per_direction);

    double operator()(const Site& z) const;
    double operator()(const Point& x) const;
    // Largest standard error, per unit l1 length, among the estimates.
    double se() const { return se_; }
    bool is_fan() const { return !vertices_.empty(); }
    const std::vector<TimeConstantEstimate>& estimates() const { return estimates_; }
    // Polygon vertices of the unit ball {mu <= 1} in angular order (fan only).
    const std::vector<Point>& vertices() const { return vertices_; }

private:
    std::vector<TimeConstantEstimate> estimates_;
    std::vector<Point> vertices_;
    std::vector<double> angles_;
    std::vector<Point> normals_;  // edge k: normal . x = 1 through v_k, v_{k+1}
    double se_ = 0.0;
};

// Critical probability of bond percolation on Z^d (exact for d = 2).
double bond_percolation_threshold(int d);

// Throws DegenerateShape when zero-weight edges percolate. Estimates mu once per fan orbit (n scaled so n |z|_1 stays near n) and
// assigns it to every member.
MuReference estimate_mu_fan(const DistributionSpec& dist, int d, std::int64_t n,
                            std::size_t replicas, std::uint64_t seed,
                            const EstimatorOptions& opts = {});

struct DeviationEstimate {
    Site z;
    double epsilon = 0.0;
    std::size_t replicas = 0;
    std::size_t exceed = 0;
    double p_hat = 0.0;
    stats::Interval ci;
    double mu_plugin = 0.0;  // mu(z)
    double mu_se = 0.0;
    std::vector<double> values;  // T(0, z) per replica
};

// Fraction of replicas with |T(0, z) - mu(z)| > epsilon |z|_1. Requires the
// plug-in standard error to be below epsilon / 10.
DeviationEstimate deviation_probability(const DistributionSpec& dist, const RegionSpec& region,
                                        const Site& z, double epsilon, std::size_t replicas,
                                        const MuReference& mu, std::uint64_t seed,
                                        const EstimatorOptions& opts = {});

enum class SiteSet { Interior, Boundary };
enum class Trend { Convergent, Divergent, Inconclusive };

const char* to_string(SiteSet s);
const char* to_string(Trend t);

struct TailSumSite {
    Site z;
    std::size_t exceed = 0;
    double p_hat = 0.0;
    stats::Interval ci;
};

struct TailSumDiagnostic {
    double p = 0.0;
    double epsilon = 0.0;
    std::int64_t radius = 0;
    std::size_t replicas = 0;
    SiteSet site_set = SiteSet::Interior;
    // partial_sums[r] = sum over sites with |z|_1 <= r of |z|_1^(p-d) p_hat(z).
    std::vector<double> partial_sums;
    std::vector<TailSumSite> sites;
    double slope = 0.0;  // log-log slope of partial sums on [R/2, R]
    Trend trend = Trend::Inconclusive;
    double mu_se = 0.0;
};

inline constexpr double kConvergentSlope = 0.1;
inline constexpr double kDivergentSlope = 0.5;

Trend classify_trend(double slope);

// Slope of log S(r) against log r over r in [R/2, R] with S(r) > 0; zero
// when the partial sums vanish on the window.
double partial_sum_slope(const std::vector<double>& partial_sums);

// One environment per replica; all sites of the chosen class with
// 1 <= |z|_1 <= R share it.
TailSumDiagnostic tail_sum(const DistributionSpec& dist, const RegionSpec& cone, double p,
                           double epsilon, std::int64_t radius, std::size_t replicas,
                           SiteSet site_set, const MuReference& mu, std::uint64_t seed,
                           const EstimatorOptions& opts = {});

struct LpDeviation {
    Site z;
    double p = 0.0;
    double value = 0.0;  // replica mean of |(T - mu(z)) / |z|_1|^p
    stats::Interval ci;
    std::vector<double> values;
};

LpDeviation lp_deviation(const DistributionSpec& dist, const RegionSpec& region, const Site& z,
                         double p, std::size_t replicas, const MuReference& mu, std::uint64_t seed,
                         const EstimatorOptions& opts = {});

// Estimates along a sequence of laws with common random numbers.
std::vector<TimeConstantEstimate> mu_continuity_probe(const std::vector<DistributionSpec>& path,
                                                      const Site& z, std::int64_t n,
                                                      std::size_t replicas, std::uint64_t seed,
                                                      const EstimatorOptions& opts = {});

void to_json(nlohmann::json& j, const TimeConstantEstimate& e);
void to_json(nlohmann::json& j, const DeviationEstimate& e);
void to_json(nlohmann::json& j, const TailSumDiagnostic& t);
void to_json(nlohmann::json& j, const LpDeviation& l);

}  // namespace conefpp
