#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "conefpp/geometry.hpp"
#include "conefpp/site.hpp"

namespace conefpp {

namespace dist {

struct PointMass { double value = 1.0; };
struct Exponential { double rate = 1.0; };
struct Uniform { double lo = 0.0, hi = 1.0; };
// Mass p0 at 0, mass 1 - p0 at v1.
struct BernoulliZero { double p0 = 0.5, v1 = 1.0; };
// Classic Pareto: P(tau > x) = min(1, (scale / x)^alpha).
struct ParetoTail { double alpha = 1.0, scale = 1.0; };

}  // namespace dist

struct DistributionSpec;

namespace dist {
// Atom p0 at zero mixed with a continuous law.
struct ZeroMixture {
    double p0 = 0.0;
    std::shared_ptr<const DistributionSpec> continuous;
};
}  // namespace dist

// Non-negative edge-weight law.
struct DistributionSpec {
    std::variant<dist::PointMass, dist::Exponential, dist::Uniform, dist::BernoulliZero,
                 dist::ParetoTail, dist::ZeroMixture>
        law = dist::Exponential{};

    static DistributionSpec point_mass(double v);
    static DistributionSpec exponential(double rate);
    static DistributionSpec uniform(double lo, double hi);
    static DistributionSpec bernoulli_zero(double p0, double v1);
    static DistributionSpec pareto(double alpha, double scale);
    static DistributionSpec zero_mixture(double p0, const DistributionSpec& continuous);

    std::string name() const;
    bool operator==(const DistributionSpec& o) const;
};

// Inverse CDF; monotone in u. Requires u in [0, 1).
double quantile(const DistributionSpec& d, double u);
// P(tau > x) for x >= 0.
double tail_prob(const DistributionSpec& d, double x);
// E[tau^p] for p > 0; +infinity when divergent.
double moment(const DistributionSpec& d, double p);
// P(tau = 0).
double zero_mass(const DistributionSpec& d);

// Weights are rounded to multiples of 2^-32, so path sums below 2^21 are
// exact and independent of summation order.
double snap_weight(double w);
// Weight drawn from a uniform variate.
double draw(const DistributionSpec& d, double u);

// Stream indices for the counter-based generator.
inline constexpr std::uint64_t kWeightStream = 0;
inline constexpr std::uint64_t kClockStream = std::uint64_t{1} << 32;

// Seed of replica k derived from a base seed.
std::uint64_t replica_seed(std::uint64_t base, std::uint64_t k);

// Anything that assigns a non-negative weight to lattice edges.
class WeightSource {
public:
    virtual ~WeightSource() = default;
    virtual double weight(const CanonicalEdge& e) const = 0;
    // Weights of the 2d edges at `site`, in neighbour order (axis ascending,
    // minus before plus). out.size() must be 2 * site.dim.
    virtual void incident(const Site& site, std::span<double> out) const;
};

// Static i.i.d. environment: weight(e) depends only on (seed, e), so every
// region sees the restriction of one lattice-wide field.
class WeightField final : public WeightSource {
public:
    WeightField(std::uint64_t seed, DistributionSpec dist) : seed_(seed), dist_(std::move(dist)) {}

    double weight(const CanonicalEdge& e) const override;
    void incident(const Site& site, std::span<double> out) const override;

    std::uint64_t seed() const { return seed_; }
    const DistributionSpec& dist() const { return dist_; }

private:
    std::uint64_t seed_;
    DistributionSpec dist_;
};

inline double sample_weight(const WeightField& f, const CanonicalEdge& e) { return f.weight(e); }

// Keys of the 2d edges incident to a site, in neighbour order.
void incident_keys(const Site& site, std::span<std::uint64_t> lo, std::span<std::uint64_t> hi);

struct EnvelopePair {
    double bar = 0.0;
    double hat = 0.0;
};

// Dynamical environment on [0, horizon]: every edge carries a Poisson clock
// and resamples its weight when the clock rings. Weight j of an edge comes
// from stream j of the weight generator; weight 0 equals the static field
// with the same seed.
class DynamicalWeightField {
public:
    DynamicalWeightField(std::uint64_t seed, DistributionSpec dist, double horizon,
                         double rate = 1.0);

    std::vector<double> ring_times(const CanonicalEdge& e) const;
    double weight_number(const CanonicalEdge& e, std::size_t j) const;
    double weight_at(const CanonicalEdge& e, double s) const;
    EnvelopePair envelope(const CanonicalEdge& e, double delta) const;

    double horizon() const { return horizon_; }
    double rate() const { return rate_; }
    std::uint64_t seed() const { return seed_; }
    const DistributionSpec& dist() const { return dist_; }
    WeightField initial() const { return {seed_, dist_}; }

private:
    std::uint64_t seed_;
    DistributionSpec dist_;
    double horizon_;
    double rate_;
};

// The environment frozen at time s.
class SnapshotWeights final : public WeightSource {
public:
    SnapshotWeights(const DynamicalWeightField& f, double s);
    double weight(const CanonicalEdge& e) const override { return field_.weight_at(e, s_); }

private:
    const DynamicalWeightField& field_;
    double s_;
};

enum class Envelope { Bar, Hat };

// bar = tau(0) * 1{no ring in [0, delta]}, hat = sup over [0, delta].
class EnvelopeWeights final : public WeightSource {
public:
    EnvelopeWeights(const DynamicalWeightField& f, double delta, Envelope which);
    double weight(const CanonicalEdge& e) const override;

private:
    const DynamicalWeightField& field_;
    double delta_;
    Envelope which_;
};

inline EnvelopePair envelope_weights(const DynamicalWeightField& f, const CanonicalEdge& e,
                                     double delta) {
    return f.envelope(e, delta);
}

// Minimum weight over the region's edges at `site`. Throws
// Error(IsolatedSite) when the site has no neighbour in the region.
double y_statistic(const WeightSource& w, const Site& site, const RegionSpec& region);

void to_json(nlohmann::json& j, const DistributionSpec& d);
void from_json(const nlohmann::json& j, DistributionSpec& d);

}  // namespace conefpp
