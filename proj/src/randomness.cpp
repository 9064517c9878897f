#include "conefpp/randomness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "conefpp/kernels.hpp"

namespace conefpp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void validate(const DistributionSpec& d) {
    std::visit(overloaded{
                   [](const dist::PointMass& p) {
                       CONEFPP_REQUIRE(p.value >= 0.0, "PointMass: negative value");
                   },
                   [](const dist::Exponential& e) {
                       CONEFPP_REQUIRE(e.rate > 0.0, "Exponential: rate must be positive");
                   },
                   [](const dist::Uniform& u) {
                       CONEFPP_REQUIRE(u.lo >= 0.0 && u.hi >= u.lo, "Uniform: need 0 <= lo <= hi");
                   },
                   [](const dist::BernoulliZero& b) {
                       CONEFPP_REQUIRE(b.p0 >= 0.0 && b.p0 <= 1.0 && b.v1 >= 0.0,
                                       "BernoulliZero: bad parameters");
                   },
                   [](const dist::ParetoTail& p) {
                       CONEFPP_REQUIRE(p.alpha > 0.0 && p.scale > 0.0, "ParetoTail: bad parameters");
                   },
                   [](const dist::ZeroMixture& z) {
                       CONEFPP_REQUIRE(z.p0 >= 0.0 && z.p0 < 1.0 && z.continuous,
                                       "ZeroMixture: bad parameters");
                       CONEFPP_REQUIRE(!std::holds_alternative<dist::ZeroMixture>(z.continuous->law),
                                       "ZeroMixture: nested mixtures are not supported");
                   },
               },
               d.law);
}

}  // namespace

DistributionSpec DistributionSpec::point_mass(double v) {
    DistributionSpec d{dist::PointMass{v}};
    validate(d);
    return d;
}
DistributionSpec DistributionSpec::exponential(double rate) {
    DistributionSpec d{dist::Exponential{rate}};
    validate(d);
    return d;
}
DistributionSpec DistributionSpec::uniform(double lo, double hi) {
    DistributionSpec d{dist::Uniform{lo, hi}};
    validate(d);
    return d;
}
DistributionSpec DistributionSpec::bernoulli_zero(double p0, double v1) {
    DistributionSpec d{dist::BernoulliZero{p0, v1}};
    validate(d);
    return d;
}
DistributionSpec DistributionSpec::pareto(double alpha, double scale) {
    DistributionSpec d{dist::ParetoTail{alpha, scale}};
    validate(d);
    return d;
}
DistributionSpec DistributionSpec::zero_mixture(double p0, const DistributionSpec& continuous) {
    DistributionSpec d{dist::ZeroMixture{p0, std::make_shared<const DistributionSpec>(continuous)}};
    validate(d);
    return d;
}

std::string DistributionSpec::name() const {
    static const char* names[] = {"point-mass", "exponential", "uniform",
                                  "bernoulli-zero", "pareto", "zero-mixture"};
    return names[law.index()];
}

bool DistributionSpec::operator==(const DistributionSpec& o) const {
    nlohmann::json a, b;
    to_json(a, *this);
    to_json(b, o);
    return a == b;
}

double quantile(const DistributionSpec& d, double u) {
    CONEFPP_REQUIRE(u >= 0.0 && u < 1.0, "quantile: u must lie in [0, 1)");
    return std::visit(overloaded{
                          [](const dist::PointMass& p) { return p.value; },
                          [&](const dist::Exponential& e) { return -std::log1p(-u) / e.rate; },
                          [&](const dist::Uniform& un) { return un.lo + u * (un.hi - un.lo); },
                          [&](const dist::BernoulliZero& b) { return u < b.p0 ? 0.0 : b.v1; },
                          [&](const dist::ParetoTail& p) {
                              return p.scale * std::pow(1.0 - u, -1.0 / p.alpha);
                          },
                          [&](const dist::ZeroMixture& z) {
                              if (u < z.p0) return 0.0;
                              const double v = std::min((u - z.p0) / (1.0 - z.p0),
                                                        std::nextafter(1.0, 0.0));
                              return quantile(*z.continuous, v);
                          },
                      },
                      d.law);
}

double tail_prob(const DistributionSpec& d, double x) {
    CONEFPP_REQUIRE(x >= 0.0, "tail_prob: x must be non-negative");
    return std::visit(overloaded{
                          [&](const dist::PointMass& p) { return p.value > x ? 1.0 : 0.0; },
                          [&](const dist::Exponential& e) { return std::exp(-e.rate * x); },
                          [&](const dist::Uniform& un) {
                              if (x < un.lo) return 1.0;
                              if (x >= un.hi) return 0.0;
                              return (un.hi - x) / (un.hi - un.lo);
                          },
                          [&](const dist::BernoulliZero& b) { return b.v1 > x ? 1.0 - b.p0 : 0.0; },
                          [&](const dist::ParetoTail& p) {
                              return x <= p.scale ? 1.0 : std::pow(p.scale / x, p.alpha);
                          },
                          [&](const dist::ZeroMixture& z) {
                              return (1.0 - z.p0) * tail_prob(*z.continuous, x);
                          },
                      },
                      d.law);
}

double moment(const DistributionSpec& d, double p) {
    CONEFPP_REQUIRE(p > 0.0, "moment: p must be positive");
    return std::visit(overloaded{
                          [&](const dist::PointMass& m) { return std::pow(m.value, p); },
                          [&](const dist::Exponential& e) {
                              return std::tgamma(p + 1.0) / std::pow(e.rate, p);
                          },
                          [&](const dist::Uniform& un) {
                              if (un.hi == un.lo) return std::pow(un.lo, p);
                              return (std::pow(un.hi, p + 1.0) - std::pow(un.lo, p + 1.0)) /
                                     ((p + 1.0) * (un.hi - un.lo));
                          },
                          [&](const dist::BernoulliZero& b) {
                              return (1.0 - b.p0) * std::pow(b.v1, p);
                          },
                          [&](const dist::ParetoTail& t) {
                              if (p >= t.alpha) return kInf;
                              return t.alpha * std::pow(t.scale, p) / (t.alpha - p);
                          },
                          [&](const dist::ZeroMixture& z) {
                              return (1.0 - z.p0) * moment(*z.continuous, p);
                          },
                      },
                      d.law);
}

double zero_mass(const DistributionSpec& d) {
    return std::visit(overloaded{
                          [](const dist::PointMass& p) { return p.value == 0.0 ? 1.0 : 0.0; },
                          [](const dist::Exponential&) { return 0.0; },
                          [](const dist::Uniform& u) { return u.hi == 0.0 ? 1.0 : 0.0; },
                          [](const dist::BernoulliZero& b) { return b.v1 == 0.0 ? 1.0 : b.p0; },
                          [](const dist::ParetoTail&) { return 0.0; },
                          [](const dist::ZeroMixture& z) {
                              return z.p0 + (1.0 - z.p0) * zero_mass(*z.continuous);
                          },
                      },
                      d.law);
}

std::uint64_t replica_seed(std::uint64_t base, std::uint64_t k) {
    return kernels::fmix64(kernels::fmix64(base) ^ (kernels::kGolden * (k + 1)));
}

void WeightSource::incident(const Site& site, std::span<double> out) const {
    CONEFPP_REQUIRE(out.size() == static_cast<std::size_t>(2 * site.dim),
                    "incident: output must hold 2d weights");
    for (int i = 0; i < site.dim; ++i) {
        Site lower = site;
        lower.x[i] -= 1;
        out[2 * i] = weight({lower, i});
        out[2 * i + 1] = weight({site, i});
    }
}

void incident_keys(const Site& site, std::span<std::uint64_t> lo, std::span<std::uint64_t> hi) {
    for (int i = 0; i < site.dim; ++i) {
        Site lower = site;
        lower.x[i] -= 1;
        const EdgeKey a = edge_key({lower, i});
        const EdgeKey b = edge_key({site, i});
        lo[2 * i] = a.lo;
        hi[2 * i] = a.hi;
        lo[2 * i + 1] = b.lo;
        hi[2 * i + 1] = b.hi;
    }
}

double snap_weight(double w) {
    if (!(w < 2097152.0)) return w;  // 2^21: already on the grid
    // Scaling by powers of two is exact.
    return std::nearbyint(w * 4294967296.0) * (1.0 / 4294967296.0);
}

double draw(const DistributionSpec& d, double u) { return snap_weight(quantile(d, u)); }

double WeightField::weight(const CanonicalEdge& e) const {
    const EdgeKey k = edge_key(e);
    return draw(dist_, kernels::uniform(seed_, kWeightStream, k.lo, k.hi));
}

void WeightField::incident(const Site& site, std::span<double> out) const {
    CONEFPP_REQUIRE(out.size() == static_cast<std::size_t>(2 * site.dim),
                    "incident: output must hold 2d weights");
    std::array<std::uint64_t, 2 * kMaxDim> lo{}, hi{};
    const std::size_t n = out.size();
    incident_keys(site, std::span(lo.data(), n), std::span(hi.data(), n));
    kernels::uniforms(seed_, kWeightStream, std::span<const std::uint64_t>(lo.data(), n),
                      std::span<const std::uint64_t>(hi.data(), n), out);
    for (auto& w : out) w = draw(dist_, w);
}

DynamicalWeightField::DynamicalWeightField(std::uint64_t seed, DistributionSpec dist,
                                           double horizon, double rate)
    : seed_(seed), dist_(std::move(dist)), horizon_(horizon), rate_(rate) {
    CONEFPP_REQUIRE(horizon >= 0.0, "dynamical field: negative horizon");
    CONEFPP_REQUIRE(rate > 0.0, "dynamical field: clock rate must be positive");
}

std::vector<double> DynamicalWeightField::ring_times(const CanonicalEdge& e) const {
    const EdgeKey key = edge_key(e);
    std::vector<double> out;
    double t = 0.0;
    for (std::uint64_t k = 0;; ++k) {
        const double u = kernels::uniform(seed_, kClockStream + k, key.lo, key.hi);
        t += -std::log1p(-u) / rate_;
        if (t > horizon_) break;
        out.push_back(t);
    }
    return out;
}

double DynamicalWeightField::weight_number(const CanonicalEdge& e, std::size_t j) const {
    const EdgeKey key = edge_key(e);
    return draw(dist_, kernels::uniform(seed_, kWeightStream + j, key.lo, key.hi));
}

double DynamicalWeightField::weight_at(const CanonicalEdge& e, double s) const {
    CONEFPP_REQUIRE(s >= 0.0 && s <= horizon_, "weight_at: time outside the window");
    const auto rings = ring_times(e);
    const auto j = static_cast<std::size_t>(std::upper_bound(rings.begin(), rings.end(), s) -
                                            rings.begin());
    return weight_number(e, j);
}

EnvelopePair DynamicalWeightField::envelope(const CanonicalEdge& e, double delta) const {
    CONEFPP_REQUIRE(delta >= 0.0 && delta <= horizon_, "envelope: delta outside the window");
    const auto rings = ring_times(e);
    const auto n = static_cast<std::size_t>(
        std::upper_bound(rings.begin(), rings.end(), delta) - rings.begin());
    const double first = weight_number(e, 0);
    EnvelopePair p{n == 0 ? first : 0.0, first};
    for (std::size_t j = 1; j <= n; ++j) p.hat = std::max(p.hat, weight_number(e, j));
    return p;
}

SnapshotWeights::SnapshotWeights(const DynamicalWeightField& f, double s) : field_(f), s_(s) {
    CONEFPP_REQUIRE(s >= 0.0 && s <= f.horizon(), "snapshot: time outside the window");
}

EnvelopeWeights::EnvelopeWeights(const DynamicalWeightField& f, double delta, Envelope which)
    : field_(f), delta_(delta), which_(which) {
    CONEFPP_REQUIRE(delta >= 0.0 && delta <= f.horizon(), "envelope: delta outside the window");
}

double EnvelopeWeights::weight(const CanonicalEdge& e) const {
    const EnvelopePair p = field_.envelope(e, delta_);
    return which_ == Envelope::Bar ? p.bar : p.hat;
}

double y_statistic(const WeightSource& w, const Site& site, const RegionSpec& region) {
    const auto nbrs = neighbors(region, site);
    if (nbrs.empty())
        throw Error(ErrorKind::IsolatedSite, "y_statistic: isolated site " + site.to_string());
    double m = kInf;
    for (const auto& n : nbrs) m = std::min(m, w.weight(CanonicalEdge::between(site, n)));
    return m;
}

void to_json(nlohmann::json& j, const DistributionSpec& d) {
    j = nlohmann::json::object();
    j["variant"] = d.name();
    nlohmann::json params = nlohmann::json::object();
    std::visit(overloaded{
                   [&](const dist::PointMass& p) { params["value"] = p.value; },
                   [&](const dist::Exponential& e) { params["rate"] = e.rate; },
                   [&](const dist::Uniform& u) {
                       params["lo"] = u.lo;
                       params["hi"] = u.hi;
                   },
                   [&](const dist::BernoulliZero& b) {
                       params["p0"] = b.p0;
                       params["v1"] = b.v1;
                   },
                   [&](const dist::ParetoTail& p) {
                       params["alpha"] = p.alpha;
                       params["scale"] = p.scale;
                   },
                   [&](const dist::ZeroMixture& z) {
                       params["p0"] = z.p0;
                       nlohmann::json inner;
                       to_json(inner, *z.continuous);
                       params["continuous"] = inner;
                   },
               },
               d.law);
    j["params"] = params;
}

void from_json(const nlohmann::json& j, DistributionSpec& d) {
    try {
        const std::string v = j.at("variant").get<std::string>();
        const nlohmann::json p = j.value("params", nlohmann::json::object());
        if (v == "point-mass") {
            d = DistributionSpec::point_mass(p.value("value", 1.0));
        } else if (v == "exponential") {
            d = DistributionSpec::exponential(p.value("rate", 1.0));
        } else if (v == "uniform") {
            d = DistributionSpec::uniform(p.value("lo", 0.0), p.value("hi", 1.0));
        } else if (v == "bernoulli-zero") {
            d = DistributionSpec::bernoulli_zero(p.at("p0").get<double>(), p.value("v1", 1.0));
        } else if (v == "pareto") {
            d = DistributionSpec::pareto(p.at("alpha").get<double>(), p.value("scale", 1.0));
        } else if (v == "zero-mixture") {
            DistributionSpec inner;
            from_json(p.at("continuous"), inner);
            d = DistributionSpec::zero_mixture(p.at("p0").get<double>(), inner);
        } else {
            throw Error(ErrorKind::Validation, "unknown distribution variant '" + v + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Validation, std::string("distribution: ") + e.what());
    } catch (const ContractViolation& e) {
        throw Error(ErrorKind::Validation, std::string("distribution: ") + e.what());
    }
}

}  // namespace conefpp
