#include "conefpp/site.hpp"

#include <sstream>

namespace conefpp {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Unreachable: return "Unreachable";
        case ErrorKind::BudgetExceeded: return "BudgetExceeded";
        case ErrorKind::EmptySlice: return "EmptySlice";
        case ErrorKind::NoDetours: return "NoDetours";
        case ErrorKind::WitnessNotFound: return "WitnessNotFound";
        case ErrorKind::IsolatedSite: return "IsolatedSite";
        case ErrorKind::DegenerateShape: return "DegenerateShape";
        case ErrorKind::Validation: return "Validation";
        case ErrorKind::NoPlot: return "NoPlot";
    }
    return "Unknown";
}

std::string Site::to_string() const {
    std::ostringstream os;
    os << '(';
    for (int i = 0; i < dim; ++i) os << (i ? "," : "") << x[i];
    os << ')';
    return os.str();
}

CanonicalEdge CanonicalEdge::between(const Site& a, const Site& b) {
    CONEFPP_REQUIRE(adjacent(a, b), "CanonicalEdge: sites are not lattice neighbours");
    for (int i = 0; i < a.dim; ++i) {
        if (a.x[i] + 1 == b.x[i]) return {a, i};
        if (b.x[i] + 1 == a.x[i]) return {b, i};
    }
    throw ContractViolation("CanonicalEdge: unreachable");
}

namespace {

constexpr std::int64_t kEdgeCoordLimit = std::int64_t{1} << 30;

std::uint64_t zigzag(std::int64_t v) {
    return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63);
}

}  // namespace

EdgeKey edge_key(const CanonicalEdge& e) {
    const Site& s = e.base;
    std::uint64_t z[kMaxDim] = {0, 0, 0, 0};
    for (int i = 0; i < s.dim; ++i) {
        CONEFPP_REQUIRE(s.x[i] > -kEdgeCoordLimit && s.x[i] < kEdgeCoordLimit,
                        "edge_key: coordinate exceeds 2^30");
        z[i] = zigzag(s.x[i]);
    }
    EdgeKey k;
    k.lo = z[0] | (z[1] << 31) | (static_cast<std::uint64_t>(e.axis) << 62);
    k.hi = z[2] | (z[3] << 31) | (static_cast<std::uint64_t>(s.dim) << 62);
    return k;
}

std::uint64_t site_key(const Site& s) {
    const int bits = 64 / s.dim;
    const std::int64_t offset = std::int64_t{1} << (bits - 1);
    std::uint64_t key = 0;
    for (int i = 0; i < s.dim; ++i) {
        CONEFPP_REQUIRE(s.x[i] >= -offset && s.x[i] < offset,
                        "site_key: coordinate out of packable range");
        key = (bits == 64 ? 0 : key << bits) | static_cast<std::uint64_t>(s.x[i] + offset);
    }
    return key;
}

Site site_from_key(std::uint64_t key, int dim) {
    const int bits = 64 / dim;
    const std::int64_t offset = std::int64_t{1} << (bits - 1);
    const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
    Site s = Site::zero(dim);
    for (int i = dim - 1; i >= 0; --i) {
        s.x[i] = static_cast<std::int64_t>(key & mask) - offset;
        key >>= bits;
    }
    return s;
}

}  // namespace conefpp
