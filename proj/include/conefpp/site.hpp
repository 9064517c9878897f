#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdlib>
#include <initializer_list>
#include <string>
#include <vector>

#include "conefpp/errors.hpp"

namespace conefpp {

// Largest lattice dimension the engine supports. Site keys pack all
// coordinates into 64 bits, so this also bounds the coordinate range.
inline constexpr int kMaxDim = 4;

using Point = std::array<double, kMaxDim>;

// A point of Z^d, 2 <= d <= kMaxDim. Ordering is lexicographic and is the
// canonical tie-break order used throughout the engine.
struct Site {
    int dim = 0;
    std::array<std::int64_t, kMaxDim> x{};

    Site() = default;
    Site(std::initializer_list<std::int64_t> coords) {
        CONEFPP_REQUIRE(coords.size() >= 1 && coords.size() <= kMaxDim,
                        "Site: unsupported dimension");
        dim = static_cast<int>(coords.size());
        int i = 0;
        for (auto c : coords) x[i++] = c;
    }

    static Site zero(int d) {
        CONEFPP_REQUIRE(d >= 1 && d <= kMaxDim, "Site: unsupported dimension");
        Site s;
        s.dim = d;
        return s;
    }
    static Site unit(int d, int axis, int sign = 1) {
        Site s = zero(d);
        CONEFPP_REQUIRE(axis >= 0 && axis < d, "Site::unit: axis out of range");
        s.x[axis] = sign;
        return s;
    }

    std::int64_t operator[](int i) const { return x[i]; }
    std::int64_t& operator[](int i) { return x[i]; }

    std::int64_t l1() const {
        std::int64_t s = 0;
        for (int i = 0; i < dim; ++i) s += std::llabs(x[i]);
        return s;
    }
    std::int64_t linf() const {
        std::int64_t s = 0;
        for (int i = 0; i < dim; ++i) s = std::max<std::int64_t>(s, std::llabs(x[i]));
        return s;
    }
    std::int64_t norm2sq() const {
        std::int64_t s = 0;
        for (int i = 0; i < dim; ++i) s += x[i] * x[i];
        return s;
    }
    double euclid() const { return std::sqrt(static_cast<double>(norm2sq())); }

    Point as_point() const {
        Point p{};
        for (int i = 0; i < dim; ++i) p[i] = static_cast<double>(x[i]);
        return p;
    }

    Site operator+(const Site& o) const {
        Site r = *this;
        for (int i = 0; i < dim; ++i) r.x[i] += o.x[i];
        return r;
    }
    Site operator-(const Site& o) const {
        Site r = *this;
        for (int i = 0; i < dim; ++i) r.x[i] -= o.x[i];
        return r;
    }
    Site operator*(std::int64_t k) const {
        Site r = *this;
        for (int i = 0; i < dim; ++i) r.x[i] *= k;
        return r;
    }

    bool operator==(const Site& o) const {
        if (dim != o.dim) return false;
        for (int i = 0; i < dim; ++i)
            if (x[i] != o.x[i]) return false;
        return true;
    }
    std::strong_ordering operator<=>(const Site& o) const {
        if (auto c = dim <=> o.dim; c != 0) return c;
        for (int i = 0; i < dim; ++i)
            if (auto c = x[i] <=> o.x[i]; c != 0) return c;
        return std::strong_ordering::equal;
    }

    std::string to_string() const;
};

inline std::int64_t l1_distance(const Site& a, const Site& b) { return (a - b).l1(); }

inline bool adjacent(const Site& a, const Site& b) {
    return a.dim == b.dim && l1_distance(a, b) == 1;
}

// Undirected nearest-neighbour edge {base, base + e_axis}.
struct CanonicalEdge {
    Site base;
    int axis = 0;

    static CanonicalEdge between(const Site& a, const Site& b);
    Site head() const { return base + Site::unit(base.dim, axis); }

    bool operator==(const CanonicalEdge& o) const = default;
    auto operator<=>(const CanonicalEdge& o) const = default;
};

// 128-bit collision-free edge identifier: zigzagged coordinates in 31-bit
// lanes (|coord| < 2^30), plus the axis in the top bits of `lo`.
struct EdgeKey {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
    bool operator==(const EdgeKey&) const = default;
};

EdgeKey edge_key(const CanonicalEdge& e);

// Order-preserving 64-bit key of a site: offset-binary coordinates, axis 0
// most significant. Bits per coordinate are floor(64 / d).
std::uint64_t site_key(const Site& s);
Site site_from_key(std::uint64_t key, int dim);

}  // namespace conefpp
