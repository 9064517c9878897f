#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "conefpp/site.hpp"

namespace conefpp {

// Unit direction kept in rational form z/|z| with z an integer vector.
struct Direction {
    Site z;
    double norm = 0.0;
    Point unit{};

    static Direction of(const Site& z);
    // Best integer approximation of a real direction at the given scale; the
    // angular error is written to `error` when provided.
    static Direction approximate(std::span<const double> u, std::int64_t scale,
                                 double* error = nullptr);

    int dim() const { return z.dim; }
    double dot(const Point& p) const;
    bool operator==(const Direction& o) const { return z == o.z; }
};

// Each variant describes the vertex set of an induced subgraph of Z^d.
namespace region {

struct FullLattice {};

// Union over a >= 0 of closed balls B(a u, c a + collar).
struct Cone {
    Direction u;
    double c = 0.0;
    double collar = 0.0;
};

// Union over a >= 0 of B(a u, c a): the cone without its collar.
struct ConeInterior {
    Direction u;
    double c = 0.0;
};

// Union over real a of B(a z, r).
struct Cylinder {
    Site axis;
    double r = 0.0;
};

// Union over a in [0, 1] of B(x + a (y - x), r).
struct Capsule {
    Point x{};
    Point y{};
    double r = 0.0;
};

// normal . p >= offset
struct HalfSpace {
    Point normal{};
    double offset = 0.0;
};

// {(x, y) : x >= 0, 0 <= y <= a log(1 + x)}, d = 2 only.
struct LogWedge {
    double a = 0.0;
};

// Axis-aligned box lo <= p <= hi (finite test regions).
struct Box {
    Site lo;
    Site hi;
};

}  // namespace region

using RegionShape = std::variant<region::FullLattice, region::Cone, region::ConeInterior,
                                 region::Cylinder, region::Capsule, region::HalfSpace,
                                 region::LogWedge, region::Box>;

struct RegionSpec {
    int dim = 2;
    RegionShape shape = region::FullLattice{};

    static double default_collar(int d) { return 4.0 * std::sqrt(static_cast<double>(d)); }

    static RegionSpec lattice(int d);
    static RegionSpec cone(const Site& u, double c);
    static RegionSpec cone(const Site& u, double c, double collar);
    static RegionSpec cone_interior(const Site& u, double c);
    static RegionSpec cylinder(const Site& axis, double r);
    static RegionSpec capsule(const Point& x, const Point& y, double r, int d);
    static RegionSpec half_space(const Point& normal, double offset, int d);
    static RegionSpec log_wedge(double a);
    static RegionSpec box(const Site& lo, const Site& hi);

    bool is_cone() const { return std::holds_alternative<region::Cone>(shape); }
    // Bounded regions can be enumerated.
    bool bounded() const;
    std::string kind() const;

    bool operator==(const RegionSpec& o) const;
};

enum class SiteClass { Interior, Boundary, Outside };

const char* to_string(SiteClass c);

bool contains(const RegionSpec& region, const Site& site);

// Continuum membership (used for shape clipping); sites go through contains().
bool contains_point(const RegionSpec& region, const Point& p);

SiteClass classify(const RegionSpec& cone, const Site& site);

// Neighbours inside the region, axis ascending, minus before plus.
std::vector<Site> neighbors(const RegionSpec& region, const Site& site);

// Lattice path from y to z of exactly |z - y|_1 steps that tracks the straight
// segment between them; each step lowers the l1 distance to z by one.
// Returned path includes both endpoints (a single site when y == z).
std::vector<Site> staircase(const Site& y, const Site& z);

// Distance from a point to the segment {a u : a in [b, c]}.
double distance_to_segment(const Point& p, const Point& u, double b, double c, int d);

// Staircase between two sites lying within sqrt(d) of the segment
// {a u : a in [b, c]}; every vertex ends up within 2 sqrt(d) of it.
std::vector<Site> segment_path(const Site& y, const Site& z, const Point& u, double b,
                               double c);

// 2d pairwise edge-disjoint paths between lattice neighbours v and w, each of
// length at most 9, all inside `region`. Throws Error(NoDetours) otherwise.
std::vector<std::vector<Site>> disjoint_detours(const Site& v, const Site& w,
                                                const RegionSpec& region);

// Flood-fill check that the sites of the capsule around [0, z] with radius r
// induce a connected subgraph.
bool verify_connectivity(const Site& z, double r);

// Every site of a bounded region, in canonical order.
std::vector<Site> enumerate_sites(const RegionSpec& region);

struct PartitionWitness {
    int q = 0;
    Site z;
    Site v;
    std::vector<std::vector<Site>> paths;
    double m_bound = 0.0;
};

// Witness that a boundary site of the cone (u = e1, c < 1) is linked to an
// interior site on the same sup-norm sphere by q edge-disjoint shortest
// paths, where q counts nonzero coordinates beyond the first. The apex sites
// on the negative axis have q = 0 and only need the nearby interior site.
PartitionWitness boundary_partition(const RegionSpec& cone, const Site& z);

double partition_search_bound(int d);

// Zero the first coordinate.
Site halfspace_projection(const Site& site);

// 2d - 1 edge-disjoint paths between a half-space site and its projection,
// each of length at most |v - z|_1 + 2.
std::vector<std::vector<Site>> projection_paths(const Site& z);

// Validation helpers shared by the verifiers and tests.
bool is_lattice_path(std::span<const Site> path);
bool pairwise_edge_disjoint(std::span<const std::vector<Site>> paths);

void to_json(nlohmann::json& j, const Site& s);
void from_json(const nlohmann::json& j, Site& s);
void to_json(nlohmann::json& j, const RegionSpec& r);
void from_json(const nlohmann::json& j, RegionSpec& r);

}  // namespace conefpp
