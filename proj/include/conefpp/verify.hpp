#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace conefpp {

struct CheckResult {
    std::string name;
    std::size_t cases = 0;
    std::size_t failures = 0;
    std::string first_failure;

    bool pass() const { return cases > 0 && failures == 0; }
};

struct GeometryVerifyOptions {
    std::size_t connectivity_pairs = 50;
    double segment_length = 50.0;
    std::int64_t direction_box = 0;  // 0: 3 in d = 2, 2 in d = 3
    std::int64_t partition_radius = 60;
    double cone_c = 0.5;
};

struct GeometryReport {
    int dim = 2;
    std::vector<CheckResult> checks;

    bool pass() const;
};

// Exhaustive checks of the geometric constructions:
//   connectivity  capsules of radius sqrt(d) around random segments are connected
//   detours       2d edge-disjoint detours of length <= 9 inside the 4 sqrt(d)
//                 sausage, for every step of segment paths along all primitive
//                 directions in a small box
//   partition     interior witnesses for every boundary site of the cone
//                 B(e1, c) with sup norm <= partition_radius
GeometryReport verify_geometry(int d, std::uint64_t seed, const GeometryVerifyOptions& opts = {});

void to_json(nlohmann::json& j, const CheckResult& c);
void to_json(nlohmann::json& j, const GeometryReport& r);

}  // namespace conefpp
