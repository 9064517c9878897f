#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "conefpp/dynamical.hpp"
#include "conefpp/estimators.hpp"
#include "conefpp/geometry.hpp"
#include "conefpp/randomness.hpp"
#include "conefpp/shape.hpp"

namespace conefpp {

enum class ExperimentKind {
    Mu,
    CylinderMu,
    Deviation,
    TailSum,
    Lp,
    Shape,
    LogWedge,
    Dynamical,
    VerifyGeometry,
    MuContinuity,
};

const char* to_string(ExperimentKind k);
ExperimentKind experiment_kind_from(const std::string& s);

// Sizes of the plug-in mu estimate used by the deviation-type experiments.
struct PlugInConfig {
    std::int64_t n = 256;
    std::size_t replicas = 32;
    Aggregate aggregate = Aggregate::Mean;

    bool operator==(const PlugInConfig&) const = default;
};

// Every field is serialised, so a config file fully determines a run.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Mu;
    RegionSpec region = RegionSpec::lattice(2);
    DistributionSpec dist = DistributionSpec::exponential(1.0);
    std::optional<std::uint64_t> seed;
    Site direction{1, 0};
    Site z{64, 0};
    std::int64_t n = 256;
    std::size_t replicas = 32;
    Aggregate aggregate = Aggregate::Mean;
    bool fekete = true;
    std::vector<double> radii{6, 8, 12, 16};
    double epsilon = 0.1;
    double p = 2.0;
    std::int64_t radius = 48;
    SiteSet site_set = SiteSet::Interior;
    std::vector<double> times{50, 100, 150};
    double cutoff_fraction = kDefaultCutoffFraction;
    std::vector<std::int64_t> ns{256, 512, 1024, 2048, 4096};
    Window window{};
    double rate = 1.0;
    std::vector<DistributionSpec> path;
    PlugInConfig mu{};
    std::size_t cap = kDefaultSiteCap;
    std::string output = "out";

    bool operator==(const ExperimentConfig&) const = default;
};

// Field-level validation; throws Error(Validation) listing every problem.
void validate(const ExperimentConfig& c);

void to_json(nlohmann::json& j, const ExperimentConfig& c);
// Rejects unknown keys and ill-typed values with Error(Validation).
void from_json(const nlohmann::json& j, ExperimentConfig& c);

ExperimentConfig load_config(const std::filesystem::path& file);

// Flag, then config, then the CONEFPP_SEED environment variable.
std::uint64_t resolve_seed(const ExperimentConfig& c, std::optional<std::uint64_t> flag);

// Hex SHA-256 prefix of the canonical config JSON (output directory excluded).
std::string config_hash(const ExperimentConfig& c);

struct RunOutput {
    nlohmann::json result;
    std::string csv;
    std::optional<std::string> svg;
    // Per-item exports written next to the main files (name, contents).
    std::vector<std::pair<std::string, std::string>> files;
};

// Requires a resolved seed.
RunOutput run_experiment(const ExperimentConfig& c, int jobs = 1);

// Writes out/<experiment>/<config-hash>/{result.json,data.csv,plot.svg} plus
// any per-item files and returns the directory.
std::filesystem::path write_outputs(const ExperimentConfig& c, const RunOutput& out);

// Self-contained SVG for shape, trajectory and trend records; throws
// Error(NoPlot) otherwise.
std::string emit_plot(const nlohmann::json& result);

}  // namespace conefpp
