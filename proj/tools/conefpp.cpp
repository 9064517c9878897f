#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>

#include "conefpp/experiment.hpp"
#include "conefpp/verify.hpp"

using namespace conefpp;

namespace {

enum Exit { kOk = 0, kFailure = 1, kValidation = 2, kBudget = 3, kCheckFailed = 4 };

int exit_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::Validation:
        case ErrorKind::NoPlot: return kValidation;
        case ErrorKind::BudgetExceeded: return kBudget;
        default: return kFailure;
    }
}

int run(const std::string& file, std::optional<std::uint64_t> seed, int jobs, const std::string& output) {
    ExperimentConfig c = load_config(file);
    if (!output.empty()) c.output = output;
    c.seed = resolve_seed(c, seed);
    const auto out = run_experiment(c, jobs);
    const auto dir = write_outputs(c, out);
    std::cout << dir.string() << '\n';
    if (c.kind == ExperimentKind::VerifyGeometry && !out.result["metrics"]["pass"].get<bool>()) {
        std::cerr << "geometry checks failed\n";
        return kCheckFailed;
    }
    return kOk;
}

int verify(int d, std::optional<std::uint64_t> seed) {
    if (d != 2 && d != 3) throw Error(ErrorKind::Validation, "--d: must be 2 or 3");
    ExperimentConfig c;
    c.kind = ExperimentKind::VerifyGeometry;
    c.region = RegionSpec::lattice(d);
    // No config file: flag, then CONEFPP_SEED, then 0.
    c.seed = seed ? *seed : (std::getenv("CONEFPP_SEED") ? resolve_seed(c, std::nullopt) : 0);
    const auto rep = verify_geometry(d, *c.seed);
    for (const auto& ch : rep.checks) {
        std::cout << (ch.pass() ? "PASS " : "FAIL ") << ch.name << " (" << ch.cases << " cases";
        if (!ch.pass()) std::cout << ", " << ch.failures << " failures; first: " << ch.first_failure;
        std::cout << ")\n";
    }
    std::cout << (rep.pass() ? "PASS" : "FAIL") << " verify-geometry d=" << d << '\n';
    return rep.pass() ? kOk : kCheckFailed;
}

int plot(const std::string& file, const std::string& output) {
    std::ifstream in(file);
    if (!in) throw Error(ErrorKind::Validation, "cannot read " + file);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::Validation, std::string("result: ") + e.what());
    }
    const std::string svg = emit_plot(j);
    const auto dst = output.empty() ? std::filesystem::path(file).parent_path() / "plot.svg"
                                    : std::filesystem::path(output);
    std::ofstream f(dst, std::ios::binary);
    f << svg;
    if (!f) throw std::runtime_error("cannot write " + dst.string());
    std::cout << dst.string() << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"First-passage percolation experiments on Z^d and cone-like subgraphs"};
    app.set_version_flag("--version", CONEFPP_VERSION);
    app.require_subcommand(1);

    std::string config, result, output;
    std::optional<std::uint64_t> seed;
    int jobs = 1, dim = 2;

    auto* run_cmd = app.add_subcommand("run", "Run the experiment described by a config file");
    run_cmd->add_option("config", config, "Config JSON")->required();
    run_cmd->add_option("--seed", seed, "Seed (overrides the config and CONEFPP_SEED)");
    run_cmd->add_option("--jobs,-j", jobs, "Worker threads")->check(CLI::PositiveNumber);
    run_cmd->add_option("--output,-o", output, "Output root (overrides the config)");

    auto* verify_cmd = app.add_subcommand("verify-geometry", "Check cone connectivity, detours and partition");
    verify_cmd->add_option("--d", dim, "Dimension (2 or 3)")->required();
    verify_cmd->add_option("--seed", seed, "Seed");

    auto* plot_cmd = app.add_subcommand("plot", "Render plot.svg from a result.json");
    plot_cmd->add_option("result", result, "result.json")->required();
    plot_cmd->add_option("--output,-o", output, "SVG path (default: next to the result)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (*run_cmd) return run(config, seed, jobs, output);
        if (*verify_cmd) return verify(dim, seed);
        if (*plot_cmd) return plot(result, output);
    } catch (const Error& e) {
        std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << '\n';
        return exit_for(e);
    } catch (const ContractViolation& e) {
        std::cerr << "error [contract]: " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kOk;
}
