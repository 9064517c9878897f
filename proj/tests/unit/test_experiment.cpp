#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "conefpp/experiment.hpp"

using namespace conefpp;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

ExperimentConfig small(ExperimentKind kind) {
    ExperimentConfig c;
    c.kind = kind;
    c.seed = 17;
    c.n = 32;
    c.replicas = 4;
    c.mu = {64, 8, Aggregate::Mean};
    return c;
}

ErrorKind error_kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no Error thrown");
    return ErrorKind::Unreachable;
}

}  // namespace

TEST_CASE("experiment kind names") {
    for (auto k : {ExperimentKind::Mu, ExperimentKind::CylinderMu, ExperimentKind::Deviation, ExperimentKind::TailSum,
                   ExperimentKind::Lp, ExperimentKind::Shape, ExperimentKind::LogWedge, ExperimentKind::Dynamical,
                   ExperimentKind::VerifyGeometry, ExperimentKind::MuContinuity})
        CHECK(experiment_kind_from(to_string(k)) == k);
    CHECK(std::string(to_string(ExperimentKind::CylinderMu)) == "cylinder-mu");
    CHECK(error_kind_of([] { experiment_kind_from("nope"); }) == ErrorKind::Validation);
}

TEST_CASE("config round trip") {
    ExperimentConfig c;
    CHECK(json(c).get<ExperimentConfig>() == c);

    c.kind = ExperimentKind::Dynamical;
    c.region = RegionSpec::cone(Site{2, 1}, 0.4, 3.0);
    c.dist = DistributionSpec::zero_mixture(0.2, DistributionSpec::uniform(0.5, 3.0));
    c.seed = 123456789012345ull;
    c.direction = Site{1, 1};
    c.z = Site{40, 20};
    c.n = 77;
    c.replicas = 9;
    c.aggregate = Aggregate::Median;
    c.fekete = false;
    c.radii = {5.5, 9};
    c.epsilon = 0.3;
    c.p = 1.5;
    c.radius = 20;
    c.site_set = SiteSet::Boundary;
    c.times = {10, 20.5};
    c.cutoff_fraction = 0.1;
    c.ns = {8, 16};
    c.window = {0.25, 0.75};
    c.rate = 2.0;
    c.path = {DistributionSpec::exponential(1.0), DistributionSpec::pareto(0.7, 2.0)};
    c.mu = {100, 12, Aggregate::Median};
    c.cap = 12345;
    c.output = "elsewhere";
    const json j = c;
    CHECK(j.get<ExperimentConfig>() == c);
    CHECK(json::parse(j.dump()).get<ExperimentConfig>() == c);
    CHECK(j["experiment"] == "dynamical");
    CHECK(j["window"] == json::array({0.25, 0.75}));
}

TEST_CASE("config parsing rejects unknown and ill-typed fields") {
    auto parse = [](const char* text) { return json::parse(text).get<ExperimentConfig>(); };
    CHECK(parse(R"({"experiment": "mu"})") == ExperimentConfig{});
    CHECK(error_kind_of([&] { parse(R"({"experiment": "mu", "colour": 1})"); }) == ErrorKind::Validation);
    CHECK(error_kind_of([&] { parse(R"({"n": 4})"); }) == ErrorKind::Validation);
    CHECK(error_kind_of([&] { parse(R"({"experiment": "mu", "n": "x"})"); }) == ErrorKind::Validation);
    CHECK(error_kind_of([&] { parse(R"({"experiment": "mu", "seed": -1})"); }) == ErrorKind::Validation);
    CHECK(error_kind_of([&] { parse(R"({"experiment": "mu", "mu": {"reps": 3}})"); }) == ErrorKind::Validation);
    CHECK(error_kind_of([&] { parse(R"({"experiment": "mu", "dist": {"variant": "cauchy"}})"); }) ==
          ErrorKind::Validation);
    // Every problem is reported, by field.
    try {
        parse(R"({"experiment": "mu", "colour": 1, "window": [1], "aggregate": "mode"})");
        FAIL("expected a validation error");
    } catch (const Error& e) {
        const std::string what = e.what();
        CHECK(what.find("'colour'") != std::string::npos);
        CHECK(what.find("'window'") != std::string::npos);
        CHECK(what.find("'aggregate'") != std::string::npos);
    }
}

TEST_CASE("validation catches field errors") {
    auto fails = [](ExperimentConfig c) {
        try {
            validate(c);
        } catch (const Error& e) {
            return e.kind() == ErrorKind::Validation;
        }
        return false;
    };
    auto dev = small(ExperimentKind::Deviation);
    dev.region = RegionSpec::cone(Site{1, 0}, 0.5);
    CHECK_FALSE(fails(dev));
    auto c = dev;
    c.z = Site{-20, 0};
    CHECK(fails(c));
    c = dev;
    c.z = Site{3, 0, 0};
    CHECK(fails(c));
    c = dev;
    c.replicas = 1;
    CHECK(fails(c));
    c = dev;
    c.cap = 10;
    CHECK(fails(c));

    auto cyl = small(ExperimentKind::CylinderMu);
    CHECK_FALSE(fails(cyl));
    cyl.radii = {2};
    CHECK(fails(cyl));

    auto shape = small(ExperimentKind::Shape);
    shape.region = RegionSpec::lattice(3);
    CHECK(fails(shape));
    shape = small(ExperimentKind::Shape);
    shape.epsilon = 1.5;
    CHECK(fails(shape));

    auto tail = small(ExperimentKind::TailSum);
    CHECK(fails(tail));  // lattice is not a cone

    auto wedge = small(ExperimentKind::LogWedge);
    CHECK(fails(wedge));
    wedge.region = RegionSpec::log_wedge(2.0);
    CHECK_FALSE(fails(wedge));

    auto dyn = small(ExperimentKind::Dynamical);
    dyn.window = {1.0, 0.5};
    CHECK(fails(dyn));

    auto cont = small(ExperimentKind::MuContinuity);
    CHECK(fails(cont));
}

TEST_CASE("seed precedence: flag, config, environment") {
    ExperimentConfig c;
    ::unsetenv("CONEFPP_SEED");
    CHECK(error_kind_of([&] { resolve_seed(c, std::nullopt); }) == ErrorKind::Validation);
    ::setenv("CONEFPP_SEED", "41", 1);
    CHECK(resolve_seed(c, std::nullopt) == 41);
    c.seed = 7;
    CHECK(resolve_seed(c, std::nullopt) == 7);
    CHECK(resolve_seed(c, 99) == 99);
    c.seed.reset();
    CHECK(resolve_seed(c, 5) == 5);
    ::setenv("CONEFPP_SEED", "12x", 1);
    CHECK(error_kind_of([&] { resolve_seed(c, std::nullopt); }) == ErrorKind::Validation);
    ::unsetenv("CONEFPP_SEED");
}

TEST_CASE("config hash") {
    auto c = small(ExperimentKind::Mu);
    const auto h = config_hash(c);
    CHECK(h.size() == 16);
    CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);
    CHECK(config_hash(c) == h);
    auto moved = c;
    moved.output = "/somewhere/else";
    CHECK(config_hash(moved) == h);
    auto reseeded = c;
    reseeded.seed = 18;
    CHECK(config_hash(reseeded) != h);
    CHECK(config_hash(json(c).get<ExperimentConfig>()) == h);
}

TEST_CASE("mu of a point mass") {
    auto c = small(ExperimentKind::Mu);
    c.dist = DistributionSpec::point_mass(1.0);
    const auto out = run_experiment(c);
    CHECK(out.result["metrics"]["mean"] == 1.0);
    CHECK(out.result["metrics"]["stderr"] == 0.0);
    CHECK(out.result["metrics"]["values"].size() == 4);
    CHECK(out.result["provenance"]["config_hash"] == config_hash(c));
    CHECK(out.result["config"].get<ExperimentConfig>() == c);
    CHECK_FALSE(out.svg.has_value());
    CHECK(error_kind_of([&] { emit_plot(out.result); }) == ErrorKind::NoPlot);

    auto unseeded = c;
    unseeded.seed.reset();
    CHECK_THROWS_AS(run_experiment(unseeded), ContractViolation);
}

TEST_CASE("identical configs give identical results") {
    auto c = small(ExperimentKind::Deviation);
    c.region = RegionSpec::cone(Site{1, 0}, 0.5);
    c.z = Site{16, 0};
    c.epsilon = 0.3;
    c.replicas = 6;
    const auto a = run_experiment(c, 1);
    const auto b = run_experiment(c, 1);
    const auto threaded = run_experiment(c, 3);
    CHECK(a.result.dump() == b.result.dump());
    CHECK(a.result.dump() == threaded.result.dump());
    CHECK(a.csv == threaded.csv);
    c.seed = 18;
    CHECK(run_experiment(c).result.dump() != a.result.dump());
}

TEST_CASE("verify-geometry through the runner") {
    auto c = small(ExperimentKind::VerifyGeometry);
    const auto out = run_experiment(c);
    CHECK(out.result["metrics"]["pass"] == true);
    CHECK(out.result["metrics"]["checks"].size() == 3);
}

TEST_CASE("plots for shape, trajectory and trend records") {
    auto shape = small(ExperimentKind::Shape);
    shape.region = RegionSpec::cone(Site{1, 0}, 0.5);
    shape.times = {8, 16};
    shape.replicas = 2;
    shape.epsilon = 0.3;
    const auto s = run_experiment(shape);
    REQUIRE(s.svg.has_value());
    CHECK(s.svg->rfind("<svg", 0) == 0);
    CHECK(s.svg->find("<polygon") != std::string::npos);
    CHECK(s.svg->find("stroke-dasharray=\"2 2\"") != std::string::npos);  // cone boundary
    CHECK(emit_plot(s.result) == *s.svg);
    CHECK(s.files.size() == 2 * 2 * 2);
    CHECK(s.files.front().first == "shape_t8_r0.csv");
    CHECK(s.result["metrics"]["times"].size() == 2);

    auto dyn = small(ExperimentKind::Dynamical);
    dyn.region = RegionSpec::cone(Site{1, 0}, 0.5);
    dyn.z = Site{8, 0};
    dyn.epsilon = 0.3;
    dyn.replicas = 2;
    const auto d = run_experiment(dyn);
    REQUIRE(d.svg.has_value());
    CHECK(d.svg->find("<polyline") != std::string::npos);
    CHECK(d.files.size() == 2);
    CHECK(d.files[0].second.rfind("breakpoint,value\n", 0) == 0);
    const auto& sup = d.result["metrics"]["sup"];
    const auto& inf = d.result["metrics"]["inf"];
    for (std::size_t k = 0; k < 2; ++k) CHECK(inf[k].get<double>() <= sup[k].get<double>());

    auto cyl = small(ExperimentKind::CylinderMu);
    cyl.radii = {6, 12};
    const auto t = run_experiment(cyl);
    REQUIRE(t.svg.has_value());
    CHECK(t.svg->find("<circle") != std::string::npos);

    CHECK(error_kind_of([] { emit_plot(json{{"plot", {{"type", "pie"}}}}); }) == ErrorKind::NoPlot);
    CHECK(error_kind_of([] { emit_plot(json::array()); }) == ErrorKind::NoPlot);
    CHECK(error_kind_of([] { emit_plot(json{{"plot", {{"type", "trend"}}}}); }) == ErrorKind::NoPlot);
}

TEST_CASE("output layout") {
    auto c = small(ExperimentKind::LogWedge);
    c.region = RegionSpec::log_wedge(2.0);
    c.ns = {16, 32};
    c.replicas = 2;
    const auto root = std::filesystem::temp_directory_path() / "conefpp_layout_test";
    std::filesystem::remove_all(root);
    c.output = root.string();
    const auto out = run_experiment(c);
    const auto dir = write_outputs(c, out);
    CHECK(dir == root / "log-wedge" / config_hash(c));
    CHECK(json::parse(slurp(dir / "result.json")) == out.result);
    CHECK(slurp(dir / "data.csv") == out.csv);
    CHECK(slurp(dir / "plot.svg") == *out.svg);
    // Rerunning writes the same bytes.
    const auto before = slurp(dir / "result.json");
    write_outputs(c, run_experiment(c));
    CHECK(slurp(dir / "result.json") == before);
    std::filesystem::remove_all(root);
}

TEST_CASE("load_config") {
    const auto file = std::filesystem::temp_directory_path() / "conefpp_load_test.json";
    {
        std::ofstream f(file);
        f << R"({"experiment": "mu", "dist": {"variant": "point-mass", "params": {"value": 2}}, "seed": 3})";
    }
    const auto c = load_config(file);
    CHECK(c.dist == DistributionSpec::point_mass(2.0));
    CHECK(c.seed == 3u);
    {
        std::ofstream f(file);
        f << R"({"experiment": "mu", "replicas": 1})";
    }
    CHECK(error_kind_of([&] { load_config(file); }) == ErrorKind::Validation);
    {
        std::ofstream f(file);
        f << "{not json";
    }
    CHECK(error_kind_of([&] { load_config(file); }) == ErrorKind::Validation);
    std::filesystem::remove(file);
    CHECK(error_kind_of([&] { load_config(file); }) == ErrorKind::Validation);
}
