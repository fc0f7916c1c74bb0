#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <dcs/io.hpp>

#include "support/fixtures.hpp"

using namespace dcs;
namespace dt = dcs::testing;

namespace {

std::filesystem::path data_dir() { return std::filesystem::path(DCS_DATA_DIR); }

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("weights sidecar with explicit edge list") {
    auto surface = load_weights(data_dir() / "weights_tetra_tangential.json",
                                load_mesh(data_dir() / "tetrahedron.off"));
    CHECK(surface.epsilon == std::vector<int>{1, 1, 1, 1});
    CHECK(surface.eta.size() == 6);
    CHECK(surface.eta.minCoeff() == 1.0);
    CHECK(surface.eta.maxCoeff() == 1.0);
}

TEST_CASE("weights sidecar with uniform shorthand") {
    auto surface = load_weights(data_dir() / "weights_torus7_vertex_scaling.json",
                                load_mesh(data_dir() / "torus7.off"));
    CHECK(surface.epsilon == std::vector<int>(7, 0));
    CHECK(surface.eta.size() == 21);
    CHECK(surface.eta.maxCoeff() == 0.5);
}

TEST_CASE("a missing eta entry is an error, not a default") {
    auto path = write_temp("dcs_weights_missing.json", R"({
        "epsilon": [1, 1, 1, 1],
        "eta": [
            {"edge": [0, 1], "value": 1.0},
            {"edge": [0, 2], "value": 1.0},
            {"edge": [0, 3], "value": 1.0},
            {"edge": [1, 2], "value": 1.0},
            {"edge": [1, 3], "value": 1.0}
        ]
    })");
    CHECK_THROWS_WITH_AS(load_weights(path, dt::tetrahedron()),
                         doctest::Contains("missing edge"), ParseError);
}

TEST_CASE("duplicate and nonexistent eta edges are rejected") {
    auto dup = write_temp("dcs_weights_dup.json", R"({
        "epsilon": 1,
        "eta": [
            {"edge": [0, 1], "value": 1.0},
            {"edge": [1, 0], "value": 2.0}
        ]
    })");
    CHECK_THROWS_WITH_AS(load_weights(dup, dt::tetrahedron()), doctest::Contains("duplicate"),
                         ParseError);

    auto ghost = write_temp("dcs_weights_ghost.json", R"({
        "epsilon": 1,
        "eta": [{"edge": [0, 9], "value": 1.0}]
    })");
    CHECK_THROWS_AS(load_weights(ghost, dt::tetrahedron()), ParseError);
}

TEST_CASE("spherical epsilon in a weights file is rejected") {
    auto path = write_temp("dcs_weights_sph.json", R"({"epsilon": -1, "eta": 1.0})");
    CHECK_THROWS_WITH_AS(load_weights(path, dt::tetrahedron()), doctest::Contains("spherical"),
                         ConfigError);
}

TEST_CASE("state files round-trip bit-exactly") {
    dt::Rng rng(149);
    auto surface = dt::mixed(dt::genus2());
    auto state = dt::random_admissible_state(surface, Geometry::Hyperbolic, -1.5, rng);
    auto path = std::filesystem::temp_directory_path() / "dcs_state_roundtrip.json";
    save_state(path, state);
    auto loaded = load_state(path, surface);
    CHECK(loaded.geometry == state.geometry);
    CHECK(loaded.alpha == state.alpha);
    for (int v = 0; v < surface.num_vertices(); ++v)
        CHECK(loaded.u[v] == state.u[v]);  // exact, not approximate
    // f is re-derived from u on load, identical to the coordinate map's output.
    auto rederived = u_to_f(surface, loaded.u, loaded.geometry);
    for (int v = 0; v < surface.num_vertices(); ++v) {
        CHECK(loaded.f[v] == rederived[v]);
        CHECK(loaded.f[v] == doctest::Approx(state.f[v]).epsilon(1e-14));
    }
}

TEST_CASE("state files reject wrong sizes and missing fields") {
    auto surface = dt::tangential(dt::tetrahedron());
    auto bad_size = write_temp("dcs_state_badsize.json",
                               R"({"geometry": "euclidean", "alpha": 0.0, "u": [0.0, 0.0]})");
    CHECK_THROWS_AS(load_state(bad_size, surface), ParseError);
    auto no_vec = write_temp("dcs_state_novec.json",
                             R"({"geometry": "euclidean", "alpha": 0.0})");
    CHECK_THROWS_WITH_AS(load_state(no_vec, surface), doctest::Contains("neither"), ParseError);
}

TEST_CASE("trace and event CSV export") {
    auto surface = dt::tangential(dt::tetrahedron());
    dt::Rng rng(151);
    Eigen::VectorXd u0(4);
    for (int v = 0; v < 4; ++v) u0[v] = rng.uniform(-0.1, 0.1);
    u0.array() -= u0.mean();
    FlowSpec spec{FlowKind::NormalizedRicci, false, 0.0, Geometry::Euclidean, {}};
    StopCriteria stop;
    stop.t_max = 1.0;
    stop.residual_tol = 0.0;
    auto trace = run_flow(surface, state_from_u(surface, Geometry::Euclidean, 0.0, u0), spec,
                          {}, stop);

    auto tdir = std::filesystem::temp_directory_path();
    save_trace_csv(tdir / "dcs_trace.csv", trace);
    save_events_csv(tdir / "dcs_events.csv", trace);
    save_flow_summary(tdir / "dcs_summary.json", trace, spec);

    std::string csv = slurp(tdir / "dcs_trace.csv");
    CHECK(csv.rfind("t,residual,conserved,num_degenerate_faces,u_1,u_2,u_3,u_4\n", 0) == 0);
    std::size_t lines = std::count(csv.begin(), csv.end(), '\n');
    CHECK(lines == trace.samples.size() + 1);

    std::string summary = slurp(tdir / "dcs_summary.json");
    CHECK(summary.find("\"converged\"") != std::string::npos);
    CHECK(summary.find("\"rate\"") != std::string::npos);
}

TEST_CASE("format_double survives a parse round trip") {
    dt::Rng rng(157);
    for (int trial = 0; trial < 200; ++trial) {
        double x = (rng.uniform() - 0.5) * std::pow(10.0, rng.uniform(-12.0, 12.0));
        CHECK(std::stod(format_double(x)) == x);
    }
}

}  // TEST_SUITE
