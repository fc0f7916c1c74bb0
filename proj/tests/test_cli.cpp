#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const std::string kCli = DCS_CLI_PATH;
const fs::path kData = DCS_DATA_DIR;

struct RunResult {
    int exit_code = -1;
    std::string output;
};

// Runs the CLI with stdout+stderr captured.
RunResult run_cli(const std::string& args) {
    static int counter = 0;
    fs::path log = fs::temp_directory_path() / ("dcs_cli_log_" + std::to_string(counter++));
    std::string command = kCli + " " + args + " > " + log.string() + " 2>&1";
    int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::ostringstream out;
    out << in.rdbuf();
    result.output = out.str();
    return result;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

fs::path write_temp(const std::string& name, const std::string& content) {
    fs::path path = fs::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path;
}

fs::path out_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / name;
    fs::create_directories(dir);
    return dir;
}

std::string tetra() { return (kData / "tetrahedron.off").string(); }
std::string tetra_weights() { return (kData / "weights_tetra_tangential.json").string(); }
std::string torus() { return (kData / "torus7.off").string(); }
std::string torus_weights() { return (kData / "weights_torus7_vertex_scaling.json").string(); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("validate accepts the tangential tetrahedron") {
    auto r = run_cli("validate --mesh " + tetra() + " --weights " + tetra_weights());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("ok") != std::string::npos);
}

TEST_CASE("validate flags a condition-(1) violation with exit 1") {
    auto weights = write_temp("dcs_cli_bad_eta.json", R"({
        "epsilon": [1, 1, 1, 1],
        "eta": [
            {"edge": [0, 1], "value": -1.0},
            {"edge": [0, 2], "value": 1.0},
            {"edge": [0, 3], "value": 1.0},
            {"edge": [1, 2], "value": 1.0},
            {"edge": [1, 3], "value": 1.0},
            {"edge": [2, 3], "value": 1.0}
        ]
    })");
    auto r = run_cli("validate --mesh " + tetra() + " --weights " + weights.string());
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("condition (1)") != std::string::npos);
}

TEST_CASE("validate flags inadmissible faces under a wild state with exit 1") {
    auto state = write_temp("dcs_cli_wild_state.json",
                            R"({"geometry":"euclidean","alpha":0.0,)"
                            R"("u":[-3.0,0.0,0.0,0.0,0.0,0.0,0.0]})");
    auto r = run_cli("validate --mesh " + torus() + " --weights " + torus_weights() +
                     " --state " + state.string());
    CHECK(r.exit_code == 1);
    CHECK(r.output.find("inadmissible") != std::string::npos);
}

TEST_CASE("curvature reports K = pi per vertex on the symmetric tetrahedron") {
    auto dir = out_dir("dcs_cli_curv");
    auto r = run_cli("curvature --mesh " + tetra() + " --weights " + tetra_weights() +
                     " --spectrum --out " + dir.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("3.14159") != std::string::npos);
    std::string report = slurp(dir / "curvature.json");
    CHECK(report.find("\"K\"") != std::string::npos);
    CHECK(report.find("\"jacobian_spectrum\"") != std::string::npos);
    // Lemma-consistent spectrum: N eigenvalues, one zero, none negative.
    CHECK(r.output.find("4 eigenvalues, 1 zero, 0 negative") != std::string::npos);
}

TEST_CASE("flow: normalized Ricci on a perturbed tetrahedron converges with negative rate") {
    auto dir = out_dir("dcs_cli_flow");
    auto r = run_cli("flow --mesh " + tetra() + " --weights " + tetra_weights() +
                     " --flow normalized_ricci --alpha -1 --extended --perturb 0.2 --seed 7" +
                     " --out " + dir.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("converged") != std::string::npos);
    std::string summary = slurp(dir / "summary.json");
    CHECK(summary.find("\"converged\": true") != std::string::npos);
    CHECK(summary.find("\"rate\": -") != std::string::npos);
    CHECK(fs::exists(dir / "trace.csv"));
    CHECK(fs::exists(dir / "events.csv"));
    CHECK(fs::exists(dir / "final_state.json"));
}

TEST_CASE("flow: an extended run from a degenerate state logs events and converges") {
    auto state = write_temp("dcs_cli_degen_state.json",
                            R"({"geometry":"euclidean","alpha":-1.0,)"
                            R"("u":[-2.0,0.1,-0.1,0.05]})");
    auto weights = write_temp("dcs_cli_vs_weights.json", R"({"epsilon": 0, "eta": 1.0})");
    auto generator = write_temp("dcs_cli_gen_state.json",
                                R"({"geometry":"euclidean","alpha":-1.0,)"
                                R"("u":[0.0,0.0,0.0,0.0]})");
    auto dir = out_dir("dcs_cli_flow_ext");
    auto r = run_cli("flow --mesh " + tetra() + " --weights " + weights.string() +
                     " --flow modified_ricci --alpha -1 --extended --state " + state.string() +
                     " --target-forward " + generator.string() + " --t-max 80 --out " +
                     dir.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("converged") != std::string::npos);
    std::string events = slurp(dir / "events.csv");
    CHECK(events.find("degenerate_exit") != std::string::npos);
}

TEST_CASE("flow: the same degenerate start without --extended exits 2") {
    auto state = write_temp("dcs_cli_degen_state2.json",
                            R"({"geometry":"euclidean","alpha":-1.0,)"
                            R"("u":[-2.0,0.1,-0.1,0.05]})");
    auto weights = write_temp("dcs_cli_vs_weights2.json", R"({"epsilon": 0, "eta": 1.0})");
    auto r = run_cli("flow --mesh " + tetra() + " --weights " + weights.string() +
                     " --flow ricci --alpha -1 --state " + state.string() + " --out " +
                     out_dir("dcs_cli_flow_noext").string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("removable singularity") != std::string::npos);
}

TEST_CASE("flow: a small t_max warns but exits 0") {
    auto dir = out_dir("dcs_cli_flow_short");
    auto r = run_cli("flow --mesh " + tetra() + " --weights " + tetra_weights() +
                     " --flow normalized_ricci --alpha -1 --perturb 0.2 --seed 7 --t-max 0.1" +
                     " --out " + dir.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("not converged") != std::string::npos);
    CHECK(slurp(dir / "summary.json").find("\"converged\": false") != std::string::npos);
}

TEST_CASE("flow: an unreachable hyperbolic target exits 2 with event context") {
    auto r = run_cli("flow --mesh " + tetra() + " --weights " + tetra_weights() +
                     " --geometry hyperbolic --flow modified_ricci --extended" +
                     " --target-const 6.6 --t-max 10000 --out " +
                     out_dir("dcs_cli_flow_ess").string());
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("essential singularity") != std::string::npos);
}

TEST_CASE("solve: forward-inverse round trip recovers the generator state") {
    auto generator = write_temp("dcs_cli_solve_gen.json",
                                R"({"geometry":"euclidean","alpha":-1.0,)"
                                R"("u":[0.08,-0.05,0.02,-0.04]})");
    auto dir = out_dir("dcs_cli_solve_rt");
    auto r = run_cli("solve --mesh " + tetra() + " --weights " + tetra_weights() +
                     " --alpha -1 --target-forward " + generator.string() +
                     " --perturb 0.15 --seed 11 --out " + dir.string());
    CHECK(r.exit_code == 0);
    std::string solution = slurp(dir / "solution.json");
    // Compare the recovered u against the generator values.
    double want[] = {0.08, -0.05, 0.02, -0.04};
    std::size_t pos = solution.find("\"u\"");
    REQUIRE(pos != std::string::npos);
    std::istringstream nums(solution.substr(pos + 5));
    for (double expected : want) {
        std::string token;
        double got = 0.0;
        bool found = false;
        while (nums >> token) {
            try {
                std::size_t used = 0;
                got = std::stod(token, &used);
                if (used > 0) {
                    found = true;
                    break;
                }
            } catch (...) {
            }
        }
        REQUIRE(found);
        CHECK(std::abs(got - expected) < 1e-6);
    }
}

TEST_CASE("flow: per-vertex target file and Euler integrator") {
    auto target = write_temp("dcs_cli_target.json", "[4.0, 4.1, 4.2, 4.0]");
    auto dir = out_dir("dcs_cli_flow_tf");
    auto r = run_cli("flow --mesh " + tetra() + " --weights " + tetra_weights() +
                     " --geometry hyperbolic --flow modified_ricci --extended" +
                     " --target-file " + target.string() +
                     " --integrator euler --step 0.02 --t-max 300 --out " + dir.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("converged") != std::string::npos);
}

TEST_CASE("solve: Euclidean alpha = 0 without a gauge exits nonzero") {
    auto r = run_cli("solve --mesh " + tetra() + " --weights " + tetra_weights() +
                     " --target-const 3.14159265358979312 --out " +
                     out_dir("dcs_cli_solve_nog").string());
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("gauge required") != std::string::npos);
}

TEST_CASE("solve: alpha*target > 0 prints the uniqueness warning") {
    auto generator = write_temp("dcs_cli_solve_warn_gen.json",
                                R"({"geometry":"euclidean","alpha":1.0,)"
                                R"("u":[0.02,-0.03,0.01,0.0]})");
    auto dir = out_dir("dcs_cli_solve_warn");
    auto r = run_cli("solve --mesh " + tetra() + " --weights " + tetra_weights() +
                     " --alpha 1 --target-forward " + generator.string() + " --perturb 0.05" +
                     " --seed 4 --out " + dir.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("uniqueness not guaranteed") != std::string::npos);
    CHECK(slurp(dir / "solve_report.json").find("\"uniqueness_warning\": true") !=
          std::string::npos);
}

TEST_CASE("determinism: identical seeds give byte-identical outputs") {
    auto a = out_dir("dcs_cli_det_a");
    auto b = out_dir("dcs_cli_det_b");
    std::string cmd = "flow --mesh " + tetra() + " --weights " + tetra_weights() +
                      " --flow normalized_ricci --alpha -1 --perturb 0.25 --seed 99 --out ";
    REQUIRE(run_cli(cmd + a.string()).exit_code == 0);
    REQUIRE(run_cli(cmd + b.string()).exit_code == 0);
    CHECK(slurp(a / "trace.csv") == slurp(b / "trace.csv"));
    CHECK(slurp(a / "summary.json") == slurp(b / "summary.json"));
}

TEST_CASE("round trip: re-running curvature on a written state is bit-identical") {
    auto dir1 = out_dir("dcs_cli_rt1");
    auto dir2 = out_dir("dcs_cli_rt2");
    // Produce a nontrivial state by flowing briefly, then report twice.
    auto flow_dir = out_dir("dcs_cli_rt_flow");
    REQUIRE(run_cli("flow --mesh " + tetra() + " --weights " + tetra_weights() +
                    " --flow normalized_ricci --alpha -1 --perturb 0.2 --seed 5 --t-max 1" +
                    " --out " + flow_dir.string())
                .exit_code == 0);
    std::string state = (flow_dir / "final_state.json").string();
    REQUIRE(run_cli("curvature --mesh " + tetra() + " --weights " + tetra_weights() +
                    " --alpha -1 --state " + state + " --out " + dir1.string())
                .exit_code == 0);
    REQUIRE(run_cli("curvature --mesh " + tetra() + " --weights " + tetra_weights() +
                    " --alpha -1 --state " + state + " --out " + dir2.string())
                .exit_code == 0);
    std::string r1 = slurp(dir1 / "curvature.json");
    CHECK(!r1.empty());
    CHECK(r1 == slurp(dir2 / "curvature.json"));
}

TEST_CASE("IO errors exit 3") {
    auto r = run_cli("curvature --mesh /nonexistent.off --weights " + tetra_weights());
    CHECK(r.exit_code == 3);
}

}  // TEST_SUITE
