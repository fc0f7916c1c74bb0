// Command-line front end: validate inputs, compute curvature reports, run
// curvature flows, and solve prescribed-curvature problems.
//
// Exit codes: 0 success (including reported-but-benign outcomes such as
// t_max reached), 1 validation failure, 2 runtime singularity or solver
// failure, 3 IO/configuration error.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <Eigen/Eigenvalues>

#include <dcs/curvature.hpp>
#include <dcs/energy.hpp>
#include <dcs/flow.hpp>
#include <dcs/io.hpp>

namespace fs = std::filesystem;
using namespace dcs;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitConfig = 3;

struct CommonArgs {
    std::string mesh_path;
    std::string weights_path;
    std::string geometry_name = "euclidean";
    double alpha = 0.0;
    std::string state_path;  // empty: f = 0
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    double perturb = 0.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--mesh", mesh_path, "OFF mesh file")->required();
        cmd->add_option("--weights", weights_path, "weights sidecar (JSON)")->required();
        cmd->add_option("--geometry", geometry_name, "euclidean | hyperbolic")
            ->default_val("euclidean");
        cmd->add_option("--alpha", alpha, "curvature parameter alpha")->default_val(0.0);
        cmd->add_option("--state", state_path,
                        "initial state file (JSON); defaults to f = 0");
        cmd->add_option("--out", out_dir, "output directory")->default_val(".");
        cmd->add_option("--seed", seed, "random seed for --perturb")->default_val(0);
        cmd->add_option("--perturb", perturb,
                        "add seeded uniform noise in [-perturb, perturb] to the initial u");
    }
};

struct TargetArgs {
    std::optional<double> constant;
    std::string file;
    std::string forward;

    void attach(CLI::App* cmd) {
        auto* a = cmd->add_option("--target-const", constant, "constant target curvature");
        auto* b = cmd->add_option("--target-file", file, "per-vertex target curvature (JSON)");
        auto* c = cmd->add_option("--target-forward", forward,
                                  "state file; the target is that state's alpha-curvature");
        a->excludes(b)->excludes(c);
        b->excludes(c);
    }

    bool provided() const { return constant.has_value() || !file.empty() || !forward.empty(); }
};

// Deterministic uniform noise from the raw bit stream, independent of the
// standard library's distribution implementations.
Eigen::VectorXd seeded_noise(std::uint64_t seed, int n, double scale) {
    std::mt19937_64 gen(seed);
    Eigen::VectorXd noise(n);
    for (int i = 0; i < n; ++i) {
        double x = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        noise[i] = (2.0 * x - 1.0) * scale;
    }
    return noise;
}

struct LoadedProblem {
    WeightedSurface surface;
    ConformalState state;
    Geometry geometry;
};

LoadedProblem load_problem(const CommonArgs& args) {
    Geometry geometry = geometry_from_name(args.geometry_name);
    auto mesh = load_mesh(args.mesh_path);
    auto surface = load_weights(args.weights_path, std::move(mesh));
    ConformalState state;
    if (args.state_path.empty()) {
        state = state_from_f(surface, geometry, args.alpha,
                             Eigen::VectorXd::Zero(surface.num_vertices()));
    } else {
        state = load_state(args.state_path, surface, geometry, args.alpha);
    }
    if (args.perturb != 0.0) {
        Eigen::VectorXd u =
            state.u + seeded_noise(args.seed, surface.num_vertices(), args.perturb);
        if (geometry == Geometry::Hyperbolic) {
            for (int v = 0; v < surface.num_vertices(); ++v)
                if (surface.epsilon[v] == 1) u[v] = std::min(u[v], -1e-6);
        }
        state = with_u(surface, state, std::move(u));
    }
    return {std::move(surface), std::move(state), geometry};
}

Eigen::VectorXd resolve_target(const TargetArgs& targs, const LoadedProblem& problem) {
    const int n = problem.surface.num_vertices();
    if (targs.constant) return Eigen::VectorXd::Constant(n, *targs.constant);
    if (!targs.file.empty()) return load_target(targs.file, n);
    auto generator = load_state(targs.forward, problem.surface, problem.geometry,
                                problem.state.alpha);
    return alpha_curvature(problem.surface, generator, false);
}

int cmd_validate(const CommonArgs& args) {
    auto problem = load_problem(args);
    auto violations = check_structure_conditions(problem.surface);
    int inadmissible = 0;
    for (const auto& v : violations) std::cout << v.describe() << "\n";
    for (int f = 0; f < problem.surface.num_faces(); ++f) {
        try {
            if (!triangle_admissible(face_lengths(problem.surface, problem.state, f))) {
                std::cout << "face " << f << " is inadmissible (triangle inequality fails)\n";
                ++inadmissible;
            }
        } catch (const MetricError& e) {
            // Possible only when condition (1) fails, which is listed above.
            std::cout << "face " << f << " has no metric: " << e.what() << "\n";
            ++inadmissible;
        }
    }
    if (violations.empty() && inadmissible == 0) {
        std::cout << "ok: structure conditions hold and every face is admissible\n";
        return kExitOk;
    }
    std::cout << violations.size() << " structure violation(s), " << inadmissible
              << " inadmissible face(s)\n";
    return kExitValidation;
}

int cmd_curvature(const CommonArgs& args, bool spectrum) {
    auto problem = load_problem(args);
    auto report = curvature_report(problem.surface, problem.state, /*use_extension=*/true);
    fs::create_directories(args.out_dir);
    fs::path out = fs::path(args.out_dir) / "curvature.json";
    if (spectrum) {
        Eigen::MatrixXd lambda = curvature_jacobian(problem.surface, problem.state);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lambda);
        Eigen::VectorXd values = eig.eigenvalues();
        save_curvature_report(out, report, &values);
        int zeros = count_zero_eigenvalues(values);
        int negatives = 0;
        for (int i = 0; i < values.size(); ++i)
            if (values[i] < 0.0 && std::abs(values[i]) >=
                                       1e-8 * values.cwiseAbs().maxCoeff())
                ++negatives;
        std::cout << "jacobian spectrum: " << values.size() << " eigenvalues, " << zeros
                  << " zero, " << negatives << " negative\n";
    } else {
        save_curvature_report(out, report);
    }
    std::cout << "K: [" << report.K.transpose() << "]\n";
    std::cout << "gauss-bonnet residual: " << format_double(report.gauss_bonnet_residual)
              << "\n";
    std::cout << "wrote " << out.string() << "\n";
    return kExitOk;
}

int cmd_flow(const CommonArgs& args, const TargetArgs& targs, const std::string& kind_name,
             bool extended, const std::string& integrator_name, double step, bool adaptive,
             double t_max, double residual_tol) {
    auto problem = load_problem(args);

    FlowSpec spec;
    spec.kind = flow_kind_from_name(kind_name);
    spec.extended = extended;
    spec.alpha = problem.state.alpha;
    spec.geometry = problem.geometry;
    if (spec.needs_target()) {
        if (!targs.provided())
            throw ConfigError("flow kind '" + kind_name + "' needs a target curvature");
        spec.target = resolve_target(targs, problem);
    }
    spec.validate(problem.surface.num_vertices());

    IntegratorOptions options;
    options.method = integrator_name == "euler" ? IntegratorOptions::Method::Euler
                                                : IntegratorOptions::Method::RK4;
    options.step = step;
    options.adaptive_halving = adaptive;

    StopCriteria stop;
    stop.t_max = t_max;
    stop.residual_tol = residual_tol;

    fs::create_directories(args.out_dir);
    auto trace = run_flow(problem.surface, problem.state, spec, options, stop);
    save_trace_csv(fs::path(args.out_dir) / "trace.csv", trace);
    save_events_csv(fs::path(args.out_dir) / "events.csv", trace);
    save_flow_summary(fs::path(args.out_dir) / "summary.json", trace, spec);
    save_state(fs::path(args.out_dir) / "final_state.json",
               with_u(problem.surface, problem.state, trace.final_state().u));

    if (trace.status == FlowStatus::Converged) {
        std::cout << "converged at t = " << trace.final_state().t
                  << ", residual = " << trace.final_state().residual
                  << ", fitted rate = " << trace.rate << "\n";
    } else {
        std::cout << "warning: not converged by t_max = " << t_max
                  << " (residual = " << trace.final_state().residual << ")\n";
    }
    std::cout << "conserved drift: " << format_double(trace.conserved_drift) << ", events: "
              << trace.events.size() << "\n";
    return kExitOk;
}

int cmd_solve(const CommonArgs& args, const TargetArgs& targs, const std::string& gauge_name_arg,
              std::optional<double> gauge_value, int max_iterations, double tolerance) {
    auto problem = load_problem(args);
    if (!targs.provided()) throw ConfigError("solve needs a target curvature");
    Eigen::VectorXd target = resolve_target(targs, problem);

    Gauge gauge = gauge_from_name(gauge_name_arg);
    NewtonOptions options;
    options.max_iterations = max_iterations;
    options.tolerance = tolerance;
    options.gauge_value = gauge_value;

    auto report = newton_solve(problem.surface, problem.state, target, gauge, options);

    fs::create_directories(args.out_dir);
    save_state(fs::path(args.out_dir) / "solution.json", report.state);
    save_newton_report(fs::path(args.out_dir) / "solve_report.json", report);

    if (report.uniqueness_warning)
        std::cout << "warning: alpha*target > 0 somewhere, uniqueness not guaranteed\n";
    std::cout << "solved in " << report.iterations
              << " iterations, residual = " << format_double(report.residual) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"discrete conformal structures: curvatures, flows, and prescribed-curvature "
                 "solves on closed triangulated surfaces"};
    app.require_subcommand(1);

    CommonArgs validate_args, curvature_args, flow_args, solve_args;
    TargetArgs flow_targets, solve_targets;

    auto* validate = app.add_subcommand("validate",
                                        "check structure conditions and admissibility");
    validate_args.attach(validate);

    auto* curvature = app.add_subcommand("curvature", "per-vertex curvature report");
    curvature_args.attach(curvature);
    bool spectrum = false;
    curvature->add_flag("--spectrum", spectrum, "include the curvature Jacobian spectrum");

    auto* flow = app.add_subcommand("flow", "evolve a combinatorial curvature flow");
    flow_args.attach(flow);
    flow_targets.attach(flow);
    std::string flow_kind = "ricci";
    bool extended = false;
    std::string integrator = "rk4";
    double step = 1e-2, t_max = 50.0, residual_tol = 1e-10;
    bool adaptive = false;
    flow->add_option("--flow", flow_kind,
                     "ricci | normalized_ricci | modified_ricci | calabi | modified_calabi")
        ->default_val("ricci");
    flow->add_flag("--extended", extended, "extend through degenerate triangles");
    flow->add_option("--integrator", integrator, "rk4 | euler")->default_val("rk4");
    flow->add_option("--step", step, "step size")->default_val(1e-2);
    flow->add_flag("--adaptive", adaptive, "halve the step when the residual rises");
    flow->add_option("--t-max", t_max, "time horizon")->default_val(50.0);
    flow->add_option("--tol", residual_tol, "residual tolerance")->default_val(1e-10);

    auto* solve = app.add_subcommand("solve", "Newton solve for a prescribed curvature");
    solve_args.attach(solve);
    solve_targets.attach(solve);
    std::string gauge = "none";
    std::optional<double> gauge_value;
    int max_iterations = 100;
    double tolerance = 1e-9;
    solve->add_option("--gauge", gauge, "none | sum-u | sum-exp")->default_val("none");
    solve->add_option("--gauge-value", gauge_value,
                      "pinned value of the gauge functional (default: initial state's)");
    solve->add_option("--max-iter", max_iterations, "Newton iteration cap")->default_val(100);
    solve->add_option("--tol", tolerance, "curvature residual tolerance")->default_val(1e-9);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(validate)) return cmd_validate(validate_args);
        if (app.got_subcommand(curvature)) return cmd_curvature(curvature_args, spectrum);
        if (app.got_subcommand(flow))
            return cmd_flow(flow_args, flow_targets, flow_kind, extended, integrator, step,
                            adaptive, t_max, residual_tol);
        if (app.got_subcommand(solve))
            return cmd_solve(solve_args, solve_targets, gauge, gauge_value, max_iterations,
                             tolerance);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainExitError& e) {
        std::cerr << "essential singularity: " << e.what() << " (vertex " << e.vertex
                  << ", t = " << e.t << ")\n";
        return kExitRuntime;
    } catch (const InadmissibleFaceError& e) {
        std::cerr << "removable singularity: " << e.what()
                  << " (rerun with --extended to flow through it)\n";
        return kExitRuntime;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitConfig;
}
