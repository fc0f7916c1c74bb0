#include <benchmark/benchmark.h>

#include <dcs/energy.hpp>
#include <dcs/flow.hpp>

#include "support/fixtures.hpp"

using namespace dcs;
namespace dt = dcs::testing;

namespace {

WeightedSurface bench_surface() { return dt::tangential(dt::genus2()); }

ConformalState bench_state(const WeightedSurface& surface, Geometry geometry) {
    dt::Rng rng(424242);
    return dt::random_admissible_state(surface, geometry, -1.0, rng, 0.2);
}

void BM_EdgeLengths(benchmark::State& state) {
    auto surface = bench_surface();
    auto cs = bench_state(surface, Geometry::Euclidean);
    for (auto _ : state) benchmark::DoNotOptimize(edge_lengths(surface, cs));
}
BENCHMARK(BM_EdgeLengths);

void BM_CurvatureReport(benchmark::State& state) {
    auto surface = bench_surface();
    auto cs = bench_state(surface, Geometry::Hyperbolic);
    for (auto _ : state) benchmark::DoNotOptimize(curvature_report(surface, cs, true));
}
BENCHMARK(BM_CurvatureReport);

void BM_CurvatureJacobian(benchmark::State& state) {
    auto surface = bench_surface();
    auto cs = bench_state(surface, Geometry::Euclidean);
    for (auto _ : state) benchmark::DoNotOptimize(curvature_jacobian(surface, cs));
}
BENCHMARK(BM_CurvatureJacobian);

void BM_FlowStepRK4(benchmark::State& state) {
    auto surface = bench_surface();
    auto cs = bench_state(surface, Geometry::Euclidean);
    FlowSpec spec{FlowKind::NormalizedRicci, true, 1.0, Geometry::Euclidean, {}};
    FlowState fs;
    fs.t = 0.0;
    fs.u = cs.u;
    IntegratorOptions options;
    for (auto _ : state) benchmark::DoNotOptimize(flow_step(surface, fs, spec, options));
}
BENCHMARK(BM_FlowStepRK4);

void BM_TriangleEnergy(benchmark::State& state) {
    auto surface = bench_surface();
    auto base = state_from_f(surface, Geometry::Euclidean, 0.0, Eigen::VectorXd::Zero(10));
    auto cs = bench_state(surface, Geometry::Euclidean);
    int face = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(triangle_energy(surface, cs, face, base));
        face = (face + 1) % surface.num_faces();
    }
}
BENCHMARK(BM_TriangleEnergy);

void BM_NewtonSolve(benchmark::State& state) {
    auto surface = bench_surface();
    const double alpha = -1.0;
    auto star = state_from_f(surface, Geometry::Hyperbolic, alpha, Eigen::VectorXd::Zero(10));
    Eigen::VectorXd target = alpha_curvature(surface, star, false);
    dt::Rng rng(99);
    Eigen::VectorXd u0 = star.u;
    for (int v = 0; v < 10; ++v) u0[v] += rng.uniform(-0.2, 0.2);
    u0 = u0.cwiseMin(-1e-3);
    auto initial = state_from_u(surface, Geometry::Hyperbolic, alpha, u0);
    for (auto _ : state)
        benchmark::DoNotOptimize(newton_solve(surface, initial, target, Gauge::None));
}
BENCHMARK(BM_NewtonSolve);

}  // namespace

BENCHMARK_MAIN();
