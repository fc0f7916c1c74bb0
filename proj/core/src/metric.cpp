#include "dcs/metric.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace dcs {

namespace {

constexpr double kAcoshTolerance = 1e-12;

// ln(x + sqrt(x^2 - 1)), clamped to 0 when x is within tolerance below 1.
// Flow iterates can graze the boundary; a clear violation is a hard error.
double guarded_acosh(double x, int i, int j) {
    if (x < 1.0) {
        if (x < 1.0 - kAcoshTolerance)
            throw MetricError("invalid metric on edge {" + std::to_string(i) + "," +
                                  std::to_string(j) + "}: arccosh argument " +
                                  std::to_string(x) + " < 1",
                              i, j);
        return 0.0;
    }
    return std::log(x + std::sqrt(x * x - 1.0));
}

}  // namespace

double vertex_f_to_u(Geometry geometry, int eps, double f) {
    if (geometry == Geometry::Euclidean || eps == 0) return f;
    // 0.5*ln((s-1)/(s+1)) with s = sqrt(1+e^{2f}) rewritten as f - ln(1+s)
    // to avoid cancellation for very negative f.
    double s = std::sqrt(1.0 + std::exp(2.0 * f));
    return f - std::log(1.0 + s);
}

double vertex_u_to_f(Geometry geometry, int eps, double u) {
    if (geometry == Geometry::Euclidean || eps == 0) return u;
    if (u >= 0.0)
        throw DomainExitError(
            "domain exit: u = " + std::to_string(u) + " >= 0 at a hyperbolic eps=1 vertex", -1);
    // e^{f} = 2 e^{u} / (1 - e^{2u})
    return std::numbers::ln2 + u - std::log(-std::expm1(2.0 * u));
}

double pair_edge_length(Geometry geometry, int eps_i, double f_i, int eps_j, double f_j,
                        double eta, int i, int j) {
    if (geometry == Geometry::Euclidean) {
        double radicand = eps_i * std::exp(2.0 * f_i) + eps_j * std::exp(2.0 * f_j) +
                          2.0 * eta * std::exp(f_i + f_j);
        if (!(radicand > 0.0))
            throw MetricError("invalid metric on edge {" + std::to_string(i) + "," +
                                  std::to_string(j) + "}: radicand " +
                                  std::to_string(radicand) + " <= 0",
                              i, j);
        return std::sqrt(radicand);
    }
    double arg =
        std::sqrt((1.0 + eps_i * std::exp(2.0 * f_i)) * (1.0 + eps_j * std::exp(2.0 * f_j))) +
        eta * std::exp(f_i + f_j);
    return guarded_acosh(arg, i, j);
}

Eigen::VectorXd f_to_u(const WeightedSurface& surface, const Eigen::VectorXd& f,
                       Geometry geometry) {
    if (geometry == Geometry::Euclidean) return f;
    Eigen::VectorXd u = f;
    for (int v = 0; v < surface.num_vertices(); ++v)
        u[v] = vertex_f_to_u(geometry, surface.epsilon[v], f[v]);
    return u;
}

Eigen::VectorXd u_to_f(const WeightedSurface& surface, const Eigen::VectorXd& u,
                       Geometry geometry) {
    if (geometry == Geometry::Euclidean) return u;
    Eigen::VectorXd f = u;
    for (int v = 0; v < surface.num_vertices(); ++v) {
        if (surface.epsilon[v] == 1 && u[v] >= 0.0)
            throw DomainExitError("domain exit: u = " + std::to_string(u[v]) +
                                      " >= 0 at hyperbolic eps=1 vertex " + std::to_string(v),
                                  v);
        f[v] = vertex_u_to_f(geometry, surface.epsilon[v], u[v]);
    }
    return f;
}

double df_du(const WeightedSurface& surface, Geometry geometry, int vertex, double f_i) {
    if (geometry == Geometry::Hyperbolic && surface.epsilon[vertex] == 1)
        return std::sqrt(1.0 + std::exp(2.0 * f_i));
    return 1.0;
}

ConformalState state_from_f(const WeightedSurface& surface, Geometry geometry, double alpha,
                            Eigen::VectorXd f) {
    if (static_cast<int>(f.size()) != surface.num_vertices())
        throw ConfigError("conformal factor vector has wrong size");
    ConformalState state;
    state.geometry = geometry;
    state.alpha = alpha;
    state.u = f_to_u(surface, f, geometry);
    state.f = std::move(f);
    return state;
}

ConformalState state_from_u(const WeightedSurface& surface, Geometry geometry, double alpha,
                            Eigen::VectorXd u) {
    if (static_cast<int>(u.size()) != surface.num_vertices())
        throw ConfigError("conformal factor vector has wrong size");
    ConformalState state;
    state.geometry = geometry;
    state.alpha = alpha;
    state.f = u_to_f(surface, u, geometry);
    state.u = std::move(u);
    return state;
}

ConformalState with_u(const WeightedSurface& surface, const ConformalState& like,
                      Eigen::VectorXd u) {
    return state_from_u(surface, like.geometry, like.alpha, std::move(u));
}

double edge_length(const WeightedSurface& surface, const ConformalState& state, int edge) {
    const auto [i, j] = surface.mesh.edges()[edge];
    return pair_edge_length(state.geometry, surface.epsilon[i], state.f[i], surface.epsilon[j],
                            state.f[j], surface.eta[edge], i, j);
}

double edge_length(const WeightedSurface& surface, const ConformalState& state, int i, int j) {
    int e = surface.mesh.edge_index(i, j);
    if (e < 0)
        throw ConfigError("no edge {" + std::to_string(i) + "," + std::to_string(j) + "}");
    return edge_length(surface, state, e);
}

Eigen::VectorXd edge_lengths(const WeightedSurface& surface, const ConformalState& state) {
    Eigen::VectorXd lengths(surface.num_edges());
    for (int e = 0; e < surface.num_edges(); ++e) lengths[e] = edge_length(surface, state, e);
    return lengths;
}

double edge_length_derivative(const WeightedSurface& surface, const ConformalState& state,
                              int edge, int vertex) {
    const auto [i, j] = surface.mesh.edges()[edge];
    if (vertex != i && vertex != j) return 0.0;
    const int p = vertex, q = (vertex == i) ? j : i;
    const double fp = state.f[p], fq = state.f[q];
    const double eta = surface.eta[edge];
    const int ep = surface.epsilon[p], eq = surface.epsilon[q];

    double l = edge_length(surface, state, edge);
    if (state.geometry == Geometry::Euclidean)
        return (ep * std::exp(2.0 * fp) + eta * std::exp(fp + fq)) / l;

    double dcosh = eta * std::exp(fp + fq);
    if (ep == 1) {
        dcosh += std::exp(2.0 * fp) *
                 std::sqrt((1.0 + eq * std::exp(2.0 * fq)) / (1.0 + std::exp(2.0 * fp)));
    }
    return dcosh / std::sinh(l);
}

}  // namespace dcs
