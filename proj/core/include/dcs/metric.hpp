#pragma once

#include <Eigen/Core>

#include "dcs/mesh.hpp"

namespace dcs {

/// Per-vertex conformal factors in both coordinates. u is the flow
/// coordinate; f determines edge lengths. The two are kept consistent under
/// the coordinate maps below, so states should only be built through
/// state_from_f / state_from_u / with_u.
struct ConformalState {
    Geometry geometry = Geometry::Euclidean;
    double alpha = 0.0;
    Eigen::VectorXd f;
    Eigen::VectorXd u;
};

/// Scalar coordinate maps for a single vertex with scheme coefficient eps.
double vertex_f_to_u(Geometry geometry, int eps, double f);
double vertex_u_to_f(Geometry geometry, int eps, double u);  // throws DomainExitError

/// Length of a single weighted edge from its endpoint data.
double pair_edge_length(Geometry geometry, int eps_i, double f_i, int eps_j, double f_j,
                        double eta, int i = -1, int j = -1);

/// u_i = f_i, except at hyperbolic circle-packing vertices (eps = 1) where
/// u_i = (1/2) ln((sqrt(1+e^{2f_i})-1)/(sqrt(1+e^{2f_i})+1)) < 0.
Eigen::VectorXd f_to_u(const WeightedSurface& surface, const Eigen::VectorXd& f,
                       Geometry geometry);

/// Inverse of f_to_u; at hyperbolic eps = 1 vertices e^{f} = 2e^{u}/(1-e^{2u}).
/// Throws DomainExitError if u_i >= 0 at such a vertex.
Eigen::VectorXd u_to_f(const WeightedSurface& surface, const Eigen::VectorXd& u,
                       Geometry geometry);

/// d f_i / d u_i: 1 everywhere except hyperbolic eps = 1 vertices, where it
/// equals sqrt(1 + e^{2 f_i}).
double df_du(const WeightedSurface& surface, Geometry geometry, int vertex, double f_i);

ConformalState state_from_f(const WeightedSurface& surface, Geometry geometry, double alpha,
                            Eigen::VectorXd f);
ConformalState state_from_u(const WeightedSurface& surface, Geometry geometry, double alpha,
                            Eigen::VectorXd u);

/// Rebuilds a state from new u values, keeping geometry and alpha.
ConformalState with_u(const WeightedSurface& surface, const ConformalState& like,
                      Eigen::VectorXd u);

/// Length of edge e under the discrete conformal structure.
/// Euclidean: sqrt(eps_i e^{2f_i} + eps_j e^{2f_j} + 2 eta e^{f_i+f_j}).
/// Hyperbolic: arccosh(sqrt((1+eps_i e^{2f_i})(1+eps_j e^{2f_j})) + eta e^{f_i+f_j}).
/// Throws MetricError when the formula leaves its domain (only possible if
/// structure condition (1) fails on the edge).
double edge_length(const WeightedSurface& surface, const ConformalState& state, int edge);

double edge_length(const WeightedSurface& surface, const ConformalState& state, int i, int j);

/// All edge lengths in canonical edge order.
Eigen::VectorXd edge_lengths(const WeightedSurface& surface, const ConformalState& state);

/// d l_e / d f_v for an endpoint v of edge e (0 if v is not an endpoint).
double edge_length_derivative(const WeightedSurface& surface, const ConformalState& state,
                              int edge, int vertex);

}  // namespace dcs
