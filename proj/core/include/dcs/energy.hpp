#pragma once

#include <optional>

#include <Eigen/Core>

#include "dcs/curvature.hpp"

namespace dcs {

/// Pin for the constant-shift direction in the Euclidean alpha*target == 0
/// case: keep sum(u) fixed, or keep sum(e^{alpha u}) fixed.
enum class Gauge { None, SumU, SumExpAlphaU };

const char* gauge_name(Gauge gauge);
Gauge gauge_from_name(const std::string& name);

/// Value, gradient and integration origin of the extended Ricci energy.
struct EnergyEvaluation {
    double value = 0.0;
    Eigen::VectorXd gradient;  // K~ - target * e^{alpha u} at the evaluation point
    Eigen::VectorXd base_u;
};

/// Line integral of the extended-angle 1-form sum_c theta~_c du_c along the
/// straight segment from base to state, by adaptive Simpson quadrature to
/// absolute tolerance 1e-10. Concave along any segment; globally defined
/// (Euclidean) resp. defined on the convex hyperbolic u-domain.
double triangle_energy(const WeightedSurface& surface, const ConformalState& state, int face,
                       const ConformalState& base);

/// Extended Ricci energy for a target curvature:
///   F~(u) = -sum_faces F~_f + sum_i int_{u0_i}^{u_i} (2 pi - target_i e^{alpha x}) dx,
/// with the vertex integral in closed form. Gradient is K~ - target e^{alpha u}.
EnergyEvaluation total_energy(const WeightedSurface& surface, const ConformalState& state,
                              const Eigen::VectorXd& target, const ConformalState& base);

struct NewtonOptions {
    int max_iterations = 100;
    double tolerance = 1e-9;           // on max |R~_alpha - target|
    int max_halvings = 30;             // line search backtracking
    std::optional<double> gauge_value; // defaults to the initial state's value
};

struct NewtonReport {
    ConformalState state;
    int iterations = 0;
    double residual = 0.0;
    Gauge gauge = Gauge::None;
    double gauge_value = 0.0;
    bool uniqueness_warning = false;  // alpha*target > 0 somewhere
};

/// Damped Newton iteration on the extended Ricci energy gradient
/// K~ - target e^{alpha u} with Hessian Lambda - alpha diag(target e^{alpha u}).
/// In the Euclidean alpha*target == 0 case the constant direction is in the
/// Hessian kernel and a gauge is required; the returned state satisfies the
/// gauge constraint exactly. Throws SolveError when the iteration fails and
/// DomainExitError when no step stays inside the hyperbolic domain.
NewtonReport newton_solve(const WeightedSurface& surface, const ConformalState& initial,
                          const Eigen::VectorXd& target, Gauge gauge,
                          const NewtonOptions& options = {});

}  // namespace dcs
