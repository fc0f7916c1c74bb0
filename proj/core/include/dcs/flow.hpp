#pragma once

#include <vector>

#include <Eigen/Core>

#include "dcs/curvature.hpp"

namespace dcs {

/// Which curvature flow to evolve.
///   ricci:            du/dt = -R_alpha
///   normalized_ricci: du/dt = R_av - R_alpha          (Euclidean only)
///   modified_ricci:   du/dt = target - R_alpha
///   calabi:           du/dt = Delta_alpha R_alpha
///   modified_calabi:  du/dt = Delta_alpha (R_alpha - target)
/// With extended set, the Ricci-family fields use the extended curvature and
/// keep evolving through degenerate triangles. The Calabi family cannot be
/// extended this way.
struct FlowSpec {
    FlowKind kind = FlowKind::Ricci;
    bool extended = false;
    double alpha = 0.0;
    Geometry geometry = Geometry::Euclidean;
    Eigen::VectorXd target;  // required for the modified kinds

    void validate(int n_vertices) const;
    bool needs_target() const {
        return kind == FlowKind::ModifiedRicci || kind == FlowKind::ModifiedCalabi;
    }
};

struct FlowState {
    double t = 0.0;
    Eigen::VectorXd u;
    double residual = 0.0;   // max |du/dt|
    double conserved = 0.0;  // sum u (alpha = 0) or sum e^{alpha u}
    std::vector<int> degenerate_faces;
};

enum class FlowEventKind { DegenerateEnter, DegenerateExit, DomainExit };

const char* flow_event_kind_name(FlowEventKind kind);

struct FlowEvent {
    double t = 0.0;
    int face = -1;  // vertex index for DomainExit
    FlowEventKind kind = FlowEventKind::DegenerateEnter;
};

enum class FlowStatus { Converged, MaxTimeReached };

struct FlowTrace {
    std::vector<FlowState> samples;
    std::vector<FlowEvent> events;
    FlowStatus status = FlowStatus::MaxTimeReached;
    double conserved_drift = 0.0;       // max |conserved(t) - conserved(0)|
    double rate = 0.0;                  // least-squares slope of log residual vs t
    double rate_r2 = 0.0;               // fit quality over the tail
    double min_margin_to_domain = 0.0;  // hyperbolic: max over eps=1 vertices of u (< 0)

    const FlowState& final_state() const { return samples.back(); }
};

struct IntegratorOptions {
    enum class Method { RK4, Euler };
    Method method = Method::RK4;
    double step = 1e-2;
    bool adaptive_halving = false;  // halve the step when the residual rises
};

struct StopCriteria {
    double residual_tol = 1e-10;
    double t_max = 100.0;
};

/// Sum u (alpha = 0) or sum e^{alpha u}; invariant along the Euclidean
/// normalized Ricci and Calabi flows.
double conserved_quantity(const Eigen::VectorXd& u, double alpha);

/// du/dt of the selected flow at u. Throws InadmissibleFaceError for
/// degenerate faces unless extended is set (removable-singularity
/// detection point) and DomainExitError when u leaves the hyperbolic domain.
Eigen::VectorXd flow_field(const WeightedSurface& surface, const Eigen::VectorXd& u,
                           const FlowSpec& spec);

/// One explicit step of size options.step. Updates residual, conserved
/// quantity and the degenerate-face set.
FlowState flow_step(const WeightedSurface& surface, const FlowState& state,
                    const FlowSpec& spec, const IntegratorOptions& options);

/// Integrates until the residual drops below stop.residual_tol or t reaches
/// stop.t_max; the trace records every accepted step plus enter/exit events
/// for degenerate faces. Essential singularities (hyperbolic domain exit or
/// unbounded u) throw DomainExitError.
FlowTrace run_flow(const WeightedSurface& surface, const ConformalState& initial,
                   const FlowSpec& spec, const IntegratorOptions& options = {},
                   const StopCriteria& stop = {});

}  // namespace dcs
