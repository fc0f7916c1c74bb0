#include "dcs/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace dcs {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEssentialNormBound = 50.0;  // |u|_inf beyond this aborts as essential

void check_domain(const WeightedSurface& surface, const FlowSpec& spec,
                  const Eigen::VectorXd& u, double t) {
    if (spec.geometry == Geometry::Hyperbolic) {
        for (int v = 0; v < surface.num_vertices(); ++v) {
            if (surface.epsilon[v] == 1 && u[v] >= 0.0)
                throw DomainExitError("essential singularity: u reached 0 at eps=1 vertex " +
                                          std::to_string(v),
                                      v, t);
        }
    }
    if (u.cwiseAbs().maxCoeff() > kEssentialNormBound) {
        int v = 0;
        u.cwiseAbs().maxCoeff(&v);
        throw DomainExitError("essential singularity: |u| exceeded " +
                                  std::to_string(kEssentialNormBound) + " at vertex " +
                                  std::to_string(v),
                              v, t);
    }
}

std::vector<int> degenerate_faces_of(const WeightedSurface& surface,
                                     const ConformalState& state) {
    std::vector<int> out;
    for (int f = 0; f < surface.num_faces(); ++f)
        if (!triangle_admissible(face_lengths(surface, state, f))) out.push_back(f);
    return out;
}

}  // namespace

void FlowSpec::validate(int n_vertices) const {
    if (kind == FlowKind::NormalizedRicci && geometry != Geometry::Euclidean)
        throw ConfigError("the normalized Ricci flow is defined in the Euclidean background only");
    if (extended && (kind == FlowKind::Calabi || kind == FlowKind::ModifiedCalabi))
        throw ConfigError("the Calabi flow cannot be extended through degenerate triangles");
    if (needs_target() && static_cast<int>(target.size()) != n_vertices)
        throw ConfigError(std::string(flow_kind_name(kind)) +
                          " flow needs a target curvature per vertex");
}

const char* flow_event_kind_name(FlowEventKind kind) {
    switch (kind) {
        case FlowEventKind::DegenerateEnter: return "degenerate_enter";
        case FlowEventKind::DegenerateExit: return "degenerate_exit";
        case FlowEventKind::DomainExit: return "domain_exit";
    }
    return "?";
}

double conserved_quantity(const Eigen::VectorXd& u, double alpha) {
    if (alpha == 0.0) return u.sum();
    return (alpha * u.array()).exp().sum();
}

Eigen::VectorXd flow_field(const WeightedSurface& surface, const Eigen::VectorXd& u,
                           const FlowSpec& spec) {
    check_domain(surface, spec, u, 0.0);
    ConformalState state = state_from_u(surface, spec.geometry, spec.alpha, u);

    const bool use_extension = spec.extended;
    switch (spec.kind) {
        case FlowKind::Ricci:
            return -alpha_curvature(surface, state, use_extension);
        case FlowKind::NormalizedRicci: {
            // R_av is recomputed from the current state every evaluation so
            // conservation errors do not feed back.
            double r_av = 2.0 * kPi * surface.mesh.euler_characteristic() /
                          (spec.alpha * u.array()).exp().sum();
            Eigen::VectorXd r = alpha_curvature(surface, state, use_extension);
            return Eigen::VectorXd::Constant(u.size(), r_av) - r;
        }
        case FlowKind::ModifiedRicci:
            return spec.target - alpha_curvature(surface, state, use_extension);
        case FlowKind::Calabi:
            return alpha_laplacian(surface, state, alpha_curvature(surface, state, false));
        case FlowKind::ModifiedCalabi: {
            Eigen::VectorXd r = alpha_curvature(surface, state, false);
            return alpha_laplacian(surface, state, r - spec.target);
        }
    }
    throw ConfigError("unhandled flow kind");
}

FlowState flow_step(const WeightedSurface& surface, const FlowState& state,
                    const FlowSpec& spec, const IntegratorOptions& options) {
    const double h = options.step;
    try {
        Eigen::VectorXd u_next;
        if (options.method == IntegratorOptions::Method::Euler) {
            u_next = state.u + h * flow_field(surface, state.u, spec);
        } else {
            Eigen::VectorXd k1 = flow_field(surface, state.u, spec);
            Eigen::VectorXd k2 = flow_field(surface, state.u + 0.5 * h * k1, spec);
            Eigen::VectorXd k3 = flow_field(surface, state.u + 0.5 * h * k2, spec);
            Eigen::VectorXd k4 = flow_field(surface, state.u + h * k3, spec);
            u_next = state.u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }

        FlowState next;
        next.t = state.t + h;
        check_domain(surface, spec, u_next, next.t);
        next.residual = flow_field(surface, u_next, spec).cwiseAbs().maxCoeff();
        next.conserved = conserved_quantity(u_next, spec.alpha);
        ConformalState cs = state_from_u(surface, spec.geometry, spec.alpha, u_next);
        next.degenerate_faces = degenerate_faces_of(surface, cs);
        next.u = std::move(u_next);
        return next;
    } catch (const DomainExitError& e) {
        // Stage evaluations do not know the time; restamp before propagating.
        throw DomainExitError(e.what(), e.vertex, e.t > 0.0 ? e.t : state.t);
    }
}

namespace {

void diff_events(const FlowState& prev, const FlowState& next, std::vector<FlowEvent>& events) {
    for (int f : next.degenerate_faces)
        if (!std::binary_search(prev.degenerate_faces.begin(), prev.degenerate_faces.end(), f))
            events.push_back({next.t, f, FlowEventKind::DegenerateEnter});
    for (int f : prev.degenerate_faces)
        if (!std::binary_search(next.degenerate_faces.begin(), next.degenerate_faces.end(), f))
            events.push_back({next.t, f, FlowEventKind::DegenerateExit});
}

// Least-squares fit of log(residual) against t over the second half of the
// trace; reports the slope and R^2.
void fit_rate(FlowTrace& trace) {
    const auto& samples = trace.samples;
    std::size_t begin = samples.size() / 2;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = begin; i < samples.size(); ++i)
        if (samples[i].residual > 0.0)
            pts.push_back({samples[i].t, std::log(samples[i].residual)});
    if (pts.size() < 3) return;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (auto [x, y] : pts) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    double m = static_cast<double>(pts.size());
    double denom = m * sxx - sx * sx;
    if (denom == 0.0) return;
    trace.rate = (m * sxy - sx * sy) / denom;
    double ss_tot = syy - sy * sy / m;
    double intercept = (sy - trace.rate * sx) / m;
    double ss_res = 0.0;
    for (auto [x, y] : pts) {
        double e = y - (trace.rate * x + intercept);
        ss_res += e * e;
    }
    trace.rate_r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
}

}  // namespace

FlowTrace run_flow(const WeightedSurface& surface, const ConformalState& initial,
                   const FlowSpec& spec, const IntegratorOptions& options,
                   const StopCriteria& stop) {
    spec.validate(surface.num_vertices());
    if (initial.geometry != spec.geometry || initial.alpha != spec.alpha)
        throw ConfigError("initial state and flow spec disagree on geometry or alpha");

    FlowTrace trace;
    FlowState state;
    state.t = 0.0;
    state.u = initial.u;
    state.residual = flow_field(surface, state.u, spec).cwiseAbs().maxCoeff();
    state.conserved = conserved_quantity(state.u, spec.alpha);
    state.degenerate_faces = degenerate_faces_of(surface, initial);
    trace.samples.push_back(state);
    for (int f : state.degenerate_faces)
        trace.events.push_back({0.0, f, FlowEventKind::DegenerateEnter});

    const double conserved0 = state.conserved;
    double margin = -std::numeric_limits<double>::infinity();
    auto update_margin = [&](const Eigen::VectorXd& u) {
        if (spec.geometry != Geometry::Hyperbolic) return;
        for (int v = 0; v < surface.num_vertices(); ++v)
            if (surface.epsilon[v] == 1) margin = std::max(margin, u[v]);
    };
    update_margin(state.u);

    IntegratorOptions current = options;
    const double min_step = options.step * std::pow(2.0, -20);

    try {
        while (state.residual >= stop.residual_tol && state.t < stop.t_max) {
            FlowState next = flow_step(surface, state, spec, current);
            if (options.adaptive_halving && next.residual > state.residual &&
                current.step * 0.5 >= min_step) {
                current.step *= 0.5;
                continue;
            }
            diff_events(state, next, trace.events);
            state = std::move(next);
            trace.samples.push_back(state);
            update_margin(state.u);
            trace.conserved_drift = std::max(trace.conserved_drift,
                                             std::abs(state.conserved - conserved0));
        }
    } catch (const DomainExitError& e) {
        trace.events.push_back({e.t, e.vertex, FlowEventKind::DomainExit});
        throw;
    }

    trace.status =
        state.residual < stop.residual_tol ? FlowStatus::Converged : FlowStatus::MaxTimeReached;
    trace.min_margin_to_domain = margin;
    fit_rate(trace);
    return trace;
}

}  // namespace dcs
