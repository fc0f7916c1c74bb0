#include "dcs/energy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dcs {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kQuadratureTol = 1e-10;
constexpr int kQuadratureMaxDepth = 40;

// Everything needed to evaluate the extended-angle 1-form along a segment
// restricted to one face.
struct FaceSegment {
    Geometry geometry;
    std::array<int, 3> eps;
    std::array<double, 3> eta_opp;  // eta of the edge opposite each corner
    std::array<double, 3> u_base;
    std::array<double, 3> u_delta;

    std::array<double, 3> lengths_at(double t) const {
        std::array<double, 3> f{};
        for (int c = 0; c < 3; ++c)
            f[c] = vertex_u_to_f(geometry, eps[c], u_base[c] + t * u_delta[c]);
        std::array<double, 3> lengths{};
        for (int c = 0; c < 3; ++c) {
            int p = (c + 1) % 3, q = (c + 2) % 3;
            lengths[c] =
                pair_edge_length(geometry, eps[p], f[p], eps[q], f[q], eta_opp[c]);
        }
        return lengths;
    }

    double integrand(double t) const {
        auto angles = extended_inner_angles(lengths_at(t), geometry);
        return angles[0] * u_delta[0] + angles[1] * u_delta[1] + angles[2] * u_delta[2];
    }

    // lengths[c] - lengths[a] - lengths[b]: the corner-c triangle inequality
    // deficit. Smooth in t; its sign changes are the integrand's kinks.
    double deficit(double t, int c) const {
        auto l = lengths_at(t);
        return l[c] - l[(c + 1) % 3] - l[(c + 2) % 3];
    }
};

template <typename F>
double adaptive_simpson(const F& f, double a, double fa, double m, double fm, double b,
                        double fb, double whole, double tol, int depth, int face) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double err = left + right - whole;
    if (std::abs(err) <= 15.0 * tol) return left + right + err / 15.0;
    if (depth >= kQuadratureMaxDepth) {
        // Only a machine-tiny interval may remain unresolved; its whole
        // contribution is below the tolerance.
        if (b - a < 1e-13) return left + right;
        throw QuadratureError("triangle energy quadrature did not converge on face " +
                                  std::to_string(face),
                              face);
    }
    return adaptive_simpson(f, a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1, face) +
           adaptive_simpson(f, m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1, face);
}

template <typename F>
double integrate_smooth(const F& f, double a, double b, double tol, int face) {
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(f, a, fa, m, fm, b, fb, whole, tol, 0, face);
}

// The extended angles approach their constant values like sqrt(distance to
// the admissibility boundary), so a piece that touches the boundary at an
// endpoint is integrated in the substituted variable t = end -/+ s^2, which
// removes the square-root behavior.
double integrate_piece(const FaceSegment& seg, double a, double b, bool kink_a, bool kink_b,
                       double tol, int face) {
    if (b - a < 1e-15) return (b - a) * seg.integrand(0.5 * (a + b));
    if (kink_a && kink_b) {
        double m = 0.5 * (a + b);
        return integrate_piece(seg, a, m, true, false, 0.5 * tol, face) +
               integrate_piece(seg, m, b, false, true, 0.5 * tol, face);
    }
    if (kink_a) {
        double w = std::sqrt(b - a);
        auto g = [&](double s) { return seg.integrand(std::min(a + s * s, b)) * 2.0 * s; };
        return integrate_smooth(g, 0.0, w, tol, face);
    }
    if (kink_b) {
        double w = std::sqrt(b - a);
        auto g = [&](double s) { return seg.integrand(std::max(b - s * s, a)) * 2.0 * s; };
        return integrate_smooth(g, 0.0, w, tol, face);
    }
    auto g = [&](double t) { return seg.integrand(t); };
    return integrate_smooth(g, a, b, tol, face);
}

// Crossings of the admissibility boundary along the segment, bisected until
// the bracket collapses to adjacent doubles.
std::vector<double> admissibility_crossings(const FaceSegment& seg) {
    constexpr int kScanIntervals = 256;
    std::vector<double> cuts;
    for (int c = 0; c < 3; ++c) {
        double prev = seg.deficit(0.0, c);
        for (int k = 1; k <= kScanIntervals; ++k) {
            double t = static_cast<double>(k) / kScanIntervals;
            double cur = seg.deficit(t, c);
            if ((prev < 0.0) != (cur < 0.0)) {
                double lo = static_cast<double>(k - 1) / kScanIntervals, hi = t, flo = prev;
                for (int it = 0; it < 80 && lo < hi; ++it) {
                    double mid = 0.5 * (lo + hi);
                    if (mid <= lo || mid >= hi) break;
                    double fmid = seg.deficit(mid, c);
                    if ((flo < 0.0) == (fmid < 0.0)) {
                        lo = mid;
                        flo = fmid;
                    } else {
                        hi = mid;
                    }
                }
                cuts.push_back(0.5 * (lo + hi));
            }
            prev = cur;
        }
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end(),
                           [](double a, double b) { return b - a < 1e-13; }),
               cuts.end());
    return cuts;
}

double integrate_face(const FaceSegment& seg, int face) {
    std::vector<double> cuts = admissibility_crossings(seg);
    std::vector<double> nodes;
    nodes.push_back(0.0);
    for (double c : cuts)
        if (c > 1e-12 && c < 1.0 - 1e-12) nodes.push_back(c);
    nodes.push_back(1.0);

    // Interior nodes are kinks by construction; the endpoints are kinks when
    // the segment starts or ends on the admissibility boundary itself.
    auto near_boundary = [&](double t) {
        double closest = std::abs(seg.deficit(t, 0));
        for (int c = 1; c < 3; ++c) closest = std::min(closest, std::abs(seg.deficit(t, c)));
        return closest < 1e-9;
    };
    const bool kink_start = near_boundary(0.0);
    const bool kink_end = near_boundary(1.0);

    const double tol = kQuadratureTol / static_cast<double>(nodes.size() - 1);
    double total = 0.0;
    for (std::size_t p = 0; p + 1 < nodes.size(); ++p) {
        bool ka = p > 0 || kink_start;
        bool kb = p + 2 < nodes.size() || kink_end;
        total += integrate_piece(seg, nodes[p], nodes[p + 1], ka, kb, tol, face);
    }
    return total;
}

bool gauge_case(Geometry geometry, double alpha, const Eigen::VectorXd& target) {
    if (geometry != Geometry::Euclidean) return false;
    return alpha == 0.0 || target.isZero(0.0);
}

double gauge_functional(Gauge gauge, double alpha, const Eigen::VectorXd& u) {
    if (gauge == Gauge::SumExpAlphaU) return (alpha * u.array()).exp().sum();
    return u.sum();
}

// Shifts u by a constant so the gauge functional equals value.
Eigen::VectorXd apply_gauge(Gauge gauge, double alpha, Eigen::VectorXd u, double value) {
    if (gauge == Gauge::None) return u;
    if (gauge == Gauge::SumU || alpha == 0.0) {
        double current = u.sum();
        u.array() += (value - current) / static_cast<double>(u.size());
        return u;
    }
    double current = (alpha * u.array()).exp().sum();
    if (!(value > 0.0) || !(current > 0.0))
        throw SolveError("sum-exp gauge value must be positive");
    u.array() += std::log(value / current) / alpha;
    return u;
}

}  // namespace

const char* gauge_name(Gauge gauge) {
    switch (gauge) {
        case Gauge::None: return "none";
        case Gauge::SumU: return "sum_u";
        case Gauge::SumExpAlphaU: return "sum_exp_alpha_u";
    }
    return "?";
}

Gauge gauge_from_name(const std::string& name) {
    if (name == "none") return Gauge::None;
    if (name == "sum_u" || name == "sum-u") return Gauge::SumU;
    if (name == "sum_exp_alpha_u" || name == "sum-exp") return Gauge::SumExpAlphaU;
    throw ConfigError("unknown gauge '" + name + "'");
}

double triangle_energy(const WeightedSurface& surface, const ConformalState& state, int face,
                       const ConformalState& base) {
    const auto& verts = surface.mesh.faces()[face];
    const auto& opp = surface.mesh.face_edges()[face];
    FaceSegment seg;
    seg.geometry = state.geometry;
    for (int c = 0; c < 3; ++c) {
        seg.eps[c] = surface.epsilon[verts[c]];
        seg.eta_opp[c] = surface.eta[opp[c]];
        seg.u_base[c] = base.u[verts[c]];
        seg.u_delta[c] = state.u[verts[c]] - base.u[verts[c]];
    }
    if (seg.u_delta[0] == 0.0 && seg.u_delta[1] == 0.0 && seg.u_delta[2] == 0.0) return 0.0;
    return integrate_face(seg, face);
}

EnergyEvaluation total_energy(const WeightedSurface& surface, const ConformalState& state,
                              const Eigen::VectorXd& target, const ConformalState& base) {
    if (target.size() != surface.num_vertices())
        throw ConfigError("target curvature has wrong size");

    EnergyEvaluation eval;
    eval.base_u = base.u;

    double faces_part = 0.0;
    for (int f = 0; f < surface.num_faces(); ++f)
        faces_part += triangle_energy(surface, state, f, base);

    const double alpha = state.alpha;
    double vertex_part = 0.0;
    for (int v = 0; v < surface.num_vertices(); ++v) {
        double du = state.u[v] - base.u[v];
        if (alpha == 0.0) {
            vertex_part += (2.0 * kPi - target[v]) * du;
        } else {
            // (e^{a u} - e^{a u0}) / a written through expm1 to stay accurate
            // for small alpha.
            vertex_part += 2.0 * kPi * du -
                           target[v] * std::exp(alpha * base.u[v]) *
                               std::expm1(alpha * du) / alpha;
        }
    }

    eval.value = -faces_part + vertex_part;
    Eigen::VectorXd k_tilde = classical_curvature(surface, state, /*use_extension=*/true);
    eval.gradient = k_tilde - (target.array() * (alpha * state.u.array()).exp()).matrix();
    return eval;
}

NewtonReport newton_solve(const WeightedSurface& surface, const ConformalState& initial,
                          const Eigen::VectorXd& target, Gauge gauge,
                          const NewtonOptions& options) {
    const int n = surface.num_vertices();
    if (target.size() != n) throw ConfigError("target curvature has wrong size");
    const double alpha = initial.alpha;
    const bool pinned = gauge_case(initial.geometry, alpha, target);

    if (pinned && gauge == Gauge::None)
        throw ConfigError(
            "gauge required: Euclidean with alpha*target == 0 determines the solution only up "
            "to a constant shift");
    if (!pinned && gauge != Gauge::None)
        throw ConfigError(
            "a gauge applies only to the Euclidean alpha*target == 0 case; here it would "
            "constrain away the unique solution");

    NewtonReport report;
    report.gauge = gauge;
    report.uniqueness_warning = ((alpha * target.array()) > 0.0).any();

    Eigen::VectorXd u = initial.u;
    double gauge_value = 0.0;
    if (gauge != Gauge::None) {
        gauge_value = options.gauge_value.value_or(gauge_functional(gauge, alpha, u));
        u = apply_gauge(gauge, alpha, std::move(u), gauge_value);
    }
    report.gauge_value = gauge_value;

    auto in_domain = [&](const Eigen::VectorXd& v) {
        if (initial.geometry != Geometry::Hyperbolic) return true;
        for (int i = 0; i < n; ++i)
            if (surface.epsilon[i] == 1 && v[i] >= 0.0) return false;
        return true;
    };

    if (!in_domain(u)) throw DomainExitError("initial state outside the hyperbolic domain", -1);

    auto gradient_at = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        ConformalState s = state_from_u(surface, initial.geometry, alpha, v);
        Eigen::VectorXd k_tilde = classical_curvature(surface, s, /*use_extension=*/true);
        return k_tilde - (target.array() * (alpha * v.array()).exp()).matrix();
    };

    Eigen::VectorXd grad = gradient_at(u);

    for (int iter = 0; iter <= options.max_iterations; ++iter) {
        ConformalState current = state_from_u(surface, initial.geometry, alpha, u);
        Eigen::VectorXd r_tilde =
            alpha_curvature(surface, current, /*use_extension=*/true);
        report.residual = (r_tilde - target).cwiseAbs().maxCoeff();
        report.iterations = iter;
        if (report.residual < options.tolerance) {
            report.state = std::move(current);
            return report;
        }
        if (iter == options.max_iterations) break;

        bool admissible = true;
        for (int f = 0; f < surface.num_faces() && admissible; ++f)
            admissible = triangle_admissible(face_lengths(surface, current, f));

        Eigen::VectorXd direction;
        bool newton_direction = false;
        if (admissible) {
            Eigen::MatrixXd hess = curvature_jacobian(surface, current);
            hess -= (alpha * (target.array() * (alpha * u.array()).exp())).matrix().asDiagonal();
            if (pinned) {
                // Pin the constant-shift kernel before factorizing.
                double shift = hess.diagonal().cwiseAbs().maxCoeff();
                if (shift <= 0.0) shift = 1.0;
                hess.array() += shift / static_cast<double>(n);
            }
            Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
            bool solved = false;
            if (ldlt.info() == Eigen::Success) {
                direction = ldlt.solve(-grad);
                double solve_residual = (hess * direction + grad).cwiseAbs().maxCoeff();
                double scale = std::max(1.0, grad.cwiseAbs().maxCoeff());
                solved = direction.allFinite() && solve_residual < 1e-6 * scale;
            }
            if (solved) {
                newton_direction = true;
            } else if (!report.uniqueness_warning && !pinned) {
                // With alpha*target <= 0 the Hessian is positive definite on
                // the admissible set, so failure here is a genuine error; in
                // the warned indefinite case gradient descent takes over.
                throw SolveError("Hessian singular beyond the gauge kernel");
            }
        }
        if (!newton_direction) direction = -grad;

        // Backtracking on the gradient norm; halve away from domain exits.
        double grad_norm = grad.norm();
        double step = 1.0;
        bool accepted = false;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            step = 1.0;
            for (int h = 0; h <= options.max_halvings; ++h, step *= 0.5) {
                Eigen::VectorXd candidate = u + step * direction;
                if (gauge != Gauge::None)
                    candidate = apply_gauge(gauge, alpha, std::move(candidate), gauge_value);
                if (!in_domain(candidate)) continue;
                Eigen::VectorXd candidate_grad = gradient_at(candidate);
                if (candidate_grad.norm() < grad_norm) {
                    u = std::move(candidate);
                    grad = std::move(candidate_grad);
                    accepted = true;
                    break;
                }
            }
            if (!accepted && newton_direction) {
                direction = -grad;  // fall back to steepest descent once
                newton_direction = false;
            } else {
                break;
            }
        }
        if (!accepted) throw SolveError("line search failed to reduce the gradient norm");
    }

    throw SolveError("Newton did not reach residual " + std::to_string(options.tolerance) +
                     " within " + std::to_string(options.max_iterations) + " iterations");
}

}  // namespace dcs
