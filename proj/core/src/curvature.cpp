#include "dcs/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace dcs {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kZeroEigRel = 1e-8;
}  // namespace

const char* flow_kind_name(FlowKind kind) {
    switch (kind) {
        case FlowKind::Ricci: return "ricci";
        case FlowKind::NormalizedRicci: return "normalized_ricci";
        case FlowKind::ModifiedRicci: return "modified_ricci";
        case FlowKind::Calabi: return "calabi";
        case FlowKind::ModifiedCalabi: return "modified_calabi";
    }
    return "?";
}

FlowKind flow_kind_from_name(const std::string& name) {
    if (name == "ricci") return FlowKind::Ricci;
    if (name == "normalized_ricci") return FlowKind::NormalizedRicci;
    if (name == "modified_ricci") return FlowKind::ModifiedRicci;
    if (name == "calabi") return FlowKind::Calabi;
    if (name == "modified_calabi") return FlowKind::ModifiedCalabi;
    throw ConfigError("unknown flow kind '" + name + "'");
}

bool CurvatureReport::any_extended() const {
    return std::any_of(face_extended.begin(), face_extended.end(), [](char c) { return c != 0; });
}

Eigen::VectorXd classical_curvature(const WeightedSurface& surface, const ConformalState& state,
                                    bool use_extension) {
    const int n = surface.num_vertices();
    Eigen::VectorXd K = Eigen::VectorXd::Constant(n, 2.0 * kPi);
    for (int f = 0; f < surface.num_faces(); ++f) {
        const auto lengths = face_lengths(surface, state, f);
        std::array<double, 3> angles{};
        if (use_extension) {
            angles = extended_inner_angles(lengths, state.geometry);
        } else if (triangle_admissible(lengths)) {
            angles = inner_angles(lengths, state.geometry);
        } else {
            throw InadmissibleFaceError("face " + std::to_string(f) +
                                            " is degenerate; curvature requested without the "
                                            "constant extension",
                                        f);
        }
        const auto& verts = surface.mesh.faces()[f];
        for (int c = 0; c < 3; ++c) K[verts[c]] -= angles[c];
    }
    return K;
}

Eigen::VectorXd alpha_curvature(const WeightedSurface& surface, const ConformalState& state,
                                bool use_extension) {
    Eigen::VectorXd K = classical_curvature(surface, state, use_extension);
    return K.array() * (-state.alpha * state.u.array()).exp();
}

CurvatureReport curvature_report(const WeightedSurface& surface, const ConformalState& state,
                                 bool use_extension) {
    CurvatureReport report;
    const int n = surface.num_vertices();
    report.K = Eigen::VectorXd::Constant(n, 2.0 * kPi);
    report.face_extended.assign(surface.num_faces(), 0);
    for (int f = 0; f < surface.num_faces(); ++f) {
        const auto lengths = face_lengths(surface, state, f);
        std::array<double, 3> angles{};
        if (triangle_admissible(lengths)) {
            angles = inner_angles(lengths, state.geometry);
        } else if (use_extension) {
            angles = extended_inner_angles(lengths, state.geometry);
            report.face_extended[f] = 1;
        } else {
            throw InadmissibleFaceError("face " + std::to_string(f) +
                                            " is degenerate; curvature requested without the "
                                            "constant extension",
                                        f);
        }
        const auto& verts = surface.mesh.faces()[f];
        for (int c = 0; c < 3; ++c) report.K[verts[c]] -= angles[c];
        if (state.geometry == Geometry::Hyperbolic) report.total_area += hyperbolic_area(angles);
    }
    report.R_alpha = report.K.array() * (-state.alpha * state.u.array()).exp();
    const double target = 2.0 * kPi * surface.mesh.euler_characteristic() + report.total_area;
    report.gauss_bonnet_residual = report.K.sum() - target;
    return report;
}

Eigen::MatrixXd curvature_jacobian(const WeightedSurface& surface, const ConformalState& state) {
    const int n = surface.num_vertices();
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    for (int f = 0; f < surface.num_faces(); ++f) {
        Eigen::Matrix3d local = angle_jacobian(surface, state, f);
        const auto& verts = surface.mesh.faces()[f];
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) jac(verts[a], verts[b]) -= local(a, b);
    }
    return jac;
}

Eigen::VectorXd alpha_laplacian(const WeightedSurface& surface, const ConformalState& state,
                                const Eigen::VectorXd& g) {
    // Matrix-free face-wise application of Lambda: keeps the evaluation
    // exactly symmetric on symmetric states, which the dense matvec's
    // row-order roundoff would not.
    const int n = surface.num_vertices();
    Eigen::VectorXd lambda_g = Eigen::VectorXd::Zero(n);
    for (int f = 0; f < surface.num_faces(); ++f) {
        Eigen::Matrix3d local = angle_jacobian(surface, state, f);
        const auto& verts = surface.mesh.faces()[f];
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) lambda_g[verts[a]] -= local(a, b) * g[verts[b]];
    }
    Eigen::VectorXd scale = (-state.alpha * state.u.array()).exp();
    return -(scale.array() * lambda_g.array());
}

namespace {

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    Eigen::VectorXd vals = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

Eigen::VectorXd linearization_spectrum(const WeightedSurface& surface,
                                       const ConformalState& state, FlowKind kind,
                                       const Eigen::VectorXd& target) {
    const int n = surface.num_vertices();
    const double alpha = state.alpha;

    Eigen::MatrixXd lambda = curvature_jacobian(surface, state);
    Eigen::VectorXd half_scale = (-0.5 * alpha * state.u.array()).exp();  // e^{-alpha u/2}
    Eigen::MatrixXd q = half_scale.asDiagonal() * lambda * half_scale.asDiagonal();
    q = 0.5 * (q + q.transpose());

    Eigen::MatrixXd sym(n, n);
    switch (kind) {
        case FlowKind::Ricci:
        case FlowKind::ModifiedRicci: {
            if (kind == FlowKind::ModifiedRicci && target.size() != n)
                throw ConfigError("modified flow needs a target curvature per vertex");
            Eigen::VectorXd diag =
                kind == FlowKind::ModifiedRicci
                    ? target
                    : Eigen::VectorXd(alpha_curvature(surface, state, false));
            sym = -(q - alpha * Eigen::MatrixXd(diag.asDiagonal()));
            break;
        }
        case FlowKind::NormalizedRicci: {
            if (state.geometry != Geometry::Euclidean)
                throw ConfigError("the normalized flow is Euclidean only");
            Eigen::VectorXd r_half = (0.5 * alpha * state.u.array()).exp();  // e^{alpha u/2}
            double norm = (alpha * state.u.array()).exp().sum();
            double r_av = 2.0 * kPi * surface.mesh.euler_characteristic() / norm;
            Eigen::MatrixXd proj =
                Eigen::MatrixXd::Identity(n, n) - (r_half * r_half.transpose()) / norm;
            sym = -(q - alpha * r_av * proj);
            break;
        }
        case FlowKind::Calabi: {
            double r_av = 0.0;
            if (state.geometry == Geometry::Euclidean) {
                double norm = (alpha * state.u.array()).exp().sum();
                r_av = 2.0 * kPi * surface.mesh.euler_characteristic() / norm;
            }
            sym = -(q * q - alpha * r_av * q);
            break;
        }
        case FlowKind::ModifiedCalabi: {
            if (target.size() != n)
                throw ConfigError("modified flow needs a target curvature per vertex");
            Eigen::MatrixXd root = psd_sqrt(q);
            sym = -(q * q -
                    alpha * (root * Eigen::MatrixXd(target.asDiagonal()) * root));
            break;
        }
    }

    sym = 0.5 * (sym + sym.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    return eig.eigenvalues();
}

int count_zero_eigenvalues(const Eigen::VectorXd& eigenvalues) {
    if (eigenvalues.size() == 0) return 0;
    double scale = eigenvalues.cwiseAbs().maxCoeff();
    if (scale == 0.0) return static_cast<int>(eigenvalues.size());
    return static_cast<int>(
        (eigenvalues.cwiseAbs().array() < kZeroEigRel * scale).count());
}

}  // namespace dcs
