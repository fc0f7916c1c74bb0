#pragma once

#include <vector>

#include <Eigen/Core>

#include "dcs/triangle.hpp"

namespace dcs {

/// Flow families whose linearizations the spectrum routine knows how to
/// assemble. Also used by the flow module to select the evolution equation.
enum class FlowKind { Ricci, NormalizedRicci, ModifiedRicci, Calabi, ModifiedCalabi };

const char* flow_kind_name(FlowKind kind);
FlowKind flow_kind_from_name(const std::string& name);

/// Vertex curvatures of one state, plus the Gauss-Bonnet bookkeeping.
struct CurvatureReport {
    Eigen::VectorXd K;        // classical curvature, 2 pi minus cone angle
    Eigen::VectorXd R_alpha;  // K_i e^{-alpha u_i}
    std::vector<char> face_extended;  // 1 where the constant extension was used
    double total_area = 0.0;          // hyperbolic angle-deficit area, 0 Euclidean
    double gauss_bonnet_residual = 0.0;

    bool any_extended() const;
};

/// K_i = 2 pi - sum of inner angles at i. With use_extension the extended
/// angles make this well defined on every state; without it an inadmissible
/// face throws InadmissibleFaceError.
Eigen::VectorXd classical_curvature(const WeightedSurface& surface, const ConformalState& state,
                                    bool use_extension);

/// R_{alpha,i} = K_i e^{-alpha u_i}; reduces to K when alpha = 0.
Eigen::VectorXd alpha_curvature(const WeightedSurface& surface, const ConformalState& state,
                                bool use_extension);

CurvatureReport curvature_report(const WeightedSurface& surface, const ConformalState& state,
                                 bool use_extension);

/// Global curvature Jacobian Lambda_ij = dK_i/du_j, assembled from the
/// per-face angle Jacobians. Symmetric; positive semi-definite with kernel
/// (1,...,1) in the Euclidean background, positive definite in the
/// hyperbolic background. Requires every face admissible.
Eigen::MatrixXd curvature_jacobian(const WeightedSurface& surface, const ConformalState& state);

/// Discrete alpha-Laplacian: (Delta_alpha g)_i = -e^{-alpha u_i} sum_j Lambda_ij g_j.
Eigen::VectorXd alpha_laplacian(const WeightedSurface& surface, const ConformalState& state,
                                const Eigen::VectorXd& g);

/// Eigenvalues (ascending) of the linearization of the selected flow field
/// at the given state, assembled through the symmetrized similarity
/// transform Q = S^{-a/2} Lambda S^{-a/2} with S = diag(e^{u}):
///   normalized Ricci:  -(Q - alpha R_av (I - P)),  P the projector onto e^{alpha u/2};
///   modified Ricci:    -(Q - alpha diag(target));
///   Calabi:            -(Q^2 - alpha R_av Q)   (hyperbolic: R_av = 0);
///   modified Calabi:   -(Q^2 - alpha Q^{1/2} diag(target) Q^{1/2}).
/// The formulas are exact at the flow's stationary states, which is where
/// spectra are meaningful. target is ignored for the normalized and plain
/// Calabi kinds.
Eigen::VectorXd linearization_spectrum(const WeightedSurface& surface,
                                       const ConformalState& state, FlowKind kind,
                                       const Eigen::VectorXd& target);

/// Count of eigenvalues treated as zero at the scale-relative threshold
/// |lambda| < 1e-8 * max|lambda|.
int count_zero_eigenvalues(const Eigen::VectorXd& eigenvalues);

}  // namespace dcs
