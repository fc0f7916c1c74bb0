#pragma once

#include <array>

#include <Eigen/Core>

#include "dcs/metric.hpp"

namespace dcs {

/// Opposite-length convention used throughout: for a face (v0,v1,v2),
/// lengths[c] is the length of the edge opposite corner c, and angles[c] is
/// the inner angle at corner c.

/// True iff all three strict triangle inequalities hold.
bool triangle_admissible(const std::array<double, 3>& lengths);

/// Inner angles from the (hyperbolic) law of cosines. Angles sum to pi
/// (Euclidean) or pi minus the area (hyperbolic). Throws
/// InadmissibleFaceError when a triangle inequality fails; use
/// extended_inner_angles for those configurations.
std::array<double, 3> inner_angles(const std::array<double, 3>& lengths, Geometry geometry);

/// Continuous extension of inner_angles to all positive lengths: on the
/// degenerate set (lengths[c] >= sum of the other two) the angle at c is pi
/// and the other two are 0.
std::array<double, 3> extended_inner_angles(const std::array<double, 3>& lengths,
                                            Geometry geometry);

/// Angle deficit pi - sum(angles); zero on extended degenerate triangles.
double hyperbolic_area(const std::array<double, 3>& angles);

/// One face's geometry under a conformal state.
struct TriangleGeometry {
    std::array<int, 3> face{};
    std::array<double, 3> lengths{};
    bool admissible = false;
    std::array<double, 3> angles{};  // extended angles when not admissible
    double area = 0.0;               // hyperbolic angle deficit, 0 for Euclidean
    Eigen::Matrix3d jacobian;        // d angles / d u, valid iff has_jacobian
    bool has_jacobian = false;
};

/// d(theta_0,theta_1,theta_2)/d(u_0,u_1,u_2) for an admissible face,
/// assembled by the chain rule through edge lengths and the f(u) map.
/// Symmetric; negative semi-definite with kernel (1,1,1) in the Euclidean
/// background, negative definite in the hyperbolic background.
Eigen::Matrix3d angle_jacobian(const WeightedSurface& surface, const ConformalState& state,
                               int face);

/// Lengths, admissibility, (extended) angles, area, and on admissible faces
/// the angle Jacobian if with_jacobian is set.
TriangleGeometry face_geometry(const WeightedSurface& surface, const ConformalState& state,
                               int face, bool with_jacobian = false);

/// Opposite-ordered lengths of one face.
std::array<double, 3> face_lengths(const WeightedSurface& surface, const ConformalState& state,
                                   int face);

}  // namespace dcs
