#include "dcs/triangle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace dcs {

namespace {

constexpr double kCosTolerance = 1e-12;
constexpr double kPi = std::numbers::pi;

double checked_acos(double c) {
    if (c > 1.0 || c < -1.0) {
        if (c > 1.0 + kCosTolerance || c < -1.0 - kCosTolerance)
            throw Error("internal: cosine argument " + std::to_string(c) + " outside [-1,1]");
        c = std::clamp(c, -1.0, 1.0);
    }
    return std::acos(c);
}

// Index of the corner whose opposite length breaks the triangle inequality,
// or -1 if the triangle is admissible. At most one inequality can fail.
int degenerate_corner(const std::array<double, 3>& l) {
    for (int c = 0; c < 3; ++c)
        if (l[c] >= l[(c + 1) % 3] + l[(c + 2) % 3]) return c;
    return -1;
}

double cos_angle(const std::array<double, 3>& l, Geometry geometry, int c) {
    const double a = l[c], b = l[(c + 1) % 3], d = l[(c + 2) % 3];
    if (geometry == Geometry::Euclidean) return (b * b + d * d - a * a) / (2.0 * b * d);
    return (std::cosh(b) * std::cosh(d) - std::cosh(a)) / (std::sinh(b) * std::sinh(d));
}

}  // namespace

bool triangle_admissible(const std::array<double, 3>& lengths) {
    return degenerate_corner(lengths) < 0;
}

std::array<double, 3> inner_angles(const std::array<double, 3>& lengths, Geometry geometry) {
    if (int c = degenerate_corner(lengths); c >= 0)
        throw InadmissibleFaceError(
            "triangle inequality fails (corner " + std::to_string(c) +
                "); use extended_inner_angles for degenerate configurations",
            -1);
    std::array<double, 3> angles{};
    for (int c = 0; c < 3; ++c) angles[c] = checked_acos(cos_angle(lengths, geometry, c));
    return angles;
}

std::array<double, 3> extended_inner_angles(const std::array<double, 3>& lengths,
                                            Geometry geometry) {
    int c = degenerate_corner(lengths);
    if (c < 0) return inner_angles(lengths, geometry);
    std::array<double, 3> angles{0.0, 0.0, 0.0};
    angles[c] = kPi;
    return angles;
}

double hyperbolic_area(const std::array<double, 3>& angles) {
    double deficit = kPi - angles[0] - angles[1] - angles[2];
    return deficit > 0.0 ? deficit : 0.0;
}

std::array<double, 3> face_lengths(const WeightedSurface& surface, const ConformalState& state,
                                   int face) {
    const auto& opp = surface.mesh.face_edges()[face];
    return {edge_length(surface, state, opp[0]), edge_length(surface, state, opp[1]),
            edge_length(surface, state, opp[2])};
}

Eigen::Matrix3d angle_jacobian(const WeightedSurface& surface, const ConformalState& state,
                               int face) {
    const auto& verts = surface.mesh.faces()[face];
    const auto& opp = surface.mesh.face_edges()[face];
    const auto l = face_lengths(surface, state, face);
    if (!triangle_admissible(l))
        throw InadmissibleFaceError("angle Jacobian requested on a degenerate face", face);

    std::array<double, 3> angles = inner_angles(l, state.geometry);

    // d theta_a / d l_e with everything in opposite-index terms. For the
    // angle A at corner a with opposite length la and adjacent lb, lc:
    //   Euclidean:  dA/dla =  la / (lb lc sinA)
    //               dA/dlb = -la cosC / (lb lc sinA)   (C opposite lc)
    //   hyperbolic: same with sinh in place of the length factors.
    Eigen::Matrix3d dtheta_dl;
    for (int a = 0; a < 3; ++a) {
        const int b = (a + 1) % 3, c = (a + 2) % 3;
        const double sinA = std::sin(angles[a]);
        double num_a, denom;
        if (state.geometry == Geometry::Euclidean) {
            num_a = l[a];
            denom = l[b] * l[c] * sinA;
        } else {
            num_a = std::sinh(l[a]);
            denom = std::sinh(l[b]) * std::sinh(l[c]) * sinA;
        }
        dtheta_dl(a, a) = num_a / denom;
        dtheta_dl(a, b) = -num_a * std::cos(angles[c]) / denom;
        dtheta_dl(a, c) = -num_a * std::cos(angles[b]) / denom;
    }

    // d l_e / d u_b through f: the edge opposite corner b does not touch b.
    Eigen::Matrix3d dl_du = Eigen::Matrix3d::Zero();
    for (int e = 0; e < 3; ++e) {
        for (int b = 0; b < 3; ++b) {
            if (b == e) continue;
            double dl_df = edge_length_derivative(surface, state, opp[e], verts[b]);
            dl_du(e, b) = dl_df * df_du(surface, state.geometry, verts[b], state.f[verts[b]]);
        }
    }

    return dtheta_dl * dl_du;
}

TriangleGeometry face_geometry(const WeightedSurface& surface, const ConformalState& state,
                               int face, bool with_jacobian) {
    TriangleGeometry g;
    g.face = surface.mesh.faces()[face];
    g.lengths = face_lengths(surface, state, face);
    g.admissible = triangle_admissible(g.lengths);
    g.angles = extended_inner_angles(g.lengths, state.geometry);
    g.area = state.geometry == Geometry::Hyperbolic ? hyperbolic_area(g.angles) : 0.0;
    g.jacobian.setZero();
    if (with_jacobian && g.admissible) {
        g.jacobian = angle_jacobian(surface, state, face);
        g.has_jacobian = true;
    }
    return g;
}

}  // namespace dcs
