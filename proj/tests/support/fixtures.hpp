#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include <dcs/curvature.hpp>
#include <dcs/metric.hpp>

namespace dcs::testing {

/// Deterministic generator; uniform doubles come straight from the raw bit
/// stream so results do not depend on the standard library's distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
    }

private:
    std::mt19937_64 gen_;
};

inline Triangulation tetrahedron() {
    return Triangulation(4, {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}});
}

/// The 7-vertex triangulation of the torus: faces {i, i+1, i+3} and
/// {i, i+2, i+3} over Z_7. Every vertex has degree 6.
inline Triangulation torus7() {
    std::vector<std::array<int, 3>> faces;
    for (int i = 0; i < 7; ++i) {
        faces.push_back({i, (i + 1) % 7, (i + 3) % 7});
        faces.push_back({i, (i + 2) % 7, (i + 3) % 7});
    }
    return Triangulation(7, std::move(faces));
}

/// An n x m grid triangulation of the torus (n, m >= 3): vertices (i, j)
/// with both directions periodic, each grid cell split into two triangles.
inline Triangulation torus_grid(int n, int m) {
    auto id = [m](int i, int j) { return i * m + j; };
    std::vector<std::array<int, 3>> faces;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            int a = id(i, j);
            int b = id((i + 1) % n, j);
            int c = id(i, (j + 1) % m);
            int d = id((i + 1) % n, (j + 1) % m);
            faces.push_back({a, b, c});
            faces.push_back({b, d, c});
        }
    }
    return Triangulation(n * m, std::move(faces));
}

/// A minimal 10-vertex triangulation of the closed orientable genus-2
/// surface (24 faces, 36 edges), obtained from two tori glued along a face
/// and reduced by bistellar moves.
inline Triangulation genus2() {
    return Triangulation(10, {{0, 1, 5}, {0, 1, 8}, {0, 2, 6}, {0, 2, 9}, {0, 3, 7}, {0, 3, 9},
                              {0, 4, 5}, {0, 4, 6}, {0, 7, 8}, {1, 2, 4}, {1, 2, 6}, {1, 3, 4},
                              {1, 3, 7}, {1, 5, 6}, {1, 7, 9}, {1, 8, 9}, {2, 3, 5}, {2, 3, 8},
                              {2, 4, 5}, {2, 7, 8}, {2, 7, 9}, {3, 4, 6}, {3, 5, 6}, {3, 8, 9}});
}

/// eps = 1, eta = 1 on every edge (tangential circle packing).
inline WeightedSurface tangential(Triangulation mesh) {
    std::vector<int> eps(mesh.num_vertices(), 1);
    Eigen::VectorXd eta = Eigen::VectorXd::Ones(mesh.num_edges());
    return make_weighted_surface(std::move(mesh), std::move(eps), std::move(eta));
}

/// eps = 0 with a uniform eta (vertex scaling).
inline WeightedSurface vertex_scaling(Triangulation mesh, double eta_value = 0.5) {
    std::vector<int> eps(mesh.num_vertices(), 0);
    Eigen::VectorXd eta = Eigen::VectorXd::Constant(mesh.num_edges(), eta_value);
    return make_weighted_surface(std::move(mesh), std::move(eps), std::move(eta));
}

/// Alternating eps with a uniform eta (mixed scheme).
inline WeightedSurface mixed(Triangulation mesh, double eta_value = 1.0) {
    std::vector<int> eps(mesh.num_vertices());
    for (int v = 0; v < mesh.num_vertices(); ++v) eps[v] = v % 2;
    Eigen::VectorXd eta = Eigen::VectorXd::Constant(mesh.num_edges(), eta_value);
    return make_weighted_surface(std::move(mesh), std::move(eps), std::move(eta));
}

enum class WeightFamily { Tangential, Thurston, InversiveDistance, VertexScaling, Mixed };

/// Random weights within ranges that satisfy both structure conditions and
/// keep f = 0 admissible, so rejection sampling around it terminates.
inline WeightedSurface random_weights(Triangulation mesh, WeightFamily family, Rng& rng) {
    const int nv = mesh.num_vertices();
    const int ne = mesh.num_edges();
    std::vector<int> eps(nv, 1);
    Eigen::VectorXd eta(ne);
    switch (family) {
        case WeightFamily::Tangential:
            eta.setOnes();
            break;
        case WeightFamily::Thurston:
            for (int e = 0; e < ne; ++e) eta[e] = rng.uniform(0.3, 1.0);
            break;
        case WeightFamily::InversiveDistance:
            for (int e = 0; e < ne; ++e) eta[e] = rng.uniform(1.0, 3.0);
            break;
        case WeightFamily::VertexScaling:
            eps.assign(nv, 0);
            for (int e = 0; e < ne; ++e) eta[e] = rng.uniform(0.5, 1.5);
            break;
        case WeightFamily::Mixed:
            for (int v = 0; v < nv; ++v) eps[v] = rng.uniform_int(0, 1);
            for (int e = 0; e < ne; ++e) eta[e] = rng.uniform(0.5, 1.5);
            break;
    }
    return make_weighted_surface(std::move(mesh), std::move(eps), std::move(eta));
}

inline bool all_faces_admissible(const WeightedSurface& surface, const ConformalState& state) {
    for (int f = 0; f < surface.num_faces(); ++f)
        if (!triangle_admissible(face_lengths(surface, state, f))) return false;
    return true;
}

/// Random admissible state near f = 0, shrinking the perturbation until the
/// triangle inequalities hold on every face.
inline ConformalState random_admissible_state(const WeightedSurface& surface, Geometry geometry,
                                              double alpha, Rng& rng, double scale = 0.4) {
    const int n = surface.num_vertices();
    for (int attempt = 0; attempt < 60; ++attempt) {
        Eigen::VectorXd f(n);
        for (int v = 0; v < n; ++v) f[v] = rng.uniform(-scale, scale);
        ConformalState state = state_from_f(surface, geometry, alpha, std::move(f));
        if (all_faces_admissible(surface, state)) return state;
        scale *= 0.7;
    }
    return state_from_f(surface, geometry, alpha, Eigen::VectorXd::Zero(n));
}

/// Central-difference Jacobian of the classical curvature in u, step 1e-5.
/// Independent oracle for the chain-rule assembly.
inline Eigen::MatrixXd fd_curvature_jacobian(const WeightedSurface& surface,
                                             const ConformalState& state, double step = 1e-5) {
    const int n = surface.num_vertices();
    Eigen::MatrixXd jac(n, n);
    for (int j = 0; j < n; ++j) {
        Eigen::VectorXd up = state.u, dn = state.u;
        up[j] += step;
        dn[j] -= step;
        Eigen::VectorXd kp = classical_curvature(
            surface, state_from_u(surface, state.geometry, state.alpha, up), false);
        Eigen::VectorXd kn = classical_curvature(
            surface, state_from_u(surface, state.geometry, state.alpha, dn), false);
        jac.col(j) = (kp - kn) / (2.0 * step);
    }
    return jac;
}

/// Central-difference Jacobian of one face's inner angles in u.
inline Eigen::Matrix3d fd_angle_jacobian(const WeightedSurface& surface,
                                         const ConformalState& state, int face,
                                         double step = 1e-5) {
    const auto& verts = surface.mesh.faces()[face];
    Eigen::Matrix3d jac;
    for (int b = 0; b < 3; ++b) {
        Eigen::VectorXd up = state.u, dn = state.u;
        up[verts[b]] += step;
        dn[verts[b]] -= step;
        auto ap = inner_angles(
            face_lengths(surface, state_from_u(surface, state.geometry, state.alpha, up), face),
            state.geometry);
        auto an = inner_angles(
            face_lengths(surface, state_from_u(surface, state.geometry, state.alpha, dn), face),
            state.geometry);
        for (int a = 0; a < 3; ++a) jac(a, b) = (ap[a] - an[a]) / (2.0 * step);
    }
    return jac;
}

}  // namespace dcs::testing
