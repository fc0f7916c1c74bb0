#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dcs/error.hpp"

namespace dcs {

/// Background geometry of the polyhedral metric. Spherical weights are
/// rejected at load time; only these two are supported.
enum class Geometry { Euclidean, Hyperbolic };

/// Curvature sign of the background: 0 (Euclidean) or -1 (hyperbolic).
inline constexpr int geometry_lambda(Geometry g) {
    return g == Geometry::Hyperbolic ? -1 : 0;
}

inline constexpr const char* geometry_name(Geometry g) {
    return g == Geometry::Hyperbolic ? "hyperbolic" : "euclidean";
}

Geometry geometry_from_name(const std::string& name);

/// Combinatorics of a triangulated closed surface. Vertex positions are
/// irrelevant; only the face list matters. Immutable after construction.
class Triangulation {
public:
    Triangulation() = default;

    /// Validates and indexes a face list. Throws MeshError if the complex is
    /// not a connected closed triangulated surface.
    Triangulation(int n_vertices, std::vector<std::array<int, 3>> faces);

    int num_vertices() const { return n_vertices_; }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_faces() const { return static_cast<int>(faces_.size()); }

    int euler_characteristic() const {
        return num_vertices() - num_edges() + num_faces();
    }

    const std::vector<std::array<int, 3>>& faces() const { return faces_; }

    /// Edges as canonical (min,max) pairs in lexicographic order.
    const std::vector<std::array<int, 2>>& edges() const { return edges_; }

    /// The two faces incident to each edge.
    const std::vector<std::array<int, 2>>& edge_faces() const { return edge_faces_; }

    /// Faces incident to each vertex.
    const std::vector<std::vector<int>>& vertex_faces() const { return vertex_faces_; }

    /// face_edges()[f][c] is the index of the edge opposite corner c of face f.
    const std::vector<std::array<int, 3>>& face_edges() const { return face_edges_; }

    /// Index of edge {i,j}, or -1 if absent.
    int edge_index(int i, int j) const;

    int vertex_degree(int v) const { return static_cast<int>(vertex_faces_[v].size()); }

private:
    int n_vertices_ = 0;
    std::vector<std::array<int, 3>> faces_;
    std::vector<std::array<int, 2>> edges_;
    std::vector<std::array<int, 2>> edge_faces_;
    std::vector<std::vector<int>> vertex_faces_;
    std::vector<std::array<int, 3>> face_edges_;
    std::vector<int> edge_lookup_;  // row-compressed adjacency, see .cpp
    std::vector<int> edge_lookup_start_;
};

/// Parses an ASCII OFF triangle mesh. Vertex coordinates are read and
/// discarded. Throws ParseError for malformed input and MeshError when the
/// face list is not a connected closed surface.
Triangulation load_mesh(const std::filesystem::path& path);

/// A triangulation together with the per-vertex scheme coefficient epsilon
/// (0 = vertex scaling, 1 = circle packing type) and the per-edge discrete
/// conformal structure coefficient eta.
struct WeightedSurface {
    Triangulation mesh;
    std::vector<int> epsilon;  // one of {0,1} per vertex
    Eigen::VectorXd eta;       // one value per edge, canonical edge order

    int num_vertices() const { return mesh.num_vertices(); }
    int num_edges() const { return mesh.num_edges(); }
    int num_faces() const { return mesh.num_faces(); }
};

/// Validates sizes and epsilon values ({0,1}; -1 marks the unsupported
/// spherical scheme and is rejected).
WeightedSurface make_weighted_surface(Triangulation mesh, std::vector<int> epsilon,
                                      Eigen::VectorXd eta);

/// One failed structure-condition check. kind 1: eps_s*eps_t + eta_st <= 0 on
/// edge `edge`. kind 2: eps_q*eta_st + eta_qs*eta_qt < 0 at corner `vertex`
/// of face `face`.
struct StructureViolation {
    int kind = 0;
    int edge = -1;
    int face = -1;
    int vertex = -1;
    double value = 0.0;

    std::string describe() const;
};

/// Checks the two structure conditions on every edge and every face corner.
/// Empty result means the surface satisfies both.
std::vector<StructureViolation> check_structure_conditions(const WeightedSurface& surface);

}  // namespace dcs
