#pragma once

#include <stdexcept>
#include <string>

namespace dcs {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// File could not be parsed (OFF mesh, weights sidecar, state file).
struct ParseError : Error {
    using Error::Error;
};

/// Triangulation violates a closed-surface invariant.
struct MeshError : Error {
    using Error::Error;
};

/// An edge-length formula produced an invalid metric value.
struct MetricError : Error {
    MetricError(const std::string& what, int edge_i, int edge_j)
        : Error(what), i(edge_i), j(edge_j) {}
    int i = -1;
    int j = -1;
};

/// A face fails the triangle inequality where an admissible face is required.
struct InadmissibleFaceError : Error {
    InadmissibleFaceError(const std::string& what, int face_index)
        : Error(what), face(face_index) {}
    int face = -1;
};

/// A hyperbolic flow coordinate left its domain (essential singularity).
struct DomainExitError : Error {
    DomainExitError(const std::string& what, int vertex_index, double time = 0.0)
        : Error(what), vertex(vertex_index), t(time) {}
    int vertex = -1;
    double t = 0.0;
};

/// Mutually inconsistent run configuration.
struct ConfigError : Error {
    using Error::Error;
};

/// Newton iteration failed (max iterations, singular Hessian, dead line search).
struct SolveError : Error {
    using Error::Error;
};

/// Adaptive quadrature did not reach the requested tolerance.
struct QuadratureError : Error {
    QuadratureError(const std::string& what, int face_index)
        : Error(what), face(face_index) {}
    int face = -1;
};

}  // namespace dcs
