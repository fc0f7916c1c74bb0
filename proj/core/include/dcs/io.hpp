#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dcs/energy.hpp"
#include "dcs/flow.hpp"
#include "dcs/mesh.hpp"
#include "dcs/metric.hpp"

namespace dcs {

/// Loads the weights sidecar (JSON): "epsilon" is an integer per vertex (or
/// one integer for all), "eta" is either one number for all edges or a list
/// of {"edge": [i, j], "value": x} covering every edge exactly once. A
/// missing or duplicated edge entry is an error.
WeightedSurface load_weights(const std::filesystem::path& path, Triangulation mesh);

/// State files carry geometry, alpha and the per-vertex u values; f is
/// derived on load. Doubles round-trip exactly.
void save_state(const std::filesystem::path& path, const ConformalState& state);
ConformalState load_state(const std::filesystem::path& path, const WeightedSurface& surface);

/// Overrides for load_state when the caller supplies geometry/alpha itself.
ConformalState load_state(const std::filesystem::path& path, const WeightedSurface& surface,
                          std::optional<Geometry> geometry, std::optional<double> alpha);

/// Target-curvature file: either a bare JSON array with one value per vertex
/// or an object {"values": [...]}.
Eigen::VectorXd load_target(const std::filesystem::path& path, int n_vertices);

/// Curvature report (per-vertex K and R_alpha, Gauss-Bonnet residual,
/// optional spectrum of the curvature Jacobian).
void save_curvature_report(const std::filesystem::path& path, const CurvatureReport& report,
                           const Eigen::VectorXd* jacobian_spectrum = nullptr);

/// Trace CSV: t, residual, conserved, num_degenerate_faces, u_1..u_N.
void save_trace_csv(const std::filesystem::path& path, const FlowTrace& trace);

/// Events CSV: t, face, kind.
void save_events_csv(const std::filesystem::path& path, const FlowTrace& trace);

/// Flow summary (status, final residual, fitted rate, conservation drift).
void save_flow_summary(const std::filesystem::path& path, const FlowTrace& trace,
                       const FlowSpec& spec);

/// Newton solver report.
void save_newton_report(const std::filesystem::path& path, const NewtonReport& report);

/// Formats a double with 17 significant digits (lossless round trip).
std::string format_double(double value);

}  // namespace dcs
