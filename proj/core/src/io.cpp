#include "dcs/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include <json.hpp>

namespace dcs {

using nlohmann::json;

namespace {

json read_json(const std::filesystem::path& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw ParseError(std::string("cannot open ") + what + " '" + path.string() + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON in ") + what + " '" + path.string() +
                         "': " + e.what());
    }
    return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw ParseError("failed writing '" + path.string() + "'");
}

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
}

Eigen::VectorXd json_to_vector(const json& arr, const char* what, int expected = -1) {
    if (!arr.is_array())
        throw ParseError(std::string(what) + " must be an array");
    Eigen::VectorXd v(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) {
        if (!arr[i].is_number())
            throw ParseError(std::string(what) + "[" + std::to_string(i) + "] is not a number");
        v[i] = arr[i].get<double>();
    }
    if (expected >= 0 && v.size() != expected)
        throw ParseError(std::string(what) + " has " + std::to_string(v.size()) +
                         " entries; expected " + std::to_string(expected));
    return v;
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

WeightedSurface load_weights(const std::filesystem::path& path, Triangulation mesh) {
    json j = read_json(path, "weights file");

    if (!j.contains("epsilon")) throw ParseError("weights file is missing 'epsilon'");
    if (!j.contains("eta")) throw ParseError("weights file is missing 'eta'");

    std::vector<int> epsilon;
    const json& je = j["epsilon"];
    if (je.is_number_integer()) {
        epsilon.assign(mesh.num_vertices(), je.get<int>());
    } else if (je.is_array()) {
        if (static_cast<int>(je.size()) != mesh.num_vertices())
            throw ParseError("'epsilon' has " + std::to_string(je.size()) +
                             " entries; expected one per vertex (" +
                             std::to_string(mesh.num_vertices()) + ")");
        for (const auto& x : je) {
            if (!x.is_number_integer()) throw ParseError("'epsilon' entries must be integers");
            epsilon.push_back(x.get<int>());
        }
    } else {
        throw ParseError("'epsilon' must be an integer or an array of integers");
    }

    Eigen::VectorXd eta(mesh.num_edges());
    const json& jn = j["eta"];
    if (jn.is_number()) {
        eta.setConstant(jn.get<double>());
    } else if (jn.is_array()) {
        std::vector<char> seen(mesh.num_edges(), 0);
        for (const auto& entry : jn) {
            if (!entry.is_object() || !entry.contains("edge") || !entry.contains("value"))
                throw ParseError("each 'eta' entry must be {\"edge\": [i,j], \"value\": x}");
            const auto& je2 = entry["edge"];
            if (!je2.is_array() || je2.size() != 2)
                throw ParseError("'eta' edge must be a pair [i,j]");
            int i = je2[0].get<int>(), jdx = je2[1].get<int>();
            int e = mesh.edge_index(i, jdx);
            if (e < 0)
                throw ParseError("'eta' names edge {" + std::to_string(i) + "," +
                                 std::to_string(jdx) + "} which is not in the mesh");
            if (seen[e])
                throw ParseError("duplicate 'eta' entry for edge {" + std::to_string(i) + "," +
                                 std::to_string(jdx) + "}");
            seen[e] = 1;
            eta[e] = entry["value"].get<double>();
        }
        for (int e = 0; e < mesh.num_edges(); ++e) {
            if (!seen[e]) {
                const auto [a, b] = mesh.edges()[e];
                throw ParseError("'eta' is missing edge {" + std::to_string(a) + "," +
                                 std::to_string(b) + "}; every edge needs an explicit value");
            }
        }
    } else {
        throw ParseError("'eta' must be a number or an array of edge entries");
    }

    return make_weighted_surface(std::move(mesh), std::move(epsilon), std::move(eta));
}

void save_state(const std::filesystem::path& path, const ConformalState& state) {
    json j;
    j["geometry"] = geometry_name(state.geometry);
    j["alpha"] = state.alpha;
    j["u"] = vector_to_json(state.u);
    j["f"] = vector_to_json(state.f);
    write_text(path, j.dump(2) + "\n");
}

ConformalState load_state(const std::filesystem::path& path, const WeightedSurface& surface,
                          std::optional<Geometry> geometry, std::optional<double> alpha) {
    json j = read_json(path, "state file");
    Geometry g = geometry.value_or(Geometry::Euclidean);
    if (!geometry) {
        if (!j.contains("geometry")) throw ParseError("state file is missing 'geometry'");
        g = geometry_from_name(j["geometry"].get<std::string>());
    }
    double a = alpha.value_or(0.0);
    if (!alpha) {
        if (!j.contains("alpha")) throw ParseError("state file is missing 'alpha'");
        a = j["alpha"].get<double>();
    }
    if (j.contains("u"))
        return state_from_u(surface, g, a,
                            json_to_vector(j["u"], "'u'", surface.num_vertices()));
    if (j.contains("f"))
        return state_from_f(surface, g, a,
                            json_to_vector(j["f"], "'f'", surface.num_vertices()));
    throw ParseError("state file has neither 'u' nor 'f'");
}

ConformalState load_state(const std::filesystem::path& path, const WeightedSurface& surface) {
    return load_state(path, surface, std::nullopt, std::nullopt);
}

Eigen::VectorXd load_target(const std::filesystem::path& path, int n_vertices) {
    json j = read_json(path, "target file");
    if (j.is_array()) return json_to_vector(j, "target", n_vertices);
    if (j.is_object() && j.contains("values"))
        return json_to_vector(j["values"], "'values'", n_vertices);
    throw ParseError("target file must be a JSON array or {\"values\": [...]}");
}

void save_curvature_report(const std::filesystem::path& path, const CurvatureReport& report,
                           const Eigen::VectorXd* jacobian_spectrum) {
    json j;
    j["K"] = vector_to_json(report.K);
    j["R_alpha"] = vector_to_json(report.R_alpha);
    j["gauss_bonnet_residual"] = report.gauss_bonnet_residual;
    j["total_area"] = report.total_area;
    j["extended_faces"] = json::array();
    for (std::size_t f = 0; f < report.face_extended.size(); ++f)
        if (report.face_extended[f]) j["extended_faces"].push_back(f);
    if (jacobian_spectrum) j["jacobian_spectrum"] = vector_to_json(*jacobian_spectrum);
    write_text(path, j.dump(2) + "\n");
}

void save_trace_csv(const std::filesystem::path& path, const FlowTrace& trace) {
    std::string out;
    out.reserve(trace.samples.size() * 64);
    out += "t,residual,conserved,num_degenerate_faces";
    if (!trace.samples.empty())
        for (int v = 0; v < trace.samples.front().u.size(); ++v)
            out += ",u_" + std::to_string(v + 1);
    out += "\n";
    for (const auto& s : trace.samples) {
        out += format_double(s.t);
        out += ",";
        out += format_double(s.residual);
        out += ",";
        out += format_double(s.conserved);
        out += ",";
        out += std::to_string(s.degenerate_faces.size());
        for (int v = 0; v < s.u.size(); ++v) {
            out += ",";
            out += format_double(s.u[v]);
        }
        out += "\n";
    }
    write_text(path, out);
}

void save_events_csv(const std::filesystem::path& path, const FlowTrace& trace) {
    std::string out = "t,face,kind\n";
    for (const auto& e : trace.events) {
        out += format_double(e.t);
        out += ",";
        out += std::to_string(e.face);
        out += ",";
        out += flow_event_kind_name(e.kind);
        out += "\n";
    }
    write_text(path, out);
}

void save_flow_summary(const std::filesystem::path& path, const FlowTrace& trace,
                       const FlowSpec& spec) {
    json j;
    j["kind"] = flow_kind_name(spec.kind);
    j["extended"] = spec.extended;
    j["alpha"] = spec.alpha;
    j["geometry"] = geometry_name(spec.geometry);
    j["converged"] = trace.status == FlowStatus::Converged;
    j["steps"] = trace.samples.size() - 1;
    j["t_final"] = trace.final_state().t;
    j["final_residual"] = trace.final_state().residual;
    j["conserved_drift"] = trace.conserved_drift;
    j["rate"] = trace.rate;
    j["rate_r2"] = trace.rate_r2;
    j["num_events"] = trace.events.size();
    if (spec.geometry == Geometry::Hyperbolic &&
        std::isfinite(trace.min_margin_to_domain))
        j["max_u_at_packing_vertices"] = trace.min_margin_to_domain;
    write_text(path, j.dump(2) + "\n");
}

void save_newton_report(const std::filesystem::path& path, const NewtonReport& report) {
    json j;
    j["iterations"] = report.iterations;
    j["residual"] = report.residual;
    j["gauge"] = gauge_name(report.gauge);
    if (report.gauge != Gauge::None) j["gauge_value"] = report.gauge_value;
    j["uniqueness_warning"] = report.uniqueness_warning;
    write_text(path, j.dump(2) + "\n");
}

}  // namespace dcs
