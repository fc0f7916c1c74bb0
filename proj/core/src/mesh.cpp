#include "dcs/mesh.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>

namespace dcs {

Geometry geometry_from_name(const std::string& name) {
    if (name == "euclidean" || name == "E") return Geometry::Euclidean;
    if (name == "hyperbolic" || name == "H") return Geometry::Hyperbolic;
    if (name == "spherical" || name == "S")
        throw ConfigError("spherical background geometry is not supported");
    throw ConfigError("unknown geometry '" + name + "' (expected euclidean or hyperbolic)");
}

Triangulation::Triangulation(int n_vertices, std::vector<std::array<int, 3>> faces)
    : n_vertices_(n_vertices), faces_(std::move(faces)) {
    if (n_vertices_ <= 0) throw MeshError("triangulation has no vertices");
    if (faces_.empty()) throw MeshError("triangulation has no faces");

    for (std::size_t f = 0; f < faces_.size(); ++f) {
        auto& [a, b, c] = faces_[f];
        if (a < 0 || b < 0 || c < 0 || a >= n_vertices_ || b >= n_vertices_ || c >= n_vertices_)
            throw MeshError("face " + std::to_string(f) + " has a vertex index out of range");
        if (a == b || b == c || a == c)
            throw MeshError("face " + std::to_string(f) + " has repeated vertices");
    }

    // Derive edges from faces and count incidences.
    std::map<std::array<int, 2>, std::vector<int>> incidence;
    for (std::size_t f = 0; f < faces_.size(); ++f) {
        const auto& [a, b, c] = faces_[f];
        for (auto [p, q] : {std::pair{a, b}, std::pair{b, c}, std::pair{a, c}}) {
            std::array<int, 2> e{std::min(p, q), std::max(p, q)};
            incidence[e].push_back(static_cast<int>(f));
        }
    }

    edges_.reserve(incidence.size());
    edge_faces_.reserve(incidence.size());
    for (const auto& [e, fs] : incidence) {
        if (fs.size() != 2)
            throw MeshError("edge {" + std::to_string(e[0]) + "," + std::to_string(e[1]) +
                            "} borders " + std::to_string(fs.size()) +
                            " faces; expected 2 (closed surface)");
        edges_.push_back(e);
        edge_faces_.push_back({fs[0], fs[1]});
    }

    // Row-compressed edge lookup keyed by the smaller endpoint.
    edge_lookup_start_.assign(n_vertices_ + 1, 0);
    for (const auto& e : edges_) edge_lookup_start_[e[0] + 1]++;
    std::partial_sum(edge_lookup_start_.begin(), edge_lookup_start_.end(),
                     edge_lookup_start_.begin());
    edge_lookup_.resize(edges_.size());
    {
        std::vector<int> cursor(edge_lookup_start_.begin(), edge_lookup_start_.end() - 1);
        for (std::size_t e = 0; e < edges_.size(); ++e)
            edge_lookup_[cursor[edges_[e][0]]++] = static_cast<int>(e);
    }

    vertex_faces_.assign(n_vertices_, {});
    for (std::size_t f = 0; f < faces_.size(); ++f)
        for (int v : faces_[f]) vertex_faces_[v].push_back(static_cast<int>(f));

    for (int v = 0; v < n_vertices_; ++v)
        if (vertex_faces_[v].empty())
            throw MeshError("vertex " + std::to_string(v) + " is isolated");

    face_edges_.resize(faces_.size());
    for (std::size_t f = 0; f < faces_.size(); ++f) {
        const auto& [a, b, c] = faces_[f];
        face_edges_[f] = {edge_index(b, c), edge_index(a, c), edge_index(a, b)};
    }

    // Connectivity of the face adjacency graph.
    std::vector<char> seen(faces_.size(), 0);
    std::queue<int> queue;
    queue.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!queue.empty()) {
        int f = queue.front();
        queue.pop();
        for (int e : face_edges_[f]) {
            for (int g : edge_faces_[e]) {
                if (!seen[g]) {
                    seen[g] = 1;
                    ++reached;
                    queue.push(g);
                }
            }
        }
    }
    if (reached != static_cast<int>(faces_.size()))
        throw MeshError("mesh is disconnected (" + std::to_string(reached) + " of " +
                        std::to_string(faces_.size()) + " faces reachable)");

    // Each vertex link must be a single cycle, otherwise the complex is
    // pinched and not a surface. Edge-face counts alone do not catch this,
    // and neither do link degrees: two disjoint cycles are 2-regular too,
    // so the link's connectivity is checked as well.
    for (int v = 0; v < n_vertices_; ++v) {
        const auto& inc = vertex_faces_[v];
        std::map<int, std::vector<int>> link;
        for (int f : inc) {
            std::array<int, 2> opposite{};
            int k = 0;
            for (int w : faces_[f])
                if (w != v) opposite[k++] = w;
            link[opposite[0]].push_back(opposite[1]);
            link[opposite[1]].push_back(opposite[0]);
        }
        for (const auto& [w, nbrs] : link)
            if (nbrs.size() != 2)
                throw MeshError("vertex " + std::to_string(v) + " has a pinched link");
        std::map<int, char> seen_link;
        std::queue<int> frontier;
        frontier.push(link.begin()->first);
        seen_link[link.begin()->first] = 1;
        while (!frontier.empty()) {
            int w = frontier.front();
            frontier.pop();
            for (int x : link[w]) {
                if (!seen_link.count(x)) {
                    seen_link[x] = 1;
                    frontier.push(x);
                }
            }
        }
        if (seen_link.size() != link.size())
            throw MeshError("vertex " + std::to_string(v) + " link is not a single cycle");
    }
}

int Triangulation::edge_index(int i, int j) const {
    if (i == j) return -1;
    int lo = std::min(i, j), hi = std::max(i, j);
    if (lo < 0 || hi >= n_vertices_) return -1;
    for (int k = edge_lookup_start_[lo]; k < edge_lookup_start_[lo + 1]; ++k) {
        int e = edge_lookup_[k];
        if (edges_[e][1] == hi) return e;
    }
    return -1;
}

namespace {

// Pulls the next token, skipping blank lines and '#' comments.
bool next_token(std::istream& in, std::string& tok) {
    while (in >> tok) {
        if (tok[0] == '#') {
            std::string rest;
            std::getline(in, rest);
            continue;
        }
        return true;
    }
    return false;
}

long parse_count(const std::string& tok, const char* what) {
    try {
        std::size_t pos = 0;
        long v = std::stol(tok, &pos);
        if (pos != tok.size() || v < 0) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ParseError(std::string("invalid ") + what + " '" + tok + "' in OFF header");
    }
}

}  // namespace

Triangulation load_mesh(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open mesh file '" + path.string() + "'");

    std::string tok;
    if (!next_token(in, tok) || tok != "OFF")
        throw ParseError("'" + path.string() + "' is not an OFF file (missing OFF header)");

    std::string nv_tok, nf_tok, ne_tok;
    if (!next_token(in, nv_tok) || !next_token(in, nf_tok) || !next_token(in, ne_tok))
        throw ParseError("truncated OFF header in '" + path.string() + "'");
    long nv = parse_count(nv_tok, "vertex count");
    long nf = parse_count(nf_tok, "face count");
    parse_count(ne_tok, "edge count");  // value unused, OFF allows 0

    for (long v = 0; v < 3 * nv; ++v) {
        if (!next_token(in, tok))
            throw ParseError("truncated vertex block in '" + path.string() + "'");
        // Coordinates are ignored; only the combinatorics matter.
    }

    std::vector<std::array<int, 3>> faces;
    faces.reserve(nf);
    for (long f = 0; f < nf; ++f) {
        if (!next_token(in, tok))
            throw ParseError("truncated face block in '" + path.string() + "'");
        long arity = parse_count(tok, "face arity");
        if (arity != 3)
            throw ParseError("non-triangle face (" + std::to_string(arity) +
                             " vertices) at face " + std::to_string(f) + " in '" +
                             path.string() + "'");
        std::array<int, 3> face{};
        for (int c = 0; c < 3; ++c) {
            if (!next_token(in, tok))
                throw ParseError("truncated face " + std::to_string(f) + " in '" +
                                 path.string() + "'");
            face[c] = static_cast<int>(parse_count(tok, "vertex index"));
        }
        faces.push_back(face);
    }

    return Triangulation(static_cast<int>(nv), std::move(faces));
}

WeightedSurface make_weighted_surface(Triangulation mesh, std::vector<int> epsilon,
                                      Eigen::VectorXd eta) {
    if (static_cast<int>(epsilon.size()) != mesh.num_vertices())
        throw ConfigError("epsilon has " + std::to_string(epsilon.size()) +
                          " entries; expected one per vertex (" +
                          std::to_string(mesh.num_vertices()) + ")");
    if (static_cast<int>(eta.size()) != mesh.num_edges())
        throw ConfigError("eta has " + std::to_string(eta.size()) +
                          " entries; expected one per edge (" +
                          std::to_string(mesh.num_edges()) + ")");
    for (std::size_t i = 0; i < epsilon.size(); ++i) {
        if (epsilon[i] == -1)
            throw ConfigError("epsilon = -1 at vertex " + std::to_string(i) +
                              " selects the spherical scheme, which is not supported");
        if (epsilon[i] != 0 && epsilon[i] != 1)
            throw ConfigError("epsilon must be 0 or 1; got " + std::to_string(epsilon[i]) +
                              " at vertex " + std::to_string(i));
    }
    return WeightedSurface{std::move(mesh), std::move(epsilon), std::move(eta)};
}

std::string StructureViolation::describe() const {
    std::ostringstream out;
    if (kind == 1) {
        out << "condition (1) fails on edge " << edge << ": eps_s*eps_t + eta = " << value
            << " (must be > 0)";
    } else {
        out << "condition (2) fails at corner " << vertex << " of face " << face
            << ": eps_q*eta_st + eta_qs*eta_qt = " << value << " (must be >= 0)";
    }
    return out.str();
}

std::vector<StructureViolation> check_structure_conditions(const WeightedSurface& surface) {
    std::vector<StructureViolation> violations;
    const auto& mesh = surface.mesh;

    for (int e = 0; e < mesh.num_edges(); ++e) {
        const auto [s, t] = mesh.edges()[e];
        double value = surface.epsilon[s] * surface.epsilon[t] + surface.eta[e];
        if (!(value > 0.0)) violations.push_back({1, e, -1, -1, value});
    }

    for (int f = 0; f < mesh.num_faces(); ++f) {
        const auto& face = mesh.faces()[f];
        for (int c = 0; c < 3; ++c) {
            int q = face[c];
            int s = face[(c + 1) % 3];
            int t = face[(c + 2) % 3];
            double eta_st = surface.eta[mesh.edge_index(s, t)];
            double eta_qs = surface.eta[mesh.edge_index(q, s)];
            double eta_qt = surface.eta[mesh.edge_index(q, t)];
            double value = surface.epsilon[q] * eta_st + eta_qs * eta_qt;
            if (value < 0.0) violations.push_back({2, -1, f, q, value});
        }
    }

    return violations;
}

}  // namespace dcs
