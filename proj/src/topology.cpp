#include "mars/topology.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace mars {

const char* to_string(VertexKind kind) {
    switch (kind) {
        case VertexKind::Junction: return "junction";
        case VertexKind::NonSmooth: return "nonsmooth";
        case VertexKind::Basepoint: return "basepoint";
    }
    return "junction";
}

VertexKind vertex_kind_from_string(const std::string& s) {
    if (s == "junction") return VertexKind::Junction;
    if (s == "nonsmooth") return VertexKind::NonSmooth;
    if (s == "basepoint") return VertexKind::Basepoint;
    throw ConfigError("unknown vertex kind '" + s + "'");
}

VertexId InterfaceGraph::add_vertex(Vertex v) {
    vertices_.push_back(std::move(v));
    return vertices_.size() - 1;
}

EdgeId InterfaceGraph::add_edge(Edge e) {
    if (e.source >= vertices_.size() || e.target >= vertices_.size()) {
        throw PreconditionError("add_edge: unknown endpoint vertex for edge '" + e.name + "'");
    }
    edges_.push_back(std::move(e));
    return edges_.size() - 1;
}

std::size_t InterfaceGraph::degree(VertexId v) const {
    std::size_t d = 0;
    for (const auto& e : edges_) d += (e.source == v) + (e.target == v);
    return d;
}

std::vector<EdgeId> InterfaceGraph::incident(VertexId v) const {
    std::vector<EdgeId> out;
    for (EdgeId e = 0; e < edges_.size(); ++e) {
        if (edges_[e].source == v || edges_[e].target == v) out.push_back(e);
    }
    return out;
}

bool operator==(const InterfaceGraph& a, const InterfaceGraph& b) {
    if (a.vertices_.size() != b.vertices_.size() || a.edges_.size() != b.edges_.size()) return false;
    for (std::size_t i = 0; i < a.vertices_.size(); ++i) {
        const auto& u = a.vertices_[i];
        const auto& v = b.vertices_[i];
        if (u.name != v.name || !(u.position == v.position) || u.kind != v.kind) return false;
    }
    for (std::size_t i = 0; i < a.edges_.size(); ++i) {
        const auto& e = a.edges_[i];
        const auto& f = b.edges_[i];
        if (e.name != f.name || e.source != f.source || e.target != f.target) return false;
    }
    return true;
}

void EdgePairing::add(VertexId v, EdgeId a, EdgeId b) {
    if (v >= pairs.size()) pairs.resize(v + 1);
    pairs[v].emplace_back(a, b);
}

bool EdgePairing::contains(VertexId v, EdgeId a, EdgeId b) const {
    if (v >= pairs.size()) return false;
    for (const auto& [p, q] : pairs[v]) {
        if ((p == a && q == b) || (p == b && q == a)) return true;
    }
    return false;
}

EdgeId EdgePairing::partner(VertexId v, EdgeId e) const {
    if (v >= pairs.size()) return npos;
    for (const auto& [p, q] : pairs[v]) {
        if (p == e) return q;
        if (q == e) return p;
    }
    return npos;
}

std::vector<std::string> validate_pairing(const InterfaceGraph& graph, const EdgePairing& pairing) {
    std::vector<std::string> issues;
    const auto& edges = graph.edges();
    if (pairing.pairs.size() > graph.vertices().size()) {
        issues.push_back("pairing lists more vertices than the graph has");
    }
    for (VertexId v = 0; v < graph.vertices().size(); ++v) {
        const std::string vname = graph.vertex(v).name;
        std::vector<int> count(edges.size(), 0);
        const auto& ps = v < pairing.pairs.size() ? pairing.pairs[v]
                                                  : std::vector<std::pair<EdgeId, EdgeId>>{};
        for (const auto& [a, b] : ps) {
            if (a >= edges.size() || b >= edges.size()) {
                issues.push_back("vertex " + vname + ": pair references unknown edge");
                continue;
            }
            for (EdgeId e : {a, b}) {
                if (edges[e].source != v && edges[e].target != v) {
                    issues.push_back("vertex " + vname + ": edge " + edges[e].name +
                                     " is not incident");
                }
            }
            if (a == b) {
                if (!edges[a].is_loop()) {
                    issues.push_back("vertex " + vname + ": edge " + edges[a].name +
                                     " paired with itself but is not a self-loop");
                }
                ++count[a];
            } else {
                if (edges[a].is_loop() || edges[b].is_loop()) {
                    issues.push_back("vertex " + vname + ": self-loop paired with a different edge");
                }
                ++count[a];
                ++count[b];
            }
        }
        for (EdgeId e = 0; e < edges.size(); ++e) {
            if (count[e] > 1) {
                issues.push_back("vertex " + vname + ": edge " + edges[e].name +
                                 " appears in more than one pair");
            }
            if (edges[e].is_loop() && edges[e].source == v && count[e] == 0) {
                issues.push_back("vertex " + vname + ": self-loop " + edges[e].name +
                                 " missing its (e,e) pair");
            }
        }
    }
    return issues;
}

namespace {

VertexId step_start(const InterfaceGraph& g, const WalkStep& s) {
    const auto& e = g.edge(s.edge);
    return s.forward ? e.source : e.target;
}

VertexId step_end(const InterfaceGraph& g, const WalkStep& s) {
    const auto& e = g.edge(s.edge);
    return s.forward ? e.target : e.source;
}

}  // namespace

VertexId Walk::first_vertex(const InterfaceGraph& g) const { return step_start(g, steps.front()); }
VertexId Walk::last_vertex(const InterfaceGraph& g) const { return step_end(g, steps.back()); }

std::vector<VertexId> Walk::vertices(const InterfaceGraph& g) const {
    std::vector<VertexId> out;
    out.push_back(first_vertex(g));
    for (const auto& s : steps) out.push_back(step_end(g, s));
    return out;
}

EdgePartition partition_edge_set(const InterfaceGraph& graph, const EdgePairing& pairing) {
    std::vector<EdgeId> order(graph.edges().size());
    std::iota(order.begin(), order.end(), EdgeId{0});
    return partition_edge_set(graph, pairing, order);
}

EdgePartition partition_edge_set(const InterfaceGraph& graph, const EdgePairing& pairing,
                                 const std::vector<EdgeId>& seed_order) {
    const auto& edges = graph.edges();
    std::vector<bool> used(edges.size(), false);
    EdgePartition out;
    for (EdgeId seed : seed_order) {
        if (used[seed]) continue;
        used[seed] = true;
        std::vector<WalkStep> steps{{seed, true}};
        VertexId front = edges[seed].source;
        VertexId back = edges[seed].target;
        // Grow to the right from the last vertex.
        while (true) {
            const EdgeId next = pairing.partner(back, steps.back().edge);
            if (next == EdgePairing::npos || used[next]) break;
            used[next] = true;
            const bool fwd = edges[next].source == back;
            steps.push_back({next, fwd});
            back = fwd ? edges[next].target : edges[next].source;
        }
        // Then to the left from the first vertex.
        while (true) {
            const EdgeId prev = pairing.partner(front, steps.front().edge);
            if (prev == EdgePairing::npos || used[prev]) break;
            used[prev] = true;
            const bool fwd = edges[prev].target == front;
            steps.insert(steps.begin(), WalkStep{prev, fwd});
            front = fwd ? edges[prev].source : edges[prev].target;
        }
        Walk w;
        w.steps = std::move(steps);
        const bool closes =
            front == back && pairing.contains(front, w.steps.front().edge, w.steps.back().edge);
        w.kind = closes ? WalkKind::Circuit : WalkKind::Trail;
        (closes ? out.circuits : out.trails).push_back(std::move(w));
    }
    return out;
}

bool PhaseComponent::bounded() const {
    return std::any_of(cycles.begin(), cycles.end(),
                       [](const DirectedCycle& c) { return c.orientation == Orientation::Positive; });
}

std::vector<std::string> validate_cycles(const InterfaceGraph& graph, const CycleSet& cycles) {
    std::vector<std::string> issues;
    for (const auto& phase : cycles) {
        for (std::size_t c = 0; c < phase.components.size(); ++c) {
            const auto& comp = phase.components[c];
            const std::string where = "phase " + phase.name + " component " + std::to_string(c);
            const auto positives = std::count_if(comp.cycles.begin(), comp.cycles.end(),
                [](const DirectedCycle& d) { return d.orientation == Orientation::Positive; });
            if (positives > 1) issues.push_back(where + ": more than one positive cycle");
            if (comp.cycles.empty()) issues.push_back(where + ": no cycles");
            for (std::size_t k = 0; k < comp.cycles.size(); ++k) {
                const auto& steps = comp.cycles[k].steps;
                if (steps.empty()) {
                    issues.push_back(where + " cycle " + std::to_string(k) + ": empty");
                    continue;
                }
                for (std::size_t s = 0; s < steps.size(); ++s) {
                    if (steps[s].edge >= graph.edges().size()) {
                        issues.push_back(where + ": unknown edge");
                        break;
                    }
                }
                for (std::size_t s = 0; s < steps.size(); ++s) {
                    const auto& a = steps[s];
                    const auto& b = steps[(s + 1) % steps.size()];
                    if (a.edge >= graph.edges().size() || b.edge >= graph.edges().size()) break;
                    if (step_end(graph, a) != step_start(graph, b)) {
                        issues.push_back(where + " cycle " + std::to_string(k) + ": does not close");
                        break;
                    }
                }
            }
        }
    }
    return issues;
}

FittedSplineSet fit_spline_set(const InterfaceGraph& graph, const std::vector<Walk>& walks,
                               const std::vector<std::vector<Point2>>& edge_markers) {
    constexpr double tol = 1e-9;
    FittedSplineSet out;
    for (const auto& walk : walks) {
        std::vector<Point2> pts;
        std::vector<std::size_t> chi;
        for (std::size_t s = 0; s < walk.steps.size(); ++s) {
            const auto& step = walk.steps[s];
            std::vector<Point2> m = edge_markers.at(step.edge);
            if (m.size() < 2) throw PreconditionError("fit_spline_set: edge with fewer than 2 markers");
            if (!step.forward) std::reverse(m.begin(), m.end());
            const Point2 vs = graph.vertex(step_start(graph, step)).position;
            const Point2 ve = graph.vertex(step_end(graph, step)).position;
            if (dist(m.front(), vs) > tol || dist(m.back(), ve) > tol) {
                throw PreconditionError("fit_spline_set: markers of edge " +
                                        graph.edge(step.edge).name +
                                        " do not start/end at its vertices");
            }
            // Vertex markers take the graph coordinates bit for bit so that
            // every spline through a junction agrees on it.
            m.front() = vs;
            m.back() = ve;
            if (s == 0) {
                pts.push_back(m.front());
            }
            chi.push_back(pts.size() - 1);
            pts.insert(pts.end(), m.begin() + 1, m.end());
        }
        const bool closed = walk.kind == WalkKind::Circuit;
        if (closed) {
            if (!(pts.back() == pts.front())) {
                throw PreconditionError("fit_spline_set: circuit does not close");
            }
        } else {
            chi.push_back(pts.size() - 1);
        }
        BreakpointSequence seq(std::move(pts), closed);
        FittedSpline f;
        f.spline = std::make_shared<const CubicSpline>(
            fit(seq, closed ? SplineKind::Periodic : SplineKind::NotAKnot));
        f.walk = walk;
        f.characteristic = std::move(chi);
        out.push_back(std::move(f));
    }
    return out;
}

Point2 SplineSegment::source_point() const {
    return spline->values()[reversed ? knot_end : knot_begin];
}

Point2 SplineSegment::target_point() const {
    return spline->values()[reversed ? knot_begin : knot_end];
}

double SplineSegment::chord_length() const {
    return spline->knots()[knot_end] - spline->knots()[knot_begin];
}

SplineEdgeSet cut_to_edges(const FittedSplineSet& fitted, const InterfaceGraph& graph) {
    SplineEdgeSet out(graph.edges().size());
    for (const auto& f : fitted) {
        const std::size_t n = f.spline->intervals();
        const std::size_t steps = f.walk.steps.size();
        const std::size_t expected = f.walk.kind == WalkKind::Circuit ? steps : steps + 1;
        if (f.characteristic.size() != expected) {
            throw AssemblyError("cut_to_edges: walk vertices not all found among breakpoints");
        }
        for (std::size_t i = 0; i < steps; ++i) {
            auto seg = std::make_shared<SplineSegment>();
            seg->spline = f.spline;
            seg->edge = f.walk.steps[i].edge;
            seg->knot_begin = f.characteristic[i];
            seg->knot_end = i + 1 < f.characteristic.size() ? f.characteristic[i + 1] : n;
            seg->reversed = !f.walk.steps[i].forward;
            if (seg->knot_end <= seg->knot_begin || seg->knot_end > n) {
                throw AssemblyError("cut_to_edges: invalid knot range for edge " +
                                    graph.edge(seg->edge).name);
            }
            if (out.at(seg->edge)) {
                throw AssemblyError("cut_to_edges: edge " + graph.edge(seg->edge).name +
                                    " realized twice");
            }
            out[seg->edge] = std::move(seg);
        }
    }
    for (EdgeId e = 0; e < out.size(); ++e) {
        if (!out[e]) throw AssemblyError("cut_to_edges: edge " + graph.edge(e).name + " not covered");
    }
    return out;
}

double vertex_mismatch(const SplineEdgeSet& edges, const InterfaceGraph& graph) {
    double worst = 0.0;
    for (const auto& seg : edges) {
        const auto& e = graph.edge(seg->edge);
        worst = std::max(worst, dist(seg->source_point(), graph.vertex(e.source).position));
        worst = std::max(worst, dist(seg->target_point(), graph.vertex(e.target).position));
    }
    return worst;
}

std::vector<PhaseBoundary> assemble_boundaries(const CycleSet& cycles, const SplineEdgeSet& edges,
                                               double tolerance) {
    std::vector<PhaseBoundary> out;
    for (const auto& phase : cycles) {
        PhaseBoundary pb;
        pb.name = phase.name;
        pb.component_count = phase.components.size();
        for (std::size_t c = 0; c < phase.components.size(); ++c) {
            const auto& comp = phase.components[c];
            if (!comp.bounded()) pb.unbounded_components.push_back(c);
            for (std::size_t k = 0; k < comp.cycles.size(); ++k) {
                const auto& cyc = comp.cycles[k];
                BoundaryChain chain;
                chain.orientation = cyc.orientation;
                chain.component = c;
                for (const auto& s : cyc.steps) {
                    if (s.edge >= edges.size() || !edges[s.edge]) {
                        throw AssemblyError("assemble_boundaries: unknown edge in phase " + phase.name);
                    }
                    chain.links.push_back({edges[s.edge], s.forward});
                }
                for (std::size_t i = 0; i < chain.links.size(); ++i) {
                    const auto& a = chain.links[i];
                    const auto& b = chain.links[(i + 1) % chain.links.size()];
                    if (dist(a.end(), b.start()) > tolerance) {
                        std::ostringstream msg;
                        msg << "assemble_boundaries: broken chain in phase " << phase.name
                            << " component " << c << " cycle " << k << " (gap "
                            << dist(a.end(), b.start()) << ")";
                        throw AssemblyError(msg.str());
                    }
                }
                pb.chains.push_back(std::move(chain));
            }
        }
        out.push_back(std::move(pb));
    }
    return out;
}

}  // namespace mars
