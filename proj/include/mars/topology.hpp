#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mars/geometry.hpp"
#include "mars/spline.hpp"

namespace mars {

using VertexId = std::size_t;
using EdgeId = std::size_t;

enum class VertexKind { Junction, NonSmooth, Basepoint };

const char* to_string(VertexKind kind);
VertexKind vertex_kind_from_string(const std::string& s);

struct Vertex {
    std::string name;
    Point2 position;
    VertexKind kind = VertexKind::Junction;
};

struct Edge {
    std::string name;
    VertexId source = 0;
    VertexId target = 0;
    bool is_loop() const { return source == target; }
};

// Undirected planar graph; vertex and edge ids are indices. The per-edge
// geometry lives in the scene, at the same index as the edge.
class InterfaceGraph {
public:
    VertexId add_vertex(Vertex v);
    EdgeId add_edge(Edge e);

    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const Vertex& vertex(VertexId v) const { return vertices_.at(v); }
    const Edge& edge(EdgeId e) const { return edges_.at(e); }
    std::size_t degree(VertexId v) const;
    std::vector<EdgeId> incident(VertexId v) const;

    friend bool operator==(const InterfaceGraph& a, const InterfaceGraph& b);

private:
    std::vector<Vertex> vertices_;
    std::vector<Edge> edges_;
};

// Smooth-connection pairs per vertex. A self-loop e at v appears as (e, e).
struct EdgePairing {
    std::vector<std::vector<std::pair<EdgeId, EdgeId>>> pairs;  // indexed by vertex

    explicit EdgePairing(std::size_t vertex_count = 0) : pairs(vertex_count) {}
    void add(VertexId v, EdgeId a, EdgeId b);
    bool contains(VertexId v, EdgeId a, EdgeId b) const;
    // Partner of e at v, or npos.
    EdgeId partner(VertexId v, EdgeId e) const;

    static constexpr EdgeId npos = static_cast<EdgeId>(-1);
    friend bool operator==(const EdgePairing&, const EdgePairing&) = default;
};

std::vector<std::string> validate_pairing(const InterfaceGraph& graph, const EdgePairing& pairing);

struct WalkStep {
    EdgeId edge = 0;
    bool forward = true;  // traversed source -> target
    friend bool operator==(const WalkStep&, const WalkStep&) = default;
};

enum class WalkKind { Circuit, Trail };

struct Walk {
    std::vector<WalkStep> steps;
    WalkKind kind = WalkKind::Trail;

    VertexId first_vertex(const InterfaceGraph& g) const;
    VertexId last_vertex(const InterfaceGraph& g) const;
    // Vertices at step boundaries: steps.size() + 1 entries.
    std::vector<VertexId> vertices(const InterfaceGraph& g) const;
    friend bool operator==(const Walk&, const Walk&) = default;
};

struct EdgePartition {
    std::vector<Walk> circuits;
    std::vector<Walk> trails;
};

// Splits the edge set into circuits and trails following the pairing.
// Seed edges are taken in ascending id order.
EdgePartition partition_edge_set(const InterfaceGraph& graph, const EdgePairing& pairing);
// As above with an explicit seed order (a permutation of edge ids).
EdgePartition partition_edge_set(const InterfaceGraph& graph, const EdgePairing& pairing,
                                 const std::vector<EdgeId>& seed_order);

enum class Orientation { Positive, Negative };

struct DirectedCycle {
    std::vector<WalkStep> steps;
    Orientation orientation = Orientation::Positive;
    friend bool operator==(const DirectedCycle&, const DirectedCycle&) = default;
};

struct PhaseComponent {
    std::vector<DirectedCycle> cycles;
    bool bounded() const;
    friend bool operator==(const PhaseComponent&, const PhaseComponent&) = default;
};

struct Phase {
    std::string name;
    std::vector<PhaseComponent> components;
    friend bool operator==(const Phase&, const Phase&) = default;
};

using CycleSet = std::vector<Phase>;

// Checks each component has one positive cycle plus holes, or holes only,
// and that each cycle closes in the graph.
std::vector<std::string> validate_cycles(const InterfaceGraph& graph, const CycleSet& cycles);

struct FittedSpline {
    std::shared_ptr<const CubicSpline> spline;
    Walk walk;
    // Knot indices of the walk's vertices, one per step start. Trails carry a
    // final entry equal to the last knot index.
    std::vector<std::size_t> characteristic;
};

using FittedSplineSet = std::vector<FittedSpline>;

// Concatenates per-edge marker sequences (ordered source -> target) along
// each walk and fits one spline per walk.
FittedSplineSet fit_spline_set(const InterfaceGraph& graph, const std::vector<Walk>& walks,
                               const std::vector<std::vector<Point2>>& edge_markers);

// Restriction of a fitted spline to the knot range of one graph edge.
struct SplineSegment {
    std::shared_ptr<const CubicSpline> spline;
    EdgeId edge = 0;
    std::size_t knot_begin = 0;
    std::size_t knot_end = 0;
    bool reversed = false;  // spline direction runs target -> source

    // Endpoints in the edge's own direction (source -> target).
    Point2 source_point() const;
    Point2 target_point() const;
    std::size_t marker_intervals() const { return knot_end - knot_begin; }
    double chord_length() const;
};

using SplineEdgeSet = std::vector<std::shared_ptr<const SplineSegment>>;

SplineEdgeSet cut_to_edges(const FittedSplineSet& fitted, const InterfaceGraph& graph);

// Largest distance between a segment endpoint and its graph vertex.
double vertex_mismatch(const SplineEdgeSet& edges, const InterfaceGraph& graph);

struct ChainLink {
    std::shared_ptr<const SplineSegment> segment;
    bool forward = true;  // traverse in the edge's source -> target direction

    Point2 start() const { return forward ? segment->source_point() : segment->target_point(); }
    Point2 end() const { return forward ? segment->target_point() : segment->source_point(); }
};

struct BoundaryChain {
    std::vector<ChainLink> links;
    Orientation orientation = Orientation::Positive;
    std::size_t component = 0;
};

struct PhaseBoundary {
    std::string name;
    std::vector<BoundaryChain> chains;
    // Components without a positive cycle (unbounded ones).
    std::vector<std::size_t> unbounded_components;
    std::size_t component_count = 0;
};

std::vector<PhaseBoundary> assemble_boundaries(const CycleSet& cycles, const SplineEdgeSet& edges,
                                               double tolerance = 1e-9);

}  // namespace mars
