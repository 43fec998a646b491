#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "mars/geometry.hpp"
#include "mars/topology.hpp"

namespace mars {

// Circular arc c + r (cos t, sin t) for t from theta0 to theta1 (either
// direction).
struct ArcGeometry {
    Point2 center;
    double radius = 0.0;
    double theta0 = 0.0;
    double theta1 = 0.0;
};

struct SegmentGeometry {
    Point2 a;
    Point2 b;
};

struct PolylineGeometry {
    std::vector<Point2> points;
    std::string file;  // where the samples came from, if anywhere
};

// Named closed-form curves. "rose": c + a sin(k t) (cos t, sin t) for t in
// [theta0, theta1], params {cx, cy, a, k, theta0, theta1}.
struct AnalyticGeometry {
    std::string curve;
    std::vector<double> params;
};

using EdgeGeometry = std::variant<ArcGeometry, SegmentGeometry, PolylineGeometry, AnalyticGeometry>;

// Point at normalized parameter u in [0, 1] (not arclength for analytic curves).
Point2 geometry_point(const EdgeGeometry& g, double u);
double geometry_length(const EdgeGeometry& g);
// n + 1 points at (nearly) equal arclength spacing, endpoints exact.
std::vector<Point2> sample_equal_arclength(const EdgeGeometry& g, std::size_t n);
// Smallest radius of curvature along the curve (infinity for lines).
double geometry_min_radius(const EdgeGeometry& g);

struct Scene {
    std::string name;
    InterfaceGraph graph;
    EdgePairing pairing;
    CycleSet cycles;
    std::vector<EdgeGeometry> geometry;  // indexed by edge id
    double marker_spacing = 0.0;         // optional default, 0 = unset
};

// Pairing, cycle and geometry-endpoint checks; empty when consistent.
std::vector<std::string> validate_scene(const Scene& scene);

Scene quartered_disk();
Scene five_phase_disk();
Scene three_phase_disk();
Scene classic_two_phase_circle();
Scene mixed_junctions();

std::vector<std::string> builtin_scene_names();
Scene builtin_scene(const std::string& name);

// JSON scene files; see docs/scene_format.md.
Scene scene_from_json_text(const std::string& text, const std::string& base_dir = ".");
std::string scene_to_json_text(const Scene& scene);
Scene load_scene_file(const std::string& path);
// Built-in name or path to a scene file.
Scene resolve_scene(const std::string& name_or_path);

// Per-edge initial markers, ordered source -> target, with chord spacing at
// most spacing(edge) and at least 3 intervals per edge.
std::vector<std::vector<Point2>> initial_markers(const Scene& scene,
                                                 const std::function<double(EdgeId)>& spacing);

}  // namespace mars
