#include "mars/scene.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace mars {

namespace {

constexpr double kPi = std::numbers::pi;

Point2 arc_point(const ArcGeometry& a, double t) {
    return {a.center.x + a.radius * std::cos(t), a.center.y + a.radius * std::sin(t)};
}

struct RoseParams {
    Point2 c;
    double a, k, t0, t1;
};

RoseParams rose_params(const AnalyticGeometry& g) {
    if (g.curve != "rose") throw ConfigError("unsupported analytic curve '" + g.curve + "'");
    if (g.params.size() != 6) throw ConfigError("rose curve needs 6 parameters");
    const auto& p = g.params;
    return {{p[0], p[1]}, p[2], p[3], p[4], p[5]};
}

Point2 rose_point(const RoseParams& r, double t) {
    const double rad = r.a * std::sin(r.k * t);
    return {r.c.x + rad * std::cos(t), r.c.y + rad * std::sin(t)};
}

constexpr std::size_t kAnalyticTable = 1 << 15;

// Cumulative chord length of a densely sampled analytic curve.
std::vector<double> analytic_length_table(const AnalyticGeometry& g) {
    std::vector<double> s(kAnalyticTable + 1, 0.0);
    Point2 prev = geometry_point(g, 0.0);
    for (std::size_t i = 1; i <= kAnalyticTable; ++i) {
        const Point2 p = geometry_point(g, static_cast<double>(i) / kAnalyticTable);
        s[i] = s[i - 1] + dist(p, prev);
        prev = p;
    }
    return s;
}

std::vector<double> polyline_lengths(const PolylineGeometry& g) {
    std::vector<double> s(g.points.size(), 0.0);
    for (std::size_t i = 1; i < g.points.size(); ++i) s[i] = s[i - 1] + dist(g.points[i], g.points[i - 1]);
    return s;
}

// Parameter u at which the cumulative table reaches target.
double invert_table(const std::vector<double>& s, double target) {
    const auto it = std::lower_bound(s.begin(), s.end(), target);
    if (it == s.begin()) return 0.0;
    if (it == s.end()) return 1.0;
    const std::size_t i = static_cast<std::size_t>(it - s.begin());
    const double w = (target - s[i - 1]) / (s[i] - s[i - 1]);
    return (static_cast<double>(i - 1) + w) / static_cast<double>(s.size() - 1);
}

}  // namespace

Point2 geometry_point(const EdgeGeometry& g, double u) {
    return std::visit(
        [u](const auto& geo) -> Point2 {
            using T = std::decay_t<decltype(geo)>;
            if constexpr (std::is_same_v<T, ArcGeometry>) {
                if (u == 1.0) return arc_point(geo, geo.theta1);
                return arc_point(geo, geo.theta0 + u * (geo.theta1 - geo.theta0));
            } else if constexpr (std::is_same_v<T, SegmentGeometry>) {
                if (u == 1.0) return geo.b;
                return geo.a + u * (geo.b - geo.a);
            } else if constexpr (std::is_same_v<T, PolylineGeometry>) {
                const auto s = polyline_lengths(geo);
                const double target = u * s.back();
                const auto it = std::lower_bound(s.begin(), s.end(), target);
                if (it == s.begin()) return geo.points.front();
                if (it == s.end() || u >= 1.0) return geo.points.back();
                const std::size_t i = static_cast<std::size_t>(it - s.begin());
                const double w = (target - s[i - 1]) / (s[i] - s[i - 1]);
                return geo.points[i - 1] + w * (geo.points[i] - geo.points[i - 1]);
            } else {
                const RoseParams r = rose_params(geo);
                if (u == 1.0) return rose_point(r, r.t1);
                return rose_point(r, r.t0 + u * (r.t1 - r.t0));
            }
        },
        g);
}

double geometry_length(const EdgeGeometry& g) {
    if (const auto* a = std::get_if<ArcGeometry>(&g)) return a->radius * std::abs(a->theta1 - a->theta0);
    if (const auto* s = std::get_if<SegmentGeometry>(&g)) return dist(s->a, s->b);
    if (const auto* p = std::get_if<PolylineGeometry>(&g)) return polyline_lengths(*p).back();
    return analytic_length_table(std::get<AnalyticGeometry>(g)).back();
}

std::vector<Point2> sample_equal_arclength(const EdgeGeometry& g, std::size_t n) {
    std::vector<Point2> out(n + 1);
    if (std::holds_alternative<AnalyticGeometry>(g)) {
        const auto s = analytic_length_table(std::get<AnalyticGeometry>(g));
        for (std::size_t i = 0; i <= n; ++i) {
            const double u = i == n ? 1.0 : invert_table(s, s.back() * i / n);
            out[i] = geometry_point(g, u);
        }
        return out;
    }
    for (std::size_t i = 0; i <= n; ++i) {
        out[i] = geometry_point(g, i == n ? 1.0 : static_cast<double>(i) / n);
    }
    return out;
}

double geometry_min_radius(const EdgeGeometry& g) {
    if (const auto* a = std::get_if<ArcGeometry>(&g)) return a->radius;
    if (std::holds_alternative<SegmentGeometry>(g)) return kInfiniteRadius;
    if (const auto* p = std::get_if<PolylineGeometry>(&g)) {
        double best = kInfiniteRadius;
        for (std::size_t i = 1; i + 1 < p->points.size(); ++i) {
            const Point2 a = p->points[i - 1], b = p->points[i], c = p->points[i + 1];
            const double area2 = std::abs(cross(b - a, c - a));
            if (area2 > 0.0) best = std::min(best, dist(a, b) * dist(b, c) * dist(a, c) / (2.0 * area2));
        }
        return best;
    }
    const RoseParams r = rose_params(std::get<AnalyticGeometry>(g));
    double best = kInfiniteRadius;
    const std::size_t m = 20000;
    for (std::size_t i = 0; i <= m; ++i) {
        const double t = r.t0 + (r.t1 - r.t0) * i / m;
        const double f = r.a * std::sin(r.k * t);
        const double f1 = r.a * r.k * std::cos(r.k * t);
        const double f2 = -r.k * r.k * f;
        const double num = std::pow(f * f + f1 * f1, 1.5);
        const double den = std::abs(f * f + 2.0 * f1 * f1 - f * f2);
        if (den > 0.0) best = std::min(best, num / den);
    }
    return best;
}

std::vector<std::string> validate_scene(const Scene& scene) {
    auto issues = validate_pairing(scene.graph, scene.pairing);
    const auto cyc = validate_cycles(scene.graph, scene.cycles);
    issues.insert(issues.end(), cyc.begin(), cyc.end());
    if (scene.geometry.size() != scene.graph.edges().size()) {
        issues.push_back("geometry count does not match edge count");
        return issues;
    }
    for (EdgeId e = 0; e < scene.geometry.size(); ++e) {
        const auto& edge = scene.graph.edge(e);
        const Point2 a = geometry_point(scene.geometry[e], 0.0);
        const Point2 b = geometry_point(scene.geometry[e], 1.0);
        if (dist(a, scene.graph.vertex(edge.source).position) > 1e-9 ||
            dist(b, scene.graph.vertex(edge.target).position) > 1e-9) {
            issues.push_back("edge " + edge.name + ": geometry endpoints do not match its vertices");
        }
    }
    for (VertexId v = 0; v < scene.graph.vertices().size(); ++v) {
        const auto& vx = scene.graph.vertex(v);
        const std::size_t d = scene.graph.degree(v);
        if (vx.kind == VertexKind::Junction && d < 3) {
            issues.push_back("vertex " + vx.name + ": junction of degree " + std::to_string(d));
        }
        if (vx.kind != VertexKind::Junction && d != 2) {
            issues.push_back("vertex " + vx.name + ": " + to_string(vx.kind) + " of degree " +
                             std::to_string(d));
        }
    }
    return issues;
}

namespace {

// Small helper for authoring scenes by name.
class SceneBuilder {
public:
    explicit SceneBuilder(std::string name) { scene_.name = std::move(name); }

    VertexId vertex(const std::string& name, Point2 p, VertexKind kind) {
        const VertexId id = scene_.graph.add_vertex({name, p, kind});
        vertices_[name] = id;
        return id;
    }
    EdgeId edge(const std::string& name, const std::string& s, const std::string& t, EdgeGeometry g) {
        const EdgeId id = scene_.graph.add_edge({name, vertices_.at(s), vertices_.at(t)});
        scene_.geometry.push_back(std::move(g));
        edges_[name] = id;
        return id;
    }
    EdgeId arc(const std::string& name, const std::string& s, const std::string& t, Point2 c, double r,
               double t0, double t1) {
        return edge(name, s, t, ArcGeometry{c, r, t0, t1});
    }
    EdgeId segment(const std::string& name, const std::string& s, const std::string& t) {
        return edge(name, s, t,
                    SegmentGeometry{scene_.graph.vertex(vertices_.at(s)).position,
                                    scene_.graph.vertex(vertices_.at(t)).position});
    }
    void pair(const std::string& v, const std::string& a, const std::string& b) {
        scene_.pairing.pairs.resize(scene_.graph.vertices().size());
        scene_.pairing.add(vertices_.at(v), edges_.at(a), edges_.at(b));
    }
    // Steps are written "+name" or "-name".
    DirectedCycle cycle(const std::vector<std::string>& steps, Orientation o) const {
        DirectedCycle c;
        c.orientation = o;
        for (const auto& s : steps) c.steps.push_back({edges_.at(s.substr(1)), s[0] == '+'});
        return c;
    }
    void phase(const std::string& name, std::vector<PhaseComponent> comps) {
        scene_.cycles.push_back({name, std::move(comps)});
    }
    Scene finish() {
        scene_.pairing.pairs.resize(scene_.graph.vertices().size());
        return std::move(scene_);
    }

private:
    Scene scene_;
    std::map<std::string, VertexId> vertices_;
    std::map<std::string, EdgeId> edges_;
};

Point2 on_circle(Point2 c, double r, double t) { return {c.x + r * std::cos(t), c.y + r * std::sin(t)}; }

constexpr auto P = Orientation::Positive;
constexpr auto N = Orientation::Negative;

}  // namespace

Scene quartered_disk() {
    const Point2 c{0.5, 0.75};
    const double r = 0.15;
    SceneBuilder b("quartered_disk");
    const char* tn[4] = {"E", "N", "W", "S"};
    for (int i = 0; i < 4; ++i) b.vertex(tn[i], on_circle(c, r, i * kPi / 2), VertexKind::Junction);
    b.vertex("X", c, VertexKind::Junction);
    for (int i = 0; i < 4; ++i) {
        b.arc("a" + std::to_string(i), tn[i], tn[(i + 1) % 4], c, r, i * kPi / 2, (i + 1) * kPi / 2);
    }
    for (int i = 0; i < 4; ++i) b.segment(std::string("r") + tn[i], "X", tn[i]);
    for (int i = 0; i < 4; ++i) b.pair(tn[i], "a" + std::to_string((i + 3) % 4), "a" + std::to_string(i));
    b.pair("X", "rE", "rW");
    b.pair("X", "rN", "rS");
    for (int i = 0; i < 4; ++i) {
        const std::string ri = std::string("r") + tn[i];
        const std::string rj = std::string("r") + tn[(i + 1) % 4];
        b.phase("Q" + std::to_string(i + 1),
                {{{b.cycle({"+" + ri, "+a" + std::to_string(i), "-" + rj}, P)}}});
    }
    b.phase("outside", {{{b.cycle({"-a3", "-a2", "-a1", "-a0"}, N)}}});
    return b.finish();
}

Scene five_phase_disk() {
    const Point2 c{0.5, 0.5};
    const double r = 0.15;
    SceneBuilder b("five_phase_disk");
    auto theta = [](int k) { return 2 * kPi * k / 5; };
    for (int k = 0; k < 5; ++k) b.vertex("T" + std::to_string(k), on_circle(c, r, theta(k)), VertexKind::Junction);
    b.vertex("C", c, VertexKind::Junction);
    for (int k = 0; k < 5; ++k) {
        b.arc("a" + std::to_string(k), "T" + std::to_string(k), "T" + std::to_string((k + 1) % 5), c, r,
              theta(k), theta(k) + 2 * kPi / 5);
    }
    for (int k = 0; k < 5; ++k) b.segment("r" + std::to_string(k), "C", "T" + std::to_string(k));
    for (int k = 0; k < 5; ++k) {
        b.pair("T" + std::to_string(k), "a" + std::to_string((k + 4) % 5), "a" + std::to_string(k));
    }
    for (int k = 0; k < 5; ++k) {
        const std::string s = std::to_string(k);
        b.phase("P" + std::to_string(k + 1),
                {{{b.cycle({"+r" + s, "+a" + s, "-r" + std::to_string((k + 1) % 5)}, P)}}});
    }
    b.phase("outside", {{{b.cycle({"-a4", "-a3", "-a2", "-a1", "-a0"}, N)}}});
    return b.finish();
}

Scene three_phase_disk() {
    const Point2 c{0.5, 0.75};
    const double r = 0.15;
    SceneBuilder b("three_phase_disk");
    b.vertex("E", on_circle(c, r, 0.0), VertexKind::Junction);
    b.vertex("W", on_circle(c, r, kPi), VertexKind::Junction);
    b.arc("up", "E", "W", c, r, 0.0, kPi);
    b.arc("lo", "W", "E", c, r, kPi, 2 * kPi);
    b.segment("d", "W", "E");
    b.pair("E", "lo", "up");
    b.pair("W", "up", "lo");
    b.phase("upper", {{{b.cycle({"+d", "+up"}, P)}}});
    b.phase("lower", {{{b.cycle({"+lo", "-d"}, P)}}});
    b.phase("outside", {{{b.cycle({"-lo", "-up"}, N)}}});
    return b.finish();
}

Scene classic_two_phase_circle() {
    const Point2 c{0.5, 0.75};
    const double r = 0.15;
    SceneBuilder b("classic_two_phase_circle");
    b.vertex("B", on_circle(c, r, kPi / 2), VertexKind::Basepoint);
    b.arc("loop", "B", "B", c, r, kPi / 2, kPi / 2 + 2 * kPi);
    b.pair("B", "loop", "loop");
    b.phase("disk", {{{b.cycle({"+loop"}, P)}}});
    b.phase("outside", {{{b.cycle({"-loop"}, N)}}});
    return b.finish();
}

Scene mixed_junctions() {
    SceneBuilder b("mixed_junctions");
    // A disk cut by a chord and a half chord: three T junctions on the
    // circle and one on the chord.
    const Point2 c1{0.3, 0.7};
    const double r1 = 0.15;
    const Point2 v1 = on_circle(c1, r1, 5 * kPi / 6);
    const Point2 v4 = on_circle(c1, r1, kPi / 6);
    const Point2 v5 = on_circle(c1, r1, -kPi / 2);
    b.vertex("v1", v1, VertexKind::Junction);
    b.vertex("v2", on_circle({0.78, 0.82}, 0.08, kPi / 2), VertexKind::Basepoint);
    b.vertex("v3", 0.5 * (v1 + v4), VertexKind::Junction);
    b.vertex("v4", v4, VertexKind::Junction);
    b.vertex("v5", v5, VertexKind::Junction);

    // A circle crossed twice by a teardrop whose tip is a kink.
    const Point2 c3{0.7, 0.38};
    const double r3 = 0.08;
    const Point2 tip{0.7, 0.60};
    const double alpha = std::acos(r3 / dist(c3, tip));
    const double a6 = kPi / 2 + alpha;
    const double a8 = kPi / 2 - alpha;
    const Point2 v6 = on_circle(c3, r3, a6);
    const Point2 v8 = on_circle(c3, r3, a8);
    const double r2 = 0.15;
    const Point2 c2{0.7, v6.y - std::sqrt(r2 * r2 - (v6.x - 0.7) * (v6.x - 0.7))};
    const double b6 = std::atan2(v6.y - c2.y, v6.x - c2.x);
    const double b8 = std::atan2(v8.y - c2.y, v8.x - c2.x);

    // Two petals of the rose r = a sin 3t meeting at its center.
    const Point2 c7{0.3, 0.22};
    const double ra = 0.15;
    auto rose = [&](double t0, double t1) {
        return AnalyticGeometry{"rose", {c7.x, c7.y, ra, 3.0, t0, t1}};
    };
    const Point2 v10 = geometry_point(rose(5 * kPi / 6, kPi), 0.0);
    const Point2 v11 = geometry_point(rose(7 * kPi / 6, 4 * kPi / 3), 0.0);

    b.vertex("v6", v6, VertexKind::Junction);
    b.vertex("v7", c7, VertexKind::Junction);
    b.vertex("v8", v8, VertexKind::Junction);
    b.vertex("v9", tip, VertexKind::NonSmooth);
    b.vertex("v10", v10, VertexKind::Basepoint);
    b.vertex("v11", v11, VertexKind::Basepoint);

    b.arc("e1", "v6", "v8", c2, r2, b6, b8);
    b.arc("e2", "v1", "v4", c1, r1, 5 * kPi / 6, kPi / 6);
    b.segment("e3", "v1", "v3");
    b.arc("e4", "v5", "v1", c1, r1, -kPi / 2, -7 * kPi / 6);
    b.segment("e5", "v3", "v5");
    b.segment("e6", "v3", "v4");
    b.arc("e7", "v4", "v5", c1, r1, kPi / 6, -kPi / 2);
    b.arc("e8", "v2", "v2", {0.78, 0.82}, 0.08, kPi / 2, kPi / 2 + 2 * kPi);
    b.arc("e9", "v6", "v8", c2, r2, b6, b8 + 2 * kPi);
    b.edge("e10", "v10", "v7", rose(5 * kPi / 6, kPi));
    b.edge("e11", "v7", "v11", rose(kPi, 7 * kPi / 6));
    b.arc("e12", "v6", "v8", c3, r3, a6, a8 + 2 * kPi);
    b.segment("e13", "v8", "v9");
    b.segment("e14", "v6", "v9");
    b.edge("e15", "v7", "v10", rose(2 * kPi / 3, 5 * kPi / 6));
    b.edge("e16", "v11", "v7", rose(7 * kPi / 6, 4 * kPi / 3));

    b.pair("v1", "e2", "e4");
    b.pair("v2", "e8", "e8");
    b.pair("v3", "e3", "e6");
    b.pair("v4", "e2", "e7");
    b.pair("v5", "e4", "e7");
    b.pair("v6", "e1", "e9");
    b.pair("v6", "e12", "e14");
    b.pair("v7", "e10", "e11");
    b.pair("v8", "e1", "e9");
    b.pair("v8", "e12", "e13");
    b.pair("v10", "e10", "e15");
    b.pair("v11", "e11", "e16");

    // The loop at v2 and both petals are left uncovered by every phase.
    b.phase("M1", {{{b.cycle({"+e3", "+e6", "-e2"}, P)}}});
    b.phase("M2", {{{b.cycle({"-e4", "-e5", "-e3"}, P)}}});
    b.phase("M3", {{{b.cycle({"-e7", "-e6", "+e5"}, P)}}});
    b.phase("M4", {{{b.cycle({"+e2", "+e7", "+e4"}, N), b.cycle({"-e8"}, N),
                     b.cycle({"-e10", "-e15"}, N), b.cycle({"-e16", "-e11"}, N),
                     b.cycle({"+e14", "-e13", "-e9"}, N)}},
                   {{b.cycle({"+e12", "-e1"}, P)}}});
    b.phase("M5", {{{b.cycle({"+e9", "-e12"}, P)}}});
    b.phase("M6", {{{b.cycle({"+e1", "+e13", "-e14"}, P)}}});
    return b.finish();
}

std::vector<std::string> builtin_scene_names() {
    return {"quartered_disk", "five_phase_disk", "three_phase_disk", "classic_two_phase_circle", "mixed_junctions"};
}

Scene builtin_scene(const std::string& name) {
    if (name == "quartered_disk") return quartered_disk();
    if (name == "five_phase_disk") return five_phase_disk();
    if (name == "three_phase_disk") return three_phase_disk();
    if (name == "classic_two_phase_circle") return classic_two_phase_circle();
    if (name == "mixed_junctions") return mixed_junctions();
    throw ConfigError("unknown built-in scene '" + name + "'");
}

namespace {

using nlohmann::json;

json point_json(Point2 p) { return json::array({p.x, p.y}); }

Point2 point_from(const json& j) {
    if (!j.is_array() || j.size() != 2) throw ConfigError("scene: point must be [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

json geometry_json(const EdgeGeometry& g) {
    if (const auto* a = std::get_if<ArcGeometry>(&g)) {
        return {{"type", "arc"}, {"center", point_json(a->center)}, {"radius", a->radius},
                {"theta0", a->theta0}, {"theta1", a->theta1}};
    }
    if (const auto* s = std::get_if<SegmentGeometry>(&g)) {
        return {{"type", "segment"}, {"a", point_json(s->a)}, {"b", point_json(s->b)}};
    }
    if (const auto* p = std::get_if<PolylineGeometry>(&g)) {
        json pts = json::array();
        for (const auto& q : p->points) pts.push_back(point_json(q));
        return {{"type", "polyline"}, {"points", pts}};
    }
    const auto& an = std::get<AnalyticGeometry>(g);
    return {{"type", "analytic"}, {"curve", an.curve}, {"params", an.params}};
}

std::vector<Point2> read_polyline_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("scene: cannot open polyline file " + path);
    std::vector<Point2> pts;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        Point2 p;
        if (ls >> p.x >> p.y) pts.push_back(p);
    }
    if (pts.size() < 2) throw ConfigError("scene: polyline file " + path + " has fewer than 2 points");
    return pts;
}

EdgeGeometry geometry_from(const json& j, const std::string& base_dir) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "arc") {
        return ArcGeometry{point_from(j.at("center")), j.at("radius").get<double>(),
                           j.at("theta0").get<double>(), j.at("theta1").get<double>()};
    }
    if (type == "segment") return SegmentGeometry{point_from(j.at("a")), point_from(j.at("b"))};
    if (type == "polyline") {
        PolylineGeometry p;
        if (j.contains("file")) {
            p.file = j.at("file").get<std::string>();
            const auto path = std::filesystem::path(base_dir) / p.file;
            p.points = read_polyline_file(path.string());
        } else {
            for (const auto& q : j.at("points")) p.points.push_back(point_from(q));
        }
        return p;
    }
    if (type == "analytic") {
        AnalyticGeometry a{j.at("curve").get<std::string>(), j.at("params").get<std::vector<double>>()};
        rose_params(a);
        return a;
    }
    throw ConfigError("scene: unknown geometry type '" + type + "'");
}

// Moves the start of a closed curve to its parameter midpoint.
EdgeGeometry rotate_to_midpoint(const EdgeGeometry& g, const std::string& edge) {
    if (const auto* a = std::get_if<ArcGeometry>(&g)) {
        const double span = a->theta1 - a->theta0;
        const double mid = a->theta0 + 0.5 * span;
        return ArcGeometry{a->center, a->radius, mid, mid + span};
    }
    if (const auto* p = std::get_if<PolylineGeometry>(&g)) {
        std::vector<Point2> pts(p->points.begin(), p->points.end() - 1);
        const std::size_t half = pts.size() / 2;
        std::rotate(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(half), pts.end());
        pts.push_back(pts.front());
        return PolylineGeometry{pts, p->file};
    }
    throw ConfigError("scene: edge " + edge + ": basepoint insertion supports arcs and polylines only");
}

}  // namespace

Scene scene_from_json_text(const std::string& text, const std::string& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scene: invalid JSON: ") + e.what());
    }
    try {
        SceneBuilder b(j.value("name", std::string("scene")));
        for (const auto& v : j.at("vertices")) {
            b.vertex(v.at("id").get<std::string>(), {v.at("x").get<double>(), v.at("y").get<double>()},
                     vertex_kind_from_string(v.value("kind", std::string("junction"))));
        }
        for (const auto& e : j.at("edges")) {
            const std::string id = e.at("id").get<std::string>();
            EdgeGeometry g = geometry_from(e.at("geometry"), base_dir);
            if (!e.contains("source")) {
                // A Jordan curve without vertices gets a basepoint at gamma(1/2).
                g = rotate_to_midpoint(g, id);
                const std::string bp = id + ".base";
                b.vertex(bp, geometry_point(g, 0.0), VertexKind::Basepoint);
                b.edge(id, bp, bp, std::move(g));
                b.pair(bp, id, id);
                continue;
            }
            b.edge(id, e.at("source").get<std::string>(), e.at("target").get<std::string>(), std::move(g));
        }
        if (j.contains("pairing")) {
            for (const auto& [vertex, pairs] : j.at("pairing").items()) {
                for (const auto& p : pairs) b.pair(vertex, p.at(0).get<std::string>(), p.at(1).get<std::string>());
            }
        }
        for (const auto& ph : j.at("phases")) {
            std::vector<PhaseComponent> comps;
            for (const auto& comp : ph.at("components")) {
                PhaseComponent pc;
                for (const auto& cyc : comp.at("cycles")) {
                    const std::string o = cyc.at("orientation").get<std::string>();
                    if (o != "positive" && o != "negative") {
                        throw ConfigError("scene: orientation must be positive or negative");
                    }
                    pc.cycles.push_back(b.cycle(cyc.at("steps").get<std::vector<std::string>>(),
                                                o == "positive" ? P : N));
                }
                comps.push_back(std::move(pc));
            }
            b.phase(ph.at("name").get<std::string>(), std::move(comps));
        }
        Scene s = b.finish();
        if (j.contains("markers")) s.marker_spacing = j.at("markers").value("spacing", 0.0);
        return s;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("scene: ") + e.what());
    } catch (const std::out_of_range&) {
        throw ConfigError("scene: reference to an undefined vertex or edge id");
    }
}

std::string scene_to_json_text(const Scene& scene) {
    json j;
    j["name"] = scene.name;
    const auto& g = scene.graph;
    json vs = json::array();
    for (const auto& v : g.vertices()) {
        vs.push_back({{"id", v.name}, {"x", v.position.x}, {"y", v.position.y}, {"kind", to_string(v.kind)}});
    }
    j["vertices"] = vs;
    json es = json::array();
    for (EdgeId e = 0; e < g.edges().size(); ++e) {
        const auto& edge = g.edge(e);
        es.push_back({{"id", edge.name}, {"source", g.vertex(edge.source).name},
                      {"target", g.vertex(edge.target).name}, {"geometry", geometry_json(scene.geometry[e])}});
    }
    j["edges"] = es;
    json pairing = json::object();
    for (VertexId v = 0; v < scene.pairing.pairs.size(); ++v) {
        if (scene.pairing.pairs[v].empty()) continue;
        json list = json::array();
        for (const auto& [a, b] : scene.pairing.pairs[v]) list.push_back({g.edge(a).name, g.edge(b).name});
        pairing[g.vertex(v).name] = list;
    }
    j["pairing"] = pairing;
    json phases = json::array();
    for (const auto& ph : scene.cycles) {
        json comps = json::array();
        for (const auto& comp : ph.components) {
            json cycles = json::array();
            for (const auto& c : comp.cycles) {
                json steps = json::array();
                for (const auto& s : c.steps) steps.push_back((s.forward ? "+" : "-") + g.edge(s.edge).name);
                cycles.push_back({{"orientation", c.orientation == P ? "positive" : "negative"}, {"steps", steps}});
            }
            comps.push_back({{"cycles", cycles}});
        }
        phases.push_back({{"name", ph.name}, {"components", comps}});
    }
    j["phases"] = phases;
    if (scene.marker_spacing > 0.0) j["markers"] = {{"spacing", scene.marker_spacing}};
    return j.dump(2);
}

Scene load_scene_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scene file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const auto dir = std::filesystem::path(path).parent_path().string();
    return scene_from_json_text(ss.str(), dir.empty() ? "." : dir);
}

Scene resolve_scene(const std::string& name_or_path) {
    const auto names = builtin_scene_names();
    if (std::find(names.begin(), names.end(), name_or_path) != names.end()) return builtin_scene(name_or_path);
    return load_scene_file(name_or_path);
}

std::vector<std::vector<Point2>> initial_markers(const Scene& scene,
                                                 const std::function<double(EdgeId)>& spacing) {
    std::vector<std::vector<Point2>> out;
    for (EdgeId e = 0; e < scene.geometry.size(); ++e) {
        const double len = geometry_length(scene.geometry[e]);
        const double s = spacing(e);
        if (!(s > 0.0)) throw ConfigError("initial marker spacing must be positive");
        const auto n = std::max<std::size_t>(3, static_cast<std::size_t>(std::ceil(len / s)));
        auto pts = sample_equal_arclength(scene.geometry[e], n);
        const auto& edge = scene.graph.edge(e);
        pts.front() = scene.graph.vertex(edge.source).position;
        pts.back() = scene.graph.vertex(edge.target).position;
        out.push_back(std::move(pts));
    }
    return out;
}

}  // namespace mars
