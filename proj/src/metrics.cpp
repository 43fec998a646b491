#include "mars/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mars {

Grid Grid::from_h(double h) {
    if (!(h > 0.0 && h <= 1.0)) throw ConfigError("grid: h must lie in (0, 1]");
    const double inv = 1.0 / h;
    const auto n = static_cast<std::size_t>(std::llround(inv));
    if (std::abs(inv - static_cast<double>(n)) > 1e-9) throw ConfigError("grid: 1/h must be an integer");
    return {n, 1.0 / static_cast<double>(n)};
}

double PhaseAreaField::total(std::size_t phase) const {
    double s = 0.0;
    for (double a : area[phase]) s += a;
    return s;
}

double signed_area(const std::vector<Point2>& poly) {
    double s = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) s += cross(poly[i], poly[(i + 1) % poly.size()]);
    return 0.5 * s;
}

namespace {

// Accumulates the boundary integral of (clamp(x, x_c, x_c + h) - x_c) dy
// restricted to each row, which equals the cell's share of the enclosed
// signed area.
class CellAccumulator {
public:
    explicit CellAccumulator(const Grid& g) : g_(g), own_(g.cells(), 0.0), left_(g.n * (g.n + 1), 0.0) {}

    // A curve piece lying in one row and one column strip: col may be -1
    // (left of the domain) or n (right of it).
    void add(long row, long col, double x_minus_left, double dy) {
        if (row < 0 || row >= static_cast<long>(g_.n) || col < 0) return;
        const std::size_t r = static_cast<std::size_t>(row);
        const std::size_t c = std::min<std::size_t>(static_cast<std::size_t>(col), g_.n);
        if (c < g_.n) own_[r * g_.n + c] += x_minus_left;
        // Every cell strictly left of the piece receives h dy.
        left_[r * (g_.n + 1) + c] += g_.h * dy;
    }

    std::vector<double> finish(double constant) const {
        std::vector<double> out(g_.cells(), constant);
        for (std::size_t r = 0; r < g_.n; ++r) {
            double suffix = 0.0;
            for (std::size_t c = g_.n + 1; c-- > 0;) {
                if (c < g_.n) out[r * g_.n + c] += own_[r * g_.n + c] + suffix;
                suffix += left_[r * (g_.n + 1) + c];
            }
        }
        return out;
    }

    const Grid& grid() const { return g_; }

private:
    Grid g_;
    std::vector<double> own_;
    std::vector<double> left_;
};

// Cubic p(t) on [t0, t1].
struct PolyPiece {
    CubicPiece p;
    double t0, t1;

    Point2 at(double t) const { return p.value(t); }
    Point2 d(double t) const { return p.derivative(t); }
    // Parameters where x' or y' vanish.
    void turning_points(std::vector<double>& out) const {
        for (int axis = 0; axis < 2; ++axis) {
            const double a = 3.0 * (axis ? p.c3.y : p.c3.x);
            const double b = 2.0 * (axis ? p.c2.y : p.c2.x);
            const double c = axis ? p.c1.y : p.c1.x;
            if (a == 0.0) {
                if (b != 0.0) out.push_back(-c / b);
                continue;
            }
            const double disc = b * b - 4.0 * a * c;
            if (disc < 0.0) continue;
            const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
            out.push_back(q / a);
            if (q != 0.0) out.push_back(c / q);
        }
    }
    // Integral of (x - xl) y' over [a, b]; three-point Gauss is exact here.
    double integral(double a, double b, double xl) const {
        static const double node = std::sqrt(0.6);
        const double m = 0.5 * (a + b), r = 0.5 * (b - a);
        const double ts[3] = {m - r * node, m, m + r * node};
        const double ws[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
        double s = 0.0;
        for (int i = 0; i < 3; ++i) s += ws[i] * (at(ts[i]).x - xl) * d(ts[i]).y;
        return s * r;
    }
};

// c + r (cos t, sin t) on [t0, t1] with t0 < t1.
struct ArcPiece {
    Point2 c;
    double r, t0, t1;

    Point2 at(double t) const { return {c.x + r * std::cos(t), c.y + r * std::sin(t)}; }
    Point2 d(double t) const { return {-r * std::sin(t), r * std::cos(t)}; }
    void turning_points(std::vector<double>& out) const {
        const double q = std::numbers::pi / 2;
        for (double k = std::ceil(t0 / q); k * q < t1; k += 1.0) out.push_back(k * q);
    }
    double integral(double a, double b, double xl) const {
        return (c.x - xl) * r * (std::sin(b) - std::sin(a)) +
               r * r * (0.5 * (b - a) + 0.25 * (std::sin(2.0 * b) - std::sin(2.0 * a)));
    }
};

// Root of coordinate `axis` minus g on [a, b] where it is monotone.
template <class Piece>
double monotone_root(const Piece& pc, int axis, double g, double a, double b) {
    auto f = [&](double t) { const Point2 p = pc.at(t); return (axis ? p.y : p.x) - g; };
    double fa = f(a);
    double lo = a, hi = b;
    double t = 0.5 * (a + b);
    for (int it = 0; it < 100; ++it) {
        const double ft = f(t);
        if (ft == 0.0) return t;
        if ((ft < 0.0) == (fa < 0.0)) {
            lo = t;
            fa = ft;
        } else {
            hi = t;
        }
        const Point2 dp = pc.d(t);
        const double df = axis ? dp.y : dp.x;
        double tn = df != 0.0 ? t - ft / df : 0.5 * (lo + hi);
        if (!(tn > lo && tn < hi)) tn = 0.5 * (lo + hi);
        if (std::abs(tn - t) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0) ||
            hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0)) {
            return tn;
        }
        t = tn;
    }
    return t;
}

template <class Piece>
void accumulate(const Piece& pc, double sign, CellAccumulator& acc) {
    const Grid& g = acc.grid();
    const double h = g.h;
    const long n = static_cast<long>(g.n);
    std::vector<double> cuts{pc.t0, pc.t1};
    {
        std::vector<double> tp;
        pc.turning_points(tp);
        for (double t : tp) {
            if (t > pc.t0 && t < pc.t1) cuts.push_back(t);
        }
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> ts;
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double a = cuts[s], b = cuts[s + 1];
        if (!(b > a)) continue;
        ts.push_back(a);
        const Point2 pa = pc.at(a), pb = pc.at(b);
        for (int axis = 0; axis < 2; ++axis) {
            const double va = axis ? pa.y : pa.x;
            const double vb = axis ? pb.y : pb.x;
            const double lo = std::min(va, vb), hi = std::max(va, vb);
            const long kmin = std::max<long>(0, static_cast<long>(std::floor(lo / h)) + 1);
            const long kmax = std::min<long>(n, static_cast<long>(std::ceil(hi / h)) - 1);
            for (long k = kmin; k <= kmax; ++k) {
                const double line = static_cast<double>(k) * h;
                if (line > lo && line < hi) ts.push_back(monotone_root(pc, axis, line, a, b));
            }
        }
    }
    ts.push_back(pc.t1);
    std::sort(ts.begin(), ts.end());
    for (std::size_t s = 0; s + 1 < ts.size(); ++s) {
        const double a = ts[s], b = ts[s + 1];
        if (!(b > a)) continue;
        const Point2 mid = pc.at(0.5 * (a + b));
        const long row = static_cast<long>(std::floor(mid.y / h));
        long col = static_cast<long>(std::floor(mid.x / h));
        if (col < 0) continue;
        col = std::min(col, n);
        const double xl = static_cast<double>(col) * h;
        const double dy = pc.at(b).y - pc.at(a).y;
        acc.add(row, col, sign * (col < n ? pc.integral(a, b, xl) : 0.0), sign * dy);
    }
}

void accumulate_segment(Point2 a, Point2 b, double sign, CellAccumulator& acc) {
    CubicPiece p;
    p.c0 = a;
    p.c1 = b - a;
    p.width = 1.0;
    accumulate(PolyPiece{p, 0.0, 1.0}, sign, acc);
}

void accumulate_link(const ChainLink& link, CellAccumulator& acc) {
    const auto& seg = *link.segment;
    const double sign = link.forward != seg.reversed ? 1.0 : -1.0;
    for (std::size_t i = seg.knot_begin; i < seg.knot_end; ++i) {
        const CubicPiece p = seg.spline->piece(i);
        accumulate(PolyPiece{p, 0.0, p.width}, sign, acc);
    }
}

void accumulate_geometry(const EdgeGeometry& geo, double sign, CellAccumulator& acc) {
    if (const auto* a = std::get_if<ArcGeometry>(&geo)) {
        if (a->theta1 >= a->theta0) {
            accumulate(ArcPiece{a->center, a->radius, a->theta0, a->theta1}, sign, acc);
        } else {
            accumulate(ArcPiece{a->center, a->radius, a->theta1, a->theta0}, -sign, acc);
        }
        return;
    }
    if (const auto* s = std::get_if<SegmentGeometry>(&geo)) {
        accumulate_segment(s->a, s->b, sign, acc);
        return;
    }
    std::vector<Point2> pts;
    if (const auto* p = std::get_if<PolylineGeometry>(&geo)) {
        pts = p->points;
    } else {
        const std::size_t m = std::size_t{1} << 20;
        pts.resize(m + 1);
        for (std::size_t i = 0; i <= m; ++i) pts[i] = geometry_point(geo, static_cast<double>(i) / m);
    }
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) accumulate_segment(pts[i], pts[i + 1], sign, acc);
}

PhaseAreaField empty_field(const Grid& grid) {
    PhaseAreaField f;
    f.grid = grid;
    return f;
}

}  // namespace

std::vector<PhasePolygons> sample_boundary(const std::vector<PhaseBoundary>& phases, double max_spacing) {
    if (!(max_spacing > 0.0)) throw PreconditionError("sample_boundary: spacing must be positive");
    std::vector<PhasePolygons> out;
    for (const auto& ph : phases) {
        PhasePolygons pp;
        pp.name = ph.name;
        pp.unbounded_components = ph.unbounded_components;
        for (const auto& chain : ph.chains) {
            std::vector<Point2> poly;
            for (std::size_t li = 0; li < chain.links.size(); ++li) {
                const auto& link = chain.links[li];
                const auto& next = chain.links[(li + 1) % chain.links.size()];
                if (dist(link.end(), next.start()) > 1e-9) {
                    throw AssemblyError("sample_boundary: chain does not close");
                }
                const auto& seg = *link.segment;
                const bool along = link.forward != seg.reversed;
                std::vector<Point2> pts;
                for (std::size_t i = seg.knot_begin; i < seg.knot_end; ++i) {
                    const CubicPiece p = seg.spline->piece(i);
                    const auto m = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(p.width / max_spacing)));
                    for (std::size_t k = 0; k < m; ++k) pts.push_back(p.value(p.width * static_cast<double>(k) / m));
                }
                pts.push_back(seg.spline->values()[seg.knot_end]);
                if (!along) std::reverse(pts.begin(), pts.end());
                poly.insert(poly.end(), pts.begin(), pts.end() - 1);
            }
            pp.polygons.push_back(std::move(poly));
            pp.component.push_back(chain.component);
        }
        out.push_back(std::move(pp));
    }
    return out;
}

namespace {

// Sutherland-Hodgman against the half-plane axis-coordinate (>= or <=) v.
std::vector<Point2> clip_half(const std::vector<Point2>& in, int axis, double v, bool keep_above) {
    std::vector<Point2> out;
    if (in.empty()) return out;
    auto coord = [axis](const Point2& p) { return axis ? p.y : p.x; };
    auto inside = [&](const Point2& p) { return keep_above ? coord(p) >= v : coord(p) <= v; };
    for (std::size_t i = 0; i < in.size(); ++i) {
        const Point2& a = in[i];
        const Point2& b = in[(i + 1) % in.size()];
        const bool ia = inside(a), ib = inside(b);
        if (ia) out.push_back(a);
        if (ia != ib) {
            const double t = (v - coord(a)) / (coord(b) - coord(a));
            Point2 p = a + t * (b - a);
            if (axis) p.y = v; else p.x = v;
            out.push_back(p);
        }
    }
    return out;
}

}  // namespace

PhaseAreaField cell_areas(const std::vector<PhasePolygons>& phases, const Grid& grid) {
    PhaseAreaField f = empty_field(grid);
    const std::size_t n = grid.n;
    const double h = grid.h;
    for (const auto& ph : phases) {
        f.names.push_back(ph.name);
        std::vector<double> area(grid.cells(), h * h * static_cast<double>(ph.unbounded_components.size()));
        for (const auto& poly : ph.polygons) {
            if (poly.size() < 3) continue;
            double ymin = poly[0].y, ymax = ymin, xmin = poly[0].x, xmax = xmin;
            for (const auto& p : poly) {
                ymin = std::min(ymin, p.y); ymax = std::max(ymax, p.y);
                xmin = std::min(xmin, p.x); xmax = std::max(xmax, p.x);
            }
            const long r0 = std::max<long>(0, static_cast<long>(std::floor(ymin / h)));
            const long r1 = std::min<long>(static_cast<long>(n) - 1, static_cast<long>(std::floor(ymax / h)));
            const long c0 = std::max<long>(0, static_cast<long>(std::floor(xmin / h)));
            const long c1 = std::min<long>(static_cast<long>(n) - 1, static_cast<long>(std::floor(xmax / h)));
            for (long r = r0; r <= r1; ++r) {
                const double y0 = static_cast<double>(r) * h;
                const auto strip = clip_half(clip_half(poly, 1, y0, true), 1, y0 + h, false);
                if (strip.size() < 3) continue;
                for (long c = c0; c <= c1; ++c) {
                    const double x0 = static_cast<double>(c) * h;
                    const auto cell = clip_half(clip_half(strip, 0, x0, true), 0, x0 + h, false);
                    if (cell.size() >= 3) area[static_cast<std::size_t>(r) * n + static_cast<std::size_t>(c)] += signed_area(cell);
                }
            }
        }
        f.area.push_back(std::move(area));
    }
    return f;
}

PhaseAreaField spline_cell_areas(const std::vector<PhaseBoundary>& phases, const Grid& grid) {
    PhaseAreaField f = empty_field(grid);
    for (const auto& ph : phases) {
        f.names.push_back(ph.name);
        CellAccumulator acc(grid);
        for (const auto& chain : ph.chains) {
            for (const auto& link : chain.links) accumulate_link(link, acc);
        }
        f.area.push_back(acc.finish(grid.h * grid.h * static_cast<double>(ph.unbounded_components.size())));
    }
    return f;
}

PhaseAreaField reference_areas(const Scene& scene, const Grid& grid) {
    PhaseAreaField f = empty_field(grid);
    for (const auto& ph : scene.cycles) {
        f.names.push_back(ph.name);
        CellAccumulator acc(grid);
        std::size_t unbounded = 0;
        for (const auto& comp : ph.components) {
            if (!comp.bounded()) ++unbounded;
            for (const auto& cyc : comp.cycles) {
                for (const auto& s : cyc.steps) accumulate_geometry(scene.geometry.at(s.edge), s.forward ? 1.0 : -1.0, acc);
            }
        }
        f.area.push_back(acc.finish(grid.h * grid.h * static_cast<double>(unbounded)));
    }
    return f;
}

ErrorReport it_error(const PhaseAreaField& reference, const PhaseAreaField& computed) {
    if (!(reference.grid == computed.grid) || reference.area.size() != computed.area.size()) {
        throw PreconditionError("it_error: grids or phase counts differ");
    }
    ErrorReport r;
    r.h = reference.grid.h;
    r.names = reference.names;
    for (std::size_t p = 0; p < reference.area.size(); ++p) {
        double e = 0.0;
        for (std::size_t c = 0; c < reference.area[p].size(); ++c) e += std::abs(reference.area[p][c] - computed.area[p][c]);
        r.per_phase.push_back(e);
        r.total += e;
    }
    return r;
}

std::vector<double> convergence_rates(const std::vector<std::pair<double, double>>& errors) {
    if (errors.size() < 2) throw PreconditionError("convergence_rates: need at least 2 grids");
    std::vector<double> out;
    for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
        const auto [h0, e0] = errors[i];
        const auto [h1, e1] = errors[i + 1];
        if (std::abs(h1 - 0.5 * h0) > 1e-12 * h0) throw PreconditionError("convergence_rates: grids must halve h");
        out.push_back(e0 > 0.0 && e1 > 0.0 ? std::log2(e0 / e1) : std::numeric_limits<double>::quiet_NaN());
    }
    return out;
}

}  // namespace mars
