#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "mars/driver.hpp"
#include "mars/metrics.hpp"

using namespace mars;
using std::numbers::pi;

namespace {

double overlap(double a0, double a1, double b0, double b1) { return std::max(0.0, std::min(a1, b1) - std::max(a0, b0)); }

// Area of the disk (c, r) inside the box [x0, x1] x [y0, y1], integrated in
// closed form between the abscissae where the clipped height changes form.
double disk_box_area(Point2 c, double r, double x0, double x1, double y0, double y1) {
    const double a = std::max(x0, c.x - r), b = std::min(x1, c.x + r);
    if (a >= b) return 0.0;
    auto half = [&](double x) { return std::sqrt(std::max(0.0, r * r - (x - c.x) * (x - c.x))); };
    // Antiderivative of the half chord.
    auto F = [&](double x) {
        const double u = std::clamp((x - c.x) / r, -1.0, 1.0);
        return 0.5 * r * r * (u * std::sqrt(1 - u * u) + std::asin(u));
    };
    std::vector<double> cuts{a, b};
    for (double y : {y0, y1}) {
        const double dy = y - c.y;
        if (std::abs(dy) < r) {
            for (double s : {-1.0, 1.0}) {
                const double x = c.x + s * std::sqrt(r * r - dy * dy);
                if (x > a && x < b) cuts.push_back(x);
            }
        }
    }
    std::sort(cuts.begin(), cuts.end());
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double p = cuts[i], q = cuts[i + 1];
        const double m = 0.5 * (p + q);
        const double s = half(m);
        const bool top_clipped = c.y + s > y1, bottom_clipped = c.y - s < y0;
        if (top_clipped && bottom_clipped) {
            area += (y1 - y0) * (q - p);
        } else if (top_clipped) {
            if (c.y - s >= y1) continue;
            area += (y1 - c.y) * (q - p) + (F(q) - F(p));
        } else if (bottom_clipped) {
            if (c.y + s <= y0) continue;
            area += (c.y - y0) * (q - p) + (F(q) - F(p));
        } else {
            area += 2 * (F(q) - F(p));
        }
    }
    return area;
}

PhasePolygons square(double x0, double y0, double x1, double y1) {
    PhasePolygons p;
    p.name = "box";
    p.polygons = {{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}};
    p.component = {0};
    return p;
}

// Axis-aligned box scene: four kinked corners joined by segments.
Scene box_scene(double x0, double y0, double x1, double y1) {
    Scene s;
    s.name = "box";
    const Point2 c[4] = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
    for (int i = 0; i < 4; ++i) s.graph.add_vertex({"c" + std::to_string(i), c[i], VertexKind::NonSmooth});
    for (std::size_t i = 0; i < 4; ++i) {
        s.graph.add_edge({"e" + std::to_string(i), i, (i + 1) % 4});
        s.geometry.push_back(SegmentGeometry{c[i], c[(i + 1) % 4]});
    }
    s.pairing = EdgePairing(4);
    DirectedCycle in{{{0, true}, {1, true}, {2, true}, {3, true}}, Orientation::Positive};
    DirectedCycle out{{{3, false}, {2, false}, {1, false}, {0, false}}, Orientation::Negative};
    s.cycles = {Phase{"box", {PhaseComponent{{in}}}}, Phase{"outside", {PhaseComponent{{out}}}}};
    return s;
}

ArmsParams constant(double h_L) {
    ArmsParams p;
    p.r_tiny = 0.1;
    p.hl = ConstantHl{h_L};
    return p;
}

}  // namespace

TEST_CASE("grid construction") {
    CHECK(Grid::from_h(1.0 / 32).n == 32);
    CHECK_THROWS_AS(Grid::from_h(0.3), ConfigError);
    CHECK_THROWS_AS(Grid::from_h(0.0), ConfigError);
}

TEST_CASE("shoelace area") {
    const std::vector<Point2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    CHECK(signed_area(sq) == 1.0);
    CHECK(signed_area({sq.rbegin(), sq.rend()}) == -1.0);
}

TEST_CASE("cell areas of polygons") {
    SUBCASE("unit square on h = 1/2") {
        const auto f = cell_areas({square(0, 0, 1, 1)}, Grid::from_h(0.5));
        for (double a : f.area[0]) CHECK(a == doctest::Approx(0.25).epsilon(1e-15));
    }
    SUBCASE("random boxes against the overlap product") {
        std::mt19937_64 rng(8);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const Grid g = Grid::from_h(1.0 / 8);
        for (int t = 0; t < 50; ++t) {
            double x0 = u(rng), x1 = u(rng), y0 = u(rng), y1 = u(rng);
            if (x0 > x1) std::swap(x0, x1);
            if (y0 > y1) std::swap(y0, y1);
            const auto f = cell_areas({square(x0, y0, x1, y1)}, g);
            for (std::size_t r = 0; r < g.n; ++r) {
                for (std::size_t c = 0; c < g.n; ++c) {
                    const double ref = overlap(x0, x1, c * g.h, (c + 1) * g.h) * overlap(y0, y1, r * g.h, (r + 1) * g.h);
                    CHECK(f.cell(0, r, c) == doctest::Approx(ref).epsilon(1e-12).scale(1e-3));
                }
            }
        }
    }
    SUBCASE("containing and disjoint cells") {
        const auto f = cell_areas({square(0.1, 0.1, 0.6, 0.6)}, Grid::from_h(0.25));
        CHECK(f.cell(0, 1, 1) == doctest::Approx(1.0 / 16));
        CHECK(f.cell(0, 3, 3) == 0.0);
    }
}

TEST_CASE("reference areas of the quartered disk") {
    const Scene s = quartered_disk();
    const Point2 c{0.5, 0.75};
    const double r = 0.15;
    const Grid g = Grid::from_h(1.0 / 32);
    const auto f = reference_areas(s, g);
    std::size_t outside = 0;
    for (std::size_t p = 0; p < f.area.size(); ++p) {
        if (f.total(p) > f.total(outside)) outside = p;
    }
    double disk = 0.0;
    for (std::size_t p = 0; p < f.area.size(); ++p) {
        if (p != outside) disk += f.total(p);
    }
    CHECK(disk == doctest::Approx(pi * r * r).epsilon(1e-12));
    CHECK(f.total(outside) == doctest::Approx(1 - pi * r * r).epsilon(1e-12));
    // Cell (row 24, col 16) has its centre at the disk centre.
    double inner = 0.0;
    for (std::size_t p = 0; p < f.area.size(); ++p) {
        if (p != outside) inner += f.cell(p, 24, 16) + f.cell(p, 23, 15);
    }
    CHECK(inner == doctest::Approx(2 * g.h * g.h).epsilon(1e-14));
    for (std::size_t row = 0; row < g.n; ++row) {
        for (std::size_t col = 0; col < g.n; ++col) {
            double sum = 0.0;
            for (std::size_t p = 0; p < f.area.size(); ++p) {
                if (p != outside) sum += f.cell(p, row, col);
            }
            const double ref = disk_box_area(c, r, col * g.h, (col + 1) * g.h, row * g.h, (row + 1) * g.h);
            CHECK(std::abs(sum - ref) < 1e-15);
            CHECK(std::abs(f.cell(outside, row, col) - (g.h * g.h - ref)) < 1e-15);
        }
    }
}

TEST_CASE("exact spline areas of a box") {
    const Scene s = box_scene(0.2, 0.3, 0.7, 0.55);
    const auto st = initial_state(s, constant(0.05), 0.01);
    const auto phases = snapshot(st);
    const Grid g = Grid::from_h(1.0 / 16);
    const auto f = spline_cell_areas(phases, g);
    for (std::size_t r = 0; r < g.n; ++r) {
        for (std::size_t c = 0; c < g.n; ++c) {
            const double ref = overlap(0.2, 0.7, c * g.h, (c + 1) * g.h) * overlap(0.3, 0.55, r * g.h, (r + 1) * g.h);
            CHECK(std::abs(f.cell(0, r, c) - ref) < 1e-15);
            CHECK(std::abs(f.cell(1, r, c) - (g.h * g.h - ref)) < 1e-15);
        }
    }
    const auto polys = sample_boundary(phases, 0.01);
    for (Point2 corner : {Point2{0.2, 0.3}, Point2{0.7, 0.3}, Point2{0.7, 0.55}, Point2{0.2, 0.55}}) {
        bool found = false;
        for (const auto& p : polys[0].polygons[0]) found = found || dist(p, corner) < 1e-15;
        CHECK(found);
    }
}

TEST_CASE("sampled circle boundary") {
    const Scene s = classic_two_phase_circle();
    const auto st = initial_state(s, constant(0.01), 0.01);
    const auto phases = snapshot(st);
    const double r = 0.15;
    const auto polys = sample_boundary(phases, 2 * pi * r / 1024);
    REQUIRE(polys[0].polygons.size() == 1);
    const auto& poly = polys[0].polygons[0];
    CHECK(poly.size() >= 1024);
    CHECK(std::abs(signed_area(poly) - pi * r * r) < 1e-5);
    CHECK(polys[1].unbounded_components.size() == 1);

    SUBCASE("polygon and exact routes agree") {
        const Grid g = Grid::from_h(1.0 / 32);
        const auto exact = spline_cell_areas(phases, g);
        // Chords of length s cut off about perimeter * s^2 / (12 r) of area,
        // counted once per phase.
        double prev = 0.0;
        for (double s_max : {g.h / 16, g.h / 32, g.h / 64}) {
            const double e = it_error(exact, cell_areas(sample_boundary(phases, s_max), g)).total;
            CHECK(e <= 2 * (2 * pi * r) * s_max * s_max / (12 * r));
            if (prev > 0.0) CHECK(prev / e > 3.0);
            prev = e;
        }
        // Both measure the same spline, which is close to the true circle.
        CHECK(it_error(reference_areas(s, g), exact).total < 1e-6);
    }
}

TEST_CASE("error and rates") {
    const Grid g = Grid::from_h(0.25);
    PhaseAreaField a;
    a.grid = g;
    a.names = {"x", "y"};
    a.area = {std::vector<double>(16, 0.01), std::vector<double>(16, 0.02)};
    CHECK(it_error(a, a).total == 0.0);
    PhaseAreaField b = a;
    b.area[1][5] += 3e-4;
    const auto e = it_error(a, b);
    CHECK(e.per_phase[0] == 0.0);
    CHECK(e.per_phase[1] == doctest::Approx(3e-4));
    CHECK(e.total == doctest::Approx(3e-4));

    CHECK(convergence_rates({{0.1, 1e-4}, {0.05, 6.25e-6}})[0] == doctest::Approx(4.0));
    CHECK(convergence_rates({{0.1, 1e-4}, {0.05, 1e-4}})[0] == 0.0);
    CHECK(convergence_rates({{0.1, 1e-4}, {0.05, 1.5625e-6}})[0] == doctest::Approx(6.0));
    CHECK(std::isnan(convergence_rates({{0.1, 0.0}, {0.05, 1e-4}})[0]));
    CHECK_THROWS_AS(convergence_rates({{0.1, 1e-4}}), PreconditionError);
}
