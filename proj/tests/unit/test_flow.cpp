#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mars/flow.hpp"

using namespace mars;
using std::numbers::pi;

namespace {

// Stream functions written out independently; u = d psi/dy, v = -d psi/dx.
double psi_vortex(Point2 p, double t, double T) {
    return -std::pow(std::sin(pi * p.x) * std::sin(pi * p.y), 2) * std::cos(pi * t / T) / pi;
}

double psi_deformation(Point2 p, double t, double T, int nv) {
    const double n = nv * pi;
    return -std::sin(n * (p.x + 0.5)) * std::cos(n * (p.y + 0.5)) * std::cos(pi * t / T) / n;
}

template <class Psi>
Point2 fd_velocity(Psi psi, Point2 p, double t) {
    const double e = 1e-6;
    return {(psi({p.x, p.y + e}, t) - psi({p.x, p.y - e}, t)) / (2 * e),
            -(psi({p.x + e, p.y}, t) - psi({p.x - e, p.y}, t)) / (2 * e)};
}

Point2 integrate(const VelocityField& f, const ButcherTableau& tab, Point2 x, double t0, double t1, int steps) {
    const DiscreteFlowMap map{f, tab, (t1 - t0) / steps};
    for (int n = 0; n < steps; ++n) x = rk_step(map, x, t0 + n * map.k);
    return x;
}

}  // namespace

TEST_CASE("velocity examples") {
    const VelocityField vortex = VortexField{4.0};
    const Point2 u = velocity(vortex, {0.5, 0.75}, 0.0);
    CHECK(u.x == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(u.y) < 1e-15);
    const Point2 d = velocity(DeformationField{2.0, 4}, {0.5, 0.5}, 0.0);
    CHECK(std::abs(d.x) < 1e-15);
    CHECK(d.y == doctest::Approx(1.0).epsilon(1e-15));
    for (double x : {0.1, 0.37, 0.8}) {
        const Point2 r = velocity(vortex, {x, 0.3}, 2.0);
        CHECK(std::abs(r.x) < 1e-15);
        CHECK(std::abs(r.y) < 1e-15);
    }
}

TEST_CASE("velocities match the stream functions") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const VelocityField vortex = VortexField{4.0};
    const VelocityField deform = DeformationField{2.0, 4};
    for (int i = 0; i < 200; ++i) {
        const Point2 p{u01(rng), u01(rng)};
        const double t = 4.0 * u01(rng);
        const Point2 a = velocity(vortex, p, t);
        const Point2 b = fd_velocity([](Point2 q, double s) { return psi_vortex(q, s, 4.0); }, p, t);
        CHECK(dist(a, b) < 1e-8);
        const Point2 c = velocity(deform, p, t);
        const Point2 e = fd_velocity([](Point2 q, double s) { return psi_deformation(q, s, 2.0, 4); }, p, t);
        CHECK(dist(c, e) < 1e-8);
        CHECK(stream_function(vortex, p, t) == doctest::Approx(psi_vortex(p, t, 4.0)).scale(1.0));
    }
}

TEST_CASE("velocity fields are divergence free") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double e = 1e-5;
    for (const VelocityField f : {VelocityField{VortexField{4.0}}, VelocityField{DeformationField{2.0, 4}}}) {
        for (int i = 0; i < 100; ++i) {
            const Point2 p{u01(rng), u01(rng)};
            const double div = (velocity(f, {p.x + e, p.y}, 0.3).x - velocity(f, {p.x - e, p.y}, 0.3).x +
                                velocity(f, {p.x, p.y + e}, 0.3).y - velocity(f, {p.x, p.y - e}, 0.3).y) /
                               (2 * e);
            CHECK(std::abs(div) < 1e-6);
        }
    }
}

TEST_CASE("built-in tableaus are consistent") {
    for (int order : {4, 6, 8}) {
        const auto tab = builtin_tableau(order);
        CHECK(tab.order == order);
        double sb = 0.0;
        for (double b : tab.b) sb += b;
        CHECK(sb == doctest::Approx(1.0).epsilon(1e-15));
        for (std::size_t i = 0; i < tab.stages(); ++i) {
            double row = 0.0;
            for (double a : tab.a[i]) row += a;
            CHECK(row == doctest::Approx(tab.c[i]).epsilon(1e-14).scale(1.0));
        }
    }
    CHECK_THROWS_AS(builtin_tableau_text(5), ConfigError);
    CHECK_THROWS_AS(parse_tableau("order 4\nstages 2\nc 0 1\na 1 1\nb 0.5 0.6\n", "bad"), ConfigError);
}

TEST_CASE("single steps") {
    const auto rk4 = builtin_tableau(4);
    SUBCASE("zero field") {
        const DiscreteFlowMap map{zero_field(), rk4, 0.1};
        CHECK(rk_step(map, {0.3, 0.4}, 0.0) == Point2{0.3, 0.4});
    }
    SUBCASE("constant field") {
        for (int order : {4, 6, 8}) {
            const DiscreteFlowMap map{CustomField{[](Point2, double) { return Point2{1.0, 0.0}; }},
                                      builtin_tableau(order), 0.125};
            const Point2 p = rk_step(map, {0.2, 0.7}, 1.0);
            CHECK(p.x == doctest::Approx(0.325).epsilon(1e-15));
            CHECK(p.y == 0.7);
        }
    }
    SUBCASE("linear field") {
        const double k = 0.1;
        const DiscreteFlowMap map{CustomField{[](Point2 x, double) { return Point2{x.x, 0.0}; }}, rk4, k};
        const double growth = 1 + k + k * k / 2 + k * k * k / 6 + k * k * k * k / 24;
        CHECK(rk_step(map, {2.0, 0.0}, 0.0).x == doctest::Approx(2.0 * growth).epsilon(1e-15));
    }
    SUBCASE("reversal instant") {
        const DiscreteFlowMap map{VortexField{4.0}, rk4, 0.01};
        const std::vector<Point2> pts{{0.1, 0.2}, {0.5, 0.75}, {0.9, 0.4}};
        const auto moved = advance_markers(map, pts, 2.0 - 0.005);
        for (std::size_t i = 0; i < pts.size(); ++i) CHECK(dist(moved[i], pts[i]) <= 0.01 * std::sin(pi * 0.005 / 4) + 1e-15);
        CHECK(advance_markers(map, {}, 0.0).empty());
    }
    SUBCASE("non-finite input") {
        const DiscreteFlowMap map{CustomField{[](Point2, double) { return Point2{NAN, 0.0}; }}, rk4, 0.1};
        CHECK_THROWS_AS(rk_step(map, {0.0, 0.0}, 0.0), DegenerateError);
    }
}

TEST_CASE("observed temporal order") {
    const VelocityField f = CustomField{[](Point2 p, double t) { return Point2{p.x * p.x * std::cos(t) + p.y, -p.x}; }};
    const Point2 x0{0.5, 0.2};
    const Point2 ref = integrate(f, builtin_tableau(8), x0, 0.0, 1.0, 4096);
    for (int order : {4, 6, 8}) {
        const auto tab = builtin_tableau(order);
        const double e1 = dist(integrate(f, tab, x0, 0.0, 1.0, 8), ref);
        const double e2 = dist(integrate(f, tab, x0, 0.0, 1.0, 16), ref);
        CAPTURE(order);
        CHECK(std::log2(e1 / e2) > order - 0.5);
    }
}

TEST_CASE("full reversal returns to the start") {
    const auto rk4 = builtin_tableau(4);
    for (const VelocityField f : {VelocityField{VortexField{4.0}}, VelocityField{DeformationField{2.0, 4}}}) {
        const double T = std::holds_alternative<VortexField>(f) ? 4.0 : 2.0;
        const int steps = 1024;
        const double k = T / steps;
        const Point2 x0{0.5, 0.75};
        CHECK(dist(integrate(f, rk4, x0, 0.0, T, steps), x0) < 10 * std::pow(k, 4));
    }
}

TEST_CASE("tableau files on disk match the embedded copies") {
    const std::string dir = std::string(MARS_SOURCE_DIR) + "/data/tableaus/";
    for (const auto& [order, file] : {std::pair{4, "rk4.tab"}, std::pair{6, "verner6.tab"}, std::pair{8, "dop853.tab"}}) {
        const auto disk = load_tableau_file(dir + file);
        const auto built = builtin_tableau(order);
        CHECK(disk.a == built.a);
        CHECK(disk.b == built.b);
        CHECK(disk.c == built.c);
        CHECK(disk.order == order);
    }
    CHECK_THROWS_AS(load_tableau_file(dir + "missing.tab"), ConfigError);
}
