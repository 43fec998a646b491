#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mars/driver.hpp"
#include "mars/metrics.hpp"

using namespace mars;

namespace {

ArmsParams constant(double h_L, double r_tiny = 0.05) {
    ArmsParams p;
    p.r_tiny = r_tiny;
    p.hl = ConstantHl{h_L};
    return p;
}

std::vector<std::vector<Point2>> all_values(const TrackedState& s) {
    std::vector<std::vector<Point2>> v;
    for (const auto& f : s.fitted) v.push_back(f.spline->values());
    return v;
}

using Polylines = std::vector<std::vector<Point2>>;

Polylines sampled(const TrackedState& s) {
    Polylines out;
    for (const auto& ph : sample_boundary(snapshot(s), 1e-3)) {
        for (const auto& poly : ph.polygons) out.push_back(poly);
    }
    return out;
}

double segment_distance(Point2 x, Point2 a, Point2 b) {
    const Point2 d = b - a;
    const double t = std::clamp(dot(x - a, d) / dot(d, d), 0.0, 1.0);
    return dist(x, a + t * d);
}

// Hausdorff distance between two sets of closed polylines, measured from
// vertices to segments in both directions.
double hausdorff(const Polylines& a, const Polylines& b) {
    auto one_sided = [](const Polylines& p, const Polylines& q) {
        double worst = 0.0;
        for (const auto& poly : p) {
            for (const auto& x : poly) {
                double best = INFINITY;
                for (const auto& other : q) {
                    for (std::size_t i = 0; i < other.size(); ++i) {
                        best = std::min(best, segment_distance(x, other[i], other[(i + 1) % other.size()]));
                    }
                }
                worst = std::max(worst, best);
            }
        }
        return worst;
    };
    return std::max(one_sided(a, b), one_sided(b, a));
}

}  // namespace

TEST_CASE("initial state follows the scene") {
    for (const auto& name : builtin_scene_names()) {
        CAPTURE(name);
        const Scene s = builtin_scene(name);
        const auto st = initial_state(s, constant(1.0 / 160), 1.0 / 256);
        const auto phases = snapshot(st);
        REQUIRE(phases.size() == s.cycles.size());
        for (std::size_t p = 0; p < phases.size(); ++p) {
            CHECK(phases[p].name == s.cycles[p].name);
            std::size_t cycles = 0;
            for (const auto& comp : s.cycles[p].components) cycles += comp.cycles.size();
            CHECK(phases[p].chains.size() == cycles);
        }
        CHECK(vertex_mismatch(cut_to_edges(st.fitted, st.topology->graph), st.topology->graph) < 1e-15);
    }
}

TEST_CASE("zero field steps are fixed points") {
    const auto st = initial_state(quartered_disk(), constant(1.0 / 160), 1.0 / 256);
    std::vector<ArmsDiagnostics> d;
    const auto next = step(st, zero_field(), builtin_tableau(4), &d);
    CHECK(all_values(next) == all_values(st));
    CHECK(next.time == doctest::Approx(1.0 / 256));
    CHECK(next.step_index == 1);
    CHECK(next.topology == st.topology);
    for (const auto& x : d) {
        CHECK(x.added == 0);
        CHECK(x.removed == 0);
    }
}

TEST_CASE("zero-length run returns the input") {
    const Scene s = quartered_disk();
    const auto r = run(s, VortexField{4.0}, builtin_tableau(4), constant(1.0 / 160), 1.0 / 256, 0.0, {});
    CHECK(r.diagnostics.steps.empty());
    CHECK(all_values(r.final_state) == all_values(r.initial));
    CHECK_THROWS_AS(run(s, VortexField{4.0}, builtin_tableau(4), constant(1.0 / 160), 0.3, 1.0, {}), ConfigError);
}

TEST_CASE("displacement near the reversal instant is bounded by the speed") {
    const auto st0 = initial_state(quartered_disk(), constant(1.0 / 160), 1.0 / 256);
    TrackedState st = st0;
    st.time = st.start_time = 2.0 - st.k;
    const auto next = step(st, VortexField{4.0}, builtin_tableau(4));
    // |u| <= |cos(pi t / 4)| <= sin(pi k / 4) on [T/2 - k, T/2].
    const double bound = st.k * std::sin(std::numbers::pi * st.k / 4) + 1e-15;
    for (std::size_t i = 0; i < st.fitted.size(); ++i) {
        const auto& a = st.fitted[i].characteristic;
        for (std::size_t z = 0; z < a.size(); ++z) {
            const Point2 p = st.fitted[i].spline->values()[a[z]];
            const Point2 q = next.fitted[i].spline->values()[next.fitted[i].characteristic[z]];
            CHECK(dist(p, q) <= bound);
        }
    }
}

TEST_CASE("vortex run: topology, snapshots, determinism and closure") {
    const Scene s = quartered_disk();
    const double h = 1.0 / 16;
    RunOptions opt;
    opt.snapshot_fractions = {0.0, 0.5, 1.0};
    std::vector<double> seen;
    std::vector<std::size_t> steps_at;
    opt.on_snapshot = [&](double f, const TrackedState& st) {
        seen.push_back(f);
        steps_at.push_back(st.step_index);
    };
    const auto a = run(s, VortexField{4.0}, builtin_tableau(4), constant(0.2 * h), h / 8, 4.0, opt);
    CHECK(seen == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(steps_at == std::vector<std::size_t>{0, 256, 512});
    CHECK(a.diagnostics.steps.size() == 512);
    CHECK(a.final_state.topology == a.initial.topology);
    CHECK(a.final_state.time == doctest::Approx(4.0));
    for (std::size_t i = 0; i < a.initial.fitted.size(); ++i) {
        CHECK(a.final_state.fitted[i].walk == a.initial.fitted[i].walk);
        CHECK(a.final_state.fitted[i].characteristic.size() == a.initial.fitted[i].characteristic.size());
    }
    CHECK(a.diagnostics.phases.size() == 513 * s.cycles.size());

    const auto b = run(s, VortexField{4.0}, builtin_tableau(4), constant(0.2 * h), h / 8, 4.0, {});
    CHECK(all_values(a.final_state) == all_values(b.final_state));
    CHECK(a.diagnostics.total_removed == b.diagnostics.total_removed);

    const auto err = it_error(reference_areas(s, Grid::from_h(h)), spline_cell_areas(snapshot(a.final_state), Grid::from_h(h)));
    CHECK(err.total < 1e-6);
    CHECK(hausdorff(sampled(a.initial), sampled(a.final_state)) < 1e-4);
}

TEST_CASE("deformation boundary length rises, peaks mid-run and falls back") {
    const Scene s = five_phase_disk();
    const double h = 1.0 / 16;
    ArmsParams p;
    p.r_tiny = 0.05;
    p.hl = CurvatureHl{0.2 * h, 1e-5, 1.0, 0.1, {}, "linear"};
    const auto r = run(s, DeformationField{2.0, 4}, builtin_tableau(4), p, h / 8, 2.0, {});
    const std::size_t phases = s.cycles.size();
    std::vector<double> total(r.diagnostics.steps.size() + 1, 0.0);
    for (const auto& ps : r.diagnostics.phases) total[ps.step] += ps.length;
    CHECK(phases > 0);
    const std::size_t mid = total.size() / 2;
    const auto peak = std::max_element(total.begin(), total.end()) - total.begin();
    CHECK(std::abs(static_cast<long>(peak) - static_cast<long>(mid)) <= static_cast<long>(total.size() / 10));
    CHECK(total[mid] > 1.5 * total.front());
    CHECK(total.back() == doctest::Approx(total.front()).epsilon(1e-3));
    for (std::size_t i = 1; i <= mid / 2; ++i) CHECK(total[i] >= total[i - 1] - 1e-9);
}
