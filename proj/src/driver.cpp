#include "mars/driver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <thread>

namespace mars {

std::vector<std::string> Topology::phase_names() const {
    std::vector<std::string> out;
    for (const auto& p : cycles) out.push_back(p.name);
    return out;
}

unsigned thread_count() {
    if (const char* env = std::getenv("MARS_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return static_cast<unsigned>(n);
    }
    return 1;
}

TrackedState initial_state(const Scene& scene, const ArmsParams& params, double k, double spacing_fraction) {
    validate(params);
    if (!(k > 0.0)) throw ConfigError("time step k must be positive");
    if (const auto issues = validate_scene(scene); !issues.empty()) {
        throw ConfigError("scene " + scene.name + ": " + issues.front());
    }
    auto topo = std::make_shared<Topology>();
    topo->graph = scene.graph;
    topo->pairing = scene.pairing;
    topo->cycles = scene.cycles;
    auto parts = partition_edge_set(scene.graph, scene.pairing);
    topo->walks = parts.circuits;
    topo->walks.insert(topo->walks.end(), parts.trails.begin(), parts.trails.end());

    const auto markers = initial_markers(scene, [&](EdgeId e) {
        const double s = spacing_fraction * h_L_of_radius(params, geometry_min_radius(scene.geometry[e]));
        return scene.marker_spacing > 0.0 ? std::min(s, scene.marker_spacing) : s;
    });
    TrackedState s;
    s.fitted = fit_spline_set(topo->graph, topo->walks, markers);
    // One pass with the identity map makes the initial splines regular, so a
    // step under a zero field is a fixed point.
    const auto identity = [](Point2 p) { return p; };
    for (auto& f : s.fitted) {
        ArmsResult r = arms_step(identity, *f.spline, f.characteristic, params);
        f.spline = std::make_shared<const CubicSpline>(std::move(r.spline));
        f.characteristic = std::move(r.characteristic);
    }
    s.topology = std::move(topo);
    s.params = params;
    s.k = k;
    return s;
}

TrackedState step(const TrackedState& state, const VelocityField& field, const ButcherTableau& tableau,
                  std::vector<ArmsDiagnostics>* diag) {
    const DiscreteFlowMap map{field, tableau, state.k};
    const std::size_t n = state.fitted.size();
    std::vector<ArmsResult> results(n);
    auto work = [&](std::size_t i) {
        const auto& f = state.fitted[i];
        results[i] = arms_step(map, state.time, *f.spline, f.characteristic, state.params);
    };
    const unsigned threads = std::min<unsigned>(thread_count(), static_cast<unsigned>(n));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) work(i);
    } else {
        std::vector<std::exception_ptr> errors(threads);
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t i = t; i < n; i += threads) work(i);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }
    TrackedState next;
    next.step_index = state.step_index + 1;
    next.start_time = state.start_time;
    next.time = state.start_time + static_cast<double>(next.step_index) * state.k;
    next.topology = state.topology;
    next.params = state.params;
    next.k = state.k;
    for (std::size_t i = 0; i < n; ++i) {
        if (results[i].characteristic.size() != state.fitted[i].characteristic.size()) {
            throw AssemblyError("step: characteristic markers lost during ARMS");
        }
        FittedSpline f;
        f.spline = std::make_shared<const CubicSpline>(std::move(results[i].spline));
        f.walk = state.fitted[i].walk;
        f.characteristic = std::move(results[i].characteristic);
        next.fitted.push_back(std::move(f));
        if (diag) diag->push_back(std::move(results[i].diagnostics));
    }
    return next;
}

std::vector<PhaseBoundary> snapshot(const TrackedState& state) {
    const auto edges = cut_to_edges(state.fitted, state.topology->graph);
    return assemble_boundaries(state.topology->cycles, edges);
}

namespace {

void record_phases(const TrackedState& s, RunDiagnostics& d) {
    const auto phases = snapshot(s);
    for (std::size_t p = 0; p < phases.size(); ++p) {
        PhaseSample ps{s.step_index, s.time, p, 0.0, 0};
        for (const auto& chain : phases[p].chains) {
            for (const auto& link : chain.links) {
                ps.length += link.segment->chord_length();
                ps.markers += link.segment->marker_intervals();
            }
        }
        d.phases.push_back(ps);
    }
}

}  // namespace

RunResult run(const Scene& scene, const VelocityField& field, const ButcherTableau& tableau,
              const ArmsParams& params, double k, double T, const RunOptions& options) {
    if (!(T >= 0.0)) throw ConfigError("final time T must be non-negative");
    if (!(k > 0.0)) throw ConfigError("time step k must be positive");
    const double ratio = T / k;
    const auto steps = static_cast<std::size_t>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(steps)) > 1e-9) {
        throw ConfigError("T/k must be an integer (within 1e-9)");
    }
    std::vector<std::pair<std::size_t, double>> marks;
    for (double f : options.snapshot_fractions) {
        const double at = f * static_cast<double>(steps);
        const auto idx = static_cast<std::size_t>(std::llround(at));
        if (f < 0.0 || f > 1.0 || std::abs(at - static_cast<double>(idx)) > 1e-9) {
            throw ConfigError("snapshot instant is not a whole number of steps");
        }
        marks.emplace_back(idx, f);
    }
    RunResult res;
    res.initial = initial_state(scene, params, k, options.spacing_fraction);
    TrackedState state = res.initial;
    auto& diag = res.diagnostics;
    auto emit = [&](std::size_t n) {
        if (options.record_phase_series) record_phases(state, diag);
        for (const auto& [idx, f] : marks) {
            if (idx == n && options.on_snapshot) options.on_snapshot(f, state);
        }
    };
    emit(0);
    for (std::size_t n = 0; n < steps; ++n) {
        StepRecord rec;
        state = step(state, field, tableau, &rec.splines);
        rec.step = state.step_index;
        rec.time = state.time;
        for (const auto& d : rec.splines) {
            diag.total_added += d.added;
            diag.total_removed += d.removed;
            diag.irregular_chords += d.irregular_chords;
            diag.warnings += d.warnings;
        }
        diag.steps.push_back(std::move(rec));
        emit(n + 1);
    }
    res.final_state = std::move(state);
    return res;
}

}  // namespace mars
