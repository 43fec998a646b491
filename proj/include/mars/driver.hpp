#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "mars/arms.hpp"
#include "mars/flow.hpp"
#include "mars/scene.hpp"
#include "mars/topology.hpp"

namespace mars {

// Everything that stays fixed during a run.
struct Topology {
    InterfaceGraph graph;
    EdgePairing pairing;
    CycleSet cycles;
    std::vector<Walk> walks;  // circuits first, then trails
    std::vector<std::string> phase_names() const;
};

struct TrackedState {
    std::size_t step_index = 0;
    double start_time = 0.0;
    double time = 0.0;  // start_time + step_index * k
    FittedSplineSet fitted;
    std::shared_ptr<const Topology> topology;
    ArmsParams params;
    double k = 0.0;
};

// Partitions the scene's graph and fits the initial splines through markers
// spaced at fraction * h_L(min radius of the edge), capped by the scene's own
// marker spacing when it sets one.
TrackedState initial_state(const Scene& scene, const ArmsParams& params, double k,
                           double spacing_fraction = 0.5);

// Per-spline diagnostics of the step are appended to diag when given.
TrackedState step(const TrackedState& state, const VelocityField& field, const ButcherTableau& tableau,
                  std::vector<ArmsDiagnostics>* diag = nullptr);

std::vector<PhaseBoundary> snapshot(const TrackedState& state);

struct PhaseSample {
    std::size_t step = 0;
    double time = 0.0;
    std::size_t phase = 0;
    double length = 0.0;  // sum of boundary chord lengths
    std::size_t markers = 0;
};

struct StepRecord {
    std::size_t step = 0;
    double time = 0.0;
    std::vector<ArmsDiagnostics> splines;
};

struct RunDiagnostics {
    std::vector<StepRecord> steps;
    std::vector<PhaseSample> phases;
    std::size_t total_added = 0;
    std::size_t total_removed = 0;
    std::size_t irregular_chords = 0;
    std::size_t warnings = 0;
};

struct RunOptions {
    double spacing_fraction = 0.5;
    // Instants as fractions of T; the callback sees the state there.
    std::vector<double> snapshot_fractions;
    std::function<void(double fraction, const TrackedState&)> on_snapshot;
    bool record_phase_series = true;
};

struct RunResult {
    TrackedState initial;
    TrackedState final_state;
    RunDiagnostics diagnostics;
};

RunResult run(const Scene& scene, const VelocityField& field, const ButcherTableau& tableau,
              const ArmsParams& params, double k, double T, const RunOptions& options = {});

// Worker threads used within a step (MARS_THREADS, default 1).
unsigned thread_count();

}  // namespace mars
