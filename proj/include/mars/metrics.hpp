#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mars/scene.hpp"
#include "mars/topology.hpp"

namespace mars {

// Uniform grid on the unit square with n x n cells of size h = 1/n.
struct Grid {
    std::size_t n = 0;
    double h = 0.0;

    static Grid from_h(double h);
    std::size_t cells() const { return n * n; }
    friend bool operator==(const Grid&, const Grid&) = default;
};

struct PhaseAreaField {
    Grid grid;
    std::vector<std::string> names;
    std::vector<std::vector<double>> area;  // [phase][row * n + col]

    double cell(std::size_t phase, std::size_t row, std::size_t col) const {
        return area[phase][row * grid.n + col];
    }
    double total(std::size_t phase) const;
};

struct ErrorReport {
    double h = 0.0;
    std::vector<std::string> names;
    std::vector<double> per_phase;
    double total = 0.0;
};

struct PhasePolygons {
    std::string name;
    std::vector<std::vector<Point2>> polygons;  // implicitly closed, oriented
    std::vector<std::size_t> component;         // per polygon
    std::vector<std::size_t> unbounded_components;
};

double signed_area(const std::vector<Point2>& polygon);

// Polygons through points of the boundary splines, at most max_spacing
// apart in the chordal parameter.
std::vector<PhasePolygons> sample_boundary(const std::vector<PhaseBoundary>& phases, double max_spacing);

// Per-cell areas by clipping the polygons against every cell.
PhaseAreaField cell_areas(const std::vector<PhasePolygons>& phases, const Grid& grid);

// Per-cell areas integrated exactly along the cubic pieces.
PhaseAreaField spline_cell_areas(const std::vector<PhaseBoundary>& phases, const Grid& grid);

// Exact areas of the scene's own geometry: arcs and segments in closed form,
// other curves through a dense polygon with 2^20 samples per edge.
PhaseAreaField reference_areas(const Scene& scene, const Grid& grid);

ErrorReport it_error(const PhaseAreaField& reference, const PhaseAreaField& computed);

// rate_i = log2(E_i / E_{i+1}) for consecutive halvings; NaN if an error is 0.
std::vector<double> convergence_rates(const std::vector<std::pair<double, double>>& errors);

}  // namespace mars
