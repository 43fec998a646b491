#pragma once

#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mars/flow.hpp"
#include "mars/geometry.hpp"
#include "mars/spline.hpp"

namespace mars {

struct ConstantHl {
    double h_L = 0.0;
};

struct CurvatureHl {
    double h_L_c = 0.0;
    double rho_min = 1e-5;
    double rho_max = 0.2;
    double r_min_c = 0.01;
    // Monotone bijection of [0, 1]; identity when empty.
    std::function<double(double)> sigma;
    std::string sigma_name = "linear";
};

struct ArmsParams {
    double r_tiny = 0.1;
    std::variant<ConstantHl, CurvatureHl> hl = ConstantHl{};
    double r_b_star = 1.5;

    // Nominal h_L: the constant, or h_L^c for the curvature rule.
    double nominal_h_L() const;
    bool curvature_based() const { return std::holds_alternative<CurvatureHl>(hl); }
};

// Throws ConfigError naming the violated bound.
void validate(const ArmsParams& params);

double h_L_of_radius(const ArmsParams& params, double rho);

// True iff every chord lies in [r h, h].
bool is_regular(const BreakpointSequence& seq, double r, double h);
// Per-chord upper bounds h[i] for chord (i, i+1).
bool is_regular(const BreakpointSequence& seq, double r, const std::vector<double>& h);

struct MarkerChain {
    std::vector<Point2> points;
    std::vector<double> params;  // preimage parameters on s^n
    std::vector<bool> characteristic;
    std::vector<double> radius;  // curvature radius of s^n at each preimage
    bool closed = false;  // closing chord runs from the last marker to the first
    double period = 0.0;  // preimage parameter of the closing knot (closed only)

    std::size_t size() const { return points.size(); }
    std::size_t chords() const { return closed ? size() : size() - 1; }
    double chord(std::size_t j) const { return dist(points[j], points[(j + 1) % size()]); }
};

struct ArmsDiagnostics {
    std::size_t added = 0;
    std::size_t removed = 0;
    std::size_t markers = 0;
    double length = 0.0;
    double mu_variation = 0.0;
    std::size_t warnings = 0;
    // Chords outside [r_tiny h_L, h_L] in the output (per-chord h_L).
    std::size_t irregular_chords = 0;
    std::vector<std::string> messages;

    ArmsDiagnostics& operator+=(const ArmsDiagnostics& o);
};

double mu_variation(const MarkerChain& chain, double h_L);

using CurveMap = std::function<Point2(double)>;

// Returns l in (l_l, l_r) with |S(l) - S(l_l)| in [low, high].
double bisection_search(const CurveMap& S, double l_l, double l_r, double low, double high);

struct EndMarker {
    double param;
    Point2 point;
};

// Resequences the markers between S(l0) and S(l1) so the first chord is
// shorter than the second by the factor r_b_star.
std::vector<EndMarker> adjust_ends(const CurveMap& S, double l0, double l1, double r_tiny, double h_L,
                                   double r_b_star);

// h_L that bounds chord j: the constant, or the curvature rule applied to
// the smaller radius of the chord's two markers.
double chord_h_L(const ArmsParams& params, const MarkerChain& chain, std::size_t j);

// Stage ARMS-2: insert images of equidistant preimage points until every
// chord is at most (1 - 2 r_tiny) h_L. radius_at may be empty for a
// constant h_L. Returns the number of insertions.
std::size_t enforce_upper_bound(MarkerChain& chain, const ArmsParams& params, const CurveMap& image,
                                const std::function<double(double)>& radius_at);
// Stage ARMS-3: remove markers closer than r_tiny h_L, protecting
// characteristic markers. Returns the number of removals.
std::size_t enforce_lower_bound(MarkerChain& chain, const ArmsParams& params, ArmsDiagnostics& diag);
// Stage ARMS-4 for open chains: restore the end-ratio condition at both
// ends. Returns the net number of (added, removed) markers.
std::pair<std::size_t, std::size_t> enforce_end_ratio(MarkerChain& chain, const ArmsParams& params,
                                                      const CurveMap& image,
                                                      const std::function<double(double)>& radius_at);

struct ArmsResult {
    CubicSpline spline;
    std::vector<std::size_t> characteristic;
    ArmsDiagnostics diagnostics;
};

// One ARMS step on spline s_n with characteristic knot indices z_n. The
// marker map sends a point of s_n to its image at the next time level.
ArmsResult arms_step(const std::function<Point2(Point2)>& marker_map, const CubicSpline& s_n,
                     const std::vector<std::size_t>& z_n, const ArmsParams& params);
// Same with the discrete flow map started at time t.
ArmsResult arms_step(const DiscreteFlowMap& map, double t, const CubicSpline& s_n,
                     const std::vector<std::size_t>& z_n, const ArmsParams& params);

}  // namespace mars
