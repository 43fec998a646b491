#pragma once

#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "mars/geometry.hpp"

namespace mars {

// Cumulative chordal lengths: l_0 = 0, l_i = l_{i-1} + |X_i - X_{i-1}|.
// Throws DegenerateError on coincident neighbours.
std::vector<double> chordal_lengths(const std::vector<Point2>& points);

// Markers together with their cumulative chordal lengths. A closed sequence
// repeats its first point at the end.
class BreakpointSequence {
public:
    BreakpointSequence() = default;
    BreakpointSequence(std::vector<Point2> points, bool closed);

    const std::vector<Point2>& points() const { return points_; }
    const std::vector<double>& lengths() const { return lengths_; }
    bool closed() const { return closed_; }
    // Number of intervals N (points().size() - 1).
    std::size_t intervals() const { return points_.size() - 1; }

private:
    std::vector<Point2> points_;
    std::vector<double> lengths_;
    bool closed_ = false;
};

enum class SplineKind { Periodic, NotAKnot };

const char* to_string(SplineKind kind);

// Moment system A M = b for one coordinate. Rows are stored sparsely so the
// corner entries of both spline kinds fit the same layout.
struct MomentSystem {
    struct Entry {
        std::size_t col;
        double value;
    };
    SplineKind kind = SplineKind::NotAKnot;
    std::vector<double> mu;      // per row, sub-diagonal weight
    std::vector<double> lambda;  // per row, super-diagonal weight
    std::vector<std::vector<Entry>> rows;
    std::vector<double> rhs;

    std::size_t size() const { return rows.size(); }
    std::vector<std::vector<double>> dense() const;
    double infinity_norm() const;
    std::vector<double> multiply(const std::vector<double>& v) const;
};

// Builds the system for data values f_i sampled at the sequence's knots.
// Periodic systems have N unknowns (M_0..M_{N-1}); not-a-knot have N+1.
MomentSystem assemble_moment_system(const BreakpointSequence& seq, SplineKind kind,
                                    const std::vector<double>& data);
// Same on explicit strictly increasing knots.
MomentSystem assemble_moment_system(const std::vector<double>& knots, SplineKind kind,
                                    const std::vector<double>& data);

// Solves a moment system with the elimination that matches its kind.
std::vector<double> solve_moment_system(const MomentSystem& sys);

enum class Side { TwoSided, Left, Right };

struct CubicPiece {
    // p(t) = c0 + c1 t + c2 t^2 + c3 t^3 with t = l - l_i, t in [0, width].
    Point2 c0, c1, c2, c3;
    double width = 0.0;

    Point2 value(double t) const { return c0 + t * (c1 + t * (c2 + t * c3)); }
    Point2 derivative(double t) const { return c1 + t * (2.0 * c2 + 3.0 * t * c3); }
};

class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(SplineKind kind, std::vector<double> knots, std::vector<Point2> values,
                std::vector<Point2> moments);

    SplineKind kind() const { return kind_; }
    const std::vector<double>& knots() const { return knots_; }
    const std::vector<Point2>& values() const { return values_; }
    const std::vector<Point2>& moments() const { return moments_; }
    std::size_t intervals() const { return knots_.size() - 1; }
    double front() const { return knots_.front(); }
    double back() const { return knots_.back(); }

    // Coefficients of interval i, derived from values and moments on demand.
    CubicPiece piece(std::size_t i) const;
    // Interval containing l; at an interior knot Left picks the interval to
    // its left, otherwise the one to its right.
    std::size_t locate(double l, Side side = Side::TwoSided) const;

    Point2 eval(double l, int derivative_order = 0, Side side = Side::TwoSided) const;

private:
    SplineKind kind_ = SplineKind::NotAKnot;
    std::vector<double> knots_;
    std::vector<Point2> values_;
    std::vector<Point2> moments_;
};

CubicSpline fit(const BreakpointSequence& seq, SplineKind kind);
// Interpolates values at explicit knots; periodic data repeats its first value.
CubicSpline interpolate(const std::vector<double>& knots, const std::vector<Point2>& values, SplineKind kind);

inline constexpr double kInfiniteRadius = std::numeric_limits<double>::infinity();

// Radius of curvature; kInfiniteRadius when the curve is locally straight.
// Left/Right select the interval at a knot, which matters only where the
// spline is not C2 (the ends of the parameter range).
double curvature_radius(const CubicSpline& spline, double l, Side side = Side::TwoSided);

}  // namespace mars
