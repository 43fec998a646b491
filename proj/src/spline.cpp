#include "mars/spline.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mars {

std::vector<double> chordal_lengths(const std::vector<Point2>& points) {
    if (points.size() < 2) throw DegenerateError("chordal_lengths: need at least 2 points");
    std::vector<double> l(points.size(), 0.0);
    for (std::size_t i = 1; i < points.size(); ++i) {
        const double d = dist(points[i], points[i - 1]);
        if (!(d > 0.0)) {
            throw DegenerateError("chordal_lengths: coincident adjacent points at index " +
                                  std::to_string(i));
        }
        l[i] = l[i - 1] + d;
    }
    return l;
}

BreakpointSequence::BreakpointSequence(std::vector<Point2> points, bool closed)
    : points_(std::move(points)), closed_(closed) {
    for (const auto& p : points_) {
        if (!is_finite(p)) throw DegenerateError("BreakpointSequence: non-finite point");
    }
    lengths_ = chordal_lengths(points_);
    if (closed_ && !(points_.front() == points_.back())) {
        throw PreconditionError("BreakpointSequence: closed sequence must repeat its first point");
    }
}

const char* to_string(SplineKind kind) {
    return kind == SplineKind::Periodic ? "periodic" : "not-a-knot";
}

std::vector<std::vector<double>> MomentSystem::dense() const {
    std::vector<std::vector<double>> a(size(), std::vector<double>(size(), 0.0));
    for (std::size_t i = 0; i < size(); ++i) {
        for (const auto& e : rows[i]) a[i][e.col] += e.value;
    }
    return a;
}

double MomentSystem::infinity_norm() const {
    double best = 0.0;
    for (const auto& row : rows) {
        double s = 0.0;
        for (const auto& e : row) s += std::abs(e.value);
        best = std::max(best, s);
    }
    return best;
}

std::vector<double> MomentSystem::multiply(const std::vector<double>& v) const {
    std::vector<double> out(size(), 0.0);
    for (std::size_t i = 0; i < size(); ++i) {
        for (const auto& e : rows[i]) out[i] += e.value * v[e.col];
    }
    return out;
}

namespace {

double second_divided_difference(double la, double lb, double lc, double fa, double fb,
                                 double fc) {
    return ((fc - fb) / (lc - lb) - (fb - fa) / (lb - la)) / (lc - la);
}

void check_kind(const BreakpointSequence& seq, SplineKind kind) {
    if (seq.points().size() < 4) {
        throw PreconditionError("spline fit needs at least 4 breakpoints, got " +
                                std::to_string(seq.points().size()));
    }
    if (kind == SplineKind::Periodic && !seq.closed()) {
        throw PreconditionError("periodic spline requires a closed breakpoint sequence");
    }
}

void check_knots(const std::vector<double>& l) {
    if (l.size() < 4) {
        throw PreconditionError("spline fit needs at least 4 breakpoints, got " + std::to_string(l.size()));
    }
    for (std::size_t i = 1; i < l.size(); ++i) {
        if (!(l[i] > l[i - 1])) throw DegenerateError("spline knots must be strictly increasing");
    }
}

// Thomas algorithm; sub[0] and sup[n-1] are ignored.
std::vector<double> solve_tridiagonal(std::vector<double> sub, std::vector<double> diag,
                                      std::vector<double> sup, std::vector<double> rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - sup[i] * x[i + 1]) / diag[i];
    return x;
}

std::vector<double> solve_not_a_knot(const MomentSystem& sys) {
    const std::size_t n = sys.size() - 1;  // intervals
    const auto& mu = sys.mu;
    const auto& lam = sys.lambda;
    const auto& b = sys.rhs;
    // Adding row 1 to row 0 gives M_0 + M_1 + M_2 = b_1; eliminating M_0 from
    // row 1 with it and scaling leaves an equation in M_1, M_2 only. The same
    // happens at the other end, so M_1..M_{N-1} solve a diagonally dominant
    // tridiagonal system.
    const std::size_t m = n - 1;
    std::vector<double> sub(m, 0.0), diag(m, 0.0), sup(m, 0.0), rhs(m, 0.0);
    for (std::size_t i = 1; i <= n - 1; ++i) {
        const std::size_t r = i - 1;
        sub[r] = mu[i];
        diag[r] = 2.0;
        sup[r] = lam[i];
        rhs[r] = b[i];
    }
    const double m1 = mu[1];
    diag[0] = (2.0 - m1) / (1.0 - m1);
    sup[0] = (1.0 - 2.0 * m1) / (1.0 - m1);
    rhs[0] = b[1];
    const double ln = lam[n - 1];
    if (m == 1) {
        // N = 2 cannot occur (N >= 3 enforced), kept for clarity.
        throw PreconditionError("not-a-knot spline needs N >= 3");
    }
    sub[m - 1] = (1.0 - 2.0 * ln) / (1.0 - ln);
    diag[m - 1] = (2.0 - ln) / (1.0 - ln);
    rhs[m - 1] = b[n - 1];
    const auto inner = solve_tridiagonal(sub, diag, sup, rhs);
    std::vector<double> x(n + 1, 0.0);
    for (std::size_t i = 1; i <= n - 1; ++i) x[i] = inner[i - 1];
    x[0] = b[1] - x[1] - x[2];
    x[n] = b[n - 1] - x[n - 1] - x[n - 2];
    return x;
}

// Cyclic tridiagonal solve through a Sherman-Morrison correction.
std::vector<double> solve_periodic(const MomentSystem& sys) {
    const std::size_t n = sys.size();
    std::vector<double> sub(sys.mu), diag(n, 2.0), sup(sys.lambda);
    const double alpha = sys.lambda[n - 1];  // row n-1, column 0
    const double beta = sys.mu[0];           // row 0, column n-1
    const double gamma = -diag[0];
    diag[0] -= gamma;
    diag[n - 1] -= alpha * beta / gamma;
    const auto x = solve_tridiagonal(sub, diag, sup, sys.rhs);
    std::vector<double> u(n, 0.0);
    u[0] = gamma;
    u[n - 1] = alpha;
    const auto z = solve_tridiagonal(sub, diag, sup, u);
    const double fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - fact * z[i];
    return out;
}

}  // namespace

MomentSystem assemble_moment_system(const BreakpointSequence& seq, SplineKind kind,
                                    const std::vector<double>& data) {
    check_kind(seq, kind);
    return assemble_moment_system(seq.lengths(), kind, data);
}

MomentSystem assemble_moment_system(const std::vector<double>& l, SplineKind kind, const std::vector<double>& data) {
    check_knots(l);
    const std::size_t n = l.size() - 1;
    if (data.size() != n + 1) {
        throw PreconditionError("assemble_moment_system: data length does not match knots");
    }
    MomentSystem sys;
    sys.kind = kind;
    if (kind == SplineKind::NotAKnot) {
        sys.mu.assign(n + 1, 0.0);
        sys.lambda.assign(n + 1, 0.0);
        sys.rows.resize(n + 1);
        sys.rhs.assign(n + 1, 0.0);
        for (std::size_t i = 1; i < n; ++i) {
            sys.mu[i] = (l[i] - l[i - 1]) / (l[i + 1] - l[i - 1]);
            sys.lambda[i] = 1.0 - sys.mu[i];
            sys.rows[i] = {{i - 1, sys.mu[i]}, {i, 2.0}, {i + 1, sys.lambda[i]}};
            sys.rhs[i] = 6.0 * second_divided_difference(l[i - 1], l[i], l[i + 1], data[i - 1],
                                                         data[i], data[i + 1]);
        }
        sys.mu[0] = sys.mu[1];
        sys.lambda[0] = sys.lambda[1];
        sys.rows[0] = {{0, sys.lambda[1]}, {1, -1.0}, {2, sys.mu[1]}};
        sys.mu[n] = sys.mu[n - 1];
        sys.lambda[n] = sys.lambda[n - 1];
        sys.rows[n] = {{n - 2, sys.lambda[n - 1]}, {n - 1, -1.0}, {n, sys.mu[n - 1]}};
        return sys;
    }
    const double period = l[n];
    sys.mu.assign(n, 0.0);
    sys.lambda.assign(n, 0.0);
    sys.rows.resize(n);
    sys.rhs.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t prev = (i + n - 1) % n;
        const std::size_t next = i + 1;  // knot index, may equal n
        const double lp = i == 0 ? l[n - 1] - period : l[prev];
        const double li = l[i];
        const double ln = l[next];
        sys.mu[i] = (li - lp) / (ln - lp);
        sys.lambda[i] = 1.0 - sys.mu[i];
        sys.rows[i] = {{prev, sys.mu[i]}, {i, 2.0}, {next % n, sys.lambda[i]}};
        sys.rhs[i] = 6.0 * second_divided_difference(lp, li, ln, data[prev], data[i],
                                                     data[next % n]);
    }
    return sys;
}

std::vector<double> solve_moment_system(const MomentSystem& sys) {
    auto x = sys.kind == SplineKind::NotAKnot ? solve_not_a_knot(sys) : solve_periodic(sys);
    const auto ax = sys.multiply(x);
    double res = 0.0, xs = 0.0, bs = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i])) throw DegenerateError("moment system: non-finite solution");
        res = std::max(res, std::abs(ax[i] - sys.rhs[i]));
        xs = std::max(xs, std::abs(x[i]));
        bs = std::max(bs, std::abs(sys.rhs[i]));
    }
    if (res > 1e-12 * (sys.infinity_norm() * xs + bs) && res > 0.0) {
        throw DegenerateError("moment system: relative residual above 1e-12");
    }
    return x;
}

CubicSpline::CubicSpline(SplineKind kind, std::vector<double> knots, std::vector<Point2> values,
                         std::vector<Point2> moments)
    : kind_(kind), knots_(std::move(knots)), values_(std::move(values)),
      moments_(std::move(moments)) {}

CubicPiece CubicSpline::piece(std::size_t i) const {
    const double w = knots_[i + 1] - knots_[i];
    const Point2& f0 = values_[i];
    const Point2& f1 = values_[i + 1];
    const Point2& m0 = moments_[i];
    const Point2& m1 = moments_[i + 1];
    CubicPiece p;
    p.width = w;
    p.c0 = f0;
    p.c1 = (1.0 / w) * (f1 - f0) - (w / 6.0) * (2.0 * m0 + m1);
    p.c2 = 0.5 * m0;
    p.c3 = (1.0 / (6.0 * w)) * (m1 - m0);
    return p;
}

std::size_t CubicSpline::locate(double l, Side side) const {
    const std::size_t n = intervals();
    auto it = side == Side::Left ? std::lower_bound(knots_.begin(), knots_.end(), l)
                                 : std::upper_bound(knots_.begin(), knots_.end(), l);
    std::ptrdiff_t i = (it - knots_.begin()) - 1;
    if (i < 0) i = 0;
    if (i > static_cast<std::ptrdiff_t>(n) - 1) i = static_cast<std::ptrdiff_t>(n) - 1;
    return static_cast<std::size_t>(i);
}

Point2 CubicSpline::eval(double l, int derivative_order, Side side) const {
    const double span = back() - front();
    const double slack = 1e-12 * span;
    if (!(l >= front() - slack && l <= back() + slack)) {
        throw PreconditionError("spline eval: parameter outside [l_0, l_N]");
    }
    l = std::clamp(l, front(), back());
    const std::size_t i = locate(l, side);
    const CubicPiece p = piece(i);
    const double t = l - knots_[i];
    switch (derivative_order) {
        case 0: return p.value(t);
        case 1: return p.derivative(t);
        case 2: return 2.0 * p.c2 + (6.0 * t) * p.c3;
        case 3: return 6.0 * p.c3;
        default: throw PreconditionError("spline eval: derivative order must be 0..3");
    }
}

CubicSpline fit(const BreakpointSequence& seq, SplineKind kind) {
    check_kind(seq, kind);
    return interpolate(seq.lengths(), seq.points(), kind);
}

CubicSpline interpolate(const std::vector<double>& knots, const std::vector<Point2>& values, SplineKind kind) {
    check_knots(knots);
    const std::size_t n = knots.size() - 1;
    if (values.size() != n + 1) throw PreconditionError("interpolate: one value per knot required");
    if (kind == SplineKind::Periodic && !(values.front() == values.back())) {
        throw PreconditionError("periodic spline requires equal first and last values");
    }
    std::vector<double> xs(n + 1), ys(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        xs[i] = values[i].x;
        ys[i] = values[i].y;
    }
    const auto mx = solve_moment_system(assemble_moment_system(knots, kind, xs));
    const auto my = solve_moment_system(assemble_moment_system(knots, kind, ys));
    std::vector<Point2> moments(n + 1);
    for (std::size_t i = 0; i < mx.size(); ++i) moments[i] = {mx[i], my[i]};
    if (kind == SplineKind::Periodic) moments[n] = moments[0];
    return CubicSpline(kind, knots, values, std::move(moments));
}

double curvature_radius(const CubicSpline& spline, double l, Side side) {
    const Point2 d1 = spline.eval(l, 1, side);
    const Point2 d2 = spline.eval(l, 2, side);
    const double speed = norm(d1);
    if (speed < 1e-12) throw DegenerateError("curvature_radius: zero-speed parametrization");
    const double num = speed * speed * speed;
    const double den = std::abs(cross(d1, d2));
    if (den <= 1e-14 * num) return kInfiniteRadius;
    return num / den;
}

}  // namespace mars
