#include "mars/arms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mars {

double ArmsParams::nominal_h_L() const {
    if (const auto* c = std::get_if<ConstantHl>(&hl)) return c->h_L;
    return std::get<CurvatureHl>(hl).h_L_c;
}

void validate(const ArmsParams& p) {
    if (!(p.r_tiny > 0.0 && p.r_tiny < 1.0 / 3.0)) throw ConfigError("r_tiny must lie in (0, 1/3)");
    if (!(p.nominal_h_L() > 0.0)) throw ConfigError("h_L must be positive");
    if (!(p.r_b_star > 1.0 && p.r_b_star < 1.0 / (2.0 * p.r_tiny))) {
        throw ConfigError("r_b_star must lie in (1, 1/(2 r_tiny))");
    }
    if (!(p.r_tiny < std::min(1.0 / 6.0, 1.0 / (2.0 * p.r_b_star)))) {
        throw ConfigError("r_tiny must be below min(1/6, 1/(2 r_b_star))");
    }
    if (const auto* c = std::get_if<CurvatureHl>(&p.hl)) {
        if (!(c->rho_min > 0.0 && c->rho_max > c->rho_min)) {
            throw ConfigError("curvature h_L needs 0 < rho_min < rho_max");
        }
        if (!(c->r_min_c > 0.0 && c->r_min_c <= 1.0)) throw ConfigError("r_min must lie in (0, 1]");
    }
}

double h_L_of_radius(const ArmsParams& params, double rho) {
    if (const auto* c = std::get_if<ConstantHl>(&params.hl)) return c->h_L;
    const auto& c = std::get<CurvatureHl>(params.hl);
    const double r_min = std::max(c.r_min_c, c.rho_min / c.rho_max);
    if (rho <= c.rho_min) return r_min * c.h_L_c;
    if (rho >= c.rho_max) return c.h_L_c;
    const double x = (rho - c.rho_min) / (c.rho_max - c.rho_min);
    const double s = c.sigma ? c.sigma(x) : x;
    return r_min * c.h_L_c + (1.0 - r_min) * c.h_L_c * s;
}

bool is_regular(const BreakpointSequence& seq, double r, double h) {
    const auto& l = seq.lengths();
    for (std::size_t i = 1; i < l.size(); ++i) {
        const double d = l[i] - l[i - 1];
        if (d < r * h || d > h) return false;
    }
    return true;
}

bool is_regular(const BreakpointSequence& seq, double r, const std::vector<double>& h) {
    const auto& l = seq.lengths();
    if (h.size() + 1 < l.size()) throw PreconditionError("is_regular: one bound per chord required");
    for (std::size_t i = 1; i < l.size(); ++i) {
        const double d = l[i] - l[i - 1];
        if (d < r * h[i - 1] || d > h[i - 1]) return false;
    }
    return true;
}

ArmsDiagnostics& ArmsDiagnostics::operator+=(const ArmsDiagnostics& o) {
    added += o.added;
    removed += o.removed;
    markers += o.markers;
    length += o.length;
    mu_variation += o.mu_variation;
    warnings += o.warnings;
    irregular_chords += o.irregular_chords;
    messages.insert(messages.end(), o.messages.begin(), o.messages.end());
    return *this;
}

double mu_variation(const MarkerChain& chain, double h_L) {
    if (chain.size() < 2) throw PreconditionError("mu_variation: need at least 2 markers");
    double v = 0.0;
    for (std::size_t j = 0; j < chain.chords(); ++j) v += std::abs(chain.chord(j) - h_L / 3.0);
    return v;
}

double bisection_search(const CurveMap& S, double l_l, double l_r, double low, double high) {
    const Point2 pl = S(l_l);
    const double full = dist(S(l_r), pl);
    if (!(low >= 0.0 && low < high && high <= full)) {
        std::ostringstream msg;
        msg << "bisection_search: need 0 <= low < high <= chord (low " << low << ", high " << high
            << ", chord " << full << ")";
        throw PreconditionError(msg.str());
    }
    double l = 0.5 * (l_l + l_r);
    for (int it = 0; it < 200; ++it) {
        const double d = dist(S(l), pl);
        if (d >= low && d <= high) return l;
        if (d < low) {
            l_l = l;
        } else {
            l_r = l;
        }
        l = 0.5 * (l_l + l_r);
    }
    throw DegenerateError("bisection_search: no convergence (curve map not continuous?)");
}

std::vector<EndMarker> adjust_ends(const CurveMap& S, double l0, double l1, double r_tiny, double h_L,
                                   double r_b_star) {
    if (!(r_b_star > 1.0 && r_b_star < 1.0 / (2.0 * r_tiny)) ||
        !(r_tiny < std::min(1.0 / 6.0, 1.0 / (2.0 * r_b_star)))) {
        throw PreconditionError("adjust_ends: r_tiny and r_b_star out of range");
    }
    const Point2 p0 = S(l0);
    const Point2 p1 = S(l1);
    const double d = dist(p0, p1);
    if (!(d > (1.0 + r_b_star) * r_tiny * h_L)) {
        throw PreconditionError("adjust_ends: |p1 - p0| must exceed (1 + r_b*) r_tiny h_L");
    }
    std::vector<EndMarker> q{{l0, p0}};
    double l = bisection_search(S, l0, l1, r_tiny * h_L, std::min(h_L / (2.0 * r_b_star), d / (1.0 + r_b_star)));
    q.push_back({l, S(l)});
    while (dist(p1, q.back().point) > h_L) {
        const double gap = dist(p1, q.back().point);
        l = bisection_search(S, l, l1, h_L / 2.0, std::min(h_L, gap / 2.0));
        q.push_back({l, S(l)});
    }
    q.push_back({l1, p1});
    return q;
}

double chord_h_L(const ArmsParams& params, const MarkerChain& chain, std::size_t j) {
    if (!params.curvature_based()) return params.nominal_h_L();
    const std::size_t k = (j + 1) % chain.size();
    return h_L_of_radius(params, std::min(chain.radius[j], chain.radius[k]));
}

namespace {

void erase_marker(MarkerChain& c, std::size_t i) {
    if (c.size() <= 2) throw ResolutionError("ARMS: removing a marker would leave a single marker");
    c.points.erase(c.points.begin() + static_cast<std::ptrdiff_t>(i));
    c.params.erase(c.params.begin() + static_cast<std::ptrdiff_t>(i));
    c.characteristic.erase(c.characteristic.begin() + static_cast<std::ptrdiff_t>(i));
    if (!c.radius.empty()) c.radius.erase(c.radius.begin() + static_cast<std::ptrdiff_t>(i));
}

void insert_marker(MarkerChain& c, std::size_t i, double param, Point2 p, double rho) {
    c.points.insert(c.points.begin() + static_cast<std::ptrdiff_t>(i), p);
    c.params.insert(c.params.begin() + static_cast<std::ptrdiff_t>(i), param);
    c.characteristic.insert(c.characteristic.begin() + static_cast<std::ptrdiff_t>(i), false);
    if (!c.radius.empty()) c.radius.insert(c.radius.begin() + static_cast<std::ptrdiff_t>(i), rho);
}

void warn(ArmsDiagnostics& diag, const std::string& what) {
    ++diag.warnings;
    if (diag.messages.size() < 16) diag.messages.push_back(what);
}

Point2 checked(Point2 p) {
    if (!is_finite(p)) throw DegenerateError("ARMS: flow map produced a non-finite point");
    return p;
}

}  // namespace

std::size_t enforce_upper_bound(MarkerChain& chain, const ArmsParams& params, const CurveMap& image,
                                const std::function<double(double)>& radius_at) {
    const double shrink = 1.0 - 2.0 * params.r_tiny;
    std::size_t added = 0;
    for (int pass = 0; pass < 64; ++pass) {
        MarkerChain next;
        next.closed = chain.closed;
        next.period = chain.period;
        const bool with_radius = !chain.radius.empty();
        auto push = [&](Point2 p, double l, bool ch, double rho) {
            next.points.push_back(p);
            next.params.push_back(l);
            next.characteristic.push_back(ch);
            if (with_radius) next.radius.push_back(rho);
        };
        bool changed = false;
        for (std::size_t j = 0; j < chain.size(); ++j) {
            push(chain.points[j], chain.params[j], chain.characteristic[j], with_radius ? chain.radius[j] : 0.0);
            if (j == chain.chords()) break;
            const double d = chain.chord(j);
            const double bound = shrink * chord_h_L(params, chain, j);
            if (d <= bound) continue;
            const auto m = static_cast<std::size_t>(std::ceil(d / bound));
            const double a = chain.params[j];
            const double b = j + 1 < chain.size() ? chain.params[j + 1] : chain.period;
            for (std::size_t i = 1; i < m; ++i) {
                const double l = a + (b - a) * static_cast<double>(i) / static_cast<double>(m);
                push(checked(image(l)), l, false, with_radius ? radius_at(l) : 0.0);
            }
            added += m - 1;
            changed = true;
        }
        chain = std::move(next);
        if (!changed) return added;
    }
    throw ResolutionError("ARMS: chord upper bound not reached after 64 subdivision passes");
}

std::size_t enforce_lower_bound(MarkerChain& chain, const ArmsParams& params, ArmsDiagnostics& diag) {
    std::size_t removed = 0;
    auto low = [&](std::size_t j) { return params.r_tiny * chord_h_L(params, chain, j); };
    // Neighbours of characteristic markers first.
    for (std::size_t j = 0; j < chain.size(); ++j) {
        if (!chain.characteristic[j]) continue;
        while (chain.closed || j + 1 < chain.size()) {
            const std::size_t nxt = (j + 1) % chain.size();
            if (chain.chord(j) >= low(j)) break;
            if (chain.characteristic[nxt]) {
                warn(diag, "two characteristic markers closer than r_tiny h_L");
                break;
            }
            erase_marker(chain, nxt);
            ++removed;
            if (nxt < j) --j;
        }
        while (chain.closed || j > 0) {
            const std::size_t prv = (j + chain.size() - 1) % chain.size();
            if (chain.characteristic[prv] || chain.chord(prv) >= low(prv)) break;
            erase_marker(chain, prv);
            ++removed;
            if (prv < j) --j;
        }
    }
    // Left-to-right sweep.
    std::size_t j = 0;
    while (j < chain.chords()) {
        if (chain.chord(j) >= low(j)) {
            ++j;
            continue;
        }
        const std::size_t nxt = (j + 1) % chain.size();
        if (!chain.characteristic[nxt]) {
            erase_marker(chain, nxt);
            ++removed;
            if (nxt < j) --j;
            continue;
        }
        if (!chain.characteristic[j]) {
            erase_marker(chain, j);
            ++removed;
            if (j > 0) --j;
            continue;
        }
        warn(diag, "two characteristic markers closer than r_tiny h_L");
        ++j;
    }
    return removed;
}

namespace {

// Restores r_b* |p1 - p0| <= |p2 - p1| at the start of an open chain.
std::pair<std::size_t, std::size_t> fix_start(MarkerChain& c, const ArmsParams& params, const CurveMap& image,
                                              const std::function<double(double)>& radius_at) {
    const double rb = params.r_b_star;
    if (rb * dist(c.points[1], c.points[0]) <= dist(c.points[2], c.points[1])) return {0, 0};
    std::size_t removed = 0;
    double h = chord_h_L(params, c, 0);
    while (dist(c.points[1], c.points[0]) <= (1.0 + rb) * params.r_tiny * h) {
        if (c.characteristic[1]) {
            throw ResolutionError("ARMS: end repair would remove a characteristic marker");
        }
        erase_marker(c, 1);
        ++removed;
        h = chord_h_L(params, c, 0);
    }
    if (params.curvature_based()) {
        h = std::min(h, h_L_of_radius(params, radius_at(0.5 * (c.params[0] + c.params[1]))));
    }
    const auto q = adjust_ends(image, c.params[0], c.params[1], params.r_tiny, h, rb);
    for (std::size_t i = 1; i + 1 < q.size(); ++i) {
        insert_marker(c, i, q[i].param, checked(q[i].point), c.radius.empty() ? 0.0 : radius_at(q[i].param));
    }
    return {q.size() - 2, removed};
}

void reverse_chain(MarkerChain& c) {
    std::reverse(c.points.begin(), c.points.end());
    std::reverse(c.params.begin(), c.params.end());
    for (auto& l : c.params) l = -l;
    std::reverse(c.characteristic.begin(), c.characteristic.end());
    std::reverse(c.radius.begin(), c.radius.end());
}

}  // namespace

std::pair<std::size_t, std::size_t> enforce_end_ratio(MarkerChain& chain, const ArmsParams& params,
                                                      const CurveMap& image,
                                                      const std::function<double(double)>& radius_at) {
    if (chain.closed) return {0, 0};
    auto [a0, r0] = fix_start(chain, params, image, radius_at);
    reverse_chain(chain);
    const CurveMap mirrored = [&](double u) { return image(-u); };
    const std::function<double(double)> mirrored_radius = [&](double u) { return radius_at(-u); };
    std::pair<std::size_t, std::size_t> back{0, 0};
    try {
        back = fix_start(chain, params, mirrored, mirrored_radius);
    } catch (...) {
        reverse_chain(chain);
        throw;
    }
    reverse_chain(chain);
    return {a0 + back.first, r0 + back.second};
}

ArmsResult arms_step(const std::function<Point2(Point2)>& marker_map, const CubicSpline& s_n,
                     const std::vector<std::size_t>& z_n, const ArmsParams& params) {
    validate(params);
    const bool closed = s_n.kind() == SplineKind::Periodic;
    const std::size_t n = s_n.intervals();
    const std::size_t count = closed ? n : n + 1;
    const auto& knots = s_n.knots();
    const auto& values = s_n.values();

    MarkerChain chain;
    chain.closed = closed;
    chain.period = knots[n];
    chain.characteristic.assign(count, false);
    for (std::size_t z : z_n) {
        if (z > n) throw PreconditionError("arms_step: characteristic index out of range");
        chain.characteristic[z % count] = true;
    }
    // A closed chain is anchored at its first marker.
    if (closed) chain.characteristic[0] = true;

    const bool curvature = params.curvature_based();
    const std::function<double(double)> radius_at = [&](double l) { return curvature_radius(s_n, l); };
    const CurveMap image = [&](double l) { return marker_map(s_n.eval(l)); };

    // ARMS-1: images of the current breakpoints.
    for (std::size_t i = 0; i < count; ++i) {
        chain.points.push_back(checked(marker_map(values[i])));
        chain.params.push_back(knots[i]);
        if (curvature) chain.radius.push_back(radius_at(knots[i]));
    }
    {
        std::size_t prev = count;
        for (std::size_t i = 0; i < count; ++i) {
            if (!chain.characteristic[i]) continue;
            if (prev != count && dist(chain.points[i], chain.points[prev]) < 1e-12) {
                throw DegenerateError("arms_step: characteristic markers collide");
            }
            prev = i;
        }
    }

    ArmsResult res;
    auto& diag = res.diagnostics;
    diag.added += enforce_upper_bound(chain, params, image, radius_at);   // ARMS-2
    diag.removed += enforce_lower_bound(chain, params, diag);            // ARMS-3
    if (chain.size() < 4) throw ResolutionError("ARMS: fewer than 4 markers left; h_L too coarse");
    if (!closed) {                                                       // ARMS-4
        const auto [a, r] = enforce_end_ratio(chain, params, image, radius_at);
        diag.added += a;
        diag.removed += r;
    }
    if (chain.size() < 4) throw ResolutionError("ARMS: fewer than 4 markers left");

    diag.markers = chain.size();
    for (std::size_t j = 0; j < chain.chords(); ++j) {
        const double d = chain.chord(j);
        const double h = chord_h_L(params, chain, j);
        diag.length += d;
        if (d < params.r_tiny * h || d > h) ++diag.irregular_chords;
    }
    diag.mu_variation = mu_variation(chain, params.nominal_h_L());
    for (std::size_t i = 0; i < chain.size(); ++i) {
        if (chain.characteristic[i]) res.characteristic.push_back(i);
    }
    std::vector<Point2> pts = chain.points;
    if (closed) pts.push_back(pts.front());
    res.spline = fit(BreakpointSequence(std::move(pts), closed),
                     closed ? SplineKind::Periodic : SplineKind::NotAKnot);
    return res;
}

ArmsResult arms_step(const DiscreteFlowMap& map, double t, const CubicSpline& s_n,
                     const std::vector<std::size_t>& z_n, const ArmsParams& params) {
    return arms_step([&](Point2 p) { return rk_step(map, p, t); }, s_n, z_n, params);
}

}  // namespace mars
