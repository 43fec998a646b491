#include "mars/flow.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace mars {

namespace {
constexpr double kPi = std::numbers::pi;
}

Point2 velocity(const VelocityField& field, Point2 p, double t) {
    if (const auto* v = std::get_if<VortexField>(&field)) {
        const double g = std::cos(kPi * t / v->period);
        const double sx = std::sin(kPi * p.x);
        const double sy = std::sin(kPi * p.y);
        return {-sx * sx * std::sin(2 * kPi * p.y) * g, std::sin(2 * kPi * p.x) * sy * sy * g};
    }
    if (const auto* d = std::get_if<DeformationField>(&field)) {
        const double g = std::cos(kPi * t / d->period);
        const double n = d->vortices * kPi;
        const double ax = n * (p.x + 0.5);
        const double ay = n * (p.y + 0.5);
        return {std::sin(ax) * std::sin(ay) * g, std::cos(ax) * std::cos(ay) * g};
    }
    return std::get<CustomField>(field).u(p, t);
}

double stream_function(const VelocityField& field, Point2 p, double t) {
    if (const auto* v = std::get_if<VortexField>(&field)) {
        const double sx = std::sin(kPi * p.x);
        const double sy = std::sin(kPi * p.y);
        return -sx * sx * sy * sy * std::cos(kPi * t / v->period) / kPi;
    }
    if (const auto* d = std::get_if<DeformationField>(&field)) {
        const double n = d->vortices * kPi;
        return -std::sin(n * (p.x + 0.5)) * std::cos(n * (p.y + 0.5)) * std::cos(kPi * t / d->period) / n;
    }
    throw PreconditionError("stream_function: custom fields have no stream function");
}

VelocityField zero_field() {
    return CustomField{[](Point2, double) { return Point2{0.0, 0.0}; }, "zero"};
}

std::string field_name(const VelocityField& field) {
    if (std::holds_alternative<VortexField>(field)) return "vortex";
    if (std::holds_alternative<DeformationField>(field)) return "deformation";
    return std::get<CustomField>(field).name;
}

ButcherTableau parse_tableau(const std::string& text, const std::string& name) {
    ButcherTableau tab;
    tab.name = name;
    std::size_t stages = 0;
    std::istringstream in(text);
    std::string line;
    auto fail = [&](const std::string& why) { throw ConfigError("tableau " + name + ": " + why); };
    auto read_values = [&](std::istringstream& ls) {
        std::vector<double> v;
        std::string tok;
        while (ls >> tok) {
            try {
                v.push_back(std::stod(tok));
            } catch (const std::exception&) {
                fail("bad number '" + tok + "'");
            }
        }
        return v;
    };
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "order") {
            ls >> tab.order;
        } else if (key == "stages") {
            ls >> stages;
            tab.a.assign(stages, {});
        } else if (key == "c") {
            tab.c = read_values(ls);
        } else if (key == "b") {
            tab.b = read_values(ls);
        } else if (key == "a") {
            std::size_t i = 0;
            ls >> i;
            if (i == 0 || i >= stages) fail("row index out of range");
            tab.a[i] = read_values(ls);
            if (tab.a[i].size() != i) fail("row " + std::to_string(i) + " must have " + std::to_string(i) + " entries");
        } else if (!key.empty()) {
            fail("unknown key '" + key + "'");
        }
    }
    if (tab.order <= 0 || stages == 0) fail("missing order or stages");
    if (tab.b.size() != stages || tab.c.size() != stages) fail("b and c need one entry per stage");
    double sb = 0.0;
    for (double x : tab.b) sb += x;
    if (std::abs(sb - 1.0) > 1e-14) fail("weights do not sum to 1");
    for (std::size_t i = 0; i < stages; ++i) {
        double s = 0.0;
        for (double x : tab.a[i]) s += x;
        if (std::abs(s - tab.c[i]) > 1e-14) fail("row " + std::to_string(i) + " sum differs from c");
    }
    return tab;
}

ButcherTableau load_tableau_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open tableau file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_tableau(ss.str(), path);
}

ButcherTableau builtin_tableau(int order) {
    const char* name = order == 4 ? "rk4" : order == 6 ? "verner6" : "dop853";
    return parse_tableau(builtin_tableau_text(order), name);
}

Point2 rk_step(const DiscreteFlowMap& map, Point2 x, double t) {
    const auto& tab = map.tableau;
    const std::size_t s = tab.stages();
    Point2 ys[32];
    if (s > 32) throw PreconditionError("rk_step: too many stages");
    Point2 acc{0.0, 0.0};
    for (std::size_t j = 0; j < s; ++j) {
        Point2 arg = x;
        for (std::size_t l = 0; l < j; ++l) {
            const double a = tab.a[j][l];
            if (a != 0.0) arg += (map.k * a) * ys[l];
        }
        ys[j] = velocity(map.field, arg, t + tab.c[j] * map.k);
        acc += tab.b[j] * ys[j];
    }
    const Point2 out = x + map.k * acc;
    if (!is_finite(out)) throw DegenerateError("rk_step: non-finite result");
    return out;
}

std::vector<Point2> advance_markers(const DiscreteFlowMap& map, const std::vector<Point2>& points, double t) {
    std::vector<Point2> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(rk_step(map, p, t));
    return out;
}

}  // namespace mars
