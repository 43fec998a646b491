#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "mars/geometry.hpp"

namespace mars {

struct VortexField {
    double period = 4.0;
};

struct DeformationField {
    double period = 2.0;
    int vortices = 4;
};

struct CustomField {
    std::function<Point2(Point2, double)> u;
    std::string name = "custom";
};

using VelocityField = std::variant<VortexField, DeformationField, CustomField>;

Point2 velocity(const VelocityField& field, Point2 x, double t);
// Stream function of the built-in fields (u = d psi/dy, v = -d psi/dx).
double stream_function(const VelocityField& field, Point2 x, double t);
VelocityField zero_field();
std::string field_name(const VelocityField& field);

struct ButcherTableau {
    std::string name;
    int order = 0;
    std::vector<std::vector<double>> a;  // row i holds a_{i,0..i-1}
    std::vector<double> b;
    std::vector<double> c;

    std::size_t stages() const { return b.size(); }
};

// Parses the plain-text tableau format in data/tableaus. Throws ConfigError
// on malformed input or when the consistency checks fail.
ButcherTableau parse_tableau(const std::string& text, const std::string& name);
ButcherTableau load_tableau_file(const std::string& path);
// Built-in tableau by order: 4 (classic), 6 (Verner), 8 (Dormand-Prince).
ButcherTableau builtin_tableau(int order);
const std::string& builtin_tableau_text(int order);

struct DiscreteFlowMap {
    VelocityField field;
    ButcherTableau tableau;
    double k = 0.0;
};

// One explicit Runge-Kutta step of dx/dt = u(x, t) from time t.
Point2 rk_step(const DiscreteFlowMap& map, Point2 x, double t);
std::vector<Point2> advance_markers(const DiscreteFlowMap& map, const std::vector<Point2>& points,
                                    double t);

}  // namespace mars
