#pragma once

#include <string>
#include <vector>

#include "mars/arms.hpp"
#include "mars/driver.hpp"
#include "mars/metrics.hpp"

namespace mars {

// c * h^power; power 0 gives an absolute value.
struct ScaledValue {
    double coef = 0.0;
    double power = 1.0;
    double at(double h) const;
    friend bool operator==(const ScaledValue&, const ScaledValue&) = default;
};

struct HlRule {
    std::string mode = "constant";  // constant | curvature
    ScaledValue value{0.2, 1.0};
    double rho_min = 1e-5;
    double rho_max = 0.2;
    double r_min = 0.01;
    std::string sigma = "linear";  // linear | smoothstep
    friend bool operator==(const HlRule&, const HlRule&) = default;
};

struct RunConfig {
    std::string scene = "quartered_disk";
    std::string field = "vortex";  // vortex | deformation | zero
    double T = 4.0;
    int n_v = 4;
    int order = 4;
    std::vector<double> h{1.0 / 32};
    HlRule hl;
    double r_tiny = 0.1;
    double r_b_star = 1.5;
    ScaledValue k{0.125, 1.0};
    double spacing_fraction = 0.5;
    std::string out = "out";
    std::vector<double> snapshots;
    std::string area = "exact";  // exact | polygon
    double sample_spacing = 0.0;  // polygon route; 0 = min(h/8, h_L/4)
    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

std::vector<std::string> preset_names();
RunConfig preset(const std::string& name);

// "1/32", "0.03125"
double parse_number(const std::string& s);
// "0.2h", "0.8h^1.5", "h/8", "0.001"
ScaledValue parse_scaled(const std::string& s);
std::vector<double> parse_list(const std::string& s);

std::string config_to_json(const RunConfig& c);
RunConfig config_from_json(const std::string& text);
// Throws ConfigError naming the offending field.
void validate(const RunConfig& c);

ArmsParams arms_params(const RunConfig& c, double h);
VelocityField make_field(const RunConfig& c);

struct GridResult {
    double h = 0.0;
    ErrorReport error;
    RunDiagnostics diagnostics;
};

struct BenchmarkResult {
    std::vector<GridResult> grids;
    std::vector<std::vector<double>> rates;  // per consecutive pair: total, then per phase
};

// Runs every grid of the config. Files go to c.out when write_files is set.
BenchmarkResult run_benchmark(const RunConfig& c, bool write_files = true);

void emit_svg(const std::vector<PhaseBoundary>& phases, const Grid* grid, const std::string& path);

std::string format_real(double v);

}  // namespace mars
