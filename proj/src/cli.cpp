#include "mars/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace mars {

using nlohmann::json;

double ScaledValue::at(double h) const { return power == 0.0 ? coef : coef * std::pow(h, power); }

namespace {

RunConfig vortex_base(double T) {
    RunConfig c;
    c.scene = "quartered_disk";
    c.field = "vortex";
    c.T = T;
    c.h = {1.0 / 32};
    c.r_tiny = 0.05;
    c.k = {0.125, 1.0};
    c.snapshots = {0.25, 0.5, 1.0};
    return c;
}

RunConfig vortex_curvature(double T, double r_min) {
    RunConfig c = vortex_base(T);
    c.r_tiny = 0.1;
    c.hl.mode = "curvature";
    c.hl.value = {0.2, 1.0};
    c.hl.rho_min = 1e-5;
    c.hl.rho_max = 0.2;
    c.hl.r_min = r_min;
    return c;
}

RunConfig deformation(double T, double r_min) {
    RunConfig c;
    c.scene = "five_phase_disk";
    c.field = "deformation";
    c.T = T;
    c.n_v = 4;
    c.h = {1.0 / 32};
    c.r_tiny = 0.05;
    c.hl.mode = "curvature";
    c.hl.value = {0.2, 1.0};
    c.hl.rho_min = 1e-5;
    c.hl.rho_max = 1.0;
    c.hl.r_min = r_min;
    c.k = {0.125, 1.0};
    c.snapshots = {0.25, 0.5, 1.0};
    return c;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"vortex_T4",     "vortex_T8",     "vortex_T12",    "vortex_T16",   "deformation_T2",
            "deformation_T4", "identity",     "vortex_sweep",  "vortex_order6", "vortex_order8"};
}

RunConfig preset(const std::string& name) {
    if (name == "vortex_T4") return vortex_base(4.0);
    if (name == "vortex_T8") {
        // Over twice the revolutions the tail tip thins further; 0.05 removes
        // markers there that the spline still needs.
        RunConfig c = vortex_base(8.0);
        c.r_tiny = 0.03;
        return c;
    }
    if (name == "vortex_T12") return vortex_curvature(12.0, 0.01);
    if (name == "vortex_T16") return vortex_curvature(16.0, 0.005);
    if (name == "deformation_T2") return deformation(2.0, 0.1);
    if (name == "deformation_T4") return deformation(4.0, 0.05);
    if (name == "identity") {
        RunConfig c = vortex_base(1.0);
        c.field = "zero";
        c.hl.value = {0.05, 1.0};
        c.snapshots = {};
        return c;
    }
    if (name == "vortex_sweep") {
        RunConfig c = vortex_base(4.0);
        c.h = {1.0 / 16, 1.0 / 32, 1.0 / 64};
        c.snapshots = {};
        return c;
    }
    if (name == "vortex_order6" || name == "vortex_order8") {
        const bool six = name == "vortex_order6";
        RunConfig c = vortex_curvature(4.0, 0.01);
        c.order = six ? 6 : 8;
        // 0.8 h^1.5 and 3.2 h^2 both equal 0.2 h at h = 1/16.
        c.hl.value = six ? ScaledValue{0.8, 1.5} : ScaledValue{3.2, 2.0};
        c.h = {1.0 / 16, 1.0 / 32};
        c.snapshots = {};
        return c;
    }
    throw ConfigError("preset: unknown name '" + name + "'");
}

double parse_number(const std::string& s) {
    const auto slash = s.find('/');
    try {
        std::size_t used = 0;
        if (slash == std::string::npos) {
            const double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        }
        const std::string a = s.substr(0, slash), b = s.substr(slash + 1);
        const double num = std::stod(a, &used);
        if (used != a.size()) throw std::invalid_argument(s);
        const double den = std::stod(b, &used);
        if (used != b.size()) throw std::invalid_argument(s);
        return num / den;
    } catch (const std::logic_error&) {
        throw ConfigError("not a number: '" + s + "'");
    }
}

ScaledValue parse_scaled(const std::string& s) {
    const auto at = s.find('h');
    if (at == std::string::npos) return {parse_number(s), 0.0};
    ScaledValue v{1.0, 1.0};
    std::string head = s.substr(0, at);
    std::string tail = s.substr(at + 1);
    if (!head.empty() && head.back() == '*') head.pop_back();
    if (!head.empty()) v.coef = parse_number(head);
    if (!tail.empty() && tail[0] == '^') {
        const auto slash = tail.find('/');
        v.power = parse_number(tail.substr(1, slash == std::string::npos ? std::string::npos : slash - 1));
        tail = slash == std::string::npos ? "" : tail.substr(slash);
    }
    if (!tail.empty()) {
        if (tail[0] != '/') throw ConfigError("malformed scaled value: '" + s + "'");
        v.coef /= parse_number(tail.substr(1));
    }
    return v;
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(parse_number(item));
    }
    return out;
}

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

json scaled_json(const ScaledValue& v) { return json{{"coef", v.coef}, {"power", v.power}}; }

ScaledValue scaled_from(const json& j, const std::string& field) {
    if (j.is_string()) return parse_scaled(j.get<std::string>());
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_object()) throw ConfigError(field + ": expected object, number or string");
    ScaledValue v;
    v.coef = j.at("coef").get<double>();
    v.power = j.value("power", 1.0);
    return v;
}

double number_from(const json& j, const std::string& field) {
    if (j.is_string()) return parse_number(j.get<std::string>());
    if (!j.is_number()) throw ConfigError(field + ": expected a number");
    return j.get<double>();
}

}  // namespace

std::string config_to_json(const RunConfig& c) {
    json j;
    j["scene"] = c.scene;
    j["field"] = c.field;
    j["T"] = c.T;
    j["n_v"] = c.n_v;
    j["order"] = c.order;
    j["h"] = c.h;
    j["hl"] = json{{"mode", c.hl.mode},       {"value", scaled_json(c.hl.value)}, {"rho_min", c.hl.rho_min},
                   {"rho_max", c.hl.rho_max}, {"r_min", c.hl.r_min},              {"sigma", c.hl.sigma}};
    j["r_tiny"] = c.r_tiny;
    j["r_b_star"] = c.r_b_star;
    j["k"] = scaled_json(c.k);
    j["spacing_fraction"] = c.spacing_fraction;
    j["out"] = c.out;
    j["snapshots"] = c.snapshots;
    j["area"] = c.area;
    j["sample_spacing"] = c.sample_spacing;
    // nlohmann prints doubles with round-trip precision.
    return j.dump(2) + "\n";
}

RunConfig config_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    RunConfig c;
    if (j.contains("preset")) c = preset(j.at("preset").get<std::string>());
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "preset") continue;
            if (key == "scene") c.scene = v.get<std::string>();
            else if (key == "field") c.field = v.get<std::string>();
            else if (key == "T") c.T = number_from(v, key);
            else if (key == "n_v") c.n_v = v.get<int>();
            else if (key == "order") c.order = v.get<int>();
            else if (key == "h") {
                c.h.clear();
                if (v.is_array()) {
                    for (const auto& x : v) c.h.push_back(number_from(x, "h"));
                } else {
                    c.h.push_back(number_from(v, key));
                }
            } else if (key == "hl") {
                if (v.is_string()) {
                    c.hl.value = parse_scaled(v.get<std::string>());
                    continue;
                }
                for (const auto& [hk, hv] : v.items()) {
                    if (hk == "mode") c.hl.mode = hv.get<std::string>();
                    else if (hk == "value") c.hl.value = scaled_from(hv, "hl.value");
                    else if (hk == "rho_min") c.hl.rho_min = number_from(hv, "hl.rho_min");
                    else if (hk == "rho_max") c.hl.rho_max = number_from(hv, "hl.rho_max");
                    else if (hk == "r_min") c.hl.r_min = number_from(hv, "hl.r_min");
                    else if (hk == "sigma") c.hl.sigma = hv.get<std::string>();
                    else throw ConfigError("config: unknown field 'hl." + hk + "'");
                }
            } else if (key == "r_tiny") c.r_tiny = number_from(v, key);
            else if (key == "r_b_star") c.r_b_star = number_from(v, key);
            else if (key == "k") c.k = scaled_from(v, key);
            else if (key == "spacing_fraction") c.spacing_fraction = number_from(v, key);
            else if (key == "out") c.out = v.get<std::string>();
            else if (key == "snapshots") {
                c.snapshots.clear();
                for (const auto& x : v) c.snapshots.push_back(number_from(x, key));
            } else if (key == "area") c.area = v.get<std::string>();
            else if (key == "sample_spacing") c.sample_spacing = number_from(v, key);
            else throw ConfigError("config: unknown field '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

ArmsParams arms_params(const RunConfig& c, double h) {
    ArmsParams p;
    p.r_tiny = c.r_tiny;
    p.r_b_star = c.r_b_star;
    const double value = c.hl.value.at(h);
    if (c.hl.mode == "constant") {
        p.hl = ConstantHl{value};
    } else if (c.hl.mode == "curvature") {
        CurvatureHl hl;
        hl.h_L_c = value;
        hl.rho_min = c.hl.rho_min;
        hl.rho_max = c.hl.rho_max;
        hl.r_min_c = c.hl.r_min;
        hl.sigma_name = c.hl.sigma;
        if (c.hl.sigma == "smoothstep") {
            hl.sigma = [](double x) { return x * x * (3.0 - 2.0 * x); };
        } else if (c.hl.sigma != "linear") {
            throw ConfigError("hl.sigma: unknown '" + c.hl.sigma + "' (linear, smoothstep)");
        }
        p.hl = hl;
    } else {
        throw ConfigError("hl.mode: unknown '" + c.hl.mode + "' (constant, curvature)");
    }
    return p;
}

VelocityField make_field(const RunConfig& c) {
    if (c.field == "vortex") return VortexField{c.T};
    if (c.field == "deformation") return DeformationField{c.T, c.n_v};
    if (c.field == "zero") return zero_field();
    throw ConfigError("field: unknown '" + c.field + "' (vortex, deformation, zero)");
}

void validate(const RunConfig& c) {
    if (c.scene.empty()) throw ConfigError("scene: empty");
    if (!(c.T >= 0.0) || !std::isfinite(c.T)) throw ConfigError("T: must be finite and non-negative");
    if (c.field == "vortex" || c.field == "deformation") {
        if (!(c.T > 0.0)) throw ConfigError("T: must be positive for a time-reversing field");
    }
    if (c.n_v <= 0) throw ConfigError("n_v: must be positive");
    if (c.order != 4 && c.order != 6 && c.order != 8) throw ConfigError("order: must be 4, 6 or 8");
    if (c.h.empty()) throw ConfigError("h: at least one grid size required");
    for (double h : c.h) {
        if (!(h > 0.0 && h <= 1.0)) throw ConfigError("h: must lie in (0, 1]");
        const double n = 1.0 / h;
        if (std::abs(n - std::round(n)) > 1e-9 * n) throw ConfigError("h: 1/h must be an integer");
        if (!(c.k.at(h) > 0.0)) throw ConfigError("k: must be positive");
        if (c.T > 0.0) {
            const double steps = c.T / c.k.at(h);
            if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
                throw ConfigError("k: T/k must be an integer");
            }
        }
        if (!(c.hl.value.at(h) > 0.0)) throw ConfigError("hl.value: must be positive");
        validate(arms_params(c, h));
    }
    if (!(c.spacing_fraction > 0.0 && c.spacing_fraction <= 1.0)) {
        throw ConfigError("spacing_fraction: must lie in (0, 1]");
    }
    for (double f : c.snapshots) {
        if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("snapshots: fractions must lie in [0, 1]");
    }
    if (c.area != "exact" && c.area != "polygon") throw ConfigError("area: must be 'exact' or 'polygon'");
    if (!(c.sample_spacing >= 0.0)) throw ConfigError("sample_spacing: must be non-negative");
    make_field(c);
}

namespace {

constexpr const char* kPalette[] = {"#e41a1c", "#377eb8", "#4daf4a", "#984ea3",
                                    "#ff7f00", "#a6cee3", "#f781bf", "#999999"};

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string snapshot_name(std::size_t n, double fraction) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "snapshot_n%zu_t%.4f.svg", n, fraction);
    return buf;
}

PhaseAreaField measure(const RunConfig& c, const std::vector<PhaseBoundary>& phases, const Grid& grid,
                       double h_L) {
    if (c.area == "exact") return spline_cell_areas(phases, grid);
    const double spacing = c.sample_spacing > 0.0 ? c.sample_spacing : std::min(grid.h / 8, h_L / 4);
    return cell_areas(sample_boundary(phases, spacing), grid);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("write failed: " + path.string());
}

}  // namespace

void emit_svg(const std::vector<PhaseBoundary>& phases, const Grid* grid, const std::string& path) {
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" viewBox=\"0 0 1 1\">\n";
    s << "<g transform=\"matrix(1 0 0 -1 0 1)\">\n";
    if (grid != nullptr && grid->n > 0) {
        s << "<g stroke=\"#dddddd\" stroke-width=\"0.001\" fill=\"none\">\n";
        for (std::size_t i = 0; i <= grid->n; ++i) {
            const std::string v = fixed(static_cast<double>(i) * grid->h);
            s << "<line x1=\"" << v << "\" y1=\"0\" x2=\"" << v << "\" y2=\"1\"/>\n";
            s << "<line x1=\"0\" y1=\"" << v << "\" x2=\"1\" y2=\"" << v << "\"/>\n";
        }
        s << "</g>\n";
    }
    const auto polys = sample_boundary(phases, 1.0 / 2048);
    for (std::size_t p = 0; p < polys.size(); ++p) {
        const auto& ph = polys[p];
        std::map<std::size_t, std::string> paths;
        for (std::size_t q = 0; q < ph.polygons.size(); ++q) {
            const std::size_t comp = ph.component[q];
            bool unbounded = false;
            for (std::size_t u : ph.unbounded_components) unbounded = unbounded || u == comp;
            if (unbounded || ph.polygons[q].empty()) continue;
            std::string& d = paths[comp];
            for (std::size_t i = 0; i < ph.polygons[q].size(); ++i) {
                d += (i == 0 ? "M" : "L") + fixed(ph.polygons[q][i].x) + " " + fixed(ph.polygons[q][i].y) + " ";
            }
            d += "Z ";
        }
        for (const auto& [comp, d] : paths) {
            s << "<path fill=\"" << kPalette[p % 8] << "\" fill-opacity=\"0.6\" fill-rule=\"nonzero\" "
              << "stroke=\"#000000\" stroke-width=\"0.0015\" data-phase=\"" << ph.name << "\" d=\"" << d
              << "\"/>\n";
        }
    }
    s << "</g>\n</svg>\n";
    write_text(path, s.str());
}

BenchmarkResult run_benchmark(const RunConfig& c, bool write_files) {
    validate(c);
    const Scene scene = resolve_scene(c.scene);
    const VelocityField field = make_field(c);
    const ButcherTableau tableau = builtin_tableau(c.order);
    const std::filesystem::path out(c.out);
    if (write_files) std::filesystem::create_directories(out);

    BenchmarkResult result;
    std::ostringstream diag_csv, series_csv;
    diag_csv << "h,step,time,spline,added,removed,markers,length,mu_variation,warnings,irregular_chords\n";
    series_csv << "h,step,time,phase,length,markers\n";
    std::vector<std::string> names;

    for (double h : c.h) {
        const Grid grid = Grid::from_h(h);
        const ArmsParams params = arms_params(c, h);
        const double k = c.k.at(h);
        RunOptions options;
        options.spacing_fraction = c.spacing_fraction;
        if (write_files) {
            options.snapshot_fractions = c.snapshots;
            options.on_snapshot = [&](double fraction, const TrackedState& state) {
                emit_svg(snapshot(state), &grid, (out / snapshot_name(grid.n, fraction)).string());
            };
        }
        const RunResult run_result = run(scene, field, tableau, params, k, c.T, options);

        const PhaseAreaField reference = reference_areas(scene, grid);
        const PhaseAreaField computed = measure(c, snapshot(run_result.final_state), grid, params.nominal_h_L());
        GridResult g;
        g.h = h;
        g.error = it_error(reference, computed);
        g.diagnostics = run_result.diagnostics;
        names = g.error.names;

        const std::string hs = format_real(h);
        for (const auto& rec : g.diagnostics.steps) {
            for (std::size_t i = 0; i < rec.splines.size(); ++i) {
                const auto& d = rec.splines[i];
                diag_csv << hs << ',' << rec.step << ',' << format_real(rec.time) << ',' << i << ',' << d.added
                         << ',' << d.removed << ',' << d.markers << ',' << format_real(d.length) << ','
                         << format_real(d.mu_variation) << ',' << d.warnings << ',' << d.irregular_chords << '\n';
            }
        }
        for (const auto& ps : g.diagnostics.phases) {
            series_csv << hs << ',' << ps.step << ',' << format_real(ps.time) << ','
                       << (ps.phase < names.size() ? names[ps.phase] : std::to_string(ps.phase)) << ','
                       << format_real(ps.length) << ',' << ps.markers << '\n';
        }
        result.grids.push_back(std::move(g));
    }

    for (std::size_t i = 0; i + 1 < result.grids.size(); ++i) {
        const auto& a = result.grids[i].error;
        const auto& b = result.grids[i + 1].error;
        std::vector<double> row;
        row.push_back(convergence_rates({{a.h, a.total}, {b.h, b.total}}).at(0));
        for (std::size_t p = 0; p < a.per_phase.size(); ++p) {
            row.push_back(convergence_rates({{a.h, a.per_phase[p]}, {b.h, b.per_phase[p]}}).at(0));
        }
        result.rates.push_back(std::move(row));
    }

    if (!write_files) return result;

    std::ostringstream errors_csv, rates_csv;
    errors_csv << "h,total";
    rates_csv << "h_coarse,h_fine,total";
    for (const auto& n : names) {
        errors_csv << ',' << n;
        rates_csv << ',' << n;
    }
    errors_csv << '\n';
    rates_csv << '\n';
    for (const auto& g : result.grids) {
        errors_csv << format_real(g.h) << ',' << format_real(g.error.total);
        for (double e : g.error.per_phase) errors_csv << ',' << format_real(e);
        errors_csv << '\n';
    }
    for (std::size_t i = 0; i < result.rates.size(); ++i) {
        rates_csv << format_real(result.grids[i].h) << ',' << format_real(result.grids[i + 1].h);
        for (double r : result.rates[i]) rates_csv << ',' << format_real(r);
        rates_csv << '\n';
    }
    write_text(out / "errors.csv", errors_csv.str());
    write_text(out / "rates.csv", rates_csv.str());
    write_text(out / "diagnostics.csv", diag_csv.str());
    write_text(out / "phase_series.csv", series_csv.str());
    write_text(out / "config.json", config_to_json(c));
    return result;
}

}  // namespace mars
