#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mars/cli.hpp"

namespace {

struct Flags {
    std::string preset, config, scene, field, T, h, hl, hl_mode, rho_min, rho_max, r_min, sigma, rtiny, rb, k,
        spacing_fraction, out, snapshots, area, sample_spacing;
    int order = 0;
    int n_v = 0;
};

void add_flags(CLI::App* app, Flags& f, bool sweep) {
    app->set_help_flag("--help", "Print this help message and exit");
    app->add_option("--preset", f.preset, "Named parameter set (see `presets`)");
    app->add_option("--config", f.config, "JSON run config; flags override it");
    app->add_option("--scene", f.scene, "Built-in scene name or scene file");
    app->add_option("--field", f.field, "vortex | deformation | zero");
    app->add_option("--T", f.T, "Period of the flow and final time");
    app->add_option("--nv", f.n_v, "Vortex count of the deformation field");
    app->add_option("--order", f.order, "Integrator order: 4, 6 or 8");
    app->add_option("--h", f.h, sweep ? "Comma-separated grid sizes, e.g. 1/16,1/32,1/64" : "Grid size, e.g. 1/32");
    app->add_option("--hl", f.hl, "h_L or h_L^c as c*h^p, e.g. 0.2h or 0.8h^1.5");
    app->add_option("--hl-mode", f.hl_mode, "constant | curvature");
    app->add_option("--rho-min", f.rho_min, "Curvature rule: lower radius clamp");
    app->add_option("--rho-max", f.rho_max, "Curvature rule: upper radius clamp");
    app->add_option("--rmin", f.r_min, "Curvature rule: smallest h_L / h_L^c");
    app->add_option("--sigma", f.sigma, "Curvature rule: linear | smoothstep");
    app->add_option("--rtiny", f.rtiny, "Lower chord bound as a fraction of h_L");
    app->add_option("--rb", f.rb, "End ratio for open chains");
    app->add_option("--k", f.k, "Time step, e.g. h/8");
    app->add_option("--spacing-fraction", f.spacing_fraction, "Initial marker spacing as a fraction of h_L");
    app->add_option("--snapshots", f.snapshots, "SVG instants as fractions of T, e.g. 0.25,0.5,1");
    app->add_option("--area", f.area, "exact | polygon");
    app->add_option("--sample-spacing", f.sample_spacing, "Polygon route sampling spacing");
    app->add_option("--out", f.out, "Output directory");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw mars::ConfigError("config: cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

mars::RunConfig build(const Flags& f) {
    mars::RunConfig c;
    if (!f.preset.empty()) c = mars::preset(f.preset);
    if (!f.config.empty()) {
        c = mars::config_from_json(read_file(f.config));
    }
    if (!f.scene.empty()) c.scene = f.scene;
    if (!f.field.empty()) c.field = f.field;
    if (!f.T.empty()) c.T = mars::parse_number(f.T);
    if (f.n_v != 0) c.n_v = f.n_v;
    if (f.order != 0) c.order = f.order;
    if (!f.h.empty()) c.h = mars::parse_list(f.h);
    if (!f.hl.empty()) c.hl.value = mars::parse_scaled(f.hl);
    if (!f.hl_mode.empty()) c.hl.mode = f.hl_mode;
    if (!f.rho_min.empty()) c.hl.rho_min = mars::parse_number(f.rho_min);
    if (!f.rho_max.empty()) c.hl.rho_max = mars::parse_number(f.rho_max);
    if (!f.r_min.empty()) c.hl.r_min = mars::parse_number(f.r_min);
    if (!f.sigma.empty()) c.hl.sigma = f.sigma;
    if (!f.rtiny.empty()) c.r_tiny = mars::parse_number(f.rtiny);
    if (!f.rb.empty()) c.r_b_star = mars::parse_number(f.rb);
    if (!f.k.empty()) c.k = mars::parse_scaled(f.k);
    if (!f.spacing_fraction.empty()) c.spacing_fraction = mars::parse_number(f.spacing_fraction);
    if (!f.snapshots.empty()) c.snapshots = mars::parse_list(f.snapshots);
    if (!f.area.empty()) c.area = f.area;
    if (!f.sample_spacing.empty()) c.sample_spacing = mars::parse_number(f.sample_spacing);
    if (!f.out.empty()) c.out = f.out;
    return c;
}

int execute(const Flags& f, bool single) {
    const mars::RunConfig c = build(f);
    if (single && c.h.size() != 1) throw mars::ConfigError("h: `run` takes one grid size; use `sweep`");
    const auto result = mars::run_benchmark(c);
    for (const auto& g : result.grids) {
        std::printf("h=%s total=%s removed=%zu added=%zu\n", mars::format_real(g.h).c_str(),
                    mars::format_real(g.error.total).c_str(), g.diagnostics.total_removed,
                    g.diagnostics.total_added);
    }
    for (std::size_t i = 0; i < result.rates.size(); ++i) {
        std::printf("rate %s -> %s: %s\n", mars::format_real(result.grids[i].h).c_str(),
                    mars::format_real(result.grids[i + 1].h).c_str(), mars::format_real(result.rates[i][0]).c_str());
    }
    std::printf("wrote %s\n", c.out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiphase interface tracking with cubic splines"};
    app.require_subcommand(1);
    app.set_help_flag("-h,--help", "Print this help message and exit");

    Flags run_flags, sweep_flags;
    auto* run = app.add_subcommand("run", "Run one grid size and write errors, diagnostics and snapshots");
    add_flags(run, run_flags, false);
    auto* sweep = app.add_subcommand("sweep", "Run a sequence of grid sizes and write convergence rates");
    add_flags(sweep, sweep_flags, true);
    auto* presets = app.add_subcommand("presets", "List presets, or print one as a config file");
    std::string preset_name;
    presets->add_option("name", preset_name, "Preset to print");
    auto* scenes = app.add_subcommand("scenes", "List built-in scenes, or print one as a scene file");
    std::string scene_name;
    scenes->add_option("name", scene_name, "Scene to print");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run) return execute(run_flags, true);
        if (*sweep) return execute(sweep_flags, false);
        if (*presets) {
            if (preset_name.empty()) {
                for (const auto& n : mars::preset_names()) std::printf("%s\n", n.c_str());
            } else {
                std::fputs(mars::config_to_json(mars::preset(preset_name)).c_str(), stdout);
            }
            return 0;
        }
        if (*scenes) {
            if (scene_name.empty()) {
                for (const auto& n : mars::builtin_scene_names()) std::printf("%s\n", n.c_str());
            } else {
                std::fputs(mars::scene_to_json_text(mars::builtin_scene(scene_name)).c_str(), stdout);
            }
            return 0;
        }
    } catch (const mars::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
