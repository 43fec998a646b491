#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mars/cli.hpp"

using namespace mars;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("mars_unit_" + name);
    fs::remove_all(p);
    return p;
}

std::string error_of(const std::string& json) {
    try {
        validate(config_from_json(json));
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

std::size_t count(const std::string& s, const std::string& what) {
    std::size_t n = 0;
    for (auto at = s.find(what); at != std::string::npos; at = s.find(what, at + 1)) ++n;
    return n;
}

}  // namespace

TEST_CASE("number and scaled-value parsing") {
    CHECK(parse_number("1/32") == 1.0 / 32);
    CHECK(parse_number("0.03125") == 0.03125);
    CHECK_THROWS_AS(parse_number("abc"), ConfigError);
    CHECK(parse_scaled("0.2h") == ScaledValue{0.2, 1.0});
    CHECK(parse_scaled("0.8h^1.5") == ScaledValue{0.8, 1.5});
    CHECK(parse_scaled("h/8") == ScaledValue{0.125, 1.0});
    CHECK(parse_scaled("0.001") == ScaledValue{0.001, 0.0});
    CHECK(parse_scaled("0.8h^1.5").at(0.25) == doctest::Approx(0.1));
    CHECK(parse_list("1/16,1/32") == std::vector<double>{1.0 / 16, 1.0 / 32});
}

TEST_CASE("presets validate and round trip through JSON") {
    for (const auto& name : preset_names()) {
        CAPTURE(name);
        const RunConfig c = preset(name);
        CHECK_NOTHROW(validate(c));
        CHECK(config_from_json(config_to_json(c)) == c);
    }
    CHECK_THROWS_AS(preset("nope"), ConfigError);
}

TEST_CASE("preset parameters") {
    const RunConfig c = preset("vortex_T4");
    CHECK(c.field == "vortex");
    CHECK(c.T == 4.0);
    CHECK(c.order == 4);
    CHECK(c.h == std::vector<double>{1.0 / 32});
    CHECK(c.hl.mode == "constant");
    CHECK(c.hl.value == ScaledValue{0.2, 1.0});
    CHECK(c.k == ScaledValue{0.125, 1.0});
    const RunConfig d = preset("deformation_T2");
    CHECK(d.n_v == 4);
    CHECK(d.hl.mode == "curvature");
    CHECK(d.hl.rho_max == 1.0);
    CHECK(d.hl.r_min == 0.1);
    CHECK(preset("deformation_T4").hl.r_min == 0.05);
    CHECK(preset("vortex_T12").hl.rho_max == 0.2);
    CHECK(preset("vortex_order6").hl.value == ScaledValue{0.8, 1.5});
}

TEST_CASE("invalid configs name the offending field") {
    CHECK(error_of(R"({"order": 5})").find("order") != std::string::npos);
    CHECK(error_of(R"({"h": [0.3]})").find("h:") != std::string::npos);
    CHECK(error_of(R"({"T": 1, "k": "0.3"})").find("k:") != std::string::npos);
    CHECK(error_of(R"({"colour": 1})").find("colour") != std::string::npos);
    CHECK(error_of(R"({"hl": {"mode": "wavy"}})").find("hl.mode") != std::string::npos);
    CHECK(error_of(R"({"field": "shear"})").find("field") != std::string::npos);
    CHECK(error_of(R"({"preset": "vortex_T4", "order": 6})").empty());
    CHECK(config_from_json(R"({"preset": "vortex_T4", "hl": "0.1h"})").hl.value == ScaledValue{0.1, 1.0});
}

TEST_CASE("svg output") {
    const fs::path dir = scratch("svg");
    fs::create_directories(dir);
    emit_svg({}, nullptr, (dir / "empty.svg").string());
    const std::string empty = slurp(dir / "empty.svg");
    CHECK(empty.find("<svg") != std::string::npos);
    CHECK(empty.find("</svg>") != std::string::npos);
    CHECK(count(empty, "<path") == 0);

    const Scene s = quartered_disk();
    ArmsParams p;
    p.r_tiny = 0.05;
    p.hl = ConstantHl{0.01};
    const auto st = initial_state(s, p, 0.01);
    const Grid g = Grid::from_h(1.0 / 8);
    emit_svg(snapshot(st), &g, (dir / "disk.svg").string());
    const std::string disk = slurp(dir / "disk.svg");
    CHECK(count(disk, "<path") == 4);
    fs::remove_all(dir);
}

TEST_CASE("identity benchmark sits at the measurement floor and is reproducible") {
    RunConfig c = preset("identity");
    c.h = {1.0 / 16};
    c.snapshots = {0.0, 1.0};
    const fs::path a = scratch("run_a"), b = scratch("run_b");
    c.out = a.string();
    const auto ra = run_benchmark(c);
    c.out = b.string();
    run_benchmark(c);
    REQUIRE(ra.grids.size() == 1);
    CHECK(ra.grids[0].error.total <= 1e-10);
    CHECK(ra.grids[0].diagnostics.total_added == 0);
    CHECK(ra.grids[0].diagnostics.total_removed == 0);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        ++files;
        const auto name = e.path().filename();
        if (name == "config.json") continue;
        CAPTURE(name.string());
        CHECK(slurp(e.path()) == slurp(b / name));
    }
    CHECK(files >= 7);
    c.out = a.string();
    CHECK(config_from_json(slurp(a / "config.json")) == c);
    const std::string errors = slurp(a / "errors.csv");
    CHECK(errors.rfind("h,total,", 0) == 0);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("vortex snapshots are byte-identical across runs") {
    RunConfig c = preset("vortex_T4");
    c.h = {1.0 / 16};
    c.snapshots = {0.5};
    const fs::path a = scratch("vortex_a"), b = scratch("vortex_b");
    c.out = a.string();
    run_benchmark(c);
    c.out = b.string();
    run_benchmark(c);
    std::size_t svgs = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        if (e.path().extension() != ".svg") continue;
        ++svgs;
        CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
    }
    CHECK(svgs == 1);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("number formatting") {
    CHECK(format_real(0.1) == "0.10000000000000001");
    CHECK(format_real(std::numeric_limits<double>::quiet_NaN()) == "nan");
}
