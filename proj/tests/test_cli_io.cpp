#include <cmath>
#include <filesystem>
#include <string>

#include "doctest.h"

#include "corner/commands.hpp"
#include "corner/config.hpp"
#include "corner/errors.hpp"
#include "corner/io.hpp"

#include "json.hpp"

using namespace corner;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("corner_unit_" + name);
    fs::remove_all(dir);
    return dir;
}

CommandResult run(const std::string& command, const ExperimentConfig& cfg, const fs::path& dir, std::size_t workers = 1) {
    CommandOptions o;
    o.workers = workers;
    o.out_dir = dir;
    return run_command(command, cfg, o);
}

std::string error_of(std::string_view text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

ExperimentConfig small_tongues() {
    ExperimentConfig c;
    c.tongues.grid = {21, 17, -1.0, 0.0, 0.9, 1.6};
    c.tongues.period_cap = 12;
    c.tongues.samples = 20;
    return c;
}

}  // namespace

TEST_CASE("config round trip") {
    ExperimentConfig c;
    c.seed = 99;
    c.map.normal.delta_R = 1.45;
    c.portrait.saddle_piece = 1;
    c.bifdiag.corner = 1.35;
    c.sweep.corner_seeds.push_back({-0.5, 1.5});
    c.validate.params.push_back(UnfoldingParams{});
    c.validate.params.back().bX2 = -1.7;
    const auto text = serialise_config(c);
    const auto back = parse_config(text);
    CHECK(back == c);
    CHECK(serialise_config(back) == text);

    for (const char* recipe : {"fig1", "fig2_a", "fig2_b", "fig2_c", "fig3", "fig5", "validate", "tent"}) {
        CAPTURE(recipe);
        const auto r = load_config(std::string(CORNER_RECIPE_DIR) + "/" + recipe + ".json");
        CHECK(parse_config(serialise_config(r)) == r);
    }
}

TEST_CASE("polynomial maps round trip") {
    const char* text = R"({"map": {"kind": "polynomial",
        "pieces": [{"label": "A", "fx": {"1": 1, "y": 1}, "fy": {"x": 0.3}},
                   {"label": "B", "fx": {"1": 1, "y": 1, "x2": -1.4}, "fy": {"x": 0.3}}],
        "switching": [{"x": 1}],
        "regions": [[{"switching": 0, "side": "nonpositive"}], [{"switching": 0, "side": "nonnegative"}]]}})";
    const auto c = parse_config(text);
    CHECK(c.map.pieces.size() == 2);
    CHECK(parse_config(serialise_config(c)) == c);
    const auto map = build_map(c.map);
    CHECK(map.evaluate({1.0, 0.5}).image.x == doctest::Approx(0.1));
}

TEST_CASE("config errors name the field") {
    CHECK(error_of(R"({"iterate": {"iteratons": 5}})").find("iterate.iteratons") != std::string::npos);
    CHECK(error_of(R"({"map": {"delta_R": "big"}})").find("map.delta_R") != std::string::npos);
    CHECK(error_of(R"({"map": {"kind": "cubic"}})").find("map.kind") != std::string::npos);
    CHECK(error_of("{\n  \"seed\": 1,\n  \"workers\": ,\n}").find("line 3") != std::string::npos);
    CHECK(error_of(R"({"version": 2})").find("version") != std::string::npos);
    CHECK(error_of(R"({"seed": 5})").empty());
}

TEST_CASE("floats are written with 17 significant digits") {
    CHECK(format_real(0.1) == "0.10000000000000001");
    CHECK(std::stod(format_real(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(format_real(NAN) == "nan");
    CsvWriter csv({"a", "b", "c", "d"});
    csv.row(1, 0.5, true, "x");
    CHECK(csv.str() == "a,b,c,d\n1,0.5,1,x\n");
    CHECK(csv.rows() == 1);
}

TEST_CASE("zero iterations give a header-only orbit") {
    ExperimentConfig c;
    c.iterate.iterations = 0;
    c.iterate.transient = 0;
    const auto dir = scratch("zero");
    const auto r = run("iterate", c, dir);
    CHECK(r.exit_code == kExitOk);
    CHECK(read_text_file(dir / "orbit.csv") == "i,x,y,label\n");
}

TEST_CASE("escape is flagged") {
    ExperimentConfig c;
    c.map.normal.delta_R = 1.45;
    c.iterate.iterations = 100000;
    const auto dir = scratch("escape");
    const auto r = run("iterate", c, dir);
    CHECK(r.exit_code == kExitPartial);
    CHECK_FALSE(r.manifest.all_ok());
    const auto m = nlohmann::json::parse(read_text_file(dir / "manifest.json"));
    bool flagged = false;
    for (const auto& t : m["tasks"]) flagged = flagged || t["status"] != "ok";
    CHECK(flagged);
}

TEST_CASE("manifest lists every artifact with its checksum") {
    const auto dir = scratch("manifest");
    auto c = small_tongues();
    const auto r = run("tongues", c, dir);
    CHECK(r.exit_code != kExitConfig);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().filename() != "manifest.json") ++files;
    }
    CHECK(r.manifest.artifacts.size() == files);
    for (const auto& a : r.manifest.artifacts) {
        const auto text = read_text_file(dir / a.path);
        CHECK(a.bytes == text.size());
        CHECK(a.checksum == hex64(fnv1a64(text)));
    }
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
}

TEST_CASE("outputs do not depend on the worker count") {
    auto c = small_tongues();
    const auto one = scratch("det1");
    const auto many = scratch("det3");
    run("tongues", c, one, 1);
    run("tongues", c, many, 3);
    for (const char* f : {"tongues.csv", "summary.json"}) {
        CHECK(read_text_file(one / f) == read_text_file(many / f));
    }
}

TEST_CASE("a one-cell grid is a single classification") {
    ExperimentConfig c;
    c.tongues.grid = {1, 1, -0.5, -0.5, 1.45, 1.45};
    c.tongues.period_cap = 20;
    c.tongues.samples = 1;
    const auto dir = scratch("onecell");
    run("tongues", c, dir);
    const auto text = read_text_file(dir / "tongues.csv");
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
    const auto cell = classify_cell({2.0, 0.75, -0.5, 1.45, 1.0}, enumerate_rotational_all(20));
    CHECK(text.find("," + std::to_string(cell.period) + "\n") != std::string::npos);
}

TEST_CASE("validate rejects non-generic parameter sets by name") {
    ExperimentConfig c;
    UnfoldingParams bad;
    bad.bY2 = -1.0;  // same sign as bX2
    c.validate.params = {UnfoldingParams{}, bad};
    const auto dir = scratch("validate");
    const auto r = run("validate", c, dir);
    CHECK(r.exit_code == kExitPartial);
    const auto report = read_text_file(dir / "validation.json");
    CHECK(report.find("corner") != std::string::npos);
    const auto j = nlohmann::json::parse(report);
    CHECK(j.contains("quadrants"));
}

TEST_CASE("tent command") {
    ExperimentConfig c;
    c.tent.iterations = 5;
    const auto dir = scratch("tent");
    CHECK(run("tent", c, dir).exit_code == kExitOk);
    const auto text = read_text_file(dir / "tent.csv");
    CHECK(text.rfind("i,x\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 7);
}

TEST_CASE("unknown commands are config errors") {
    CHECK_THROWS_AS(run("draw", ExperimentConfig{}, scratch("unknown")), ConfigError);
    ExperimentConfig c;
    c.map.kind = "reduced";
    c.map.reduced = {-4.0, 0.4, 4.0, 0.4};
    c.map.xi = -1.0;
    CHECK_THROWS_AS(run("bifdiag", c, scratch("needs_bcnf")), ConfigError);
}
