#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "nilmax/error.hpp"
#include "nilmax/pipeline.hpp"

using namespace nilmax;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("nilmax_unit_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

ErrorCode code_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Ok;
}

std::string message_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

const char* kSmall = R"({"schema": 1, "name": "ex", "potential": {"family": "symmetric", "k": 1},
  "grid": {"half": 1.2, "n": 31}})";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("parse errors carry line and column") {
    const std::string bad = "{\n  \"schema\": 1,\n  \"name\": ,\n}";
    CHECK(code_of(bad) == ErrorCode::ParseError);
    CHECK(message_of(bad).find("line 3") != std::string::npos);
    CHECK(message_of(bad).find("column") != std::string::npos);
}

TEST_CASE("schema errors name the offending field") {
    CHECK(code_of(R"({"schema": 1, "potential": {"family": "symmetric", "k": 1}, "colour": 1})") ==
          ErrorCode::SchemaError);
    CHECK(message_of(R"({"schema": 1, "potential": {"family": "symmetric", "k": 1}, "colour": 1})")
              .find("config.colour") != std::string::npos);
    CHECK(code_of(R"({"potential": {"family": "symmetric", "k": 1}})") == ErrorCode::SchemaError);
    CHECK(code_of(R"({"schema": 1, "potential": {"family": "torus"}})") == ErrorCode::SchemaError);
    CHECK(message_of(R"({"schema": 1, "potential": {"family": "torus"}})").find("potential.family") !=
          std::string::npos);
    CHECK(code_of(R"({"schema": 2, "potential": {"family": "symmetric", "k": 1}})") == ErrorCode::SchemaError);
    CHECK(code_of(kSmall) == ErrorCode::Ok);
}

TEST_CASE("defaults are filled in") {
    const json j = config_to_json(parse_config(kSmall));
    CHECK(j["name"] == "ex");
    CHECK(j.contains("numeric"));
    CHECK(j.contains("outputs"));
    CHECK(parse_config(j.dump()).grid.nx == 31);
}

TEST_CASE("every shipped config loads") {
    int n = 0;
    for (const auto& e : fs::directory_iterator(NILMAX_CONFIG_DIR)) {
        if (e.path().extension() != ".json") continue;
        CAPTURE(e.path().string());
        const RunConfig c = load_config(e.path().string());
        CHECK_NOTHROW(build_potential(c));
        ++n;
    }
    CHECK(n >= 10);
    CHECK_THROWS_AS(load_config("/nonexistent/nilmax.json"), Error);
}

TEST_CASE("mesh export") {
    const FrameEvaluator ev(build_potential(parse_config(kSmall)));
    const SurfaceRaster r = surface_raster(frame(ev, DomainGrid::square(0.0, 0.1, 2)));
    std::istringstream obj(mesh_text(r, {}));
    int v = 0, f = 0;
    for (std::string line; std::getline(obj, line);) {
        if (line.rfind("v ", 0) == 0) ++v;
        if (line.rfind("f ", 0) == 0) ++f;
    }
    CHECK(v == 4);
    CHECK(f == 2);
    const std::string ply = mesh_text(r, {true, true});
    CHECK(ply.find("element vertex 4") != std::string::npos);
    CHECK(ply.find("element face 2") != std::string::npos);
}

TEST_CASE("format of complex numbers") {
    CHECK(format_z(0.0) == "0");
    CHECK(format_z({0.0, -1.0}) == "-1i");
    CHECK(format_z({2.0, -1.0}) == "2-1i");
}

TEST_CASE("mesh colour boundary follows the singular curve") {
    const fs::path out = scratch("colour");
    run_build(parse_config(kSmall), out.string());
    std::istringstream obj(read_file((out / "ex_nil.obj").string()));
    std::vector<double> red;
    for (std::string line; std::getline(obj, line);)
        if (line.rfind("v ", 0) == 0) {
            std::istringstream ls(line.substr(2));
            double x, y, z, r;
            ls >> x >> y >> z >> r;
            red.push_back(r);
        }
    const DomainGrid g = parse_config(kSmall).grid;
    REQUIRE(red.size() == static_cast<size_t>(g.nx * g.ny));

    std::vector<cplx> curve;
    std::istringstream csv(read_file((out / "ex_singular.csv").string()));
    std::string line;
    std::getline(csv, line);
    while (std::getline(csv, line)) {
        std::istringstream ls(line);
        std::string re, im;
        std::getline(ls, re, ',');
        std::getline(ls, im, ',');
        curve.emplace_back(std::stod(re), std::stod(im));
    }
    REQUIRE_FALSE(curve.empty());
    const double cell = std::hypot(g.hx(), g.hy());
    int edges = 0;
    for (int k = 0; k < g.ny; ++k)
        for (int j = 0; j + 1 < g.nx; ++j) {
            if (red[g.index(j, k)] == red[g.index(j + 1, k)]) continue;
            const cplx mid = 0.5 * (g.z(j, k) + g.z(j + 1, k));
            double best = 1e9;
            for (cplx p : curve) best = std::min(best, std::abs(p - mid));
            CHECK(best < cell);
            ++edges;
        }
    CHECK(edges > 0);
}

TEST_CASE("runs are deterministic and the report is re-readable") {
    const RunConfig c = parse_config(kSmall);
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    const RunResult ra = run_build(c, a.string());
    run_build(c, b.string());
    for (const auto& f : ra.artifacts) {
        CAPTURE(f);
        CHECK(read_file((a / f).string()) == read_file((b / f).string()));
    }
    const RunResult rep = run_command("report", nullptr, a.string());
    CHECK(rep.lines == ra.lines);
    CHECK(rep.report["name"] == "ex");
    CHECK_THROWS_AS(run_command("report", nullptr, scratch("empty").string()), Error);
    CHECK_THROWS_AS(run_command("explode", &c, a.string()), Error);
}

TEST_CASE("classify run reports the fixture type") {
    const RunConfig c = load_config(std::string(NILMAX_CONFIG_DIR) + "/sing_swallowtail.json");
    const RunResult r = run_classify(c, scratch("classify").string());
    bool found = false;
    for (const auto& l : r.lines) found = found || l == "kind=Swallowtail at 0";
    CHECK(found);
}

}  // TEST_SUITE
