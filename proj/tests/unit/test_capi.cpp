#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <string>

#include "nilmax/nilmax.h"

namespace {

std::string config_path(const char* name) { return std::string(NILMAX_CONFIG_DIR) + "/" + name; }

nilmax_config* load(const char* name) {
    nilmax_config* c = nullptr;
    REQUIRE(nilmax_config_load(config_path(name).c_str(), &c) == NILMAX_OK);
    REQUIRE(c != nullptr);
    return c;
}

}  // namespace

TEST_CASE("version and names") {
    CHECK(std::strlen(nilmax_version()) > 0);
    CHECK(std::string(nilmax_status_name(NILMAX_OK)) == "Ok");
    CHECK(std::string(nilmax_status_name(NILMAX_TOO_CLOSE_TO_CALL)) == "TooCloseToCall");
    CHECK(std::string(nilmax_kind_name(NILMAX_KIND_SWALLOWTAIL)) == "Swallowtail");
}

TEST_CASE("exit codes") {
    CHECK(nilmax_exit_code(NILMAX_OK) == 0);
    CHECK(nilmax_exit_code(NILMAX_SCHEMA_ERROR) == 2);
    CHECK(nilmax_exit_code(NILMAX_PARSE_ERROR) == 2);
    CHECK(nilmax_exit_code(NILMAX_IO_ERROR) == 3);
    CHECK(nilmax_exit_code(NILMAX_STEP_UNSTABLE) == 1);
    CHECK(nilmax_exit_code(NILMAX_INTERNAL_ERROR) == 1);
}

TEST_CASE("argument and input errors") {
    nilmax_config* c = nullptr;
    CHECK(nilmax_config_parse(nullptr, &c) == NILMAX_INVALID_ARGUMENT);
    CHECK(nilmax_config_parse("{}", nullptr) == NILMAX_INVALID_ARGUMENT);
    CHECK(nilmax_config_parse("{\"schema\": 1,", &c) == NILMAX_PARSE_ERROR);
    CHECK(c == nullptr);
    CHECK(std::string(nilmax_last_error()).find("line 1") != std::string::npos);
    CHECK(nilmax_config_parse("{\"schema\": 1}", &c) == NILMAX_SCHEMA_ERROR);
    CHECK(nilmax_config_load("/nonexistent/x.json", &c) == NILMAX_IO_ERROR);
    nilmax_point_info info;
    CHECK(nilmax_classify_point(nullptr, 0.0, 0.0, &info) == NILMAX_INVALID_ARGUMENT);
    nilmax_config_free(nullptr);
    nilmax_result_free(nullptr);
    nilmax_string_free(nullptr);
}

TEST_CASE("config setters validate") {
    nilmax_config* c = load("sing_swallowtail.json");
    CHECK(nilmax_config_set_degree(c, 0) == NILMAX_INVALID_ARGUMENT);
    CHECK(nilmax_config_set_degree(c, 12) == NILMAX_OK);
    CHECK(nilmax_config_set_tol(c, 1e-7) == NILMAX_INVALID_ARGUMENT);
    CHECK(nilmax_config_set_tol(c, 1e-3) == NILMAX_OK);
    CHECK(nilmax_config_set_lambda(c, 0.0) == NILMAX_OK);
    char* text = nullptr;
    REQUIRE(nilmax_config_to_json(c, &text) == NILMAX_OK);
    const std::string s(text);
    nilmax_string_free(text);
    CHECK(s.find("\"degree\": 12") != std::string::npos);
    nilmax_config* back = nullptr;
    CHECK(nilmax_config_parse(s.c_str(), &back) == NILMAX_OK);
    nilmax_config_free(back);
    nilmax_config_free(c);
}

TEST_CASE("point classification of the fixtures") {
    const struct {
        const char* file;
        int kind;
    } cases[] = {{"sing_cuspidal_edge.json", NILMAX_KIND_CUSPIDAL_EDGE},
                 {"sing_swallowtail.json", NILMAX_KIND_SWALLOWTAIL},
                 {"sing_cross_cap.json", NILMAX_KIND_CUSPIDAL_CROSS_CAP}};
    for (const auto& t : cases) {
        CAPTURE(t.file);
        nilmax_config* c = load(t.file);
        nilmax_point_info info;
        REQUIRE(nilmax_classify_point(c, 0.0, 0.0, &info) == NILMAX_OK);
        CHECK(info.decided == 1);
        CHECK(info.kind == t.kind);
        CHECK(std::abs(info.n3) < 1e-12);
        nilmax_config_free(c);
    }
}

TEST_CASE("run and read back results") {
    nilmax_config* c = load("sing_cuspidal_edge.json");
    const std::string out = (std::filesystem::temp_directory_path() / "nilmax_capi_run").string();
    std::filesystem::create_directories(out);
    nilmax_result* r = nullptr;
    REQUIRE(nilmax_run("classify", c, out.c_str(), &r) == NILMAX_OK);
    REQUIRE(nilmax_result_line_count(r) >= 1);
    CHECK(std::string(nilmax_result_line(r, 0)) == "kind=CuspidalEdge at 0");
    CHECK(nilmax_result_line(r, 1000) == nullptr);
    CHECK(nilmax_result_artifact_count(r) >= 1);
    CHECK(std::string(nilmax_result_report_json(r)).find("\"members\"") != std::string::npos);
    CHECK(nilmax_result_all_passed(r) == 1);
    nilmax_result_free(r);

    nilmax_result* rep = nullptr;
    REQUIRE(nilmax_run("report", nullptr, out.c_str(), &rep) == NILMAX_OK);
    CHECK(std::string(nilmax_result_line(rep, 0)) == "kind=CuspidalEdge at 0");
    nilmax_result_free(rep);

    nilmax_result* bad = nullptr;
    CHECK(nilmax_run("explode", c, out.c_str(), &bad) == NILMAX_INVALID_ARGUMENT);
    CHECK(bad == nullptr);
    CHECK(nilmax_run("classify", nullptr, out.c_str(), &bad) == NILMAX_INVALID_ARGUMENT);
    nilmax_config_free(c);
}
