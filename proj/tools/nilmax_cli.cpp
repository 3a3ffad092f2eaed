#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "nilmax/nilmax.h"

namespace {

int fail(nilmax_status s) {
    std::fprintf(stderr, "error: %s\n", nilmax_last_error());
    return nilmax_exit_code(s);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Maximal surfaces in Nil3 by the loop-group method"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", std::string(nilmax_version()));

    std::string config_path, out_dir = "out";
    double lambda = 0.0, tol = 0.0;
    int degree = 0;

    const char* names[] = {"build", "classify", "cauchy", "verify", "report"};
    const char* help[] = {"surfaces, meshes and singular set", "singular set only", "solve a Cauchy problem and classify",
                          "run the invariant suite on built-in fixtures", "re-emit the last report in --out"};
    for (int i = 0; i < 5; ++i) {
        CLI::App* sub = app.add_subcommand(names[i], help[i]);
        sub->add_option("--config", config_path, "run configuration (JSON)");
        sub->add_option("--out", out_dir, "output directory")->capture_default_str();
        sub->add_option("--lambda", lambda, "associated-family angle in radians");
        sub->add_option("--degree", degree, "loop truncation degree")->check(CLI::PositiveNumber);
        sub->add_option("--tol", tol, "classification threshold")->check(CLI::PositiveNumber);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const CLI::App* sub = app.get_subcommands().front();
    const std::string command = sub->get_name();
    const bool needs_config = command == "build" || command == "classify" || command == "cauchy";
    if (needs_config && config_path.empty()) {
        std::fprintf(stderr, "error: %s needs --config\n", command.c_str());
        return 2;
    }

    nilmax_config* cfg = nullptr;
    if (!config_path.empty()) {
        nilmax_status s = nilmax_config_load(config_path.c_str(), &cfg);
        if (s != NILMAX_OK) return fail(s);
        if (sub->count("--lambda") && (s = nilmax_config_set_lambda(cfg, lambda)) != NILMAX_OK) return fail(s);
        if (sub->count("--degree") && (s = nilmax_config_set_degree(cfg, degree)) != NILMAX_OK) return fail(s);
        if (sub->count("--tol") && (s = nilmax_config_set_tol(cfg, tol)) != NILMAX_OK) return fail(s);
    }

    nilmax_result* res = nullptr;
    const nilmax_status s = nilmax_run(command.c_str(), cfg, out_dir.c_str(), &res);
    nilmax_config_free(cfg);
    if (s != NILMAX_OK) return fail(s);
    for (size_t i = 0; i < nilmax_result_line_count(res); ++i) std::printf("%s\n", nilmax_result_line(res, i));
    const int passed = nilmax_result_all_passed(res);
    nilmax_result_free(res);
    return passed ? 0 : 1;
}
