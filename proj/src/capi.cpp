#include "nilmax/nilmax.h"

#include <cmath>
#include <complex>
#include <cstring>
#include <memory>
#include <string>

#include "nilmax/error.hpp"
#include "nilmax/pipeline.hpp"

struct nilmax_config {
    nilmax::RunConfig cfg;
};

struct nilmax_result {
    nilmax::RunResult res;
    std::string report_text;
    bool all_passed = true;
};

namespace {

thread_local std::string last_error;

nilmax_status to_status(nilmax::ErrorCode c) { return static_cast<nilmax_status>(static_cast<int>(c)); }

template <class F>
nilmax_status guarded(F&& f) {
    try {
        last_error.clear();
        f();
        return NILMAX_OK;
    } catch (const nilmax::Error& e) {
        last_error = e.what();
        return to_status(e.code());
    } catch (const std::exception& e) {
        last_error = e.what();
        return NILMAX_INTERNAL_ERROR;
    } catch (...) {
        last_error = "unknown exception";
        return NILMAX_INTERNAL_ERROR;
    }
}

nilmax_status null_arg(const char* what) {
    last_error = std::string("null argument: ") + what;
    return NILMAX_INVALID_ARGUMENT;
}

}  // namespace

extern "C" {

const char* nilmax_version(void) { return "1.0.0"; }

const char* nilmax_status_name(nilmax_status status) {
    if (status == NILMAX_INTERNAL_ERROR) return "InternalError";
    if (status < NILMAX_OK || status > NILMAX_IO_ERROR) return "Unknown";
    return nilmax::error_name(static_cast<nilmax::ErrorCode>(status));
}

const char* nilmax_kind_name(int kind) {
    if (kind < 0 || kind > NILMAX_KIND_CUSPIDAL_CROSS_CAP) return "Unknown";
    return nilmax::kind_name(static_cast<nilmax::SingularKind>(kind));
}

const char* nilmax_last_error(void) { return last_error.c_str(); }

int nilmax_exit_code(nilmax_status status) {
    switch (status) {
        case NILMAX_OK:
            return 0;
        case NILMAX_SCHEMA_ERROR:
        case NILMAX_PARSE_ERROR:
            return 2;
        case NILMAX_IO_ERROR:
            return 3;
        default:
            return 1;
    }
}

nilmax_status nilmax_config_load(const char* path, nilmax_config** out) {
    if (!path) return null_arg("path");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] { *out = new nilmax_config{nilmax::load_config(path)}; });
}

nilmax_status nilmax_config_parse(const char* json_text, nilmax_config** out) {
    if (!json_text) return null_arg("json_text");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] { *out = new nilmax_config{nilmax::parse_config(json_text)}; });
}

void nilmax_config_free(nilmax_config* config) { delete config; }

nilmax_status nilmax_config_set_lambda(nilmax_config* config, double angle) {
    if (!config) return null_arg("config");
    return guarded([&] {
        if (!std::isfinite(angle)) throw nilmax::Error(nilmax::ErrorCode::InvalidArgument, "lambda angle must be finite");
        config->cfg.lambda_angles = {angle};
    });
}

nilmax_status nilmax_config_set_degree(nilmax_config* config, int degree) {
    if (!config) return null_arg("config");
    return guarded([&] {
        if (degree < 1) throw nilmax::Error(nilmax::ErrorCode::InvalidArgument, "degree must be >= 1");
        config->cfg.numeric.degree = degree;
    });
}

nilmax_status nilmax_config_set_tol(nilmax_config* config, double tol) {
    if (!config) return null_arg("config");
    return guarded([&] {
        if (!(tol > config->cfg.classify.zero_tol))
            throw nilmax::Error(nilmax::ErrorCode::InvalidArgument, "tol must exceed the zero threshold");
        config->cfg.classify.tol = tol;
    });
}

nilmax_status nilmax_config_to_json(const nilmax_config* config, char** out) {
    if (!config) return null_arg("config");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        const std::string s = nilmax::config_to_json(config->cfg).dump(2);
        char* buf = new char[s.size() + 1];
        std::memcpy(buf, s.c_str(), s.size() + 1);
        *out = buf;
    });
}

void nilmax_string_free(char* s) { delete[] s; }

nilmax_status nilmax_run(const char* command, const nilmax_config* config, const char* out_dir, nilmax_result** out) {
    if (!command) return null_arg("command");
    if (!out_dir) return null_arg("out_dir");
    if (!out) return null_arg("out");
    *out = nullptr;
    return guarded([&] {
        auto r = std::make_unique<nilmax_result>();
        r->res = nilmax::run_command(command, config ? &config->cfg : nullptr, out_dir);
        r->report_text = r->res.report.dump(2);
        if (r->res.report.contains("all_passed")) r->all_passed = r->res.report["all_passed"].get<bool>();
        *out = r.release();
    });
}

size_t nilmax_result_line_count(const nilmax_result* result) { return result ? result->res.lines.size() : 0; }

const char* nilmax_result_line(const nilmax_result* result, size_t index) {
    if (!result || index >= result->res.lines.size()) return nullptr;
    return result->res.lines[index].c_str();
}

size_t nilmax_result_artifact_count(const nilmax_result* result) { return result ? result->res.artifacts.size() : 0; }

const char* nilmax_result_artifact(const nilmax_result* result, size_t index) {
    if (!result || index >= result->res.artifacts.size()) return nullptr;
    return result->res.artifacts[index].c_str();
}

const char* nilmax_result_report_json(const nilmax_result* result) { return result ? result->report_text.c_str() : nullptr; }

int nilmax_result_all_passed(const nilmax_result* result) { return result && result->all_passed ? 1 : 0; }

void nilmax_result_free(nilmax_result* result) { delete result; }

nilmax_status nilmax_classify_point(const nilmax_config* config, double re, double im, nilmax_point_info* out) {
    if (!config) return null_arg("config");
    if (!out) return null_arg("out");
    return guarded([&] {
        const nilmax::RunConfig& c = config->cfg;
        const nilmax::FrameEvaluator ev(nilmax::build_potential(c), c.numeric);
        const double ang = c.lambda_angles.empty() ? 0.0 : c.lambda_angles.front();
        const nilmax::SingularAnalyzer an(ev, nullptr, std::polar(1.0, ang), c.classify);
        const nilmax::SingularPoint p = an.classify({re, im});
        out->kind = static_cast<int>(p.kind);
        out->decided = p.decided ? 1 : 0;
        out->margin = p.margin;
        out->re_bhat = p.diagnostics.re_bhat;
        out->im_bhat = p.diagnostics.im_bhat;
        out->im_bhat_prime = p.diagnostics.im_bhat_prime;
        out->n3 = p.n3;
    });
}

}  // extern "C"
