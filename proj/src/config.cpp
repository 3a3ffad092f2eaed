#include <cctype>
#include <cmath>
#include <numbers>
#include <set>

#include "nilmax/error.hpp"
#include "nilmax/pipeline.hpp"

namespace nilmax {

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& msg) {
    throw Error(ErrorCode::SchemaError, path + ": " + msg);
}

void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    if (!obj.is_object()) schema_error(path, "expected an object");
    for (const auto& kv : obj.items())
        if (!allowed.count(kv.key())) schema_error(path + "." + kv.key(), "unknown field");
}

double get_number(const json& obj, const std::string& key, const std::string& path, double def) {
    if (!obj.contains(key)) return def;
    const json& v = obj.at(key);
    if (!v.is_number()) schema_error(path + "." + key, "expected a number");
    return v.get<double>();
}

double need_number(const json& obj, const std::string& key, const std::string& path) {
    if (!obj.contains(key)) schema_error(path + "." + key, "required field missing");
    return get_number(obj, key, path, 0.0);
}

int get_int(const json& obj, const std::string& key, const std::string& path, int def) {
    if (!obj.contains(key)) return def;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) schema_error(path + "." + key, "expected an integer");
    return v.get<int>();
}

bool get_bool(const json& obj, const std::string& key, const std::string& path, bool def) {
    if (!obj.contains(key)) return def;
    const json& v = obj.at(key);
    if (!v.is_boolean()) schema_error(path + "." + key, "expected true or false");
    return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& path, const std::string& def) {
    if (!obj.contains(key)) return def;
    const json& v = obj.at(key);
    if (!v.is_string()) schema_error(path + "." + key, "expected a string");
    return v.get<std::string>();
}

cplx get_complex(const json& v, const std::string& path) {
    if (v.is_number()) return v.get<double>();
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    schema_error(path, "expected a number or [re, im]");
}

Expr get_expr(const json& obj, const std::string& key, const std::string& path, const char* def = nullptr) {
    const std::string p = path + "." + key;
    if (!obj.contains(key)) {
        if (def) return Expr::parse(def);
        schema_error(p, "required field missing");
    }
    const json& v = obj.at(key);
    if (v.is_number()) return Expr::constant(v.get<double>());
    if (!v.is_string()) schema_error(p, "expected an expression string or a number");
    try {
        return Expr::parse(v.get<std::string>());
    } catch (const Error& e) {
        throw Error(ErrorCode::ParseError, p + ": " + e.what());
    }
}

std::array<Expr, 3> get_expr3(const json& obj, const std::string& key, const std::string& path) {
    const std::string p = path + "." + key;
    if (!obj.contains(key)) schema_error(p, "required field missing");
    const json& v = obj.at(key);
    if (!v.is_array() || v.size() != 3) schema_error(p, "expected three expressions");
    json tmp = json::object();
    std::array<Expr, 3> out;
    for (size_t i = 0; i < 3; ++i) {
        tmp["e"] = v[i];
        out[i] = get_expr(tmp, "e", p + "[" + std::to_string(i) + "]");
    }
    return out;
}

Interval get_interval(const json& b, const std::string& path) {
    Interval iv;
    if (b.contains("interval")) {
        const json& v = b.at("interval");
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            schema_error(path + ".interval", "expected [lo, hi]");
        iv.lo = v[0].get<double>();
        iv.hi = v[1].get<double>();
        if (!(iv.hi > iv.lo) || iv.lo > 0.0 || iv.hi < 0.0)
            schema_error(path + ".interval", "needs lo <= 0 <= hi and lo < hi");
    }
    iv.samples = get_int(b, "samples", path, iv.samples);
    if (iv.samples < 2) schema_error(path + ".samples", "needs at least 2 samples");
    return iv;
}

HoloFn holo(const Expr& e) { return HoloFn::from_expr(e); }

TwistedLoop get_initial(const json& b, const std::string& path) {
    const json& v = b.at("initial");
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "identity") return TwistedLoop::identity(1);
        if (s == "C0") return initial_C0(0.0);
        schema_error(path + ".initial", "expected \"identity\", \"C0\" or {\"r\": .., \"c\": ..}");
    }
    check_keys(v, path + ".initial", {"r", "c"});
    return initial_local(get_number(v, "r", path + ".initial", 1.0 / std::sqrt(2.0)),
                         get_number(v, "c", path + ".initial", 0.0));
}

}  // namespace

EquatorData equator_data(const json& b) {
    const std::string path = "potential";
    EquatorData d{get_expr(b, "v", path), get_expr(b, "phi", path), get_interval(b, path)};
    return d;
}

CauchyData cauchy_data(const json& b) {
    const std::string path = "potential";
    CauchyData d{get_expr3(b, "N0", path), get_expr3(b, "W", path), get_interval(b, path)};
    return d;
}

Potential build_potential(const json& b) {
    const std::string path = "potential";
    if (!b.is_object()) schema_error(path, "expected an object");
    const std::string family = get_string(b, "family", path, "");
    const std::set<std::string> common{"family", "initial", "z0"};
    auto allow = [&](std::set<std::string> extra) {
        extra.insert(common.begin(), common.end());
        check_keys(b, path, extra);
    };
    Potential p;
    if (family == "revolution") {
        allow({"a"});
        p = revolution_potential(need_number(b, "a", path));
    } else if (family == "symmetric") {
        allow({"k"});
        const int k = get_int(b, "k", path, 1);
        if (k < 1) schema_error(path + ".k", "must be a positive integer");
        p = symmetric_potential(k);
    } else if (family == "normalized") {
        allow({"a", "b", "require_regular"});
        p = normalized_potential(holo(get_expr(b, "a", path)), holo(get_expr(b, "b", path)),
                                 get_bool(b, "require_regular", path, true));
    } else if (family == "singular") {
        allow({"B", "c", "higher"});
        std::vector<PotentialTerm> higher;
        if (b.contains("higher")) {
            const json& h = b.at("higher");
            if (!h.is_array()) schema_error(path + ".higher", "expected a list of terms");
            for (size_t i = 0; i < h.size(); ++i) {
                const std::string hp = path + ".higher[" + std::to_string(i) + "]";
                check_keys(h[i], hp, {"n", "matrix"});
                const int n = get_int(h[i], "n", hp, 1);
                if (n < 1) schema_error(hp + ".n", "higher terms need n >= 1");
                if (!h[i].contains("matrix") || !h[i]["matrix"].is_array() || h[i]["matrix"].size() != 4)
                    schema_error(hp + ".matrix", "expected [m11, m12, m21, m22]");
                std::array<HoloFn, 4> m;
                for (size_t e = 0; e < 4; ++e) {
                    json tmp = {{"e", h[i]["matrix"][e]}};
                    m[e] = holo(get_expr(tmp, "e", hp + ".matrix[" + std::to_string(e) + "]"));
                }
                higher.push_back({n, [m](cplx z) {
                                      Mat2 r;
                                      r << m[0](z), m[1](z), m[2](z), m[3](z);
                                      return r;
                                  }});
            }
        }
        p = singular_potential(holo(get_expr(b, "B", path)), get_number(b, "c", path, 0.0), higher);
    } else if (family == "local_data") {
        allow({"r", "c", "delta"});
        LocalData d;
        d.r = get_number(b, "r", path, d.r);
        d.c = get_number(b, "c", path, d.c);
        d.delta = holo(get_expr(b, "delta", path, "0"));
        if (!(d.r >= 0.0 && d.r <= 1.0)) schema_error(path + ".r", "must lie in [0, 1]");
        p = from_local_data(d);
    } else if (family == "deformed_sphere") {
        allow({"epsilon"});
        p = deformed_sphere_potential(holo(get_expr(b, "epsilon", path, "0")));
    } else if (family == "cauchy_equator") {
        allow({"v", "phi", "interval", "samples"});
        p = equator_potential(equator_data(b));
    } else if (family == "cauchy_general") {
        allow({"N0", "W", "interval", "samples"});
        p = cauchy_potential(cauchy_data(b));
    } else {
        schema_error(path + ".family", "unknown family \"" + family + "\"");
    }
    if (b.contains("initial")) p.initial = get_initial(b, path);
    if (b.contains("z0")) p.z0 = get_complex(b.at("z0"), path + ".z0");
    if (p.structure_defect({p.z0}) > 1e-12) schema_error(path, "potential violates twisting or trace-free structure");
    return p;
}

Potential build_potential(const RunConfig& c) { return build_potential(c.potential); }

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        // Byte offset to line and column.
        size_t line = 1, col = 1;
        for (size_t i = 0; i < text.size() && i + 1 < e.byte; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " +
                                               e.what());
    }
    RunConfig c;
    c.source = text;
    check_keys(j, "config", {"schema", "name", "potential", "grid", "numeric", "lambda", "points", "trace", "outputs"});
    if (!j.contains("schema")) schema_error("config.schema", "required field missing");
    c.schema = get_int(j, "schema", "config", 0);
    if (c.schema != kSchemaVersion)
        schema_error("config.schema", "unsupported version " + std::to_string(c.schema) + " (expected " +
                                          std::to_string(kSchemaVersion) + ")");
    c.name = get_string(j, "name", "config", c.name);
    for (char ch : c.name)
        if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-'))
            schema_error("config.name", "use letters, digits, '_' or '-'");
    if (!j.contains("potential")) schema_error("config.potential", "required field missing");
    c.potential = j.at("potential");
    build_potential(c.potential);  // validates the block

    if (j.contains("grid")) {
        const json& g = j.at("grid");
        check_keys(g, "grid", {"center", "half", "half_x", "half_y", "n", "nx", "ny"});
        if (g.contains("center")) c.grid.center = get_complex(g.at("center"), "grid.center");
        const double half = get_number(g, "half", "grid", c.grid.half_x);
        c.grid.half_x = get_number(g, "half_x", "grid", half);
        c.grid.half_y = get_number(g, "half_y", "grid", half);
        const int n = get_int(g, "n", "grid", c.grid.nx);
        c.grid.nx = get_int(g, "nx", "grid", n);
        c.grid.ny = get_int(g, "ny", "grid", n);
        if (!(c.grid.half_x > 0.0) || !(c.grid.half_y > 0.0)) schema_error("grid.half", "must be positive");
        if (c.grid.nx < 5 || c.grid.ny < 5) schema_error("grid.n", "needs at least 5 points per side");
    }
    if (j.contains("numeric")) {
        const json& n = j.at("numeric");
        check_keys(n, "numeric",
                   {"degree", "samples", "iwasawa_tol", "step", "integration_tol", "polish", "classify_tol", "zero_tol",
                    "stencil_h"});
        c.numeric.degree = get_int(n, "degree", "numeric", c.numeric.degree);
        c.numeric.samples = get_int(n, "samples", "numeric", c.numeric.samples);
        c.numeric.iwasawa_tol = get_number(n, "iwasawa_tol", "numeric", c.numeric.iwasawa_tol);
        c.numeric.step = get_number(n, "step", "numeric", c.numeric.step);
        c.numeric.integration_tol = get_number(n, "integration_tol", "numeric", c.numeric.integration_tol);
        c.numeric.polish = get_bool(n, "polish", "numeric", c.numeric.polish);
        c.classify.tol = get_number(n, "classify_tol", "numeric", c.classify.tol);
        c.classify.zero_tol = get_number(n, "zero_tol", "numeric", c.classify.zero_tol);
        c.classify.stencil_h = get_number(n, "stencil_h", "numeric", c.classify.stencil_h);
        if (c.numeric.degree < 1) schema_error("numeric.degree", "must be positive");
        const int m = c.numeric.samples;
        if (m < 2 * c.numeric.degree + 2 || (m & (m - 1)) != 0)
            schema_error("numeric.samples", "must be a power of two and at least 2 degree + 2");
        if (!(c.numeric.step > 0.0)) schema_error("numeric.step", "must be positive");
        if (!(c.classify.zero_tol > 0.0) || !(c.classify.tol > c.classify.zero_tol))
            schema_error("numeric.classify_tol", "needs classify_tol > zero_tol > 0");
    }
    if (j.contains("lambda")) {
        const json& l = j.at("lambda");
        if (!l.is_array() || l.empty()) schema_error("config.lambda", "expected a non-empty list of angles");
        c.lambda_angles.clear();
        for (size_t i = 0; i < l.size(); ++i) {
            if (!l[i].is_number()) schema_error("config.lambda[" + std::to_string(i) + "]", "expected a number");
            c.lambda_angles.push_back(l[i].get<double>());
        }
    }
    if (j.contains("points")) {
        const json& p = j.at("points");
        if (!p.is_array()) schema_error("config.points", "expected a list of [re, im]");
        for (size_t i = 0; i < p.size(); ++i) c.points.push_back(get_complex(p[i], "config.points[" + std::to_string(i) + "]"));
    } else {
        c.points.push_back(build_potential(c.potential).z0);
    }
    c.trace = get_bool(j, "trace", "config", c.trace);
    if (j.contains("outputs")) {
        const json& o = j.at("outputs");
        check_keys(o, "outputs", {"obj", "ply", "csv", "report", "surface"});
        c.outputs.obj = get_bool(o, "obj", "outputs", c.outputs.obj);
        c.outputs.ply = get_bool(o, "ply", "outputs", c.outputs.ply);
        c.outputs.csv = get_bool(o, "csv", "outputs", c.outputs.csv);
        c.outputs.report = get_bool(o, "report", "outputs", c.outputs.report);
        c.outputs.surface = get_string(o, "surface", "outputs", c.outputs.surface);
        if (c.outputs.surface != "nil" && c.outputs.surface != "cmc" && c.outputs.surface != "both")
            schema_error("outputs.surface", "expected \"nil\", \"cmc\" or \"both\"");
    }
    return c;
}

RunConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

json config_to_json(const RunConfig& c) {
    json j;
    j["schema"] = c.schema;
    j["name"] = c.name;
    j["potential"] = c.potential;
    j["grid"] = {{"center", {c.grid.center.real(), c.grid.center.imag()}},
                 {"half_x", c.grid.half_x},
                 {"half_y", c.grid.half_y},
                 {"nx", c.grid.nx},
                 {"ny", c.grid.ny}};
    j["numeric"] = {{"degree", c.numeric.degree},
                    {"samples", c.numeric.samples},
                    {"iwasawa_tol", c.numeric.iwasawa_tol},
                    {"step", c.numeric.step},
                    {"integration_tol", c.numeric.integration_tol},
                    {"polish", c.numeric.polish},
                    {"classify_tol", c.classify.tol},
                    {"zero_tol", c.classify.zero_tol},
                    {"stencil_h", c.classify.stencil_h}};
    j["lambda"] = c.lambda_angles;
    json pts = json::array();
    for (cplx z : c.points) pts.push_back({z.real(), z.imag()});
    j["points"] = pts;
    j["trace"] = c.trace;
    j["outputs"] = {{"obj", c.outputs.obj},
                    {"ply", c.outputs.ply},
                    {"csv", c.outputs.csv},
                    {"report", c.outputs.report},
                    {"surface", c.outputs.surface}};
    return j;
}

}  // namespace nilmax
