#include "nilmax/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>

#include "nilmax/error.hpp"
#include "nilmax/verify.hpp"

namespace nilmax {

namespace {

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

// Non-finite values become null so the report stays valid JSON.
json rjson(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string label(const SingularPoint& p) { return point_label(p); }

struct Member {
    double angle = 0.0;
    cplx lambda{1.0, 0.0};
    SurfaceRaster raster;
    std::vector<SingularCurve> curves;
    std::vector<SingularPoint> points;
};

struct Analysis {
    Potential potential;
    std::unique_ptr<FrameEvaluator> ev;
    FrameField field;
    std::vector<Member> members;
    json numerics;
};

Analysis analyze(const RunConfig& c, bool want_trace) {
    Analysis a;
    a.potential = build_potential(c);
    a.ev = std::make_unique<FrameEvaluator>(a.potential, c.numeric);
    c.grid.validate();
    for (size_t i = 0; i < c.points.size(); ++i)
        if (!c.grid.contains(c.points[i]))
            throw Error(ErrorCode::InvalidArgument, "points[" + std::to_string(i) + "] lies outside the grid");
    a.field = frame(*a.ev, c.grid);

    double fr = 0.0, un = 0.0, ie = 0.0;
    for (const auto& p : a.field.points) {
        fr = std::max(fr, p.factor_residual);
        un = std::max(un, p.unitarity);
        ie = std::max(ie, p.integration_error);
    }
    const MaurerCartanReport mc = maurer_cartan_check(a.field);
    a.numerics = {{"max_factor_residual", fr},
                  {"max_unitarity", un},
                  {"max_integration_error", ie},
                  {"max_structural_defect", mc.max_structural},
                  {"max_flatness_residual", mc.max_flatness}};

    for (double ang : c.lambda_angles) {
        Member m;
        m.angle = ang;
        m.lambda = std::polar(1.0, ang);
        m.raster = surface_raster(a.field, m.lambda);
        SingularAnalyzer an(*a.ev, &a.field, m.lambda, c.classify);
        if (want_trace) {
            for (const auto& curve : an.trace(m.raster)) m.curves.push_back(with_special_points(an, curve));
        }
        m.points.resize(c.points.size());
        parallel_for(c.points.size(), [&](size_t i) { m.points[i] = an.classify(c.points[i]); });
        a.members.push_back(std::move(m));
    }
    return a;
}

json curve_json(const SingularCurve& c, const ClassifyOptions& opt) {
    json j;
    j["closed"] = c.closed;
    j["points"] = c.points.size();
    int undecided = 0, disagreements = 0;
    double max_n3 = 0.0;
    std::vector<double> d1;
    json special = json::array();
    for (const auto& p : c.points) {
        undecided += !p.decided;
        max_n3 = std::max(max_n3, std::abs(p.n3));
        d1.push_back(p.diagnostics.re_bhat - 1.0);
        if (p.decided && p.raw_decision.decided && p.margin > 1e-3 && p.raw_decision.margin > 1e-3 &&
            p.kind != p.raw_decision.kind)
            ++disagreements;
        if (p.decided && (p.kind == SingularKind::Swallowtail || p.kind == SingularKind::CuspidalCrossCap ||
                          p.kind == SingularKind::Degenerate))
            special.push_back(point_json(p));
    }
    try {
        j["cross_caps"] = count_boundary_crosscaps(c);
        j["degenerate"] = false;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateBoundary) throw;
        j["cross_caps"] = nullptr;
        j["degenerate"] = true;
    }
    j["swallowtails"] = count_sign_changes(d1, c.closed, opt.zero_tol);
    j["undecided"] = undecided;
    j["route_disagreements"] = disagreements;
    j["max_abs_n3"] = max_n3;
    j["classify_tol"] = opt.tol;
    j["labeled"] = special;
    return j;
}

double raster_max(const SurfaceRaster& r, double (*f)(const SurfaceSample&)) {
    double m = 0.0;
    for (const auto& p : r.points) m = std::max(m, f(p.s));
    return m;
}

std::string member_suffix(const RunConfig& c, size_t i) {
    return c.lambda_angles.size() > 1 ? "_l" + std::to_string(i) : std::string();
}

RunResult emit(const RunConfig& c, const std::string& command, const Analysis& a, const std::string& out_dir,
               bool meshes, json extra, std::vector<std::string> extra_lines) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir + ": " + ec.message());

    RunResult res;
    json members = json::array();
    for (size_t mi = 0; mi < a.members.size(); ++mi) {
        const Member& m = a.members[mi];
        const std::string base = c.name + member_suffix(c, mi);
        json mj;
        mj["lambda_angle"] = m.angle;
        mj["relation_defect_max"] = raster_max(m.raster, relation_defect);
        mj["spinor_metric_defect_max"] = raster_max(m.raster, spinor_metric_defect);
        json curves = json::array();
        for (const auto& cv : m.curves) curves.push_back(curve_json(cv, c.classify));
        mj["curves"] = curves;
        json pts = json::array();
        for (const auto& p : m.points) pts.push_back(point_json(p));
        mj["points"] = pts;

        const std::string tag = a.members.size() > 1 ? " [lambda angle " + format_z(m.angle) + "]" : "";
        for (const auto& p : m.points) res.lines.push_back("kind=" + label(p) + " at " + format_z(p.z) + tag);
        for (size_t ci = 0; ci < m.curves.size(); ++ci) {
            const json& cj = curves[ci];
            res.lines.push_back("curve " + std::to_string(ci) + ": " + (cj["closed"].get<bool>() ? "closed" : "open") +
                                ", " + std::to_string(cj["points"].get<size_t>()) + " points, cross-caps=" +
                                (cj["cross_caps"].is_null() ? std::string("degenerate") : cj["cross_caps"].dump()) +
                                ", swallowtails=" + cj["swallowtails"].dump() + tag);
        }

        json files = json::array();
        auto put = [&](const std::string& file, const std::string& text) {
            write_atomic((fs::path(out_dir) / file).string(), text);
            files.push_back(file);
            res.artifacts.push_back(file);
        };
        if (meshes) {
            std::vector<std::pair<std::string, bool>> kinds;
            if (c.outputs.surface != "cmc") kinds.push_back({"nil", false});
            if (c.outputs.surface != "nil") kinds.push_back({"cmc", true});
            for (const auto& [nm, cmc] : kinds) {
                if (c.outputs.obj) put(base + "_" + nm + ".obj", mesh_text(m.raster, {false, cmc}));
                if (c.outputs.ply) put(base + "_" + nm + ".ply", mesh_text(m.raster, {true, cmc}));
            }
        }
        if (c.outputs.csv) put(base + "_singular.csv", singular_csv(m.curves, m.points));
        mj["artifacts"] = files;
        members.push_back(mj);
    }
    for (auto& l : extra_lines) res.lines.push_back(l);

    json report;
    report["schema"] = "nilmax.report/1";
    report["command"] = command;
    report["name"] = c.name;
    report["config"] = config_to_json(c);
    report["config_source"] = c.source;
    report["numerics"] = a.numerics;
    report["members"] = members;
    if (!extra.is_null()) report["cauchy"] = extra;
    report["summary"] = res.lines;
    report["status"] = "ok";
    res.report = report;
    if (c.outputs.report) {
        write_atomic((fs::path(out_dir) / "report.json").string(), report.dump(2) + "\n");
        std::string txt;
        for (const auto& l : res.lines) txt += l + "\n";
        write_atomic((fs::path(out_dir) / "report.txt").string(), txt);
        res.artifacts.push_back("report.json");
        res.artifacts.push_back("report.txt");
    }
    return res;
}

template <class F>
RunResult timed(const std::string& out_dir, F&& body) {
    const auto t0 = std::chrono::steady_clock::now();
    RunResult r = body();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    // Timing lives outside the deterministic artifacts.
    const json rt = {{"seconds", secs}, {"threads", thread_count()}};
    write_atomic((std::filesystem::path(out_dir) / "runtime.json").string(), rt.dump(2) + "\n");
    return r;
}

}  // namespace

json point_json(const SingularPoint& p) {
    json j;
    j["z"] = cjson(p.z);
    j["kind"] = label(p);
    j["tentative_kind"] = kind_name(p.kind);
    j["decided"] = p.decided;
    j["margin"] = rjson(p.margin);
    j["diagnostics"] = {{"re_bhat", p.diagnostics.re_bhat},
                        {"im_bhat", p.diagnostics.im_bhat},
                        {"im_bhat_prime", p.diagnostics.im_bhat_prime},
                        {"re_bhat_prime", p.diagnostics.re_bhat_prime}};
    j["raw"] = {{"kind", p.raw_decision.decided ? kind_name(p.raw_decision.kind) : "TooCloseToCall"},
                {"margin", rjson(p.raw_decision.margin)},
                {"re_q", p.raw.re_q},
                {"im_q_plus_2", p.raw.im_q_plus_2},
                {"im_r", rjson(p.raw.im_r)},
                {"re_r", rjson(p.raw.re_r)}};
    j["n3"] = p.n3;
    j["on_singular_set"] = on_singular_set(p);
    j["tangent_elevation"] = rjson(tangent_elevation(p.tangent));
    j["bprime_crosscheck"] = p.bprime_crosscheck;
    return j;
}

SingularCurve with_special_points(const SingularAnalyzer& an, const SingularCurve& c) {
    const std::vector<SingularPoint> sp = an.special_points(c);
    if (sp.empty() || c.points.size() < 2) return c;
    const size_t n = c.points.size();
    const size_t segs = c.closed ? n : n - 1;
    std::vector<std::vector<SingularPoint>> after(n);
    std::vector<SingularPoint> points = c.points;
    for (const auto& p : sp) {
        // A vertex that already sits on the special point is replaced by the refined point.
        auto same = std::find_if(points.begin(), points.end(),
                                 [&](const SingularPoint& v) { return std::abs(v.z - p.z) < 1e-7; });
        if (same != points.end()) {
            *same = p;
            continue;
        }
        size_t best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < segs; ++i) {
            const cplx a = c.points[i].z, b = c.points[(i + 1) % n].z;
            const double t = std::clamp(((p.z - a) * std::conj(b - a)).real() / std::norm(b - a), 0.0, 1.0);
            const double d = std::abs(p.z - (a + t * (b - a)));
            if (d < bd) {
                bd = d;
                best = i;
            }
        }
        after[best].push_back(p);
    }
    SingularCurve out;
    out.closed = c.closed;
    for (size_t i = 0; i < n; ++i) {
        out.points.push_back(points[i]);
        auto& extra = after[i];
        const cplx a = c.points[i].z;
        std::sort(extra.begin(), extra.end(),
                  [&](const SingularPoint& x, const SingularPoint& y) { return std::abs(x.z - a) < std::abs(y.z - a); });
        for (auto& e : extra) out.points.push_back(e);
    }
    return out;
}

RunResult run_build(const RunConfig& c, const std::string& out_dir) {
    return timed(out_dir, [&] {
        const Analysis a = analyze(c, c.trace);
        return emit(c, "build", a, out_dir, true, json(), {});
    });
}

RunResult run_classify(const RunConfig& c, const std::string& out_dir) {
    return timed(out_dir, [&] {
        const Analysis a = analyze(c, true);
        return emit(c, "classify", a, out_dir, false, json(), {});
    });
}

RunResult run_cauchy(const RunConfig& c, const std::string& out_dir) {
    const std::string family = c.potential.value("family", "");
    if (family != "cauchy_equator" && family != "cauchy_general")
        throw Error(ErrorCode::SchemaError, "potential.family: the cauchy command needs cauchy_equator or cauchy_general");
    return timed(out_dir, [&] {
        const Analysis a = analyze(c, c.trace);
        const Interval iv = family == "cauchy_equator" ? equator_data(c.potential).interval : cauchy_data(c.potential).interval;
        std::vector<double> xs;
        const double lo = std::max(-1.0, iv.lo), hi = std::min(1.0, iv.hi);
        for (int i = 0; i <= 20; ++i) xs.push_back(lo + (hi - lo) * i / 20.0);
        json cj;
        std::vector<std::string> lines;
        Reconstruction rec;
        if (family == "cauchy_equator") {
            const EquatorData d = equator_data(c.potential);
            rec = reconstruct(*a.ev, d, xs);
            std::string predicted;
            try {
                predicted = kind_name(predict_type(d));
            } catch (const Error& e) {
                if (e.code() != ErrorCode::Unclassified) throw;
                predicted = "Unclassified";
            }
            const SingularAnalyzer an(*a.ev, &a.field, 1.0, c.classify);
            const SingularPoint at0 = an.classify(0.0);
            const cplx closed = bhat(d, 0.0), birk = bhat_birkhoff(*a.ev, 0.0);
            double max_n3 = 0.0;
            for (double x : xs) max_n3 = std::max(max_n3, std::abs(point_geometry(a.ev->at(x)).s.N[2]));
            cj["predicted"] = predicted;
            cj["surface_kind"] = label(at0);
            cj["bhat_closed_form"] = cjson(closed);
            cj["bhat_birkhoff"] = cjson(birk);
            cj["bhat_difference"] = std::abs(closed - birk);
            cj["max_abs_n3_on_axis"] = max_n3;
            lines.push_back("predicted=" + predicted + " surface=" + label(at0) + " at 0");
            lines.push_back("bhat(0)=" + format_z(closed) + " birkhoff=" + format_z(birk));
        } else {
            rec = reconstruct(*a.ev, cauchy_data(c.potential), xs);
        }
        cj["reconstruction"] = {{"max_n_error", rec.max_n_error},
                                {"max_w_error", rec.max_w_error},
                                {"max_frame_defect", rec.max_frame_defect}};
        char buf[160];
        std::snprintf(buf, sizeof buf, "reconstruction: |N - N0| <= %.3g, |N_y - W| <= %.3g", rec.max_n_error,
                      rec.max_w_error);
        lines.push_back(buf);
        return emit(c, "cauchy", a, out_dir, true, cj, lines);
    });
}

RunResult run_command(const std::string& command, const RunConfig* c, const std::string& out_dir) {
    if (command == "build" || command == "classify" || command == "cauchy") {
        if (!c) throw Error(ErrorCode::InvalidArgument, command + " needs --config");
        if (command == "build") return run_build(*c, out_dir);
        if (command == "classify") return run_classify(*c, out_dir);
        return run_cauchy(*c, out_dir);
    }
    if (command == "verify") {
        return timed(out_dir, [&] {
            RunResult r;
            const VerifyReport v = run_verify_suite();
            r.report = verify_report_json(v);
            for (const auto& e : v.entries)
                r.lines.push_back(std::string(e.status) + " " + e.module + "/" + e.name);
            std::error_code ec;
            std::filesystem::create_directories(out_dir, ec);
            if (ec) throw Error(ErrorCode::IoError, "cannot create " + out_dir + ": " + ec.message());
            write_atomic((std::filesystem::path(out_dir) / "verify.json").string(), r.report.dump(2) + "\n");
            write_atomic((std::filesystem::path(out_dir) / "report.json").string(), r.report.dump(2) + "\n");
            r.artifacts = {"verify.json", "report.json"};
            return r;
        });
    }
    if (command == "report") {
        RunResult r;
        const std::string text = read_file((std::filesystem::path(out_dir) / "report.json").string());
        try {
            r.report = json::parse(text);
        } catch (const json::parse_error& e) {
            throw Error(ErrorCode::ParseError, std::string("report.json: ") + e.what());
        }
        if (r.report.contains("summary"))
            for (const auto& l : r.report["summary"]) r.lines.push_back(l.get<std::string>());
        return r;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown command \"" + command + "\"");
}

}  // namespace nilmax
