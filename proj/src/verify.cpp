#include "nilmax/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>

#include <unistd.h>

#include "nilmax/error.hpp"
#include "nilmax/fixtures.hpp"

namespace nilmax {

namespace {

namespace fx = fixtures;
constexpr double kPi = 3.14159265358979323846;

const char* kCatalog[] = {
    "nilgeom/associativity",
    "nilgeom/left_translation_invariance",
    "nilgeom/frame_round_trip",
    "looplab/twisting_closure",
    "looplab/unit_determinant",
    "looplab/lambda_derivation",
    "factor/iwasawa_idempotence",
    "factor/gauge_equivariance",
    "factor/birkhoff_iwasawa_compatibility",
    "potentials/structure_checks",
    "potentials/local_data_recovery",
    "potentials/rotation_parameter",
    "framefield/unitarity_determinant",
    "framefield/initial_condition",
    "framefield/flatness_order",
    "surfaces/harmonicity_order",
    "surfaces/conformality_order",
    "surfaces/relation_identity",
    "surfaces/nonexistence_witness",
    "surfaces/associated_family_labels",
    "singular/route_agreement",
    "singular/degeneracy_gradient",
    "singular/metric_zero_set",
    "singular/count_parity",
    "cauchy/end_to_end_type",
    "cauchy/bhat_birkhoff",
    "cauchy/reconstruction",
    "cauchy/frame_convention",
    "cli/determinism",
    "cli/report_completeness",
    "oracles/separation",
};

VerifyEntry make(const std::string& id, double measured, double tol, bool ok, std::string fixture, std::string detail) {
    VerifyEntry e;
    const auto slash = id.find('/');
    e.module = id.substr(0, slash);
    e.name = id.substr(slash + 1);
    e.status = ok ? "pass" : "fail";
    e.measured = measured;
    e.tolerance = tol;
    e.fixture = std::move(fixture);
    e.detail = std::move(detail);
    return e;
}

VerifyEntry below(const std::string& id, double measured, double tol, std::string fixture, std::string detail = "") {
    return make(id, measured, tol, std::isfinite(measured) && measured <= tol, std::move(fixture), std::move(detail));
}

double loop_diff(const TwistedLoop& a, const TwistedLoop& b) { return loop_add(a, loop_scale(b, -1.0)).max_abs(); }

double order_of(double coarse, double fine) { return std::log2(coarse / fine); }

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[200];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// A potential solved on a grid, with the member-1 raster and its traced singular set.
struct Solved {
    std::unique_ptr<FrameEvaluator> ev;
    FrameField field;
    SurfaceRaster raster;
    std::vector<SingularCurve> curves;
    std::unique_ptr<SingularAnalyzer> an;

    Solved(const Potential& p, DomainGrid g, bool trace) {
        ev = std::make_unique<FrameEvaluator>(p);
        field = frame(*ev, g);
        raster = surface_raster(field, 1.0);
        an = std::make_unique<SingularAnalyzer>(*ev, &field, 1.0);
        if (trace)
            for (const auto& c : an->trace(raster)) curves.push_back(with_special_points(*an, c));
    }
};

struct Cache {
    std::unique_ptr<Solved> ex1_coarse, ex1_fine, disc, ce;

    Solved& ex1c() {
        if (!ex1_coarse) ex1_coarse = std::make_unique<Solved>(fx::example1(), DomainGrid::square(0.0, 1.2, 41), true);
        return *ex1_coarse;
    }
    Solved& ex1f() {
        if (!ex1_fine) ex1_fine = std::make_unique<Solved>(fx::example1(), DomainGrid::square(0.0, 1.2, 81), true);
        return *ex1_fine;
    }
    Solved& dsc() {
        if (!disc) disc = std::make_unique<Solved>(fx::disc_potential(), DomainGrid::square(0.0, 1.2, 41), true);
        return *disc;
    }
    Solved& cusp() {
        if (!ce) ce = std::make_unique<Solved>(fx::sing_potential("2-i"), DomainGrid::square(0.0, 0.3, 21), true);
        return *ce;
    }
};

// ---- nilgeom

VerifyEntry nil_associativity(fx::Rng& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    auto rp = [&] { return NilPoint{u(rng), u(rng), u(rng)}; };
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const NilPoint p = rp(), q = rp(), r = rp();
        const Vec3 a = nil_multiply(nil_multiply(p, q), r).vec(), b = nil_multiply(p, nil_multiply(q, r)).vec();
        worst = std::max(worst, (a - b).norm());
    }
    return below("nilgeom/associativity", worst, 1e-13, "200 random triples in [-2,2]^3");
}

VerifyEntry nil_left_invariance(fx::Rng& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const NilPoint p{u(rng), u(rng), u(rng)}, q{u(rng), u(rng), u(rng)};
        const Vec3 v(u(rng), u(rng), u(rng));
        const double a = g2_metric(p, v, v);
        const double b = g2_metric(nil_multiply(q, p), left_translate_vector(q, p, v), left_translate_vector(q, p, v));
        worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(a)));
    }
    return below("nilgeom/left_translation_invariance", worst, 1e-12, "200 random (p, q, u)");
}

VerifyEntry nil_round_trip(fx::Rng& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
        const NilPoint p{u(rng), u(rng), u(rng)};
        const Vec3 a(u(rng), u(rng), u(rng)), b(u(rng), u(rng), u(rng));
        worst = std::max(worst, (frame_to_coordinate(p, coordinate_to_frame(p, a)) - a).norm());
        const Vec3 lin = coordinate_to_frame(p, 2.0 * a - b).vec() - (2.0 * coordinate_to_frame(p, a).vec() - coordinate_to_frame(p, b).vec());
        worst = std::max(worst, lin.norm() / 4.0);
    }
    return below("nilgeom/frame_round_trip", worst, 1e-14, "200 random points in [-1,1]^3", "round trip and linearity");
}

// ---- looplab

TwistedLoop random_twisted(fx::Rng& rng, int d) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    TwistedLoop a(d);
    for (int n = -d; n <= d; ++n) {
        Mat2& c = a.at(n);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                if (((i == j) ? 0 : 1) == (((n % 2) + 2) % 2)) c(i, j) = cplx(u(rng), u(rng)) / (1.0 + std::abs(n));
    }
    return a;
}

VerifyEntry loop_twisting(fx::Rng& rng) {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const TwistedLoop a = random_twisted(rng, 3), b = random_twisted(rng, 3);
        worst = std::max(worst, loop_mul(a, b, 6).parity_defect());
        worst = std::max(worst, loop_inverse_sl2(fx::random_sl2_loop(rng, 4)).parity_defect());
    }
    return below("looplab/twisting_closure", worst, 0.0, "100 random products and inverses");
}

VerifyEntry loop_det() {
    const Potential p = fx::sing_potential("2-i-i*z");
    FrameEvaluator ev(p);
    double worst = 0.0;
    for (cplx z : {cplx(0.4, 0.2), cplx(-0.3, 0.5), cplx(0.6, -0.6)}) {
        const UnitCircleSampling s = ev.ray(z).phi;
        const TwistedLoop l = loop_from_samples(s, 16).loop;
        for (int j = 0; j < 32; ++j)
            worst = std::max(worst, std::abs(loop_eval(l, std::polar(1.0, (j + 0.5) * kPi / 16.0)).determinant() - 1.0));
    }
    return below("looplab/unit_determinant", worst, 1e-9, "singular B=2-i-iz, Phi at 3 points, degree 16",
                 "det of the degree-16 loop between sample nodes");
}

VerifyEntry loop_derivation(fx::Rng& rng) {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const TwistedLoop a = random_twisted(rng, 3), b = random_twisted(rng, 3);
        const TwistedLoop lhs = loop_lambda_dlambda(loop_mul(a, b, 6));
        const TwistedLoop rhs =
            loop_add(loop_mul(loop_lambda_dlambda(a), b, 6), loop_mul(a, loop_lambda_dlambda(b), 6));
        worst = std::max(worst, loop_diff(lhs, rhs));
    }
    return below("looplab/lambda_derivation", worst, 1e-10, "100 random degree-3 pairs");
}

// ---- factor

VerifyEntry factor_idempotence(fx::Rng& rng) {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const TwistedLoop F = iwasawa(fx::random_sl2_loop(rng, 4)).F;
        const IwasawaResult r = iwasawa(F);
        worst = std::max({worst, loop_diff(r.F, F), loop_diff(r.Bplus, TwistedLoop::identity(0))});
    }
    return below("factor/iwasawa_idempotence", worst, 1e-10, "50 unitary factors of random degree-4 loops");
}

VerifyEntry factor_gauge(fx::Rng& rng) {
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const TwistedLoop phi = fx::random_sl2_loop(rng, 4), P = fx::random_plus_loop(rng, 2);
        worst = std::max(worst, loop_diff(iwasawa(loop_mul(phi, P, 16)).F, iwasawa(phi).F));
    }
    return below("factor/gauge_equivariance", worst, 1e-9, "50 random loops times positive plus loops");
}

VerifyEntry factor_compat() {
    double worst = 0.0;
    for (double c : {0.0, 0.4, -1.1}) {
        Potential p = fx::sing_potential("2-i*z");
        p.initial = initial_C0(c);
        FrameEvaluator ev(p);
        for (cplx z : {cplx(0.3, 0.1), cplx(-0.2, 0.4)}) {
            const UnitCircleSampling C = ev.ray(z).phi;
            const TwistedLoop Fa = iwasawa(C).F;
            const TwistedLoop Fb = iwasawa(birkhoff(C).Cminus).F;
            // Equal up to a constant diagonal unitary gauge.
            const Mat2 k = loop_eval(Fb, 1.0).inverse() * loop_eval(Fa, 1.0);
            const Mat2 kd = k.diagonal().asDiagonal();
            worst = std::max({worst, loop_diff(Fa, loop_mul(Fb, TwistedLoop::constant(kd), 16)),
                              std::abs(k(0, 1)) + std::abs(k(1, 0)), std::abs(std::abs(k(0, 0)) - 1.0)});
        }
    }
    return below("factor/birkhoff_iwasawa_compatibility", worst, 1e-8, "singular B=2-iz with C0(c), c in {0, 0.4, -1.1}",
                 "F compared modulo a constant diagonal unitary");
}

// ---- potentials

CauchyData sample_cauchy_data() {
    CauchyData d;
    d.N0 = {Expr::parse("cos(x)"), Expr::parse("sin(x)"), Expr::parse("0")};
    d.W = {Expr::parse("cos(0.7)*sin(x)"), Expr::parse("-cos(0.7)*cos(x)"), Expr::parse("sin(0.7)")};
    d.interval = {-1.2, 1.2, 97};
    return d;
}

VerifyEntry potentials_structure() {
    std::vector<std::pair<std::string, Potential>> ps = {
        {"revolution", revolution_potential(0.3)},
        {"symmetric1", symmetric_potential(1)},
        {"symmetric3", symmetric_potential(3)},
        {"normalized", normalized_potential(HoloFn::parse("1+z"), HoloFn::parse("exp(z)"))},
        {"local_data", from_local_data({0.6, 0.3, HoloFn::parse("0.2*z")})},
        {"deformed_sphere", fx::disc_potential()},
        {"equator", equator_potential({Expr::parse("1"), Expr::parse("x+pi/2"), {-1.2, 1.2, 97}})},
        {"cauchy_general", cauchy_potential(sample_cauchy_data())},
    };
    for (const auto& f : fx::singexample()) ps.push_back({f.name, fx::sing_potential(f.B)});
    const std::vector<cplx> zs = {0.0, {0.3, 0.2}, {-0.5, -0.4}, {0.0, 0.9}};
    double worst = 0.0;
    for (const auto& [name, p] : ps) {
        worst = std::max(worst, p.structure_defect(zs));
        worst = std::max(worst, p.initial.parity_defect());
    }
    return below("potentials/structure_checks", worst, 1e-14, std::to_string(ps.size()) + " potentials of every family");
}

VerifyEntry potentials_local_data() {
    struct Case {
        std::string delta;
        cplx z0;
    };
    const std::vector<Case> cases = {{"0.3+0.2*i", 0.0},
                                     {"0.3+0.2*i+0.5*z-0.1*z^2+0.05*i*z^3", 0.0},
                                     {"-0.4+0.1*z^2+0.2*i*z^3", {0.2, -0.1}}};
    double worst = 0.0;
    for (const auto& c : cases) {
        const HoloFn delta = HoloFn::parse(c.delta);
        Potential p = from_local_data({1.0 / std::sqrt(2.0), 0.0, delta});
        p.z0 = c.z0;
        FrameEvaluator ev(p);
        const FactorOptions fo = ev.options().factor();
        auto cminus = [&](cplx w) { return birkhoff(ev.ray(w).phi, fo).Cminus; };
        const cplx got = normalized_potential_from(cminus, c.z0).B() - 1.0;
        worst = std::max(worst, std::abs(got - delta(c.z0)) / std::abs(delta(c.z0)));
    }
    return below("potentials/local_data_recovery", worst, 1e-6, "three polynomial delta of degree <= 3");
}

VerifyEntry potentials_rotation() {
    const HoloFn delta = HoloFn::parse("0.5*i+0.3*z");
    const double r = 1.0 / std::sqrt(2.0);
    FrameEvaluator ea(from_local_data({r, 0.0, delta})), eb(from_local_data({r, 0.9, delta}));
    const SingularAnalyzer a(ea), b(eb);
    double worst = 0.0;
    int mismatches = 0;
    for (cplx z : {cplx(0.0), cplx(0.2, 0.0), cplx(0.1, 0.3), cplx(0.0, -0.25)}) {
        worst = std::max(worst, std::abs(a.n3(z) - b.n3(z)));
        worst = std::max(worst, std::abs(a.B(z) - b.B(z)));
    }
    const SingularPoint pa = a.classify(0.0), pb = b.classify(0.0);
    if (pa.kind != pb.kind || pa.decided != pb.decided) ++mismatches;
    worst = std::max(worst, std::abs(pa.bhat - pb.bhat));
    return make("potentials/rotation_parameter", worst, 1e-7, worst <= 1e-7 && mismatches == 0,
                "local data r=1/sqrt2, delta=0.5i+0.3z, c in {0, 0.9}",
                std::string("label at 0: ") + kind_name(pa.kind) + "; max |dN3|, |dB|, |dBhat|");
}

// ---- framefield

VerifyEntry frame_unitarity(Cache& cache) {
    const FrameField& f = cache.ex1c().field;
    double worst = 0.0;
    for (const auto& p : f.points) {
        worst = std::max(worst, p.unitarity);
        for (int j = 0; j < 8; ++j)
            worst = std::max(worst, std::abs(p.F_at(std::polar(1.0, j * kPi / 4.0)).determinant() - 1.0));
    }
    return below("framefield/unitarity_determinant", worst, 1e-8, "example 1, 41x41 grid");
}

VerifyEntry frame_initial() {
    double worst = 0.0;
    std::vector<Potential> ps;
    for (double c : {0.0, 0.7}) {
        Potential p = fx::sing_potential("2-i");
        p.initial = initial_C0(c);
        ps.push_back(p);
    }
    ps.push_back(from_local_data({0.6, 0.3, HoloFn::parse("0.1*z")}));
    ps.push_back(equator_potential({Expr::parse("0.8"), Expr::parse("x+0.3"), {-1.2, 1.2, 97}}));
    for (const auto& p : ps) {
        FrameEvaluator ev(p);
        worst = std::max(worst, loop_diff(ev.at(p.z0).F, p.initial));
    }
    return below("framefield/initial_condition", worst, 1e-10, "C0(0), C0(0.7), local data, equator initial conditions");
}

VerifyEntry frame_flatness(Cache& cache) {
    const double a = maurer_cartan_check(cache.ex1c().field).max_flatness;
    const double b = maurer_cartan_check(cache.ex1f().field).max_flatness;
    const double ord = order_of(a, b);
    return make("framefield/flatness_order", ord, 1.8, ord >= 1.8, "example 1, 41x41 -> 81x81",
                fmt("max flatness %.3g -> %.3g", a, b));
}

// ---- surfaces

std::vector<ExtendedComplex> g_of(const SurfaceRaster& r) {
    std::vector<ExtendedComplex> g;
    for (const auto& p : r.points) g.push_back(p.s.g);
    return g;
}

// Max over interior coarse nodes (and the matching fine nodes) where the mask holds on both.
template <class F1, class F2, class M>
std::pair<double, double> paired_max(const SurfaceRaster& c, const SurfaceRaster& f, F1 value_c, F2 value_f, M mask) {
    double mc = 0.0, mf = 0.0;
    for (int k = 1; k + 1 < c.grid.ny; ++k)
        for (int j = 1; j + 1 < c.grid.nx; ++j) {
            if (!mask(c.at(j, k)) || !mask(f.at(2 * j, 2 * k))) continue;
            mc = std::max(mc, value_c(j, k));
            mf = std::max(mf, value_f(2 * j, 2 * k));
        }
    return {mc, mf};
}

VerifyEntry surf_harmonicity(Cache& cache) {
    const SurfaceRaster& c = cache.ex1c().raster;
    const SurfaceRaster& f = cache.ex1f().raster;
    const auto hc = harmonicity_residual(c.grid, g_of(c)), hf = harmonicity_residual(f.grid, g_of(f));
    const auto [a, b] = paired_max(
        c, f, [&](int j, int k) { return hc[c.grid.index(j, k)]; }, [&](int j, int k) { return hf[f.grid.index(j, k)]; },
        [](const PointGeometry&) { return true; });
    const double ord = order_of(a, b);
    return make("surfaces/harmonicity_order", ord, 1.8, ord >= 1.8, "example 1, 41x41 -> 81x81",
                fmt("max residual %.3g -> %.3g", a, b));
}

VerifyEntry surf_conformality(Cache& cache) {
    const SurfaceRaster& c = cache.ex1c().raster;
    const SurfaceRaster& f = cache.ex1f().raster;
    const PointGrid pc = nil_point_grid(c), pf = nil_point_grid(f);
    const auto [a, b] = paired_max(
        c, f, [&](int j, int k) { return stencil_geometry(pc, j, k).conformality; },
        [&](int j, int k) { return stencil_geometry(pf, j, k).conformality; },
        [](const PointGeometry& p) { return std::abs(p.s.N[2]) >= 0.5; });
    const double ord = order_of(a, b);
    return make("surfaces/conformality_order", ord, 1.8, ord >= 1.8, "example 1, 41x41 -> 81x81, |N3| >= 0.5",
                fmt("max residual %.3g -> %.3g", a, b));
}

VerifyEntry surf_relation(Cache& cache) {
    double worst = 0.0;
    for (const SurfaceRaster* r : {&cache.ex1f().raster, &cache.dsc().raster, &cache.cusp().raster})
        for (const auto& p : r->points)
            worst = std::max({worst, relation_defect(p.s), spinor_metric_defect(p.s)});
    return below("surfaces/relation_identity", worst, 1e-10, "example 1, disc, cuspidal edge rasters",
                 "relation and spinor metric identities");
}

VerifyEntry surf_nonexistence(Cache& cache) {
    int mismatches = 0;
    double worst = 0.0;
    for (Solved* s : {&cache.ex1f(), &cache.dsc(), &cache.cusp()}) {
        bool up = false, down = false;
        double scale = 0.0;
        for (const auto& p : s->raster.points) {
            up = up || p.s.N[2] > 0.0;
            down = down || p.s.N[2] < 0.0;
            scale = std::max(scale, induced_metric(p.s));
        }
        if ((up && down) == s->curves.empty()) ++mismatches;
        for (const auto& c : s->curves)
            for (const auto& v : c.points)
                worst = std::max(worst, induced_metric(s->an->geometry(v.z).s) / scale);
    }
    return make("surfaces/nonexistence_witness", worst, 1e-8, mismatches == 0 && worst <= 1e-8,
                "example 1, disc, cuspidal edge",
                "hemisphere mismatches " + std::to_string(mismatches) + "; max relative metric on the singular curve");
}

VerifyEntry surf_family(Cache& cache) {
    Solved& s = cache.ex1f();
    std::vector<SingularPoint> base;
    for (const auto& c : s.curves)
        for (size_t i = 0; i < c.points.size(); i += std::max<size_t>(1, c.points.size() / 6))
            if (c.points[i].decided && std::abs(c.points[i].z) < 1.0) base.push_back(c.points[i]);
    int compared = 0, mismatches = 0;
    for (int m = 1; m < 8; ++m) {
        const double ang = m * kPi / 4.0;
        const SingularAnalyzer an(*s.ev, &s.field, std::polar(1.0, ang));
        for (const auto& p : base) {
            const SingularPoint q = an.classify(fx::symmetric_correspondence(p.z, ang, 1));
            ++compared;
            if (q.kind != p.kind || !q.decided) ++mismatches;
        }
    }
    return make("surfaces/associated_family_labels", mismatches, 0.0, mismatches == 0 && compared > 0,
                "example 1, 81x81, 7 members", std::to_string(compared) + " comparisons");
}

// ---- singular

int disagreements(const std::vector<SingularPoint>& pts, int& compared) {
    int bad = 0;
    for (const auto& p : pts) {
        if (!p.decided || !p.raw_decision.decided || p.margin <= 1e-3 || p.raw_decision.margin <= 1e-3) continue;
        ++compared;
        if (p.kind != p.raw_decision.kind) ++bad;
    }
    return bad;
}

VerifyEntry sing_routes(Cache& cache) {
    std::vector<SingularPoint> pts;
    for (Solved* s : {&cache.ex1f(), &cache.dsc(), &cache.cusp()})
        for (const auto& c : s->curves) pts.insert(pts.end(), c.points.begin(), c.points.end());
    for (const auto& f : fx::singexample()) {
        FrameEvaluator ev(fx::sing_potential(f.B));
        pts.push_back(SingularAnalyzer(ev).classify(0.0));
    }
    int compared = 0;
    const int bad = disagreements(pts, compared);
    return make("singular/route_agreement", bad, 0.0, bad == 0 && compared > 0, "example 1, disc, singexample",
                std::to_string(compared) + " points with both margins above 1e-3");
}

VerifyEntry sing_degeneracy() {
    const double h = 1e-3;
    auto grad = [h](const SingularAnalyzer& an, cplx z) {
        auto rho = [&](cplx w) { return degeneracy_rho(an.geometry(w)); };
        const double gx = (rho(z + h) - rho(z - h)) / (2 * h);
        const double gy = (rho(z + cplx(0, h)) - rho(z - cplx(0, h))) / (2 * h);
        return std::hypot(gx, gy);
    };
    FrameEvaluator ed(fx::sing_potential("1")), er(fx::sing_potential("2-i"));
    const SingularAnalyzer ad(ed), ar(er);
    const SingularPoint p = ad.classify(0.0);
    const double gd = grad(ad, 0.0), gr = grad(ar, 0.0);
    const bool ok = p.kind == SingularKind::Degenerate && gd <= 10 * h && gr > 0.1;
    return make("singular/degeneracy_gradient", gd, 10 * h, ok, "B=1 (degenerate) against B=2-i",
                fmt("|grad rho| = %.3g at the degenerate point, %.3g at the cuspidal edge", gd, gr));
}

// sqrt(metric) has a kink zero at node i of a line when the flank extrapolations meet near zero.
bool kink_zero(const std::vector<double>& s, long i, long stride, long lo, long hi) {
    if (i - 2 * stride < lo || i + 2 * stride > hi) return false;
    const double a2 = s[i - 2 * stride], a1 = s[i - stride], v = s[i], b1 = s[i + stride], b2 = s[i + 2 * stride];
    if (v > a1 || v > b1) return false;
    const double sl = a1 - a2, sr = b2 - b1;  // left slope (per cell, going right), right slope
    if (!(sl < 0.0) || !(sr > 0.0)) return false;
    // Lines y = a1 + sl (x + 1) and y = b1 + sr (x - 1) meet at y*.
    const double x = (b1 - sr - a1 - sl) / (sl - sr);
    const double y = a1 + sl * (x + 1.0);
    return y <= 0.25 * std::min(a1, b1);
}

// Chebyshev distance (in cells) between the metric's raster zeros and the N3 sign-change nodes.
double zero_set_distance(const SurfaceRaster& r) {
    const DomainGrid& G = r.grid;
    std::vector<double> sq(G.size());
    for (size_t i = 0; i < G.size(); ++i) sq[i] = std::sqrt(induced_metric(r.points[i].s));
    std::vector<std::pair<int, int>> A, B, Binner;
    auto n3 = [&](int j, int k) { return r.at(j, k).s.N[2]; };
    for (int k = 0; k < G.ny; ++k)
        for (int j = 0; j < G.nx; ++j) {
            const long i = static_cast<long>(G.index(j, k));
            const long row0 = static_cast<long>(G.index(0, k)), nx = G.nx;
            const bool row = kink_zero(sq, i, 1, row0, row0 + nx - 1);
            const bool col = kink_zero(sq, i, nx, j, j + nx * (G.ny - 1));
            if (row || col) A.push_back({j, k});
            const bool sx = j + 1 < G.nx && (n3(j, k) >= 0) != (n3(j + 1, k) >= 0);
            const bool sy = k + 1 < G.ny && (n3(j, k) >= 0) != (n3(j, k + 1) >= 0);
            const bool px = j > 0 && (n3(j, k) >= 0) != (n3(j - 1, k) >= 0);
            const bool py = k > 0 && (n3(j, k) >= 0) != (n3(j, k - 1) >= 0);
            if (sx || sy || px || py) {
                B.push_back({j, k});
                if (j >= 3 && k >= 3 && j + 3 < G.nx && k + 3 < G.ny) Binner.push_back({j, k});
            }
        }
    auto directed = [](const auto& P, const auto& Q) {
        double worst = 0.0;
        for (const auto& p : P) {
            int best = 1 << 30;
            for (const auto& q : Q) best = std::min(best, std::max(std::abs(p.first - q.first), std::abs(p.second - q.second)));
            worst = std::max(worst, static_cast<double>(best));
        }
        return worst;
    };
    if (A.empty() != Binner.empty()) return std::numeric_limits<double>::infinity();
    if (A.empty()) return 0.0;
    return std::max(directed(A, B), directed(Binner, A));
}

VerifyEntry sing_zero_set(Cache& cache) {
    const double a = zero_set_distance(cache.ex1f().raster), b = zero_set_distance(cache.dsc().raster);
    return below("singular/metric_zero_set", std::max(a, b), 1.0, "example 1 (81x81) and disc (41x41)",
                 "cells between interior metric minima and the |g| = 1 contour");
}

VerifyEntry sing_parity(Cache& cache) {
    int bad = 0, closed = 0;
    std::string detail;
    for (const auto& c : cache.dsc().curves) {
        if (!c.closed) continue;
        ++closed;
        std::vector<double> d1;
        for (const auto& p : c.points) d1.push_back(p.diagnostics.re_bhat - 1.0);
        const int cc = count_boundary_crosscaps(c), st = count_sign_changes(d1, true, ClassifyOptions{}.zero_tol);
        if (cc % 2 || st % 2) ++bad;
        detail += "cross-caps " + std::to_string(cc) + ", swallowtails " + std::to_string(st) + "; ";
    }
    return make("singular/count_parity", bad, 0.0, bad == 0 && closed > 0, "disc eps=0.04, 41x41", detail);
}

// ---- cauchy

struct EquatorCase {
    EquatorData d;
    SingularKind kind;
};

std::vector<EquatorCase> equator_sweep(fx::Rng& rng, int ce, int st, int cc) {
    std::vector<EquatorCase> out;
    for (int i = 0; i < ce; ++i) out.push_back({fx::random_equator_data(rng, SingularKind::CuspidalEdge), SingularKind::CuspidalEdge});
    for (int i = 0; i < st; ++i) out.push_back({fx::random_equator_data(rng, SingularKind::Swallowtail), SingularKind::Swallowtail});
    for (int i = 0; i < cc; ++i)
        out.push_back({fx::random_equator_data(rng, SingularKind::CuspidalCrossCap), SingularKind::CuspidalCrossCap});
    return out;
}

VerifyEntry cauchy_types(fx::Rng& rng) {
    int mismatches = 0;
    const auto cases = equator_sweep(rng, 8, 6, 6);
    for (const auto& c : cases) {
        FrameEvaluator ev(equator_potential(c.d));
        const SingularPoint p = SingularAnalyzer(ev).classify(0.0);
        if (predict_type(c.d) != c.kind || !p.decided || p.kind != c.kind) ++mismatches;
    }
    return make("cauchy/end_to_end_type", mismatches, 0.0, mismatches == 0,
                std::to_string(cases.size()) + " random quadratic equator data",
                "predicted type against surface classification at 0");
}

VerifyEntry cauchy_bhat(fx::Rng& rng) {
    std::vector<EquatorData> ds = {{Expr::parse("1"), Expr::parse("x+pi/2"), {-1.2, 1.2, 97}},
                                   {Expr::parse("-1/sqrt(2)"), Expr::parse("x+pi/4"), {-1.2, 1.2, 97}}};
    for (const auto& c : equator_sweep(rng, 1, 1, 1)) ds.push_back(c.d);
    double worst = 0.0;
    for (const auto& d : ds) {
        FrameEvaluator ev(equator_potential(d));
        worst = std::max(worst, std::abs(bhat(d, 0.0) - bhat_birkhoff(ev, 0.0)));
    }
    return below("cauchy/bhat_birkhoff", worst, 1e-5, "two worked fixtures and three random data");
}

VerifyEntry cauchy_reconstruction(fx::Rng& rng, double& frame_defect) {
    std::vector<double> xs;
    for (int i = 0; i <= 20; ++i) xs.push_back(-1.0 + 0.1 * i);
    double worst = 0.0;
    frame_defect = 0.0;
    for (const auto& c : equator_sweep(rng, 1, 1, 1)) {
        FrameEvaluator ev(equator_potential(c.d));
        const Reconstruction r = reconstruct(ev, c.d, xs);
        worst = std::max({worst, r.max_n_error, r.max_w_error});
        frame_defect = std::max(frame_defect, r.max_frame_defect);
    }
    const CauchyData g = sample_cauchy_data();
    FrameEvaluator ev(cauchy_potential(g));
    const Reconstruction r = reconstruct(ev, g, xs);
    worst = std::max({worst, r.max_n_error, r.max_w_error});
    frame_defect = std::max(frame_defect, r.max_frame_defect);
    return below("cauchy/reconstruction", worst, 1e-6, "three random equator data and one general data set on [-1,1]");
}

// ---- cli

VerifyEntry cli_determinism() {
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / ("nilmax_verify_" + std::to_string(::getpid()));
    const RunConfig c = parse_config(R"({"schema": 1, "name": "det",
        "potential": {"family": "singular", "B": "1-i-i*z"},
        "grid": {"half": 0.3, "n": 11}, "outputs": {"ply": true, "surface": "both"}})");
    const fs::path a = root / "a", b = root / "b";
    run_build(c, a.string());
    run_build(c, b.string());
    int differing = 0, files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        const std::string name = e.path().filename().string();
        if (name == "runtime.json") continue;
        ++files;
        if (!fs::exists(b / name) || read_file(e.path().string()) != read_file((b / name).string())) ++differing;
    }
    std::error_code ec;
    fs::remove_all(root, ec);
    return make("cli/determinism", differing, 0.0, differing == 0 && files > 0, "swallowtail config, 11x11",
                std::to_string(files) + " artifacts compared byte for byte");
}

}  // namespace

bool VerifyReport::all_passed() const {
    return std::all_of(entries.begin(), entries.end(), [](const VerifyEntry& e) { return e.passed(); });
}

const std::vector<std::string>& verify_catalog() {
    static const std::vector<std::string> c(std::begin(kCatalog), std::end(kCatalog));
    return c;
}

VerifyReport run_verify_suite() {
    VerifyReport rep;
    const auto t0 = std::chrono::steady_clock::now();
    fx::Rng rng(20240611);
    Cache cache;
    double frame_defect = 0.0;

    auto run = [&](const std::string& id, const std::function<VerifyEntry()>& f) {
        const auto s = std::chrono::steady_clock::now();
        VerifyEntry e;
        try {
            e = f();
        } catch (const std::exception& ex) {
            e = make(id, std::numeric_limits<double>::quiet_NaN(), 0.0, false, "", std::string("error: ") + ex.what());
        }
        e.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - s).count();
        rep.entries.push_back(e);
    };

    run("nilgeom/associativity", [&] { return nil_associativity(rng); });
    run("nilgeom/left_translation_invariance", [&] { return nil_left_invariance(rng); });
    run("nilgeom/frame_round_trip", [&] { return nil_round_trip(rng); });
    run("looplab/twisting_closure", [&] { return loop_twisting(rng); });
    run("looplab/unit_determinant", [&] { return loop_det(); });
    run("looplab/lambda_derivation", [&] { return loop_derivation(rng); });
    run("factor/iwasawa_idempotence", [&] { return factor_idempotence(rng); });
    run("factor/gauge_equivariance", [&] { return factor_gauge(rng); });
    run("factor/birkhoff_iwasawa_compatibility", [&] { return factor_compat(); });
    run("potentials/structure_checks", [&] { return potentials_structure(); });
    run("potentials/local_data_recovery", [&] { return potentials_local_data(); });
    run("potentials/rotation_parameter", [&] { return potentials_rotation(); });
    run("framefield/unitarity_determinant", [&] { return frame_unitarity(cache); });
    run("framefield/initial_condition", [&] { return frame_initial(); });
    run("framefield/flatness_order", [&] { return frame_flatness(cache); });
    run("surfaces/harmonicity_order", [&] { return surf_harmonicity(cache); });
    run("surfaces/conformality_order", [&] { return surf_conformality(cache); });
    run("surfaces/relation_identity", [&] { return surf_relation(cache); });
    run("surfaces/nonexistence_witness", [&] { return surf_nonexistence(cache); });
    run("surfaces/associated_family_labels", [&] { return surf_family(cache); });
    run("singular/route_agreement", [&] { return sing_routes(cache); });
    run("singular/degeneracy_gradient", [&] { return sing_degeneracy(); });
    run("singular/metric_zero_set", [&] { return sing_zero_set(cache); });
    run("singular/count_parity", [&] { return sing_parity(cache); });
    run("cauchy/end_to_end_type", [&] { return cauchy_types(rng); });
    run("cauchy/bhat_birkhoff", [&] { return cauchy_bhat(rng); });
    run("cauchy/reconstruction", [&] { return cauchy_reconstruction(rng, frame_defect); });
    run("cauchy/frame_convention", [&] {
        return below("cauchy/frame_convention", frame_defect, 1e-8, "reconstruction fixtures",
                     "|N_y + Ad_F E2| along y = 0");
    });
    run("cli/determinism", [&] { return cli_determinism(); });
    run("oracles/separation", [&] {
        VerifyEntry e = make("oracles/separation", 0.0, 0.0, true, "tests/oracles",
                             "structural: oracle sources share no numerical kernels with the library and are not "
                             "linked into it; not checked at runtime");
        e.status = "structural";
        return e;
    });
    run("cli/report_completeness", [&] {
        std::map<std::string, int> seen;
        for (const auto& e : rep.entries) ++seen[e.module + "/" + e.name];
        ++seen["cli/report_completeness"];
        int bad = 0;
        for (const auto& id : verify_catalog()) bad += seen[id] != 1;
        bad += static_cast<int>(seen.size() != verify_catalog().size());
        return make("cli/report_completeness", bad, 0.0, bad == 0, "verify catalog",
                    std::to_string(verify_catalog().size()) + " invariants expected exactly once");
    });

    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

json verify_report_json(const VerifyReport& r) {
    json j;
    j["schema"] = "nilmax.verify/1";
    int passed = 0;
    json arr = json::array();
    for (const auto& e : r.entries) {
        passed += e.passed();
        arr.push_back({{"module", e.module},
                       {"name", e.name},
                       {"status", e.status},
                       {"passed", e.passed()},
                       {"measured", std::isfinite(e.measured) ? json(e.measured) : json(nullptr)},
                       {"tolerance", e.tolerance},
                       {"fixture", e.fixture},
                       {"detail", e.detail}});
    }
    j["invariants"] = arr;
    j["passed"] = passed;
    j["total"] = r.entries.size();
    j["all_passed"] = r.all_passed();
    json rt = json::array();
    for (const auto& e : r.entries) rt.push_back({{"id", e.module + "/" + e.name}, {"seconds", e.seconds}});
    j["runtime"] = {{"seconds", r.seconds}, {"threads", thread_count()}, {"per_invariant", rt}};
    return j;
}

}  // namespace nilmax
