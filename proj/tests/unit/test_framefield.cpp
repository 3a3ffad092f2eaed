#include <doctest.h>

#include "nilmax/error.hpp"
#include "nilmax/fixtures.hpp"
#include "nilmax/framefield.hpp"
#include "nilmax/surfaces.hpp"

using namespace nilmax;

namespace {

Potential zero_potential() {
    Potential p = normalized_potential(HoloFn::constant(0.0), HoloFn::constant(0.0), false);
    p.initial = initial_C0(0.3);
    return p;
}

double max_diff(const UnitCircleSampling& a, const std::vector<Mat2>& b) {
    double w = 0.0;
    for (size_t j = 0; j < b.size(); ++j) w = std::max(w, (a.values[j] - b[j]).norm());
    return w;
}

}  // namespace

TEST_SUITE("framefield") {

TEST_CASE("zero potential keeps the initial condition") {
    const FrameEvaluator ev(zero_potential());
    const UnitCircleSampling ic = ev.initial_samples();
    const PhiRaster r = integrate(ev, DomainGrid::square(0.0, 0.5, 5));
    for (const auto& phi : r.phi) CHECK(max_diff(phi, ic.values) < 1e-15);
    const FrameField f = frame(ev, DomainGrid::square(0.0, 0.5, 5));
    const MaurerCartanReport mc = maurer_cartan_check(f);
    CHECK(mc.max_flatness < 1e-12);
    CHECK(mc.max_structural < 1e-12);
}

TEST_CASE("nilpotent constant potential integrates exactly") {
    const FrameEvaluator ev(normalized_potential(HoloFn::constant(1.0), HoloFn::constant(0.0)));
    for (cplx z : {cplx(0.7, -0.3), cplx(-1.0, 1.0)}) {
        const UnitCircleSampling phi = ev.ray(z).phi;
        std::vector<Mat2> exact;
        for (int j = 0; j < phi.m; ++j) {
            Mat2 m = Mat2::Identity();
            m(0, 1) = z / phi.lambda(j);
            exact.push_back(m);
        }
        CHECK(max_diff(phi, exact) < 1e-13);
    }
}

TEST_CASE("unitary initial condition gives a trivial decomposition at the basepoint") {
    const Potential p = fixtures::sing_potential("2-i");
    const FrameEvaluator ev(p);
    const FramePoint fp = ev.at(p.z0);
    CHECK(loop_add(fp.F, loop_scale(p.initial.truncated(fp.F.degree), -1.0)).max_abs() < 1e-10);
    const FrameField f = frame(ev, DomainGrid::square(0.0, 0.2, 5));
    CHECK(f.at(2, 2).factor_residual < 1e-10);
}

TEST_CASE("frames are unitary with unit determinant") {
    const FrameEvaluator ev(fixtures::example1());
    const FrameField f = frame(ev, DomainGrid::square(0.0, 0.6, 9));
    for (const auto& fp : f.points)
        for (double t : {0.0, 1.3, 3.0}) {
            const Mat2 F = fp.F_at(std::polar(1.0, t));
            CHECK((F.adjoint() * F - Mat2::Identity()).norm() < 1e-8);
            CHECK(std::abs(F.determinant() - 1.0) < 1e-8);
        }
    for (double e : f.integration_residual()) CHECK(e < 1e-6);
}

TEST_CASE("sphere potential gives a harmonic Gauss map") {
    const FrameEvaluator ev(deformed_sphere_potential(HoloFn::constant(0.0)));
    const SurfaceRaster r = surface_raster(frame(ev, DomainGrid::square(0.0, 0.2, 21)));
    std::vector<ExtendedComplex> g;
    for (const auto& p : r.points) g.push_back(p.s.g);
    double worst = 0.0;
    for (double x : harmonicity_residual(r.grid, g))
        if (std::isfinite(x)) worst = std::max(worst, x);
    CHECK(worst < 1e-6);
    for (const auto& p : r.points) CHECK(p.s.N.norm() == doctest::Approx(1.0));
}

TEST_CASE("corrupted frame is detected") {
    const FrameEvaluator ev(fixtures::example1());
    FrameField f = frame(ev, DomainGrid::square(0.0, 0.05, 11));
    const double clean = maurer_cartan_check(f).max_flatness;
    f.points[f.grid.index(5, 5)].F.at(1)(1, 0) += 1e-3;
    const MaurerCartanReport bad = maurer_cartan_check(f);
    CHECK(bad.max_flatness > 1e-4);
    CHECK(bad.max_flatness > 10.0 * clean);
}

TEST_CASE("flatness residual decays at second order") {
    const FrameEvaluator ev(fixtures::example1());
    const double a = maurer_cartan_check(frame(ev, DomainGrid::square(0.0, 0.5, 41))).max_flatness;
    const double b = maurer_cartan_check(frame(ev, DomainGrid::square(0.0, 0.5, 81))).max_flatness;
    CHECK(std::log2(a / b) > 1.8);
}

TEST_CASE("blow-up is reported") {
    const FrameEvaluator ev(singular_potential(HoloFn::constant(400.0)));
    try {
        ev.ray(1.0);
        FAIL("expected StepUnstable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::StepUnstable);
    }
}

TEST_CASE("grid validation") {
    const FrameEvaluator ev(fixtures::example1());
    CHECK_THROWS_AS(integrate(ev, DomainGrid::square(2.0, 0.5, 5)), Error);
    CHECK_THROWS_AS(integrate(ev, DomainGrid::square(0.0, 0.5, 1)), Error);
}

TEST_CASE("thread count default") {
    CHECK(thread_count() >= 1);
    std::vector<int> hit(100, 0);
    parallel_for(hit.size(), [&](size_t i) { hit[i] += 1; });
    for (int h : hit) CHECK(h == 1);
}

}  // TEST_SUITE
