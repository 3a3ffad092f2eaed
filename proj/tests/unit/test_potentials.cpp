#include <doctest.h>

#include <numbers>

#include "nilmax/error.hpp"
#include "nilmax/fixtures.hpp"
#include "nilmax/singular.hpp"

using namespace nilmax;

namespace {

const cplx I1(0.0, 1.0);

bool close(cplx a, cplx b, double tol = 1e-14) { return std::abs(a - b) <= tol; }

SurfaceSample sample_at(const FrameEvaluator& ev, cplx z) { return point_geometry(ev.at(z)).s; }

}  // namespace

TEST_SUITE("potentials") {

TEST_CASE("revolution coefficients") {
    const Potential p = revolution_potential(1.2);
    const cplx z(0.3, -0.2);
    CHECK(close(p.coeff(-1, z)(0, 1), -1.2));
    CHECK(close(p.coeff(1, z)(0, 1), 0.2));
    CHECK(close(p.coeff(-1, z)(1, 0), -0.2));
    CHECK(close(p.coeff(1, z)(1, 0), 1.2));
    const Potential q = revolution_potential(1.0);
    CHECK(close(q.coeff(-1, z)(0, 1), -1.0));
    CHECK(close(q.coeff(-1, z)(1, 0), 0.0));
    CHECK(close(q.coeff(1, z)(0, 1), 0.0));
    CHECK(close(q.coeff(1, z)(1, 0), 1.0));
}

TEST_CASE("revolution surface has a one-parameter family of rigid motions") {
    const FrameEvaluator ev(revolution_potential(1.2));
    const cplx a(0.1, 0.1), b(-0.2, 0.3);
    const SurfaceSample sa = sample_at(ev, a), sb = sample_at(ev, b);
    for (double t : {0.15, 0.3}) {
        const SurfaceSample ta = sample_at(ev, a + t), tb = sample_at(ev, b + t);
        CHECK((ta.f_cmc - tb.f_cmc).norm() == doctest::Approx((sa.f_cmc - sb.f_cmc).norm()).epsilon(1e-9));
        CHECK(ta.N.dot(tb.N) == doctest::Approx(sa.N.dot(sb.N)).epsilon(1e-9));
    }
}

TEST_CASE("symmetric and normalized potentials") {
    const Potential p = symmetric_potential(2);
    const cplx z(0.4, 0.3);
    CHECK(close(p.coeff(-1, z)(0, 1), 1.0));
    CHECK(close(p.coeff(-1, z)(1, 0), z * z));
    CHECK_THROWS_AS(symmetric_potential(0), Error);

    const Potential s = normalized_potential(HoloFn::constant(1.0), HoloFn::constant(0.0));
    CHECK(close(s.coeff(-1, z)(0, 1), 1.0));
    CHECK(close(s.coeff(-1, z)(1, 0), 0.0));
    CHECK(close(s.B(z), 0.0));
    try {
        normalized_potential(HoloFn::parse("z"), HoloFn::constant(1.0));
        FAIL("expected RegularityViolation");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::RegularityViolation);
    }
}

TEST_CASE("rotational symmetry of order k+2") {
    struct Case {
        Potential p;
        int order;
    };
    const Case cases[] = {{symmetric_potential(1), 3},
                          {symmetric_potential(2), 4},
                          {normalized_potential(HoloFn::parse("1+z^3"), HoloFn::parse("z")), 3}};
    for (const auto& c : cases) {
        const FrameEvaluator ev(c.p);
        const cplx w = std::polar(1.0, 2.0 * std::numbers::pi / c.order);
        for (cplx z : {cplx(0.3, 0.1), cplx(-0.2, 0.35)}) {
            const SurfaceSample a = sample_at(ev, z), b = sample_at(ev, w * z);
            CHECK(b.N[2] == doctest::Approx(a.N[2]).epsilon(1e-10));
            CHECK(b.f_cmc[2] == doctest::Approx(a.f_cmc[2]).epsilon(1e-10));
            CHECK(b.f_cmc.head<2>().norm() == doctest::Approx(a.f_cmc.head<2>().norm()).epsilon(1e-10));
            CHECK(b.f_nil.x3 == doctest::Approx(a.f_nil.x3).epsilon(1e-9));
        }
    }
}

TEST_CASE("singular potentials carry B") {
    const Potential p = singular_potential(HoloFn::parse("1-i-i*z"));
    const cplx z(0.2, 0.1);
    CHECK(close(p.B(z), cplx(1.0, -1.0) - I1 * z));
    CHECK(close(p.B_derivative(z), -I1));
    CHECK(close(singular_potential(HoloFn::constant(1.0)).B(z), 1.0));
    CHECK(p.structure_defect({0.0, z}) == 0.0);
    CHECK(p.initial.parity_defect() == 0.0);
    CHECK_THROWS_AS(singular_potential(HoloFn::constant(1.0), 0.0, {{0, [](cplx) { return Mat2::Zero().eval(); }}}),
                    Error);
}

TEST_CASE("local data") {
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(close(from_local_data({r, 0.0, HoloFn::parse("1-i")}).B(0.0), cplx(2.0, -1.0)));
    const Potential st = from_local_data({r, 0.0, HoloFn::parse("-i-i*z")});
    for (cplx z : {cplx(0.0), cplx(0.3, -0.2)}) CHECK(close(st.B(z), cplx(1.0, -1.0) - I1 * z));

    const FrameEvaluator pole(from_local_data({0.0, 0.0, HoloFn::parse("1-i")}));
    CHECK(std::abs(sample_at(pole, 0.0).N[2]) == doctest::Approx(1.0));
    const FrameEvaluator eq(from_local_data({r, 0.0, HoloFn::parse("1-i")}));
    CHECK(std::abs(sample_at(eq, 0.0).N[2]) < 1e-12);
    CHECK_THROWS_AS(initial_local(1.5, 0.0), Error);
}

TEST_CASE("local data rotation parameter leaves N3 and B unchanged") {
    const HoloFn delta = HoloFn::parse("0.5*i+0.3*z");
    const double r = 1.0 / std::sqrt(2.0);
    const FrameEvaluator a(from_local_data({r, 0.0, delta})), b(from_local_data({r, 0.9, delta}));
    for (cplx z : {cplx(0.2, 0.0), cplx(0.1, 0.3)}) {
        CHECK(sample_at(a, z).N[2] == doctest::Approx(sample_at(b, z).N[2]).epsilon(1e-9));
        CHECK(std::abs(sample_at(a, z).B - sample_at(b, z).B) < 1e-8);
    }
}

TEST_CASE("deformed sphere") {
    const cplx z(0.1, 0.5);
    const Potential s = deformed_sphere_potential(HoloFn::constant(0.0));
    CHECK(close(s.coeff(-1, z)(0, 1), 1.0));
    CHECK(close(s.coeff(-1, z)(1, 0), 0.0));
    CHECK(close(fixtures::disc_potential().coeff(-1, z)(1, 0), -0.04));
}

TEST_CASE("initial conditions are twisted and unitary") {
    for (const TwistedLoop& ic : {initial_C0(0.0), initial_C0(0.7), initial_local(0.3, -1.2)}) {
        CHECK(ic.parity_defect() == 0.0);
        for (double t : {0.0, 1.0, 2.5}) {
            const Mat2 u = loop_eval(ic, std::polar(1.0, t));
            CHECK((u.adjoint() * u - Mat2::Identity()).norm() < 1e-14);
            CHECK(std::abs(u.determinant() - 1.0) < 1e-14);
        }
    }
}

}  // TEST_SUITE
