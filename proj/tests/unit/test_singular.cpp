#include <doctest.h>

#include <numbers>
#include <random>

#include "nilmax/error.hpp"
#include "nilmax/fixtures.hpp"
#include "nilmax/pipeline.hpp"

using namespace nilmax;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

SingularPoint classify_fixture(const std::string& B) {
    const FrameEvaluator ev(fixtures::sing_potential(B));
    return SingularAnalyzer(ev).classify(0.0);
}

}  // namespace

TEST_SUITE("singular") {

TEST_CASE("the three generic fixtures") {
    for (const auto& f : fixtures::singexample()) {
        CAPTURE(f.name);
        const SingularPoint p = classify_fixture(f.B);
        CHECK(p.decided);
        CHECK(p.kind == f.expected);
        CHECK(p.raw_decision.decided);
        CHECK(p.raw_decision.kind == f.expected);
        CHECK(std::abs(p.n3) < 1e-12);
        CHECK(p.bprime_crosscheck < 1e-6);
        CHECK(point_label(p) == kind_name(f.expected));
    }
}

TEST_CASE("normalized diagnostics of the cuspidal edge fixture") {
    const SingularPoint p = classify_fixture("2-i");
    CHECK(p.diagnostics.re_bhat == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(p.diagnostics.im_bhat == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(std::abs(p.bhat_prime) < 1e-6);
}

TEST_CASE("constant B = 1 is degenerate") {
    const SingularPoint p = classify_fixture("1");
    CHECK(p.decided);
    CHECK(p.kind == SingularKind::Degenerate);
}

TEST_CASE("a marginal coefficient is too close to call") {
    const FrameEvaluator ev(fixtures::sing_potential("2-0.00001*i"));
    const SingularAnalyzer an(ev);
    const SingularPoint p = an.classify(0.0);
    CHECK_FALSE(p.decided);
    CHECK(point_label(p) == "TooCloseToCall");
    try {
        an.classify_strict(0.0);
        FAIL("expected TooCloseToCall");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TooCloseToCall);
    }
}

TEST_CASE("tangent elevation distinguishes the types") {
    for (const auto& f : fixtures::singexample()) {
        CAPTURE(f.name);
        const FrameEvaluator ev(fixtures::sing_potential(f.B));
        const SingularAnalyzer an(ev);
        const double a = tangent_elevation(an.equatorial_tangent(0.0));
        if (f.expected == SingularKind::CuspidalCrossCap) CHECK(a < 2 * kDeg);
        else if (f.expected == SingularKind::Swallowtail) CHECK(std::abs(a - std::numbers::pi / 2) < 2 * kDeg);
        else {
            CHECK(a > 5 * kDeg);
            CHECK(std::abs(a - std::numbers::pi / 2) > 5 * kDeg);
        }
    }
    CHECK(tangent_elevation({1, 0, 0}) == 0.0);
    CHECK(tangent_elevation({0, 0, -2}) == doctest::Approx(std::numbers::pi / 2));
}

TEST_CASE("sign change counting") {
    CHECK(count_sign_changes({1, -1, 1, -1}, false) == 3);
    CHECK(count_sign_changes({1, -1, 1, -1}, true) == 4);
    CHECK(count_sign_changes({1, 0, -1}, false) == 1);
    CHECK(count_sign_changes({1, 1e-9, -1e-9, 1}, true, 1e-6) == 0);
    CHECK(count_sign_changes({}, true) == 0);
}

TEST_CASE("both decision routes share their thresholds") {
    const ClassifyOptions opt;
    fixtures::Rng rng(51);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> pick(0, 2);
    const auto draw = [&] {
        const int k = pick(rng);
        return k == 0 ? 0.0 : (k == 1 ? 1e-5 * u(rng) : u(rng));
    };
    for (int i = 0; i < 200; ++i) {
        const double a = draw(), b = draw(), c = draw();
        const Decision n = decide_normalized({1.0 + a, b, c, c}, opt);
        const Decision r = decide_raw({b, a, c, c}, opt);
        CHECK(n.decided == r.decided);
        CHECK(n.kind == r.kind);
    }
    CHECK(decide_normalized({1.0, 0.0, 0.0, 0.0}, opt).kind == SingularKind::Degenerate);
    const Decision ce = decide_normalized({2.0, -1.0, 0.0, 0.0}, opt);
    CHECK(ce.decided);
    CHECK(ce.kind == SingularKind::CuspidalEdge);
    CHECK(ce.margin == doctest::Approx(1.0));
    CHECK_FALSE(decide_normalized({2.0, 5e-6, 0.0, 0.0}, opt).decided);
}

TEST_CASE("special point refinement") {
    const FrameEvaluator ev(fixtures::sing_potential("2-i*z"));
    const SingularAnalyzer an(ev);
    const auto z = an.refine_special({0.01, 0.01}, true);
    REQUIRE(z.has_value());
    CHECK(std::abs(*z) < 1e-8);
    CHECK(std::abs(an.n3(*z)) < 1e-10);
}

TEST_CASE("sphere potential has one closed singular curve") {
    const FrameEvaluator ev(fixtures::disc_potential());
    const FrameField f = frame(ev, DomainGrid::square(0.0, 1.2, 41));
    const SingularAnalyzer an(ev, &f);
    const auto curves = an.trace(surface_raster(f));
    REQUIRE(curves.size() == 1);
    CHECK(curves[0].closed);
    const SingularCurve c = with_special_points(an, curves[0]);
    const int n = count_boundary_crosscaps(c);
    CHECK(n % 2 == 0);
    CHECK(n == 4);
    for (const auto& p : c.points) CHECK(std::abs(p.n3) < 1e-8);
}

TEST_CASE("a disc around a pole has no singular set") {
    const FrameEvaluator ev(from_local_data({0.0, 0.0, HoloFn::parse("1-i")}));
    const FrameField f = frame(ev, DomainGrid::square(0.0, 0.1, 11));
    CHECK(SingularAnalyzer(ev, &f).trace(surface_raster(f)).empty());
}

TEST_CASE("singular set of the symmetric potential has order-3 symmetry") {
    const FrameEvaluator ev(fixtures::example1());
    const FrameField f = frame(ev, DomainGrid::square(0.0, 1.2, 41));
    const SingularAnalyzer an(ev, &f);
    const auto curves = an.trace(surface_raster(f));
    REQUIRE_FALSE(curves.empty());
    const cplx w = std::polar(1.0, 2.0 * std::numbers::pi / 3.0);
    int checked = 0;
    for (const auto& c : curves)
        for (size_t i = 0; i < c.points.size(); i += 7) {
            const SingularPoint& p = c.points[i];
            if (std::abs(p.z) > 0.9) continue;
            const SingularPoint q = an.classify(w * p.z);
            CHECK(std::abs(q.n3) < 1e-8);
            if (p.decided && q.decided) CHECK(q.kind == p.kind);
            ++checked;
        }
    CHECK(checked > 3);
}

TEST_CASE("regular points are labelled as such") {
    const FrameEvaluator ev(fixtures::example1());
    const SingularPoint p = SingularAnalyzer(ev).classify(0.0);
    CHECK_FALSE(on_singular_set(p));
    CHECK(point_label(p) == "Regular");
}

}  // TEST_SUITE
