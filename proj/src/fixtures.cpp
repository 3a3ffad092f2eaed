#include "nilmax/fixtures.hpp"

#include <cmath>
#include <cstdio>

#include "nilmax/error.hpp"

namespace nilmax::fixtures {

namespace {

std::string lit(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "(%.17g)", x);
    return buf;
}

std::string quadratic(double c0, double c1, double c2) {
    return lit(c0) + "+" + lit(c1) + "*x+" + lit(c2) + "*x^2";
}

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

double signed_uniform(Rng& rng, double lo, double hi) {
    const double v = uniform(rng, lo, hi);
    return std::bernoulli_distribution(0.5)(rng) ? v : -v;
}

cplx random_cplx(Rng& rng, double r) { return {uniform(rng, -r, r), uniform(rng, -r, r)}; }

}  // namespace

const std::vector<SingFixture>& singexample() {
    static const std::vector<SingFixture> f = {
        {"cuspidal_edge", "2-i", SingularKind::CuspidalEdge},
        {"swallowtail", "1-i-i*z", SingularKind::Swallowtail},
        {"cuspidal_cross_cap", "2-i*z", SingularKind::CuspidalCrossCap},
    };
    return f;
}

Potential sing_potential(const std::string& B) { return singular_potential(HoloFn::parse(B), 0.0); }

Potential disc_potential(double eps) { return deformed_sphere_potential(HoloFn::constant(eps)); }

Potential example1() { return symmetric_potential(1); }

TwistedLoop random_sl2_loop(Rng& rng, int max_degree) {
    TwistedLoop acc = TwistedLoop::identity(max_degree);
    const cplx d = std::exp(random_cplx(rng, 0.3));
    Mat2 diag;
    diag << d, 0.0, 0.0, 1.0 / d;
    acc = loop_mul(acc, TwistedLoop::constant(diag, max_degree), max_degree);
    int budget = std::max(1, max_degree);
    bool upper = std::bernoulli_distribution(0.5)(rng);
    while (budget > 0) {
        int n = 1;
        if (budget >= 3 && std::bernoulli_distribution(0.3)(rng)) n = 3;
        budget -= n;
        if (std::bernoulli_distribution(0.5)(rng)) n = -n;
        TwistedLoop e = TwistedLoop::identity(max_degree);
        Mat2& c = e.at(n);
        if (upper)
            c(0, 1) = random_cplx(rng, 0.8);
        else
            c(1, 0) = random_cplx(rng, 0.8);
        upper = !upper;
        acc = loop_mul(acc, e, max_degree);
    }
    return acc;
}

TwistedLoop random_plus_loop(Rng& rng, int max_degree) {
    const int d = std::max(2, max_degree);
    const double p = std::exp(uniform(rng, -0.4, 0.4));
    TwistedLoop a = TwistedLoop::identity(d), b = TwistedLoop::identity(d);
    a.at(0) << p, 0.0, 0.0, 1.0 / p;
    a.at(1)(0, 1) = random_cplx(rng, 0.6);
    b.at(1)(1, 0) = random_cplx(rng, 0.6);
    return loop_mul(a, b, d);
}

EquatorData random_equator_data(Rng& rng, SingularKind kind, double margin) {
    const double pi = std::acos(-1.0);
    const double m = std::max(margin, 0.3);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        double v0 = 0.0, phi0 = 0.0;
        if (kind == SingularKind::CuspidalEdge) {
            phi0 = uniform(rng, -pi, pi);
            v0 = signed_uniform(rng, 0.3, 1.5);
            if (std::abs(std::sin(phi0)) < m || std::abs(std::cos(phi0)) < m || std::abs(v0 + std::sin(phi0)) < m)
                continue;
        } else if (kind == SingularKind::Swallowtail) {
            phi0 = uniform(rng, -pi, pi);
            if (std::abs(std::sin(phi0)) < m || std::abs(std::cos(phi0)) < m) continue;
            v0 = -std::sin(phi0);
        } else if (kind == SingularKind::CuspidalCrossCap) {
            phi0 = std::bernoulli_distribution(0.5)(rng) ? pi / 2 : -pi / 2;
            v0 = signed_uniform(rng, 0.3, 1.5);
            if (std::abs(v0 + std::sin(phi0)) < m) continue;
        } else {
            throw Error(ErrorCode::InvalidArgument, "random_equator_data supports the three generic kinds");
        }
        const double v1 = uniform(rng, -0.2, 0.2) * std::abs(v0), v2 = uniform(rng, -0.2, 0.2) * std::abs(v0);
        const double phi1 = signed_uniform(rng, 0.3, 1.0), phi2 = uniform(rng, -0.3, 0.3);
        EquatorData d{Expr::parse(quadratic(v0, v1, v2)), Expr::parse(quadratic(phi0, phi1, phi2)), {-1.2, 1.2, 97}};
        try {
            d.validate();
        } catch (const Error&) {
            continue;
        }
        return d;
    }
    throw Error(ErrorCode::InvalidArgument, "no admissible equator data found");
}

cplx symmetric_correspondence(cplx z, double lambda_angle, int k) {
    return std::polar(1.0, 2.0 * lambda_angle / (k + 2)) * z;
}

}  // namespace nilmax::fixtures
