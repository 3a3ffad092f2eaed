#include "nilmax/potentials.hpp"

#include <algorithm>
#include <cmath>

#include "nilmax/error.hpp"

namespace nilmax {

namespace {

const cplx I1(0.0, 1.0);

Mat2 offdiag(cplx u, cplx l) {
    Mat2 m;
    m << 0.0, u, l, 0.0;
    return m;
}

}  // namespace

int Potential::min_power() const {
    int n = 0;
    for (const auto& t : terms) n = std::min(n, t.n);
    return n;
}

int Potential::max_power() const {
    int n = 0;
    for (const auto& t : terms) n = std::max(n, t.n);
    return n;
}

Mat2 Potential::coeff(int n, cplx z) const {
    Mat2 out = Mat2::Zero();
    for (const auto& t : terms)
        if (t.n == n) out += t.coeff(z);
    return out;
}

Mat2 Potential::eval(cplx z, cplx lambda) const {
    Mat2 out = Mat2::Zero();
    for (const auto& t : terms) out += t.coeff(z) * std::pow(lambda, t.n);
    return out;
}

cplx Potential::B(cplx z) const {
    if (a && b) return -(*a)(z) * (*b)(z);
    const Mat2 m = coeff(-1, z);
    return -m(0, 1) * m(1, 0);
}

cplx Potential::B_derivative(cplx z) const {
    if (a && b) {
        const Dual x = a->fn(z), y = b->fn(z);
        return -(x.d * y.v + x.v * y.d);
    }
    const double h = 1e-3;
    return (-B(z + 2 * h) + 8.0 * B(z + h) - 8.0 * B(z - h) + B(z - 2 * h)) / (12 * h);
}

double Potential::structure_defect(const std::vector<cplx>& zs) const {
    double worst = 0.0;
    for (cplx z : zs) {
        for (const auto& t : terms) {
            const Mat2 m = t.coeff(z);
            worst = std::max(worst, std::abs(m.trace()));
            if (t.n % 2 == 0) worst = std::max({worst, std::abs(m(0, 1)), std::abs(m(1, 0))});
            else worst = std::max({worst, std::abs(m(0, 0)), std::abs(m(1, 1))});
        }
    }
    return worst;
}

void Potential::check_regular(const std::vector<cplx>& zs, double tol) const {
    for (cplx z : zs) {
        const cplx a12 = coeff(-1, z)(0, 1);
        if (!(std::abs(a12) > tol))
            throw Error(ErrorCode::RegularityViolation,
                        "(xi_{-1})_{12} vanishes at z = " + std::to_string(z.real()) + " + " + std::to_string(z.imag()) + "i");
    }
}

TwistedLoop twisted_lift(const Mat2& u) {
    TwistedLoop out(1);
    out.at(0) << u(0, 0), 0.0, 0.0, u(1, 1);
    out.at(1) << 0.0, u(0, 1), 0.0, 0.0;
    out.at(-1) << 0.0, 0.0, u(1, 0), 0.0;
    return out;
}

TwistedLoop initial_C0(double c) { return initial_local(1.0 / std::sqrt(2.0), c); }

TwistedLoop initial_local(double r, double c) {
    if (!(r >= 0.0 && r <= 1.0)) throw Error(ErrorCode::InvalidArgument, "local data r must lie in [0,1]");
    const double s = std::sqrt(std::max(0.0, 1.0 - r * r));
    const cplx e = std::polar(1.0, c);
    Mat2 u;
    u << r * e, I1 * s * e, I1 * s * std::conj(e), r * std::conj(e);
    return twisted_lift(u);
}

Potential normalized_potential(const HoloFn& a, const HoloFn& b, bool require_regular) {
    Potential p;
    p.family = "normalized";
    p.a = a;
    p.b = b;
    p.terms.push_back({-1, [a, b](cplx z) { return offdiag(a(z), b(z)); }});
    p.require_regular = require_regular;
    if (require_regular) p.check_regular({p.z0});
    return p;
}

Potential revolution_potential(double a) {
    Potential p;
    p.family = "revolution";
    p.terms.push_back({-1, [a](cplx) { return offdiag(-a, 1.0 - a); }});
    p.terms.push_back({1, [a](cplx) { return offdiag(a - 1.0, a); }});
    p.a = HoloFn::constant(-a);
    p.b = HoloFn::constant(1.0 - a);
    p.require_regular = a != 0.0;
    return p;
}

Potential symmetric_potential(int k) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "symmetric potential needs k >= 1");
    std::vector<cplx> poly(static_cast<size_t>(k + 1), 0.0);
    poly.back() = 1.0;
    Potential p = normalized_potential(HoloFn::constant(1.0), HoloFn::polynomial(poly));
    p.family = "symmetric";
    return p;
}

Potential singular_potential(const HoloFn& B, double c, std::vector<PotentialTerm> higher_terms) {
    Potential p = normalized_potential(HoloFn::constant(1.0), cplx(-1.0) * B);
    p.family = "singular";
    for (auto& t : higher_terms) {
        if (t.n < 1) throw Error(ErrorCode::InvalidArgument, "higher terms must have n >= 1");
        p.terms.push_back(std::move(t));
    }
    p.initial = initial_C0(c);
    return p;
}

Potential from_local_data(const LocalData& d) {
    Potential p = normalized_potential(HoloFn::constant(1.0), cplx(-1.0) * (HoloFn::constant(1.0) + d.delta));
    p.family = "local_data";
    p.initial = initial_local(d.r, d.c);
    return p;
}

Potential deformed_sphere_potential(const HoloFn& eps) {
    Potential p = normalized_potential(HoloFn::constant(1.0), cplx(-1.0) * eps);
    p.family = "deformed_sphere";
    return p;
}

Potential with_initial(Potential p, const TwistedLoop& ic) {
    p.initial = ic;
    return p;
}

}  // namespace nilmax
