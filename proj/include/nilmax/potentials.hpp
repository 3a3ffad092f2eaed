#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nilmax/expr.hpp"
#include "nilmax/loop.hpp"

namespace nilmax {

struct PotentialTerm {
    int n = -1;                            // power of lambda, n >= -1
    std::function<Mat2(cplx)> coeff;       // holomorphic, trace free
};

struct Potential {
    std::string family;
    std::vector<PotentialTerm> terms;
    cplx z0{0.0, 0.0};
    TwistedLoop initial = TwistedLoop::identity(1);
    bool require_regular = true;
    // Closed forms of (xi_{-1})_{12} and (xi_{-1})_{21} when the family provides them.
    std::optional<HoloFn> a, b;

    int min_power() const;
    int max_power() const;
    // Coefficient of lambda^n at z (zero if absent).
    Mat2 coeff(int n, cplx z) const;
    Mat2 eval(cplx z, cplx lambda) const;
    // Abresch-Rosenberg coefficient B = -(xi_{-1})_{12} (xi_{-1})_{21}.
    cplx B(cplx z) const;
    cplx B_derivative(cplx z) const;

    // Largest violation of sigma parity or trace-freeness at the given points.
    double structure_defect(const std::vector<cplx>& zs) const;
    // Throws RegularityViolation if (xi_{-1})_{12} vanishes at any point.
    void check_regular(const std::vector<cplx>& zs, double tol = 1e-12) const;
};

struct LocalData {
    double r = 1.0 / std::sqrt(2.0);
    double c = 0.0;
    HoloFn delta = HoloFn::constant(0.0);
};

// (0, a; b, 0) lambda^{-1}
Potential normalized_potential(const HoloFn& a, const HoloFn& b, bool require_regular = true);
Potential revolution_potential(double a);
Potential symmetric_potential(int k);
Potential singular_potential(const HoloFn& B, double c = 0.0, std::vector<PotentialTerm> higher_terms = {});
Potential from_local_data(const LocalData& d);
Potential deformed_sphere_potential(const HoloFn& eps);

// Twisted unitary initial conditions.
TwistedLoop initial_C0(double c);
TwistedLoop initial_local(double r, double c);
// Twisted lift of the SU(2) element u = (a, b; -conj b, conj a).
TwistedLoop twisted_lift(const Mat2& u);

Potential with_initial(Potential p, const TwistedLoop& ic);

}  // namespace nilmax
