#pragma once

#include <array>
#include <functional>
#include <numbers>
#include <vector>

#include "nilmax/framefield.hpp"
#include "nilmax/singular.hpp"

namespace nilmax {

struct Interval {
    double lo = -std::numbers::pi;
    double hi = std::numbers::pi;
    int samples = 257;

    std::vector<double> points() const;
};

// Analytic curve N0 and unit transverse derivative W, both closed forms in x.
struct CauchyData {
    std::array<Expr, 3> N0;
    std::array<Expr, 3> W;
    Interval interval;

    Vec3 n0(double x) const;
    Vec3 w(double x) const;
    // Throws InvalidArgument unless |N0| = |W| = 1 and <N0, W> = 0 to 1e-12 at the samples.
    void validate() const;
};

// Speed v = theta' and transverse angle phi of data along the horizontal equator.
struct EquatorData {
    Expr v;
    Expr phi;
    Interval interval;

    // Throws InvalidArgument if v vanishes, RegularityViolation if (v, phi) = +-(1, -pi/2).
    void validate() const;
};

struct Kappas {
    std::function<cplx(cplx)> k1, k2, k3;
};

Kappas kappas_from_data(const CauchyData& d);
Kappas kappas_equator(const EquatorData& d);

// Degree {-1, 0, 1} potential built from the three kappas.
Potential circle_potential(const Kappas& k, const TwistedLoop& initial, const std::string& family);

Potential cauchy_potential(const CauchyData& d);
Potential equator_potential(const EquatorData& d);

// Element of SU(2) whose adjoint action maps (E1, E2, E3) to the columns of R.
Mat2 su2_lift(const Eigen::Matrix3d& R);

// (iv - e^{i phi}) / (iv - e^{-i phi}) at z.
cplx bhat(const EquatorData& d, cplx z);
// Kind at x = 0 from the closed-form clauses; throws Unclassified outside them.
SingularKind predict_type(const EquatorData& d, double tol = 1e-9);

struct Reconstruction {
    double max_n_error = 0.0;      // |N(x,0) - N0(x)|
    double max_w_error = 0.0;      // |N_y(x,0) - W(x)|
    double max_frame_defect = 0.0; // |N_y + Ad_F E2| along y = 0
};
Reconstruction reconstruct(const FrameEvaluator& ev, const CauchyData& d, const std::vector<double>& xs);

// theta(x) = integral of v over [0, x] by composite Gauss-Legendre quadrature.
double equator_theta(const EquatorData& d, double x);
// N0 = (cos theta, sin theta, 0) and W = -cos(phi) V + sin(phi) e3 with V the unit tangent.
Vec3 equator_n0(const EquatorData& d, double x);
Vec3 equator_w(const EquatorData& d, double x);
Reconstruction reconstruct(const FrameEvaluator& ev, const EquatorData& d, const std::vector<double>& xs);

// Bhat at z from the Birkhoff-extracted normalized potential and g*omega of the frame.
cplx bhat_birkhoff(const FrameEvaluator& ev, cplx z, double h = 1e-3);

}  // namespace nilmax
