#pragma once

#include <vector>

#include "nilmax/factor.hpp"
#include "nilmax/potentials.hpp"

namespace nilmax {

struct NumericOptions {
    int degree = 16;
    int samples = 64;
    double iwasawa_tol = 1e-8;
    double step = 1.0 / 64.0;       // maximal RK4 step on the complex parameter
    double integration_tol = 1e-6;  // Richardson estimate bound before StepUnstable
    bool polish = true;

    FactorOptions factor() const { return {degree, samples, iwasawa_tol, polish}; }
};

struct DomainGrid {
    cplx center{0.0, 0.0};
    double half_x = 1.2, half_y = 1.2;
    int nx = 101, ny = 101;

    static DomainGrid square(cplx center, double half, int n) { return {center, half, half, n, n}; }

    double hx() const { return 2.0 * half_x / (nx - 1); }
    double hy() const { return 2.0 * half_y / (ny - 1); }
    cplx z(int j, int k) const { return center + cplx(-half_x + j * hx(), -half_y + k * hy()); }
    size_t index(int j, int k) const { return static_cast<size_t>(k) * static_cast<size_t>(nx) + static_cast<size_t>(j); }
    size_t size() const { return static_cast<size_t>(nx) * static_cast<size_t>(ny); }
    bool contains(cplx w) const;
    void validate() const;
};

// Extended frame at one parameter point with its Maurer-Cartan data
// F^{-1}F_z = U(lambda) = lambda^{-1} Um1 + U0, F^{-1}F_zbar = V(lambda) = -U(lambda)^*.
struct FramePoint {
    cplx z{0.0, 0.0};
    TwistedLoop F;
    Mat2 P0 = Mat2::Identity();
    Mat2 Um1 = Mat2::Zero();
    Mat2 U0 = Mat2::Zero();
    double integration_error = 0.0;
    double factor_residual = 0.0;
    double unitarity = 0.0;

    Mat2 F_at(cplx lambda) const { return loop_eval(F, lambda); }
    Mat2 U_at(cplx lambda) const { return Um1 / lambda + U0; }
    Mat2 V_at(cplx lambda) const { return -(U_at(lambda)).adjoint(); }
};

struct Integrated {
    UnitCircleSampling phi;
    double error = 0.0;
};

class FrameEvaluator {
public:
    FrameEvaluator(Potential potential, NumericOptions options = {});

    const Potential& potential() const { return potential_; }
    const NumericOptions& options() const { return options_; }

    UnitCircleSampling initial_samples() const;
    // Classical RK4 along the straight segment a -> b.
    UnitCircleSampling transport(const UnitCircleSampling& phi, cplx a, cplx b, int steps) const;
    // Step count n and 2n with Richardson extrapolation.
    Integrated transport_richardson(const UnitCircleSampling& phi, cplx a, cplx b) const;
    Integrated ray(cplx z) const;

    FramePoint frame_from(cplx z, const UnitCircleSampling& phi, double integration_error = 0.0) const;
    FramePoint at(cplx z) const;

private:
    Potential potential_;
    NumericOptions options_;
    std::vector<std::vector<cplx>> powers_;  // lambda_j^n for n in [min_power, max_power]
    void rk4(std::vector<Mat2>& phi, cplx z, cplx dz) const;
};

struct PhiRaster {
    DomainGrid grid;
    std::vector<UnitCircleSampling> phi;
    std::vector<double> error;
};

struct FrameField {
    DomainGrid grid;
    std::vector<FramePoint> points;
    std::vector<UnitCircleSampling> phi;

    const FramePoint& at(int j, int k) const { return points[grid.index(j, k)]; }
    std::vector<double> integration_residual() const;
    std::vector<double> factorization_residual() const;
};

// Sweeps z0 -> (x_j + i y0) -> (x_j + i y_k), each run at two step sizes.
PhiRaster integrate(const FrameEvaluator& ev, const DomainGrid& grid);
FrameField frame(const FrameEvaluator& ev, const DomainGrid& grid);

// Short transport from the nearest stored grid node.
FramePoint frame_near(const FrameEvaluator& ev, const FrameField& field, cplx z);
UnitCircleSampling phi_near(const FrameEvaluator& ev, const FrameField& field, cplx z);

struct MaurerCartanReport {
    std::vector<double> structural;  // NaN on the boundary
    std::vector<double> flatness;
    double max_structural = 0.0;
    double max_flatness = 0.0;
};

MaurerCartanReport maurer_cartan_check(const FrameField& field, int lambda_samples = 16);

// Worker count from NILMAX_THREADS (default 1).
int thread_count();
void parallel_for(size_t n, const std::function<void(size_t)>& body);

}  // namespace nilmax
