#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace nilmax {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Vec3 = Eigen::Vector3d;

// Truncated Laurent loop sum_{n=-d..d} coeffs[n] lambda^n.
struct TwistedLoop {
    int degree = 0;
    bool twisted = true;
    std::vector<Mat2> coeffs;

    TwistedLoop();
    explicit TwistedLoop(int d, bool is_twisted = true);

    static TwistedLoop identity(int d = 0);
    static TwistedLoop constant(const Mat2& c, int d = 0, bool is_twisted = true);

    // Coefficient at index n, zero outside the stored range.
    Mat2 coeff(int n) const;
    Mat2& at(int n);
    const Mat2& at(int n) const;

    TwistedLoop truncated(int d) const;
    // Largest entry that violates the sigma parity (even diagonal, odd off-diagonal).
    double parity_defect() const;
    double max_abs() const;
};

struct UnitCircleSampling {
    int m = 0;
    std::vector<Mat2> values;

    cplx lambda(int j) const;
};

struct LoopFromSamples {
    TwistedLoop loop;
    double tail_fraction = 0.0;
    bool alias_warning = false;
};

Mat2 loop_eval(const TwistedLoop& a, cplx lambda);
Mat2 loop_eval_horner(const TwistedLoop& a, cplx lambda);

TwistedLoop loop_add(const TwistedLoop& a, const TwistedLoop& b);
TwistedLoop loop_scale(const TwistedLoop& a, cplx s);
TwistedLoop loop_mul(const TwistedLoop& a, const TwistedLoop& b, int working_degree);
// Adjugate; equals the inverse when det = 1 identically.
TwistedLoop loop_inverse_sl2(const TwistedLoop& a);
// lambda |-> a(1/conj(lambda))^*; on the circle this is the pointwise adjoint.
TwistedLoop loop_star(const TwistedLoop& a);

// d/dlambda: n coeffs[n] stored at index n-1.
TwistedLoop loop_dlambda(const TwistedLoop& a);
// lambda d/dlambda: n coeffs[n] stored at index n.
TwistedLoop loop_lambda_dlambda(const TwistedLoop& a);

UnitCircleSampling loop_to_samples(const TwistedLoop& a, int m);
LoopFromSamples loop_from_samples(const UnitCircleSampling& s, int d, bool is_twisted = true);

// Raw DFT coefficients c_n = mean_j s_j lambda_j^{-n}, n = 0..m-1 (wrapped).
std::vector<Mat2> sample_coefficients(const std::vector<Mat2>& values);
std::vector<Mat2> coefficients_to_values(const std::vector<Mat2>& wrapped);

double mat_norm(const Mat2& a);

}  // namespace nilmax
