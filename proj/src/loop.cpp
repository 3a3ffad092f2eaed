#include "nilmax/loop.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "nilmax/error.hpp"

namespace nilmax {

TwistedLoop::TwistedLoop() : TwistedLoop(0) {}

namespace {
size_t checked_size(int d) {
    if (d < 0) throw Error(ErrorCode::InvalidArgument, "negative loop degree");
    return static_cast<size_t>(2 * d + 1);
}
}  // namespace

TwistedLoop::TwistedLoop(int d, bool is_twisted)
    : degree(d), twisted(is_twisted), coeffs(checked_size(d), Mat2::Zero()) {}

TwistedLoop TwistedLoop::identity(int d) { return constant(Mat2::Identity(), d); }

TwistedLoop TwistedLoop::constant(const Mat2& c, int d, bool is_twisted) {
    TwistedLoop out(d, is_twisted);
    out.at(0) = c;
    return out;
}

Mat2 TwistedLoop::coeff(int n) const {
    if (n < -degree || n > degree) return Mat2::Zero();
    return coeffs[static_cast<size_t>(n + degree)];
}

Mat2& TwistedLoop::at(int n) {
    if (n < -degree || n > degree) throw Error(ErrorCode::InvalidArgument, "loop index out of range");
    return coeffs[static_cast<size_t>(n + degree)];
}

const Mat2& TwistedLoop::at(int n) const {
    if (n < -degree || n > degree) throw Error(ErrorCode::InvalidArgument, "loop index out of range");
    return coeffs[static_cast<size_t>(n + degree)];
}

TwistedLoop TwistedLoop::truncated(int d) const {
    TwistedLoop out(d, twisted);
    for (int n = -std::min(d, degree); n <= std::min(d, degree); ++n) out.at(n) = at(n);
    return out;
}

double TwistedLoop::parity_defect() const {
    double worst = 0.0;
    for (int n = -degree; n <= degree; ++n) {
        const Mat2& c = at(n);
        if (n % 2 == 0) worst = std::max({worst, std::abs(c(0, 1)), std::abs(c(1, 0))});
        else worst = std::max({worst, std::abs(c(0, 0)), std::abs(c(1, 1))});
    }
    return worst;
}

double TwistedLoop::max_abs() const {
    double worst = 0.0;
    for (const auto& c : coeffs) worst = std::max(worst, c.cwiseAbs().maxCoeff());
    return worst;
}

cplx UnitCircleSampling::lambda(int j) const {
    return std::polar(1.0, 2.0 * std::numbers::pi * j / m);
}

double mat_norm(const Mat2& a) { return a.norm(); }

Mat2 loop_eval(const TwistedLoop& a, cplx lambda) {
    Mat2 out = Mat2::Zero();
    cplx p = std::pow(lambda, -a.degree);
    for (int n = -a.degree; n <= a.degree; ++n) {
        out += a.at(n) * p;
        p *= lambda;
    }
    return out;
}

Mat2 loop_eval_horner(const TwistedLoop& a, cplx lambda) {
    Mat2 acc = Mat2::Zero();
    for (int n = a.degree; n >= -a.degree; --n) acc = acc * lambda + a.at(n);
    return acc * std::pow(lambda, -a.degree);
}

TwistedLoop loop_add(const TwistedLoop& a, const TwistedLoop& b) {
    TwistedLoop out(std::max(a.degree, b.degree), a.twisted && b.twisted);
    for (int n = -out.degree; n <= out.degree; ++n) out.at(n) = a.coeff(n) + b.coeff(n);
    return out;
}

TwistedLoop loop_scale(const TwistedLoop& a, cplx s) {
    TwistedLoop out = a;
    for (auto& c : out.coeffs) c *= s;
    return out;
}

TwistedLoop loop_mul(const TwistedLoop& a, const TwistedLoop& b, int working_degree) {
    const int d = std::min(a.degree + b.degree, working_degree);
    TwistedLoop out(d, a.twisted && b.twisted);
    for (int i = -a.degree; i <= a.degree; ++i) {
        for (int j = -b.degree; j <= b.degree; ++j) {
            const int n = i + j;
            if (n < -d || n > d) continue;
            out.at(n) += a.at(i) * b.at(j);
        }
    }
    return out;
}

TwistedLoop loop_inverse_sl2(const TwistedLoop& a) {
    TwistedLoop out(a.degree, a.twisted);
    for (int n = -a.degree; n <= a.degree; ++n) {
        const Mat2& c = a.at(n);
        Mat2 adj;
        adj << c(1, 1), -c(0, 1), -c(1, 0), c(0, 0);
        out.at(n) = adj;
    }
    return out;
}

TwistedLoop loop_star(const TwistedLoop& a) {
    TwistedLoop out(a.degree, a.twisted);
    for (int n = -a.degree; n <= a.degree; ++n) out.at(n) = a.at(-n).adjoint();
    return out;
}

TwistedLoop loop_dlambda(const TwistedLoop& a) {
    TwistedLoop out(a.degree + 1, false);
    for (int n = -a.degree; n <= a.degree; ++n) out.at(n - 1) = static_cast<double>(n) * a.at(n);
    return out;
}

TwistedLoop loop_lambda_dlambda(const TwistedLoop& a) {
    TwistedLoop out(a.degree, a.twisted);
    for (int n = -a.degree; n <= a.degree; ++n) out.at(n) = static_cast<double>(n) * a.at(n);
    return out;
}

namespace {

bool is_power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

}  // namespace

std::vector<Mat2> sample_coefficients(const std::vector<Mat2>& values) {
    const int m = static_cast<int>(values.size());
    Eigen::FFT<double> fft;
    std::vector<Mat2> out(static_cast<size_t>(m), Mat2::Zero());
    std::vector<cplx> in(static_cast<size_t>(m)), spec;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            for (int j = 0; j < m; ++j) in[static_cast<size_t>(j)] = values[static_cast<size_t>(j)](r, c);
            fft.fwd(spec, in);
            for (int k = 0; k < m; ++k) out[static_cast<size_t>(k)](r, c) = spec[static_cast<size_t>(k)] / static_cast<double>(m);
        }
    }
    return out;
}

std::vector<Mat2> coefficients_to_values(const std::vector<Mat2>& wrapped) {
    const int m = static_cast<int>(wrapped.size());
    Eigen::FFT<double> fft;
    std::vector<Mat2> out(static_cast<size_t>(m), Mat2::Zero());
    std::vector<cplx> in(static_cast<size_t>(m)), vals;
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            for (int k = 0; k < m; ++k) in[static_cast<size_t>(k)] = wrapped[static_cast<size_t>(k)](r, c);
            fft.inv(vals, in);
            for (int j = 0; j < m; ++j) out[static_cast<size_t>(j)](r, c) = vals[static_cast<size_t>(j)] * static_cast<double>(m);
        }
    }
    return out;
}

UnitCircleSampling loop_to_samples(const TwistedLoop& a, int m) {
    if (!is_power_of_two(m) || m < 2 * a.degree + 2)
        throw Error(ErrorCode::InvalidArgument, "sample count must be a power of two and at least 2d+2");
    std::vector<Mat2> wrapped(static_cast<size_t>(m), Mat2::Zero());
    for (int n = -a.degree; n <= a.degree; ++n) wrapped[static_cast<size_t>((n % m + m) % m)] += a.at(n);
    UnitCircleSampling s;
    s.m = m;
    s.values = coefficients_to_values(wrapped);
    return s;
}

LoopFromSamples loop_from_samples(const UnitCircleSampling& s, int d, bool is_twisted) {
    const int m = s.m;
    if (!is_power_of_two(m) || m < 2 * d + 2)
        throw Error(ErrorCode::InvalidArgument, "sample count must be a power of two and at least 2d+2");
    const std::vector<Mat2> c = sample_coefficients(s.values);
    LoopFromSamples out;
    out.loop = TwistedLoop(d, is_twisted);
    double total = 0.0, kept = 0.0;
    for (int k = 0; k < m; ++k) total += c[static_cast<size_t>(k)].squaredNorm();
    for (int n = -d; n <= d; ++n) {
        const Mat2& cn = c[static_cast<size_t>((n % m + m) % m)];
        out.loop.at(n) = cn;
        kept += cn.squaredNorm();
    }
    out.tail_fraction = total > 0.0 ? std::max(0.0, total - kept) / total : 0.0;
    out.alias_warning = out.tail_fraction > 1e-8;
    return out;
}

}  // namespace nilmax
