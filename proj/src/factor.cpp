#include "nilmax/factor.hpp"

#include <algorithm>
#include <cmath>

#include "nilmax/error.hpp"

namespace nilmax {

namespace {

using MatX = Eigen::MatrixXcd;

int wrap(int n, int m) { return ((n % m) + m) % m; }

int sample_count_for(int degree, int requested) {
    int m = std::max(requested, 4);
    while (m < 2 * degree + 2) m *= 2;
    return m;
}

void project_parity(TwistedLoop& a) {
    for (int n = -a.degree; n <= a.degree; ++n) {
        Mat2& c = a.at(n);
        if (n % 2 == 0) c(0, 1) = c(1, 0) = 0.0;
        else c(0, 0) = c(1, 1) = 0.0;
    }
}

struct Split {
    std::vector<Mat2> F;
    Mat2 R;
};

// Wiener-Hopf step: with M = Phi^* Phi on the circle, find Y = (I + sum_{l>=1} Z_l lambda^l) R^{-1}
// with M Y free of positive powers; then Phi Y is unitary and R is the constant term of the plus factor.
Split unitary_split(const std::vector<Mat2>& phi, int K) {
    const int m = static_cast<int>(phi.size());
    if (m <= 2 * K) throw Error(ErrorCode::InvalidArgument, "too few circle samples for the Toeplitz depth");
    std::vector<Mat2> gram(phi.size());
    for (size_t j = 0; j < phi.size(); ++j) gram[j] = phi[j].adjoint() * phi[j];
    const std::vector<Mat2> mc = sample_coefficients(gram);
    auto M = [&](int n) -> const Mat2& { return mc[static_cast<size_t>(wrap(n, m))]; };

    MatX T(2 * K, 2 * K);
    MatX rhs(2 * K, 2);
    for (int k = 1; k <= K; ++k) {
        rhs.block(2 * (k - 1), 0, 2, 2) = -M(k);
        for (int l = 1; l <= K; ++l) T.block(2 * (k - 1), 2 * (l - 1), 2, 2) = M(k - l);
    }
    Eigen::LLT<MatX> llt(T);
    if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::TruncationInsufficient, "Toeplitz system is not positive definite");
    const MatX Z = llt.solve(rhs);

    Mat2 S = M(0);
    for (int l = 1; l <= K; ++l) S += M(-l) * Z.block(2 * (l - 1), 0, 2, 2);
    S = (0.5 * (S + S.adjoint())).eval();
    Eigen::LLT<Mat2> chol(S);
    if (chol.info() != Eigen::Success)
        throw Error(ErrorCode::TruncationInsufficient, "Gram constant term is not positive definite");
    Split out;
    out.R = chol.matrixL().adjoint();
    const Mat2 Rinv = out.R.inverse();

    out.F.resize(phi.size());
    for (int j = 0; j < m; ++j) {
        const cplx lam = std::polar(1.0, 2.0 * M_PI * j / m);
        Mat2 Y = Mat2::Identity();
        cplx p = 1.0;
        for (int l = 1; l <= K; ++l) {
            p *= lam;
            Y += Z.block(2 * (l - 1), 0, 2, 2) * p;
        }
        out.F[static_cast<size_t>(j)] = phi[static_cast<size_t>(j)] * Y * Rinv;
    }
    return out;
}

}  // namespace

IwasawaResult iwasawa(const UnitCircleSampling& phi, const FactorOptions& opt) {
    const int d = opt.degree;
    const int m = phi.m;
    Split split = unitary_split(phi.values, d);
    if (opt.polish) split = unitary_split(split.F, d);

    IwasawaResult out;
    UnitCircleSampling fs{m, split.F};
    LoopFromSamples lf = loop_from_samples(fs, d, true);
    out.F = lf.loop;

    UnitCircleSampling ps{m, std::vector<Mat2>(phi.values.size())};
    for (int j = 0; j < m; ++j)
        ps.values[static_cast<size_t>(j)] = split.F[static_cast<size_t>(j)].inverse() * phi.values[static_cast<size_t>(j)];
    LoopFromSamples lp = loop_from_samples(ps, d, true);
    out.Bplus = lp.loop;
    double negative = 0.0;
    for (int n = -d; n < 0; ++n) {
        negative = std::max(negative, mat_norm(out.Bplus.at(n)));
        out.Bplus.at(n).setZero();
    }
    out.Bplus.at(0)(1, 0) = 0.0;
    for (int i = 0; i < 2; ++i) out.Bplus.at(0)(i, i) = out.Bplus.at(0)(i, i).real();
    if (phi.values.empty()) throw Error(ErrorCode::InvalidArgument, "empty sampling");
    project_parity(out.F);
    project_parity(out.Bplus);
    out.tail_fraction = std::max(lf.tail_fraction, lp.tail_fraction);

    const UnitCircleSampling fe = loop_to_samples(out.F, m);
    const UnitCircleSampling pe = loop_to_samples(out.Bplus, m);
    for (int j = 0; j < m; ++j) {
        const Mat2& f = fe.values[static_cast<size_t>(j)];
        out.residual = std::max(out.residual, mat_norm(phi.values[static_cast<size_t>(j)] - f * pe.values[static_cast<size_t>(j)]));
        out.unitarity = std::max(out.unitarity, mat_norm(f.adjoint() * f - Mat2::Identity()));
    }
    out.residual = std::max(out.residual, negative);
    if (!std::isfinite(out.residual) || out.residual > opt.tol || out.unitarity > opt.tol)
        throw Error(ErrorCode::TruncationInsufficient,
                    "Iwasawa residual " + std::to_string(out.residual) + " unitarity " + std::to_string(out.unitarity));
    return out;
}

IwasawaResult iwasawa(const TwistedLoop& phi, const FactorOptions& opt) {
    const int m = sample_count_for(std::max(phi.degree, opt.degree), opt.samples);
    return iwasawa(loop_to_samples(phi, m), opt);
}

BirkhoffResult birkhoff(const UnitCircleSampling& c, const FactorOptions& opt) {
    const int K = opt.degree;
    const int m = c.m;
    if (m <= 2 * K) throw Error(ErrorCode::InvalidArgument, "too few circle samples for the Toeplitz depth");
    const std::vector<Mat2> cc = sample_coefficients(c.values);
    auto C = [&](int n) -> const Mat2& { return cc[static_cast<size_t>(wrap(n, m))]; };

    // X = C_-^{-1} = I + sum_k X_{-k} lambda^{-k}; (X C) has no negative powers.
    MatX T(2 * K, 2 * K);
    MatX rhs(2, 2 * K);
    for (int j = 1; j <= K; ++j) {
        rhs.block(0, 2 * (j - 1), 2, 2) = -C(-j);
        for (int k = 1; k <= K; ++k) T.block(2 * (k - 1), 2 * (j - 1), 2, 2) = C(k - j);
    }
    Eigen::PartialPivLU<MatX> lu(T.transpose());
    BirkhoffResult out;
    out.rcond = lu.rcond();
    if (!(out.rcond > 1e-13)) throw Error(ErrorCode::BigCellViolation, "Birkhoff system is singular");
    const MatX X = lu.solve(rhs.transpose()).transpose();

    std::vector<Mat2> plus(c.values.size()), minus(c.values.size());
    for (int j = 0; j < m; ++j) {
        const cplx inv_lam = std::polar(1.0, -2.0 * M_PI * j / m);
        Mat2 x = Mat2::Identity();
        cplx p = 1.0;
        for (int k = 1; k <= K; ++k) {
            p *= inv_lam;
            x += X.block(0, 2 * (k - 1), 2, 2) * p;
        }
        plus[static_cast<size_t>(j)] = x * c.values[static_cast<size_t>(j)];
        minus[static_cast<size_t>(j)] = x.inverse();
    }
    out.Cplus = loop_from_samples({m, plus}, K, true).loop;
    out.Cminus = loop_from_samples({m, minus}, K, true).loop;
    double leak = 0.0;
    for (int n = 1; n <= K; ++n) {
        leak = std::max({leak, mat_norm(out.Cplus.at(-n)), mat_norm(out.Cminus.at(n))});
        out.Cplus.at(-n).setZero();
        out.Cminus.at(n).setZero();
    }
    leak = std::max(leak, mat_norm(out.Cminus.at(0) - Mat2::Identity()));
    out.Cminus.at(0) = Mat2::Identity();
    project_parity(out.Cplus);
    project_parity(out.Cminus);

    const UnitCircleSampling me = loop_to_samples(out.Cminus, m);
    const UnitCircleSampling pe = loop_to_samples(out.Cplus, m);
    for (int j = 0; j < m; ++j)
        out.residual = std::max(out.residual, mat_norm(c.values[static_cast<size_t>(j)] - me.values[static_cast<size_t>(j)] * pe.values[static_cast<size_t>(j)]));
    out.residual = std::max(out.residual, leak);
    if (!std::isfinite(out.residual) || out.residual > opt.tol)
        throw Error(ErrorCode::BigCellViolation, "Birkhoff residual " + std::to_string(out.residual));
    return out;
}

BirkhoffResult birkhoff(const TwistedLoop& c, const FactorOptions& opt) {
    const int m = sample_count_for(std::max(c.degree, opt.degree), opt.samples);
    return birkhoff(loop_to_samples(c, m), opt);
}

NormalizedPotentialAt normalized_potential_from(const std::function<TwistedLoop(cplx)>& cminus_field, cplx z,
                                                double h) {
    Mat2 c1[5], c2[5], c3[5];
    for (int k = -2; k <= 2; ++k) {
        const TwistedLoop cm = cminus_field(z + static_cast<double>(k) * h);
        c1[k + 2] = cm.coeff(-1);
        c2[k + 2] = cm.coeff(-2);
        c3[k + 2] = cm.coeff(-3);
    }
    auto deriv = [h](const Mat2* f) -> Mat2 { return (-f[4] + 8.0 * f[3] - 8.0 * f[1] + f[0]) / (12.0 * h); };
    const Mat2 d1 = deriv(c1), d2 = deriv(c2), d3 = deriv(c3);
    const Mat2 A = c1[2], Bm = c2[2];

    NormalizedPotentialAt out;
    out.xi_minus1 = d1;
    out.a = d1(0, 1);
    out.b = d1(1, 0);
    out.diagonal_defect = std::max(std::abs(d1(0, 0)), std::abs(d1(1, 1)));
    const Mat2 second = d2 - A * d1;
    const Mat2 third = d3 - A * d2 + (A * A - Bm) * d1;
    out.higher_defect = std::max(mat_norm(second), mat_norm(third));
    return out;
}

}  // namespace nilmax
