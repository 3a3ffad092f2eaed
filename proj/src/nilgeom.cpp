#include "nilmax/nilgeom.hpp"

#include <cmath>
#include <complex>

#include "nilmax/error.hpp"

namespace nilmax {

namespace {

using V3 = Eigen::Vector3d;

const Eigen::Matrix3d& lorentz() {
    static const Eigen::Matrix3d G = Eigen::Vector3d(1.0, 1.0, -1.0).asDiagonal();
    return G;
}

// nabla_{e_i} e_j expressed in the frame.
V3 connection(int i, int j) {
    static const double table[3][3][3] = {
        {{0, 0, 0}, {0, 0, 0.5}, {0, 0.5, 0}},
        {{0, 0, -0.5}, {0, 0, 0}, {-0.5, 0, 0}},
        {{0, 0.5, 0}, {-0.5, 0, 0}, {0, 0, 0}},
    };
    return {table[i][j][0], table[i][j][1], table[i][j][2]};
}

V3 to_frame(const V3& p, const V3& v) { return {v[0], v[1], v[2] + 0.5 * p[1] * v[0] - 0.5 * p[0] * v[1]}; }

// Covariant derivative along d1 of the field whose coordinate components are d2, with mixed second
// derivative d12 of the surface.
V3 covariant(const V3& p, const V3& d1, const V3& d2, const V3& d12) {
    V3 base(d12[0], d12[1],
            d12[2] + 0.5 * d1[1] * d2[0] + 0.5 * p[1] * d12[0] - 0.5 * d1[0] * d2[1] - 0.5 * p[0] * d12[1]);
    const V3 a = to_frame(p, d1), b = to_frame(p, d2);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (a[i] != 0.0 && b[j] != 0.0) base += a[i] * b[j] * connection(i, j);
    return base;
}

}  // namespace

NilPoint nil_multiply(const NilPoint& p, const NilPoint& q) {
    return {p.x1 + q.x1, p.x2 + q.x2, p.x3 + q.x3 + 0.5 * (p.x1 * q.x2 - q.x1 * p.x2)};
}

NilPoint nil_inverse(const NilPoint& p) { return {-p.x1, -p.x2, -p.x3}; }

NilTangent coordinate_to_frame(const NilPoint& p, const Eigen::Vector3d& v) {
    const V3 c = to_frame(p.vec(), v);
    return {c[0], c[1], c[2]};
}

Eigen::Vector3d frame_to_coordinate(const NilPoint& p, const NilTangent& t) {
    return {t.c1, t.c2, t.c3 - 0.5 * p.x2 * t.c1 + 0.5 * p.x1 * t.c2};
}

double g2_metric(const NilPoint& p, const Eigen::Vector3d& u, const Eigen::Vector3d& v) {
    const V3 a = to_frame(p.vec(), u), b = to_frame(p.vec(), v);
    return a[0] * b[0] + a[1] * b[1] - a[2] * b[2];
}

Eigen::Vector3d left_translate_vector(const NilPoint& q, const NilPoint& /*p*/, const Eigen::Vector3d& u) {
    return {u[0], u[1], u[2] + 0.5 * (q.x1 * u[1] - q.x2 * u[0])};
}

StencilGeometry stencil_geometry(const PointGrid& grid, int j, int k, AmbientModel model) {
    if (j < 1 || k < 1 || j + 1 >= grid.nx || k + 1 >= grid.ny)
        throw Error(ErrorCode::BoundaryIndex, "no full stencil at grid index");
    const double h = grid.h;
    const V3& c = grid.at(j, k);
    const V3 fx = (grid.at(j + 1, k) - grid.at(j - 1, k)) / (2 * h);
    const V3 fy = (grid.at(j, k + 1) - grid.at(j, k - 1)) / (2 * h);
    const V3 fxx = (grid.at(j + 1, k) - 2 * c + grid.at(j - 1, k)) / (h * h);
    const V3 fyy = (grid.at(j, k + 1) - 2 * c + grid.at(j, k - 1)) / (h * h);
    const V3 fxy = (grid.at(j + 1, k + 1) - grid.at(j + 1, k - 1) - grid.at(j - 1, k + 1) + grid.at(j - 1, k - 1)) /
                   (4 * h * h);

    const bool nil = model == AmbientModel::Nil;
    const Eigen::Matrix3d G = nil ? lorentz() : Eigen::Matrix3d::Identity();
    V3 X = fx, Y = fy, Dxx = fxx, Dxy = fxy, Dyy = fyy;
    if (nil) {
        X = to_frame(c, fx);
        Y = to_frame(c, fy);
        Dxx = covariant(c, fx, fx, fxx);
        Dxy = covariant(c, fx, fy, fxy);
        Dyy = covariant(c, fy, fy, fyy);
    }
    const double E = X.dot(G * X), F = X.dot(G * Y), Gg = Y.dot(G * Y);
    StencilGeometry out;
    out.det_first = E * Gg - F * F;
    const double scale = 0.5 * (std::abs(E) + std::abs(Gg));
    if (!(out.det_first > 1e-10 * scale * scale) || !(E > 0.0))
        throw Error(ErrorCode::DegenerateMetric, "first fundamental form is not positive definite");

    V3 n = G * X.cross(Y);
    n /= std::sqrt(std::abs(n.dot(G * n)));
    const double L = Dxx.dot(G * n), M = Dxy.dot(G * n), N = Dyy.dot(G * n);
    out.H = 0.5 * (Gg * L - 2 * F * M + E * N) / out.det_first;

    const std::complex<double> ff = 0.25 * (E - Gg - std::complex<double>(0.0, 2.0) * F);
    out.conformality = std::abs(ff) / (0.25 * (E + Gg));
    return out;
}

double nil_mean_curvature(const PointGrid& grid, int j, int k, AmbientModel model) {
    return stencil_geometry(grid, j, k, model).H;
}

}  // namespace nilmax
