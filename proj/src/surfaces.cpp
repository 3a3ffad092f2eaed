#include "nilmax/surfaces.hpp"

#include <cmath>
#include <limits>

#include "nilmax/error.hpp"

namespace nilmax {

namespace {

const cplx I1(0.0, 1.0);

Mat2 comm(const Mat2& a, const Mat2& b) { return a * b - b * a; }

cplx chart_value(const ExtendedComplex& g, bool inverted) {
    if (!inverted) return g.infinite ? cplx(std::numeric_limits<double>::infinity()) : g.value;
    if (g.infinite) return 0.0;
    return 1.0 / g.value;
}

}  // namespace

const Mat2& E1() {
    static const Mat2 m = (Mat2() << 0.0, -0.5 * I1, -0.5 * I1, 0.0).finished();
    return m;
}

const Mat2& E2() {
    static const Mat2 m = (Mat2() << 0.0, 0.5, -0.5, 0.0).finished();
    return m;
}

const Mat2& E3() {
    static const Mat2 m = (Mat2() << 0.5 * I1, 0.0, 0.0, -0.5 * I1).finished();
    return m;
}

Vec3 su2_to_r3(const Mat2& x) { return {-2.0 * x(0, 1).imag(), 2.0 * x(0, 1).real(), 2.0 * x(0, 0).imag()}; }

Mat2 r3_to_su2(const Vec3& v) { return v[0] * E1() + v[1] * E2() + v[2] * E3(); }

ExtendedComplex north_chart(const Vec3& n) {
    const double d = 1.0 - n[2];
    if (d <= 0.0) return {0.0, true};
    return {cplx(n[0], n[1]) / d, false};
}

ExtendedComplex south_chart(const Vec3& n) {
    const double d = 1.0 + n[2];
    if (d <= 0.0) return {0.0, true};
    return {cplx(n[0], n[1]) / d, false};
}

Vec3 gauss_map(const Mat2& F) { return su2_to_r3(F * E3() * F.inverse()); }

ExtendedComplex normal_gauss_map(const Mat2& F) {
    const cplx den = std::conj(F(0, 1));
    if (den == cplx(0.0)) return {0.0, true};
    return {F(0, 0) / den, false};
}

Spinors spinors_from_frame(const Mat2& F, cplx p) {
    const double ap = std::abs(p);
    const cplx phase = ap > 0.0 ? std::sqrt(p / ap) : cplx(1.0);
    const double s = std::sqrt(2.0 * ap);  // sqrt(h / 2) with h = 4|p|
    return {s * F(0, 0) * phase, s * F(0, 1) / phase};
}

PointGeometry point_geometry(const FramePoint& fp, cplx lambda) {
    PointGeometry pg;
    Mat2 F = Mat2::Zero(), Ft = Mat2::Zero(), Ftt = Mat2::Zero();
    cplx p = std::pow(lambda, -fp.F.degree);
    for (int n = -fp.F.degree; n <= fp.F.degree; ++n) {
        const Mat2 c = fp.F.at(n) * p;
        F += c;
        Ft += (I1 * static_cast<double>(n)) * c;
        Ftt += (-static_cast<double>(n) * n) * c;
        p *= lambda;
    }
    const Mat2 Fi = F.inverse();
    pg.F = F;
    pg.U = fp.U_at(lambda);
    pg.V = fp.V_at(lambda);
    const Mat2 Ax = pg.U + pg.V, Ay = I1 * (pg.U - pg.V);

    SurfaceSample& s = pg.s;
    s.z = fp.z;
    const Mat2 Nm = F * E3() * Fi;
    s.N = su2_to_r3(Nm);
    pg.Nx = su2_to_r3(F * comm(Ax, E3()) * Fi);
    pg.Ny = su2_to_r3(F * comm(Ay, E3()) * Fi);

    const Mat2 T = Ft * Fi;
    s.f_cmc = su2_to_r3(-T - Nm);
    const Mat2 ft = -Ftt * Fi + T * T - comm(T, Nm);
    const Vec3 xt = su2_to_r3(ft);
    s.f_nil = {s.f_cmc[0], s.f_cmc[1], -0.5 * xt[2]};

    // theta-derivatives of the connection on the circle
    const Mat2 Ut = (-I1 / lambda) * fp.Um1;
    const Mat2 Vt = -I1 * lambda * fp.Um1.adjoint();
    pg.fx = su2_to_r3(-F * (Ut + Vt) * Fi) - pg.Nx;
    pg.fy = su2_to_r3(-F * (I1 * (Ut - Vt)) * Fi) - pg.Ny;

    const cplx u12 = pg.U(0, 1), u21 = pg.U(1, 0);
    s.g = normal_gauss_map(F);
    const Mat2 Fz = F * pg.U, Fzb = F * pg.V;
    if (!s.g.infinite) {
        const cplx c12 = std::conj(F(0, 1));
        pg.g_z = Fz(0, 0) / c12 - F(0, 0) * std::conj(Fzb(0, 1)) / (c12 * c12);
        pg.g_zb = Fzb(0, 0) / c12 - F(0, 0) * std::conj(Fz(0, 1)) / (c12 * c12);
    } else {
        pg.g_z = pg.g_zb = cplx(std::numeric_limits<double>::quiet_NaN());
    }
    pg.gw = -2.0 * I1 * F(0, 0) * F(1, 0) * u12;
    s.omega = 2.0 * I1 * std::conj(F(0, 1)) * std::conj(F(0, 1)) * u12;
    s.B = -u12 * u21;
    s.h = 4.0 * std::abs(u12);
    const Spinors sp = spinors_from_frame(F, u12);
    s.psi1 = sp.psi1;
    s.psi2 = sp.psi2;
    const double d = std::norm(sp.psi1) - std::norm(sp.psi2);
    s.eu = 4.0 * d * d;
    pg.phi3 = 2.0 * I1 * sp.psi1 * std::conj(sp.psi2);
    return pg;
}

double induced_metric(const SurfaceSample& s) {
    if (s.g.infinite) return 4.0 * std::norm(s.psi1) * std::norm(s.psi1);
    const double q = 1.0 - std::norm(s.g.value);
    return 4.0 * q * q * std::norm(s.omega);
}

double relation_defect(const SurfaceSample& s) {
    const cplx phi3 = 2.0 * I1 * s.psi1 * std::conj(s.psi2);
    const double h2 = s.h * s.h;
    return std::abs(s.eu + 4.0 * std::norm(phi3) - h2) / h2;
}

double spinor_metric_defect(const SurfaceSample& s) {
    const double d = std::norm(s.psi1) - std::norm(s.psi2);
    return std::abs(s.eu - 4.0 * d * d) / (s.h * s.h);
}

SurfaceRaster surface_raster(const FrameField& field, cplx lambda) {
    SurfaceRaster r;
    r.grid = field.grid;
    r.lambda = lambda;
    r.points.resize(field.points.size());
    parallel_for(field.points.size(), [&](size_t i) { r.points[i] = point_geometry(field.points[i], lambda); });
    return r;
}

EuclideanRasters sym_euclidean(const FrameField& field) {
    const SurfaceRaster r = surface_raster(field, 1.0);
    EuclideanRasters out;
    for (const auto& p : r.points) {
        out.f_cmc.push_back(p.s.f_cmc);
        out.N.push_back(p.s.N);
    }
    return out;
}

std::vector<NilPoint> sym_nil(const FrameField& field, cplx lambda0) {
    const SurfaceRaster r = surface_raster(field, lambda0);
    std::vector<NilPoint> out;
    out.reserve(r.points.size());
    for (const auto& p : r.points) out.push_back(p.s.f_nil);
    return out;
}

PointGrid nil_point_grid(const SurfaceRaster& r) {
    PointGrid g{r.grid.nx, r.grid.ny, r.grid.hx(), {}};
    for (const auto& p : r.points) g.pts.push_back(p.s.f_nil.vec());
    return g;
}

PointGrid cmc_point_grid(const SurfaceRaster& r) {
    PointGrid g{r.grid.nx, r.grid.ny, r.grid.hx(), {}};
    for (const auto& p : r.points) g.pts.push_back(p.s.f_cmc);
    return g;
}

namespace {

struct Derivs {
    cplx g, gz, gzb, gzzb;
    bool inverted;
};

Derivs chart_derivs(const DomainGrid& grid, const std::vector<ExtendedComplex>& g, int j, int k) {
    const ExtendedComplex& c = g[grid.index(j, k)];
    const bool inv = c.infinite || std::abs(c.value) > 1.0;
    auto v = [&](int a, int b) { return chart_value(g[grid.index(a, b)], inv); };
    const double hx = grid.hx(), hy = grid.hy();
    const cplx gx = (v(j + 1, k) - v(j - 1, k)) / (2 * hx);
    const cplx gy = (v(j, k + 1) - v(j, k - 1)) / (2 * hy);
    const cplx lap = (v(j + 1, k) - 2.0 * v(j, k) + v(j - 1, k)) / (hx * hx) +
                     (v(j, k + 1) - 2.0 * v(j, k) + v(j, k - 1)) / (hy * hy);
    return {v(j, k), 0.5 * (gx - I1 * gy), 0.5 * (gx + I1 * gy), 0.25 * lap, inv};
}

}  // namespace

OmegaB omega_and_B(const DomainGrid& grid, const std::vector<ExtendedComplex>& g, double holomorphic_tol) {
    OmegaB out;
    const cplx nan(std::numeric_limits<double>::quiet_NaN());
    out.omega.assign(grid.size(), nan);
    out.B.assign(grid.size(), nan);
    out.valid.assign(grid.size(), false);
    for (int k = 1; k + 1 < grid.ny; ++k) {
        for (int j = 1; j + 1 < grid.nx; ++j) {
            const Derivs d = chart_derivs(grid, g, j, k);
            const double q = 1.0 + std::norm(d.g);
            const cplx gbz = std::conj(d.gzb);
            const cplx omega = d.inverted ? 2.0 * I1 * d.g * d.g * gbz / (q * q) : -2.0 * I1 * gbz / (q * q);
            const double scale = std::abs(d.gz) + std::abs(d.gzb);
            if (std::abs(gbz) <= holomorphic_tol * std::max(1.0, scale))
                throw Error(ErrorCode::HolomorphicPoint, "conj(g)_z vanishes at grid index (" + std::to_string(j) + ", " +
                                                             std::to_string(k) + ")");
            const size_t i = grid.index(j, k);
            out.omega[i] = omega;
            out.B[i] = d.gz * gbz / (q * q);
            out.valid[i] = true;
        }
    }
    return out;
}

std::vector<double> harmonicity_residual(const DomainGrid& grid, const std::vector<ExtendedComplex>& g) {
    std::vector<double> out(grid.size(), std::numeric_limits<double>::quiet_NaN());
    for (int k = 1; k + 1 < grid.ny; ++k) {
        for (int j = 1; j + 1 < grid.nx; ++j) {
            const Derivs d = chart_derivs(grid, g, j, k);
            out[grid.index(j, k)] = std::abs(d.gzzb - 2.0 * std::conj(d.g) * d.gz * d.gzb / (1.0 + std::norm(d.g)));
        }
    }
    return out;
}

}  // namespace nilmax
