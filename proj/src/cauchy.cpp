#include "nilmax/cauchy.hpp"

#include <cmath>

#include "nilmax/error.hpp"
#include "nilmax/surfaces.hpp"

namespace nilmax {

namespace {

const cplx I1(0.0, 1.0);

std::array<Dual, 3> eval3(const std::array<Expr, 3>& e, cplx z) {
    return {e[0].eval_dual(z), e[1].eval_dual(z), e[2].eval_dual(z)};
}

cplx dot(const std::array<cplx, 3>& a, const std::array<cplx, 3>& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

std::array<cplx, 3> cross(const std::array<cplx, 3>& a, const std::array<cplx, 3>& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Vec3 real3(const std::array<Expr, 3>& e, double x) { return {e[0](x).real(), e[1](x).real(), e[2](x).real()}; }

}  // namespace

std::vector<double> Interval::points() const {
    if (samples < 2 || !(hi > lo)) throw Error(ErrorCode::InvalidArgument, "interval needs hi > lo and >= 2 samples");
    std::vector<double> out(static_cast<size_t>(samples));
    for (int i = 0; i < samples; ++i) out[static_cast<size_t>(i)] = lo + (hi - lo) * i / (samples - 1);
    return out;
}

Vec3 CauchyData::n0(double x) const { return real3(N0, x); }
Vec3 CauchyData::w(double x) const { return real3(W, x); }

void CauchyData::validate() const {
    for (double x : interval.points()) {
        const Vec3 n = n0(x), ww = w(x);
        if (std::abs(n.norm() - 1.0) > 1e-12 || std::abs(ww.norm() - 1.0) > 1e-12 || std::abs(n.dot(ww)) > 1e-12)
            throw Error(ErrorCode::InvalidArgument, "Cauchy data must satisfy |N0| = |W| = 1 and <N0, W> = 0 (x = " +
                                                        std::to_string(x) + ")");
    }
}

void EquatorData::validate() const {
    for (double x : interval.points()) {
        const double vv = v(x).real(), ph = phi(x).real();
        if (vv == 0.0 || std::abs(vv) < 1e-12)
            throw Error(ErrorCode::InvalidArgument, "speed v vanishes at x = " + std::to_string(x));
        if (std::abs(I1 * vv - std::polar(1.0, -ph)) < 1e-12)
            throw Error(ErrorCode::RegularityViolation, "(v, phi) = +-(1, -pi/2) at x = " + std::to_string(x));
    }
}

Kappas kappas_from_data(const CauchyData& d) {
    const auto N0 = d.N0;
    const auto W = d.W;
    auto parts = [N0, W](cplx z) {
        const auto n = eval3(N0, z), w = eval3(W, z);
        return std::array<std::array<cplx, 3>, 4>{{{n[0].v, n[1].v, n[2].v},
                                                     {n[0].d, n[1].d, n[2].d},
                                                     {w[0].v, w[1].v, w[2].v},
                                                     {w[0].d, w[1].d, w[2].d}}};
    };
    Kappas k;
    k.k1 = [parts](cplx z) {
        const auto p = parts(z);
        return dot(p[1], p[2]);
    };
    k.k2 = [parts](cplx z) {
        const auto p = parts(z);
        return dot(p[1], cross(p[0], p[2]));
    };
    k.k3 = [parts](cplx z) {
        const auto p = parts(z);
        return dot(p[3], cross(p[0], p[2]));
    };
    return k;
}

Kappas kappas_equator(const EquatorData& d) {
    const Expr v = d.v, phi = d.phi;
    Kappas k;
    k.k1 = [v, phi](cplx z) { return -v(z) * std::cos(phi(z)); };
    k.k2 = [v, phi](cplx z) { return -v(z) * std::sin(phi(z)); };
    k.k3 = [phi](cplx z) { return -phi.eval_dual(z).d; };
    return k;
}

Potential circle_potential(const Kappas& k, const TwistedLoop& initial, const std::string& family) {
    Potential p;
    p.family = family;
    p.initial = initial;
    p.terms.push_back({-1, [k](cplx z) {
                           const cplx k1 = k.k1(z), k2 = k.k2(z);
                           Mat2 m;
                           m << 0.0, 0.25 * (k2 - 1.0 - k1 * I1), 0.25 * (-k2 - 1.0 - k1 * I1), 0.0;
                           return m;
                       }});
    p.terms.push_back({0, [k](cplx z) {
                           const cplx k3 = k.k3(z);
                           Mat2 m;
                           m << 0.5 * I1 * k3, 0.0, 0.0, -0.5 * I1 * k3;
                           return m;
                       }});
    p.terms.push_back({1, [k](cplx z) {
                           const cplx k1 = k.k1(z), k2 = k.k2(z);
                           Mat2 m;
                           m << 0.0, 0.25 * (k2 + 1.0 - k1 * I1), 0.25 * (1.0 - k2 - k1 * I1), 0.0;
                           return m;
                       }});
    return p;
}

Mat2 su2_lift(const Eigen::Matrix3d& R) {
    // F is proportional to I - 4 sum_i (Ad_F E_i) E_i when that is nonzero; otherwise
    // lift R composed with a half-turn about one axis and undo it.
    const Mat2* basis[3] = {&E1(), &E2(), &E3()};
    Mat2 best = Mat2::Zero();
    double best_norm = -1.0;
    int best_axis = -1;
    for (int axis = -1; axis < 3; ++axis) {
        Eigen::Matrix3d Ra = R;
        if (axis >= 0)
            for (int c = 0; c < 3; ++c)
                if (c != axis) Ra.col(c) = -Ra.col(c);
        Mat2 M = Mat2::Identity();
        for (int i = 0; i < 3; ++i) M -= 4.0 * r3_to_su2(Ra.col(i)) * (*basis[i]);
        const double n = std::abs(M.determinant());
        if (n > best_norm + 1e-9) {
            best_norm = n;
            best = M;
            best_axis = axis;
        }
    }
    Mat2 F = best / std::sqrt(best.determinant());
    if (best_axis >= 0) F = F * (2.0 * *basis[best_axis]).inverse();
    return F;
}

Potential cauchy_potential(const CauchyData& d) {
    d.validate();
    const Kappas k = kappas_from_data(d);
    for (double x : d.interval.points())
        if (std::abs(k.k2(x) - I1 * k.k1(x) - 1.0) < 1e-12)
            throw Error(ErrorCode::RegularityViolation, "kappa2 - i kappa1 = 1 at x = " + std::to_string(x));
    const Vec3 n = d.n0(0.0), w = d.w(0.0);
    Eigen::Matrix3d R;
    R.col(0) = n.cross(w);
    R.col(1) = -w;
    R.col(2) = n;
    return circle_potential(k, twisted_lift(su2_lift(R)), "cauchy_general");
}

Potential equator_potential(const EquatorData& d) {
    d.validate();
    const double alpha = 0.5 * d.phi(0.0).real();
    const double r = 1.0 / std::sqrt(2.0);
    Mat2 u;
    u << r * std::polar(1.0, -alpha), r * std::polar(1.0, alpha), -r * std::polar(1.0, -alpha), r * std::polar(1.0, alpha);
    return circle_potential(kappas_equator(d), twisted_lift(u), "cauchy_equator");
}

cplx bhat(const EquatorData& d, cplx z) {
    const cplx v = d.v(z), ph = d.phi(z);
    const cplx den = I1 * v - std::exp(-I1 * ph);
    if (std::abs(den) < 1e-12) throw Error(ErrorCode::DegenerateDenominator, "iv = exp(-i phi)");
    return (I1 * v - std::exp(I1 * ph)) / den;
}

SingularKind predict_type(const EquatorData& d, double tol) {
    const double v0 = d.v(0.0).real(), ph0 = d.phi(0.0).real();
    const double dphi = d.phi.eval_dual(0.0).d.real();
    const double s = std::sin(ph0), c = std::cos(ph0);
    const bool on_st = std::abs(v0 + s) <= tol;
    const bool s_zero = std::abs(s) <= tol, c_zero = std::abs(c) <= tol;
    if (!s_zero && !c_zero && !on_st) return SingularKind::CuspidalEdge;
    if (on_st && !s_zero && !c_zero && std::abs(dphi) > tol) return SingularKind::Swallowtail;
    if (c_zero && !on_st && std::abs(dphi) > tol) return SingularKind::CuspidalCrossCap;
    throw Error(ErrorCode::Unclassified, "(v(0), phi(0)) = (" + std::to_string(v0) + ", " + std::to_string(ph0) +
                                             ") lies outside the generic clauses");
}

Reconstruction reconstruct(const FrameEvaluator& ev, const CauchyData& d, const std::vector<double>& xs) {
    Reconstruction r;
    for (double x : xs) {
        const PointGeometry pg = point_geometry(ev.at(x));
        r.max_n_error = std::max(r.max_n_error, (pg.s.N - d.n0(x)).norm());
        r.max_w_error = std::max(r.max_w_error, (pg.Ny - d.w(x)).norm());
        const Vec3 ad = su2_to_r3(pg.F * E2() * pg.F.inverse());
        r.max_frame_defect = std::max(r.max_frame_defect, (pg.Ny + ad).norm());
    }
    return r;
}

double equator_theta(const EquatorData& d, double x) {
    static const double node[5] = {0.0, 0.5384693101056831, -0.5384693101056831, 0.9061798459386640, -0.9061798459386640};
    static const double weight[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665, 0.2369268850561891,
                                     0.2369268850561891};
    const int panels = 16;
    const double w = x / panels;
    double sum = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * w;
        for (int i = 0; i < 5; ++i) sum += weight[i] * d.v(mid + 0.5 * w * node[i]).real();
    }
    return 0.5 * w * sum;
}

Vec3 equator_n0(const EquatorData& d, double x) {
    const double t = equator_theta(d, x);
    return {std::cos(t), std::sin(t), 0.0};
}

Vec3 equator_w(const EquatorData& d, double x) {
    const double t = equator_theta(d, x), ph = d.phi(x).real();
    const Vec3 V(-std::sin(t), std::cos(t), 0.0);
    return -std::cos(ph) * V + std::sin(ph) * Vec3(0.0, 0.0, 1.0);
}

Reconstruction reconstruct(const FrameEvaluator& ev, const EquatorData& d, const std::vector<double>& xs) {
    Reconstruction r;
    for (double x : xs) {
        const PointGeometry pg = point_geometry(ev.at(x));
        r.max_n_error = std::max(r.max_n_error, (pg.s.N - equator_n0(d, x)).norm());
        r.max_w_error = std::max(r.max_w_error, (pg.Ny - equator_w(d, x)).norm());
        const Vec3 ad = su2_to_r3(pg.F * E2() * pg.F.inverse());
        r.max_frame_defect = std::max(r.max_frame_defect, (pg.Ny + ad).norm());
    }
    return r;
}

cplx bhat_birkhoff(const FrameEvaluator& ev, cplx z, double h) {
    const FactorOptions fo = ev.options().factor();
    auto cminus = [&](cplx w) { return birkhoff(ev.ray(w).phi, fo).Cminus; };
    const NormalizedPotentialAt np = normalized_potential_from(cminus, z, h);
    const PointGeometry pg = point_geometry(ev.at(z));
    return np.B() / (pg.gw * pg.gw);
}

}  // namespace nilmax
