#include "nilmax/singular.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "nilmax/error.hpp"

namespace nilmax {

namespace {

const cplx I1(0.0, 1.0);

enum class Zone { Zero, NonZero, Ambiguous };

Zone zone(double x, const ClassifyOptions& opt) {
    const double a = std::abs(x);
    if (a <= opt.zero_tol) return Zone::Zero;
    if (a >= opt.tol) return Zone::NonZero;
    return Zone::Ambiguous;
}

// Shared taxonomy: d1 and d2 select the case, d3_st / d3_cc decide swallowtail / cross-cap.
Decision decide(double d1, double d2, double d3_st, double d3_cc, const ClassifyOptions& opt) {
    const Zone z1 = zone(d1, opt), z2 = zone(d2, opt);
    Decision out;
    auto undecided = [&](std::initializer_list<double> xs) {
        out.decided = false;
        out.margin = std::numeric_limits<double>::infinity();
        for (double x : xs) out.margin = std::min(out.margin, std::abs(x));
        return out;
    };
    if (z1 == Zone::Ambiguous || z2 == Zone::Ambiguous) {
        std::vector<double> amb;
        if (z1 == Zone::Ambiguous) amb.push_back(d1);
        if (z2 == Zone::Ambiguous) amb.push_back(d2);
        out.decided = false;
        out.margin = *std::min_element(amb.begin(), amb.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
        out.margin = std::abs(out.margin);
        return out;
    }
    out.decided = true;
    if (z1 == Zone::Zero && z2 == Zone::Zero) {
        out.kind = SingularKind::Degenerate;
        out.margin = 0.0;
        return out;
    }
    if (z1 == Zone::NonZero && z2 == Zone::NonZero) {
        out.kind = SingularKind::CuspidalEdge;
        out.margin = std::min(std::abs(d1), std::abs(d2));
        return out;
    }
    if (z1 == Zone::Zero) {
        const Zone z3 = zone(d3_st, opt);
        out.kind = SingularKind::Swallowtail;
        if (z3 != Zone::NonZero) return undecided({d3_st});
        out.margin = std::min(std::abs(d2), std::abs(d3_st));
        return out;
    }
    // A vanishing derivative test is indistinguishable from a small one: the point is
    // reported undecided with NotFront as its tentative kind.
    const Zone z3 = zone(d3_cc, opt);
    out.kind = z3 == Zone::Zero ? SingularKind::NotFront : SingularKind::CuspidalCrossCap;
    if (z3 != Zone::NonZero) return undecided({d3_cc});
    out.margin = std::min(std::abs(d1), std::abs(d3_cc));
    return out;
}

cplx d4(cplx m2, cplx m1, cplx p1, cplx p2, double h) { return (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h); }

}  // namespace

const char* kind_name(SingularKind k) {
    switch (k) {
        case SingularKind::Degenerate: return "Degenerate";
        case SingularKind::NotFront: return "NotFront";
        case SingularKind::CuspidalEdge: return "CuspidalEdge";
        case SingularKind::Swallowtail: return "Swallowtail";
        case SingularKind::CuspidalCrossCap: return "CuspidalCrossCap";
    }
    return "Unknown";
}

Decision decide_normalized(const Diagnostics& d, const ClassifyOptions& opt) {
    return decide(d.re_bhat - 1.0, d.im_bhat, d.im_bhat_prime, d.im_bhat_prime, opt);
}

Decision decide_raw(const RawCriteria& r, const ClassifyOptions& opt) {
    return decide(r.im_q_plus_2, r.re_q, r.im_r, r.re_r, opt);
}

SingularAnalyzer::SingularAnalyzer(const FrameEvaluator& ev, const FrameField* field, cplx lambda, ClassifyOptions opt)
    : ev_(ev), field_(field), lambda_(lambda), opt_(opt) {}

FramePoint SingularAnalyzer::frame(cplx z) const { return field_ ? frame_near(ev_, *field_, z) : ev_.at(z); }

PointGeometry SingularAnalyzer::geometry(cplx z) const { return point_geometry(frame(z), lambda_); }

double SingularAnalyzer::n3(cplx z) const {
    const Mat2 F = frame(z).F_at(lambda_);
    return std::norm(F(0, 0)) - std::norm(F(0, 1));
}

cplx SingularAnalyzer::B(cplx z) const { return ev_.potential().B(z) / (lambda_ * lambda_); }

cplx SingularAnalyzer::B_prime(cplx z) const { return ev_.potential().B_derivative(z) / (lambda_ * lambda_); }

cplx SingularAnalyzer::bhat_at(cplx z) const {
    const PointGeometry pg = geometry(z);
    return pg.s.B / (pg.gw * pg.gw);
}

SingularPoint SingularAnalyzer::classify(cplx z) const {
    const double h = opt_.stencil_h;
    const PointGeometry c = geometry(z);
    std::array<PointGeometry, 4> gx, gy;
    const std::array<double, 4> offs{-2.0, -1.0, 1.0, 2.0};
    for (size_t i = 0; i < 4; ++i) {
        gx[i] = geometry(z + offs[i] * h);
        gy[i] = geometry(z + I1 * (offs[i] * h));
    }
    auto dz = [&](auto f) {
        const cplx fx = d4(f(gx[0]), f(gx[1]), f(gx[2]), f(gx[3]), h);
        const cplx fy = d4(f(gy[0]), f(gy[1]), f(gy[2]), f(gy[3]), h);
        return 0.5 * (fx - I1 * fy);
    };

    SingularPoint sp;
    sp.z = z;
    sp.n3 = c.s.N[2];

    // Normalized route.
    const cplx G0 = c.gw;
    const cplx G1 = dz([](const PointGeometry& p) { return p.gw; });
    const cplx B0 = c.s.B;
    const cplx B1 = d4(gx[0].s.B, gx[1].s.B, gx[2].s.B, gx[3].s.B, h);
    const cplx s = 1.0 / G0;
    sp.bhat = B0 * s * s;
    sp.bhat_prime = s * s * s * (B1 - 2.0 * B0 * G1 / G0);
    sp.bprime_crosscheck = std::abs(B1 - B_prime(z));
    sp.diagnostics = {sp.bhat.real(), sp.bhat.imag(), sp.bhat_prime.imag(), sp.bhat_prime.real()};
    const Decision dn = decide_normalized(sp.diagnostics, opt_);
    sp.kind = dn.kind;
    sp.decided = dn.decided;
    sp.margin = dn.margin;

    // Raw route.
    auto q_of = [](const PointGeometry& p) { return p.g_z / (p.s.g.value * p.gw); };
    const cplx Q = q_of(c);
    const cplx imq_z = dz([&](const PointGeometry& p) { return cplx(q_of(p).imag()); });
    const cplx g = c.s.g.value;
    const cplx loggz = 0.5 * (c.g_z / g + std::conj(c.g_zb) / std::conj(g));
    const cplx R = imq_z / loggz;
    sp.raw = {Q.real(), Q.imag() + 2.0, R.imag(), R.real()};
    sp.raw_decision = decide_raw(sp.raw, opt_);

    sp.tangent = tangent_of(c);
    return sp;
}

SingularPoint SingularAnalyzer::classify_strict(cplx z) const {
    SingularPoint sp = classify(z);
    if (!sp.decided)
        throw Error(ErrorCode::TooCloseToCall, "margin " + std::to_string(sp.margin) + " at z = (" +
                                                   std::to_string(z.real()) + ", " + std::to_string(z.imag()) + ")");
    return sp;
}

cplx SingularAnalyzer::curve_direction(const PointGeometry& pg) {
    const cplx g = pg.s.g.value;
    return I1 * (std::conj(pg.g_z / g) + pg.g_zb / g);
}

Vec3 SingularAnalyzer::tangent_of(const PointGeometry& pg) {
    const cplx d = curve_direction(pg);
    const Vec3 t = pg.fx * d.real() + pg.fy * d.imag();
    const double n = t.norm();
    return n > 0.0 ? Vec3(t / n) : t;
}

Vec3 SingularAnalyzer::equatorial_tangent(cplx z) const { return tangent_of(geometry(z)); }

double SingularAnalyzer::root_on_segment(cplx a, cplx b, double fa, double fb) const {
    // Illinois false position on t in [0, 1].
    double t0 = 0.0, t1 = 1.0;
    int side = 0;
    double t = fa / (fa - fb);
    for (int it = 0; it < 30; ++it) {
        t = (t0 * fb - t1 * fa) / (fb - fa);
        const double ft = n3(a + t * (b - a));
        if (std::abs(ft) < 1e-13 || std::abs(t1 - t0) < 1e-13) break;
        if ((ft >= 0.0) == (fb >= 0.0)) {
            t1 = t;
            fb = ft;
            if (side == -1) fa *= 0.5;
            side = -1;
        } else {
            t0 = t;
            fa = ft;
            if (side == 1) fb *= 0.5;
            side = 1;
        }
    }
    return t;
}

std::vector<SingularCurve> SingularAnalyzer::trace(const SurfaceRaster& raster) const {
    if (std::abs(raster.lambda - lambda_) > 1e-14)
        throw Error(ErrorCode::InvalidArgument, "raster and analyzer use different lambda");
    const DomainGrid& G = raster.grid;
    const int nx = G.nx, ny = G.ny;
    // Values within rounding of zero count as zero, and zero counts as positive.
    auto val = [&](int j, int k) {
        const double v = raster.at(j, k).s.N[2];
        return std::abs(v) < 1e-12 ? 0.0 : v;
    };
    auto pos = [&](int j, int k) { return val(j, k) >= 0.0; };
    const long H = static_cast<long>(nx - 1) * ny;
    auto hedge = [&](int j, int k) { return static_cast<long>(k) * (nx - 1) + j; };
    auto vedge = [&](int j, int k) { return H + static_cast<long>(k) * nx + j; };

    std::map<long, std::vector<long>> adj;
    auto link = [&](long a, long b) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    };
    for (int k = 0; k + 1 < ny; ++k) {
        for (int j = 0; j + 1 < nx; ++j) {
            const bool s0 = pos(j, k), s1 = pos(j + 1, k), s2 = pos(j + 1, k + 1), s3 = pos(j, k + 1);
            const long e0 = hedge(j, k), e1 = vedge(j + 1, k), e2 = hedge(j, k + 1), e3 = vedge(j, k);
            std::vector<long> cut;
            if (s0 != s1) cut.push_back(e0);
            if (s1 != s2) cut.push_back(e1);
            if (s2 != s3) cut.push_back(e2);
            if (s3 != s0) cut.push_back(e3);
            if (cut.size() == 2) {
                link(cut[0], cut[1]);
            } else if (cut.size() == 4) {
                const double centre = 0.25 * (val(j, k) + val(j + 1, k) + val(j + 1, k + 1) + val(j, k + 1));
                if ((centre >= 0.0) == s0) {
                    link(e0, e1);
                    link(e2, e3);
                } else {
                    link(e3, e0);
                    link(e1, e2);
                }
            }
        }
    }

    auto endpoints = [&](long e, int& ja, int& ka, int& jb, int& kb) {
        if (e < H) {
            ja = static_cast<int>(e % (nx - 1));
            ka = static_cast<int>(e / (nx - 1));
            jb = ja + 1;
            kb = ka;
        } else {
            const long r = e - H;
            ja = static_cast<int>(r % nx);
            ka = static_cast<int>(r / nx);
            jb = ja;
            kb = ka + 1;
        }
    };

    std::vector<long> ids;
    for (const auto& kv : adj) ids.push_back(kv.first);
    std::map<long, cplx> where;
    {
        std::vector<cplx> zs(ids.size());
        parallel_for(ids.size(), [&](size_t i) {
            int ja, ka, jb, kb;
            endpoints(ids[i], ja, ka, jb, kb);
            const cplx a = G.z(ja, ka), b = G.z(jb, kb);
            const double t = root_on_segment(a, b, val(ja, ka), val(jb, kb));
            zs[i] = a + t * (b - a);
        });
        for (size_t i = 0; i < ids.size(); ++i) where[ids[i]] = zs[i];
    }

    std::map<long, bool> seen;
    std::vector<std::vector<long>> chains;
    std::vector<bool> closed;
    auto walk = [&](long start) {
        std::vector<long> chain{start};
        seen[start] = true;
        long prev = -1, cur = start;
        bool cyc = false;
        while (true) {
            long next = -1;
            for (long n : adj[cur]) {
                if (n == prev) continue;
                if (n == start && chain.size() > 2) {
                    cyc = true;
                    break;
                }
                if (!seen[n]) {
                    next = n;
                    break;
                }
            }
            if (cyc || next < 0) break;
            chain.push_back(next);
            seen[next] = true;
            prev = cur;
            cur = next;
        }
        chains.push_back(chain);
        closed.push_back(cyc);
    };
    for (long id : ids)
        if (!seen[id] && adj[id].size() == 1) walk(id);
    for (long id : ids)
        if (!seen[id]) walk(id);

    std::vector<SingularCurve> out;
    for (size_t c = 0; c < chains.size(); ++c) {
        SingularCurve curve;
        curve.closed = closed[c];
        curve.points.resize(chains[c].size());
        parallel_for(chains[c].size(), [&](size_t i) { curve.points[i] = classify(where[chains[c][i]]); });
        if (curve.points.size() >= 2) {
            const PointGeometry g0 = geometry(curve.points[0].z);
            const cplx step = curve.points[1].z - curve.points[0].z;
            if ((std::conj(step) * curve_direction(g0)).real() < 0.0) {
                std::reverse(curve.points.begin(), curve.points.end());
            }
        }
        out.push_back(std::move(curve));
    }
    return out;
}

std::optional<cplx> SingularAnalyzer::refine_special(cplx start, bool cross_cap) const {
    auto F = [&](cplx z) {
        const PointGeometry pg = geometry(z);
        const cplx bh = pg.s.B / (pg.gw * pg.gw);
        return Eigen::Vector2d(pg.s.N[2], cross_cap ? bh.imag() : bh.real() - 1.0);
    };
    cplx z = start;
    const double d = 1e-6;
    for (int it = 0; it < 20; ++it) {
        const Eigen::Vector2d f = F(z);
        if (f.norm() < 1e-11) return z;
        Eigen::Matrix2d J;
        J.col(0) = (F(z + d) - F(z - d)) / (2 * d);
        J.col(1) = (F(z + I1 * d) - F(z - I1 * d)) / (2 * d);
        const Eigen::Vector2d step = J.fullPivLu().solve(-f);
        if (!step.allFinite()) return std::nullopt;
        z += cplx(step[0], step[1]);
        if (std::abs(z - start) > 0.1) return std::nullopt;
    }
    return F(z).norm() < 1e-9 ? std::optional<cplx>(z) : std::nullopt;
}

std::vector<SingularPoint> SingularAnalyzer::special_points(const SingularCurve& curve) const {
    std::vector<SingularPoint> out;
    const size_t n = curve.points.size();
    if (n < 2) return out;
    const size_t pairs = curve.closed ? n : n - 1;
    for (int pass = 0; pass < 2; ++pass) {
        const bool cc = pass == 0;
        for (size_t i = 0; i < pairs; ++i) {
            const SingularPoint& a = curve.points[i];
            const SingularPoint& b = curve.points[(i + 1) % n];
            const double fa = cc ? a.diagnostics.im_bhat : a.diagnostics.re_bhat - 1.0;
            const double fb = cc ? b.diagnostics.im_bhat : b.diagnostics.re_bhat - 1.0;
            if ((fa < 0.0) == (fb < 0.0)) continue;
            const double t = fa / (fa - fb);
            const auto z = refine_special(a.z + t * (b.z - a.z), cc);
            if (!z) continue;
            bool dup = false;
            for (const auto& p : out) dup = dup || std::abs(p.z - *z) < 1e-7;
            if (!dup) out.push_back(classify(*z));
        }
    }
    return out;
}

double tangent_elevation(const Vec3& t) { return std::atan2(std::abs(t[2]), std::hypot(t[0], t[1])); }

TangentCheck equatorial_tangent_check(const SingularCurve& curve) {
    TangentCheck out;
    for (const auto& p : curve.points) out.angle.push_back(tangent_elevation(p.tangent));
    return out;
}

bool on_singular_set(const SingularPoint& p, double tol) { return std::abs(p.n3) <= tol; }

std::string point_label(const SingularPoint& p) {
    if (!on_singular_set(p)) return "Regular";
    return p.decided ? kind_name(p.kind) : "TooCloseToCall";
}

int count_sign_changes(const std::vector<double>& values, bool cyclic, double zero) {
    std::vector<double> nz;
    for (double v : values)
        if (std::abs(v) > zero) nz.push_back(v);
    int count = 0;
    for (size_t i = 0; i + 1 < nz.size(); ++i) count += (nz[i] < 0.0) != (nz[i + 1] < 0.0);
    if (cyclic && nz.size() > 1) count += (nz.back() < 0.0) != (nz.front() < 0.0);
    return count;
}

int count_boundary_crosscaps(const SingularCurve& curve) {
    constexpr double kTangentZero = 1e-6;
    std::vector<double> t3;
    for (const auto& p : curve.points) {
        if (p.decided && p.kind == SingularKind::Degenerate)
            throw Error(ErrorCode::DegenerateBoundary, "degenerate point on the boundary curve");
        t3.push_back(p.tangent[2]);
    }
    return count_sign_changes(t3, curve.closed, kTangentZero);
}

double degeneracy_rho(const PointGeometry& pg) {
    const double g2 = std::norm(pg.s.g.value);
    return (g2 - 1.0) * std::norm(pg.s.omega) * std::sqrt((1.0 + g2) * (1.0 + g2) + 4.0 * g2);
}

}  // namespace nilmax
