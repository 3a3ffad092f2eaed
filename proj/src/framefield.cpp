#include "nilmax/framefield.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include "nilmax/error.hpp"

namespace nilmax {

int thread_count() {
    const char* env = std::getenv("NILMAX_THREADS");
    if (!env) return 1;
    const int n = std::atoi(env);
    return std::clamp(n, 1, 256);
}

void parallel_for(size_t n, const std::function<void(size_t)>& body) {
    const int threads = std::min<int>(thread_count(), static_cast<int>(std::max<size_t>(n, 1)));
    if (threads <= 1) {
        for (size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::mutex mu;
    size_t failed_at = std::numeric_limits<size_t>::max();
    std::exception_ptr failure;
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (size_t i = static_cast<size_t>(t); i < n; i += static_cast<size_t>(threads)) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (i < failed_at) {
                        failed_at = i;
                        failure = std::current_exception();
                    }
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

bool DomainGrid::contains(cplx w) const {
    const cplx d = w - center;
    const double eps = 1e-12 * (half_x + half_y);
    return std::abs(d.real()) <= half_x + eps && std::abs(d.imag()) <= half_y + eps;
}

void DomainGrid::validate() const {
    if (nx < 2 || ny < 2 || !(half_x > 0.0) || !(half_y > 0.0))
        throw Error(ErrorCode::InvalidArgument, "grid needs nx, ny >= 2 and positive half widths");
}

FrameEvaluator::FrameEvaluator(Potential potential, NumericOptions options)
    : potential_(std::move(potential)), options_(options) {
    const int m = options_.samples;
    const int lo = potential_.min_power(), hi = potential_.max_power();
    powers_.assign(static_cast<size_t>(m), std::vector<cplx>(static_cast<size_t>(hi - lo + 1)));
    for (int j = 0; j < m; ++j) {
        const double t = 2.0 * std::numbers::pi * j / m;
        for (int n = lo; n <= hi; ++n) powers_[static_cast<size_t>(j)][static_cast<size_t>(n - lo)] = std::polar(1.0, n * t);
    }
}

UnitCircleSampling FrameEvaluator::initial_samples() const { return loop_to_samples(potential_.initial, options_.samples); }

void FrameEvaluator::rk4(std::vector<Mat2>& phi, cplx z, cplx dz) const {
    const int lo = potential_.min_power(), hi = potential_.max_power();
    const size_t width = static_cast<size_t>(hi - lo + 1);
    auto coeffs_at = [&](cplx w) {
        std::vector<Mat2> c(width, Mat2::Zero());
        for (const auto& t : potential_.terms) c[static_cast<size_t>(t.n - lo)] += t.coeff(w) * dz;
        return c;
    };
    const std::vector<Mat2> c0 = coeffs_at(z), c1 = coeffs_at(z + 0.5 * dz), c2 = coeffs_at(z + dz);
    auto xi = [&](const std::vector<Mat2>& c, size_t j) {
        Mat2 out = Mat2::Zero();
        for (size_t n = 0; n < width; ++n) out += c[n] * powers_[j][n];
        return out;
    };
    for (size_t j = 0; j < phi.size(); ++j) {
        const Mat2 x0 = xi(c0, j), x1 = xi(c1, j), x2 = xi(c2, j);
        const Mat2& p = phi[j];
        const Mat2 k1 = p * x0;
        const Mat2 k2 = (p + 0.5 * k1) * x1;
        const Mat2 k3 = (p + 0.5 * k2) * x1;
        const Mat2 k4 = (p + k3) * x2;
        phi[j] = p + (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    }
}

UnitCircleSampling FrameEvaluator::transport(const UnitCircleSampling& phi, cplx a, cplx b, int steps) const {
    UnitCircleSampling out = phi;
    if (steps <= 0 || a == b) return out;
    const cplx dz = (b - a) / static_cast<double>(steps);
    for (int s = 0; s < steps; ++s) rk4(out.values, a + static_cast<double>(s) * dz, dz);
    return out;
}

namespace {

int steps_for(cplx a, cplx b, double step) {
    return std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / step - 1e-12)));
}

double max_diff(const UnitCircleSampling& x, const UnitCircleSampling& y) {
    double e = 0.0;
    for (size_t j = 0; j < x.values.size(); ++j) e = std::max(e, mat_norm(x.values[j] - y.values[j]));
    return e;
}

double max_norm(const UnitCircleSampling& x) {
    double e = 0.0;
    for (const auto& v : x.values) e = std::max(e, mat_norm(v));
    return e;
}

UnitCircleSampling extrapolate(const UnitCircleSampling& coarse, const UnitCircleSampling& fine) {
    UnitCircleSampling out = fine;
    for (size_t j = 0; j < out.values.size(); ++j) out.values[j] += (fine.values[j] - coarse.values[j]) / 15.0;
    return out;
}

void check_stable(double error, const UnitCircleSampling& phi, double tol, cplx z) {
    const double scale = std::max(1.0, max_norm(phi));
    if (!std::isfinite(error) || !std::isfinite(scale) || error > tol * scale)
        throw Error(ErrorCode::StepUnstable, "integration error estimate " + std::to_string(error) + " at z = " +
                                                 std::to_string(z.real()) + " + " + std::to_string(z.imag()) + "i");
}

}  // namespace

Integrated FrameEvaluator::transport_richardson(const UnitCircleSampling& phi, cplx a, cplx b) const {
    const int n = steps_for(a, b, options_.step);
    const UnitCircleSampling coarse = transport(phi, a, b, n);
    const UnitCircleSampling fine = transport(phi, a, b, 2 * n);
    Integrated out;
    out.error = max_diff(coarse, fine) / 15.0;
    out.phi = extrapolate(coarse, fine);
    check_stable(out.error, out.phi, options_.integration_tol, b);
    return out;
}

Integrated FrameEvaluator::ray(cplx z) const {
    if (z == potential_.z0) return {initial_samples(), 0.0};
    return transport_richardson(initial_samples(), potential_.z0, z);
}

FramePoint FrameEvaluator::frame_from(cplx z, const UnitCircleSampling& phi, double integration_error) const {
    const IwasawaResult iw = iwasawa(phi, options_.factor());
    FramePoint fp;
    fp.z = z;
    fp.F = iw.F;
    fp.P0 = iw.Bplus.at(0);
    fp.integration_error = integration_error;
    fp.factor_residual = iw.residual;
    fp.unitarity = iw.unitarity;
    const Mat2 xm1 = potential_.coeff(-1, z);
    fp.Um1 = fp.P0 * xm1 * fp.P0.inverse();

    // lambda^0 part of P xi P^{-1}; its diagonal is twice the diagonal of U0.
    const UnitCircleSampling ps = loop_to_samples(iw.Bplus, options_.samples);
    const int lo = potential_.min_power(), hi = potential_.max_power();
    std::vector<Mat2> c(static_cast<size_t>(hi - lo + 1));
    for (int n = lo; n <= hi; ++n) c[static_cast<size_t>(n - lo)] = potential_.coeff(n, z);
    cplx m0 = 0.0;
    for (int j = 0; j < options_.samples; ++j) {
        Mat2 x = Mat2::Zero();
        for (size_t n = 0; n < c.size(); ++n) x += c[n] * powers_[static_cast<size_t>(j)][n];
        const Mat2& p = ps.values[static_cast<size_t>(j)];
        m0 += (p * x * p.inverse())(0, 0);
    }
    m0 /= static_cast<double>(options_.samples);
    fp.U0 << 0.5 * m0, 0.0, 0.0, -0.5 * m0;
    return fp;
}

FramePoint FrameEvaluator::at(cplx z) const {
    const Integrated r = ray(z);
    return frame_from(z, r.phi, r.error);
}

std::vector<double> FrameField::integration_residual() const {
    std::vector<double> out(points.size());
    for (size_t i = 0; i < points.size(); ++i) out[i] = points[i].integration_error;
    return out;
}

std::vector<double> FrameField::factorization_residual() const {
    std::vector<double> out(points.size());
    for (size_t i = 0; i < points.size(); ++i) out[i] = points[i].factor_residual;
    return out;
}

namespace {

// One sweep at the given refinement; returns node values.
std::vector<UnitCircleSampling> sweep(const FrameEvaluator& ev, const DomainGrid& grid, int refine) {
    const cplx z0 = ev.potential().z0;
    auto advance = [&](const UnitCircleSampling& phi, cplx a, cplx b) {
        return ev.transport(phi, a, b, refine * steps_for(a, b, ev.options().step));
    };

    std::vector<UnitCircleSampling> anchors(static_cast<size_t>(grid.nx));
    const UnitCircleSampling start = ev.initial_samples();
    const double y0 = z0.imag();
    std::vector<int> right, left;
    for (int j = 0; j < grid.nx; ++j) (grid.z(j, 0).real() >= z0.real() ? right : left).push_back(j);
    std::reverse(left.begin(), left.end());
    for (const auto* order : {&right, &left}) {
        UnitCircleSampling cur = start;
        cplx pos = z0;
        for (int j : *order) {
            const cplx target(grid.z(j, 0).real(), y0);
            cur = advance(cur, pos, target);
            pos = target;
            anchors[static_cast<size_t>(j)] = cur;
        }
    }

    std::vector<UnitCircleSampling> out(grid.size());
    parallel_for(static_cast<size_t>(grid.nx), [&](size_t jj) {
        const int j = static_cast<int>(jj);
        std::vector<int> up, down;
        for (int k = 0; k < grid.ny; ++k) (grid.z(j, k).imag() >= y0 ? up : down).push_back(k);
        std::reverse(down.begin(), down.end());
        for (const auto* order : {&up, &down}) {
            UnitCircleSampling cur = anchors[jj];
            cplx pos(grid.z(j, 0).real(), y0);
            for (int k : *order) {
                const cplx target = grid.z(j, k);
                cur = advance(cur, pos, target);
                pos = target;
                out[grid.index(j, k)] = cur;
            }
        }
    });
    return out;
}

}  // namespace

PhiRaster integrate(const FrameEvaluator& ev, const DomainGrid& grid) {
    grid.validate();
    if (!grid.contains(ev.potential().z0)) throw Error(ErrorCode::InvalidArgument, "grid does not contain the basepoint");
    const std::vector<UnitCircleSampling> coarse = sweep(ev, grid, 1);
    const std::vector<UnitCircleSampling> fine = sweep(ev, grid, 2);
    PhiRaster out;
    out.grid = grid;
    out.phi.resize(grid.size());
    out.error.resize(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
        out.error[i] = max_diff(coarse[i], fine[i]) / 15.0;
        out.phi[i] = extrapolate(coarse[i], fine[i]);
        check_stable(out.error[i], out.phi[i], ev.options().integration_tol,
                     grid.z(static_cast<int>(i % static_cast<size_t>(grid.nx)), static_cast<int>(i / static_cast<size_t>(grid.nx))));
    }
    return out;
}

FrameField frame(const FrameEvaluator& ev, const DomainGrid& grid) {
    PhiRaster raster = integrate(ev, grid);
    FrameField field;
    field.grid = grid;
    field.points.resize(grid.size());
    parallel_for(grid.size(), [&](size_t i) {
        const int j = static_cast<int>(i % static_cast<size_t>(grid.nx));
        const int k = static_cast<int>(i / static_cast<size_t>(grid.nx));
        try {
            field.points[i] = ev.frame_from(grid.z(j, k), raster.phi[i], raster.error[i]);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::TruncationInsufficient) throw;
            throw Error(e.code(), std::string(e.what()) + " at grid index (" + std::to_string(j) + ", " + std::to_string(k) + ")");
        }
    });
    field.phi = std::move(raster.phi);
    return field;
}

UnitCircleSampling phi_near(const FrameEvaluator& ev, const FrameField& field, cplx z) {
    const DomainGrid& g = field.grid;
    if (field.phi.empty() || !g.contains(z)) return ev.ray(z).phi;
    const cplx d = z - g.z(0, 0);
    const int j = std::clamp(static_cast<int>(std::lround(d.real() / g.hx())), 0, g.nx - 1);
    const int k = std::clamp(static_cast<int>(std::lround(d.imag() / g.hy())), 0, g.ny - 1);
    return ev.transport_richardson(field.phi[g.index(j, k)], g.z(j, k), z).phi;
}

FramePoint frame_near(const FrameEvaluator& ev, const FrameField& field, cplx z) {
    return ev.frame_from(z, phi_near(ev, field, z));
}

MaurerCartanReport maurer_cartan_check(const FrameField& field, int lambda_samples) {
    const DomainGrid& g = field.grid;
    const int m = lambda_samples;
    std::vector<cplx> lam(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) lam[static_cast<size_t>(j)] = std::polar(1.0, 2.0 * std::numbers::pi * j / m);

    std::vector<std::vector<Mat2>> Fs(g.size());
    parallel_for(g.size(), [&](size_t i) {
        Fs[i].resize(static_cast<size_t>(m));
        for (int j = 0; j < m; ++j) Fs[i][static_cast<size_t>(j)] = field.points[i].F_at(lam[static_cast<size_t>(j)]);
    });

    MaurerCartanReport rep;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    rep.structural.assign(g.size(), nan);
    rep.flatness.assign(g.size(), nan);
    const double hx = g.hx(), hy = g.hy();
    auto F = [&](int j, int k, int s) -> const Mat2& { return Fs[g.index(j, k)][static_cast<size_t>(s)]; };
    auto ax = [&](int j, int k, int s) -> Mat2 { return F(j, k, s).inverse() * (F(j + 1, k, s) - F(j - 1, k, s)) / (2 * hx); };
    auto ay = [&](int j, int k, int s) -> Mat2 { return F(j, k, s).inverse() * (F(j, k + 1, s) - F(j, k - 1, s)) / (2 * hy); };

    parallel_for(g.size(), [&](size_t i) {
        const int j = static_cast<int>(i % static_cast<size_t>(g.nx));
        const int k = static_cast<int>(i / static_cast<size_t>(g.nx));
        if (j < 1 || k < 1 || j + 1 >= g.nx || k + 1 >= g.ny) return;
        std::vector<Mat2> U(static_cast<size_t>(m)), V(static_cast<size_t>(m));
        double flat = 0.0;
        for (int s = 0; s < m; ++s) {
            const Mat2 Ax = ax(j, k, s), Ay = ay(j, k, s);
            U[static_cast<size_t>(s)] = 0.5 * (Ax - cplx(0, 1) * Ay);
            V[static_cast<size_t>(s)] = 0.5 * (Ax + cplx(0, 1) * Ay);
            if (j >= 2 && k >= 2 && j + 2 < g.nx && k + 2 < g.ny) {
                const Mat2 dAy = (ay(j + 1, k, s) - ay(j - 1, k, s)) / (2 * hx);
                const Mat2 dAx = (ax(j, k + 1, s) - ax(j, k - 1, s)) / (2 * hy);
                flat = std::max(flat, mat_norm(dAy - dAx + Ax * Ay - Ay * Ax));
            }
        }
        const std::vector<Mat2> uc = sample_coefficients(U), vc = sample_coefficients(V);
        double worst = 0.0;
        for (int n = 0; n < m; ++n) {
            const int idx = n <= m / 2 ? n : n - m;
            const Mat2& u = uc[static_cast<size_t>(n)];
            const Mat2& v = vc[static_cast<size_t>(n)];
            if (idx == -1) worst = std::max({worst, std::abs(u(0, 0)), std::abs(u(1, 1))});
            else if (idx == 0) worst = std::max({worst, std::abs(u(0, 1)), std::abs(u(1, 0)), std::abs(v(0, 1)), std::abs(v(1, 0))});
            else worst = std::max(worst, mat_norm(u));
            if (idx == 1) worst = std::max({worst, std::abs(v(0, 0)), std::abs(v(1, 1))});
            else if (idx != 0) worst = std::max(worst, mat_norm(v));
        }
        rep.structural[i] = worst;
        if (j >= 2 && k >= 2 && j + 2 < g.nx && k + 2 < g.ny) rep.flatness[i] = flat;
    });
    for (size_t i = 0; i < g.size(); ++i) {
        if (!std::isnan(rep.structural[i])) rep.max_structural = std::max(rep.max_structural, rep.structural[i]);
        if (!std::isnan(rep.flatness[i])) rep.max_flatness = std::max(rep.max_flatness, rep.flatness[i]);
    }
    return rep;
}

}  // namespace nilmax
