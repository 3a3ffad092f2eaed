#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nilmax/surfaces.hpp"

namespace nilmax {

enum class SingularKind { Degenerate, NotFront, CuspidalEdge, Swallowtail, CuspidalCrossCap };

const char* kind_name(SingularKind k);

struct ClassifyOptions {
    double tol = 1e-4;       // nonzero threshold
    double zero_tol = 1e-6;  // zero threshold
    double stencil_h = 2e-3;
};

// Normalized data (Re B, Im B, Im B', Re B') in the coordinate with g*omega = 1, d(g*omega) = 0.
struct Diagnostics {
    double re_bhat = 0.0;
    double im_bhat = 0.0;
    double im_bhat_prime = 0.0;
    double re_bhat_prime = 0.0;
};

// Criteria phrased through Q = g_z / (g^2 omega) and R = (Im Q)_z / (log|g|)_z.
struct RawCriteria {
    double re_q = 0.0;
    double im_q_plus_2 = 0.0;
    double im_r = 0.0;
    double re_r = 0.0;
};

struct Decision {
    SingularKind kind = SingularKind::CuspidalEdge;
    bool decided = false;
    double margin = 0.0;
};

struct SingularPoint {
    cplx z{0.0, 0.0};
    SingularKind kind = SingularKind::CuspidalEdge;
    bool decided = false;  // false: too close to call, kind is tentative
    Diagnostics diagnostics;
    double margin = 0.0;
    RawCriteria raw;
    Decision raw_decision;
    cplx bhat{0.0, 0.0};
    cplx bhat_prime{0.0, 0.0};
    double bprime_crosscheck = 0.0;  // |finite-difference B' - closed-form B'|
    double n3 = 0.0;          // third component of N (zero on the singular set)
    Vec3 tangent = Vec3::Zero();  // d f_cmc along the oriented singular curve
};

struct SingularCurve {
    std::vector<SingularPoint> points;
    bool closed = false;
};

// Decision from normalized diagnostics.
Decision decide_normalized(const Diagnostics& d, const ClassifyOptions& opt);
// Decision from the raw quantities.
Decision decide_raw(const RawCriteria& r, const ClassifyOptions& opt);

class SingularAnalyzer {
public:
    SingularAnalyzer(const FrameEvaluator& ev, const FrameField* field = nullptr, cplx lambda = 1.0,
                     ClassifyOptions opt = {});

    FramePoint frame(cplx z) const;
    PointGeometry geometry(cplx z) const;
    double n3(cplx z) const;
    // B at the family member lambda, closed form.
    cplx B(cplx z) const;
    cplx B_prime(cplx z) const;

    SingularPoint classify(cplx z) const;
    // As classify, throwing TooCloseToCall when the label is not decided.
    SingularPoint classify_strict(cplx z) const;
    // Unit tangent of the equatorial curve image, oriented by the singular-curve convention.
    Vec3 equatorial_tangent(cplx z) const;

    std::vector<SingularCurve> trace(const SurfaceRaster& raster) const;
    // Newton refinement of N3 = 0 together with Im Bhat = 0 (cross_cap) or Re Bhat = 1.
    std::optional<cplx> refine_special(cplx start, bool cross_cap) const;
    // Special points located between consecutive curve vertices, refined and classified.
    std::vector<SingularPoint> special_points(const SingularCurve& curve) const;

    const ClassifyOptions& options() const { return opt_; }
    cplx lambda() const { return lambda_; }

    // i (conj(g_z / g) + g_zbar / g), tangent to |g| = 1.
    static cplx curve_direction(const PointGeometry& pg);
    static Vec3 tangent_of(const PointGeometry& pg);

private:
    const FrameEvaluator& ev_;
    const FrameField* field_;
    cplx lambda_;
    ClassifyOptions opt_;

    cplx bhat_at(cplx z) const;
    double root_on_segment(cplx a, cplx b, double fa, double fb) const;
};

// |N3| below tol: the point lies on the singular set.
bool on_singular_set(const SingularPoint& p, double tol = 1e-6);
// Report label: "Regular" off the singular set, "TooCloseToCall" when undecided, else the kind.
std::string point_label(const SingularPoint& p);

// Angle (radians) between a tangent vector and the E1E2-plane.
double tangent_elevation(const Vec3& t);

struct TangentCheck {
    std::vector<double> angle;  // per point
};
TangentCheck equatorial_tangent_check(const SingularCurve& curve);

// Sign changes of the tangent's E3 component along the curve (cyclic if closed);
// components below 1e-6 count as zero.
int count_boundary_crosscaps(const SingularCurve& curve);
// Sign changes ignoring entries with |v| <= zero.
int count_sign_changes(const std::vector<double>& values, bool cyclic, double zero = 0.0);

// rho = (|g|^2 - 1)|omega|^2 sqrt((1 + |g|^2)^2 + 4|g|^2)
double degeneracy_rho(const PointGeometry& pg);

}  // namespace nilmax
