#pragma once

#include <vector>

#include "nilmax/framefield.hpp"
#include "nilmax/nilgeom.hpp"

namespace nilmax {

// su(2) basis with [Ei, Ej] = cross product.
const Mat2& E1();
const Mat2& E2();
const Mat2& E3();
Vec3 su2_to_r3(const Mat2& x);
Mat2 r3_to_su2(const Vec3& v);

struct ExtendedComplex {
    cplx value{0.0, 0.0};
    bool infinite = false;
};

// Stereographic charts of the unit sphere: from (0,0,1) and from (0,0,-1).
ExtendedComplex north_chart(const Vec3& n);
ExtendedComplex south_chart(const Vec3& n);

struct Spinors {
    cplx psi1{0.0, 0.0};
    cplx psi2{0.0, 0.0};
};

Vec3 gauss_map(const Mat2& F);
// Normal Gauss map g = psi1 / conj(psi2) = F11 / conj(F12).
ExtendedComplex normal_gauss_map(const Mat2& F);
// Spinors of the frame in the gauge where U_{12} = p is real; scale fixed by h = 4|p|.
Spinors spinors_from_frame(const Mat2& F, cplx p);

struct SurfaceSample {
    cplx z{0.0, 0.0};
    cplx psi1{0.0, 0.0}, psi2{0.0, 0.0};
    ExtendedComplex g;
    cplx omega{0.0, 0.0};
    cplx B{0.0, 0.0};
    double h = 0.0;
    double eu = 0.0;
    Vec3 N = Vec3::Zero();
    Vec3 f_cmc = Vec3::Zero();
    NilPoint f_nil;
};

// Everything computable at a single frame point for the family member lambda.
struct PointGeometry {
    SurfaceSample s;
    Mat2 F, U, V;
    Vec3 Nx, Ny;           // analytic derivatives of N
    Vec3 fx, fy;           // analytic derivatives of f_cmc
    cplx g_z, g_zb;        // analytic derivatives of g (finite chart only)
    cplx gw;               // g * omega, pole free
    cplx phi3;
};

PointGeometry point_geometry(const FramePoint& fp, cplx lambda = 1.0);

double induced_metric(const SurfaceSample& s);
double relation_defect(const SurfaceSample& s);  // |e^u + 4|phi3|^2 - h^2| / h^2
double spinor_metric_defect(const SurfaceSample& s);

struct SurfaceRaster {
    DomainGrid grid;
    cplx lambda{1.0, 0.0};
    std::vector<PointGeometry> points;

    const PointGeometry& at(int j, int k) const { return points[grid.index(j, k)]; }
};

SurfaceRaster surface_raster(const FrameField& field, cplx lambda = 1.0);

struct EuclideanRasters {
    std::vector<Vec3> f_cmc;
    std::vector<Vec3> N;
};
EuclideanRasters sym_euclidean(const FrameField& field);
std::vector<NilPoint> sym_nil(const FrameField& field, cplx lambda0);

PointGrid nil_point_grid(const SurfaceRaster& r);
PointGrid cmc_point_grid(const SurfaceRaster& r);

// Finite-difference omega and B from a g raster, per point in the chart where |g| <= 1.
struct OmegaB {
    std::vector<cplx> omega;
    std::vector<cplx> B;
    std::vector<bool> valid;  // false on the boundary
};
OmegaB omega_and_B(const DomainGrid& grid, const std::vector<ExtendedComplex>& g, double holomorphic_tol = 1e-8);

// |g_{z zbar} - 2 conj(g) g_z g_zbar / (1 + |g|^2)| by centered differences; NaN on the boundary.
std::vector<double> harmonicity_residual(const DomainGrid& grid, const std::vector<ExtendedComplex>& g);

}  // namespace nilmax
