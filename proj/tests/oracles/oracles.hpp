#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nilmax/factor.hpp"
#include "nilmax/nilgeom.hpp"
#include "nilmax/potentials.hpp"

namespace nilmax::oracles {

struct OracleReport {
    std::string name;
    double max_deviation = 0.0;
    double tolerance = 0.0;
    int instances = 0;
    bool pass() const { return instances >= 100 && max_deviation < tolerance; }
};

struct DenseIwasawa {
    TwistedLoop F;
    TwistedLoop Bplus;
    double residual = 0.0;
    double unitarity = 0.0;
    double tail = 0.0;
};

// QL factorization of the multiplication operator of Phi restricted to the plus space, cut at
// `depth` columns. Throws TruncationInsufficient when a factor has mass above tol beyond `degree`.
DenseIwasawa dense_iwasawa(const TwistedLoop& phi, int degree = 16, int depth = 64, double tol = 1e-8);

// Largest coefficient difference over all powers.
double loop_distance(const TwistedLoop& a, const TwistedLoop& b);

// Five-point complex difference of lambda |-> a(lambda).
Mat2 fd_dlambda(const TwistedLoop& a, cplx lambda, double h = 1e-3);

// Phi at the end of a polygonal path from the basepoint, fixed-step RK4 at the given circle samples.
std::vector<Mat2> path_integrate(const Potential& p, const std::vector<cplx>& vertices, int steps_per_unit,
                                 const std::vector<cplx>& lambdas);

// Mean curvature from finite-difference fundamental forms of a parametrized surface.
double mean_curvature_fd(const std::function<Eigen::Vector3d(double, double)>& f, double u, double v, double h);

// Grid of a parametrized patch [u0, u0 + w] x [v0, v0 + w] with n x n nodes.
PointGrid sample_patch(const std::function<Eigen::Vector3d(double, double)>& f, double u0, double v0, double w, int n);

Eigen::Vector3d sphere(double R, double u, double v);
Eigen::Vector3d cylinder(double R, double u, double v);

}  // namespace nilmax::oracles
