#pragma once

#include <vector>

#include <Eigen/Dense>

namespace nilmax {

struct NilPoint {
    double x1 = 0.0, x2 = 0.0, x3 = 0.0;
    Eigen::Vector3d vec() const { return {x1, x2, x3}; }
    static NilPoint from(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }
};

struct NilTangent {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0;
    double lorentz_norm2() const { return c1 * c1 + c2 * c2 - c3 * c3; }
    Eigen::Vector3d vec() const { return {c1, c2, c3}; }
};

NilPoint nil_multiply(const NilPoint& p, const NilPoint& q);
NilPoint nil_inverse(const NilPoint& p);

// Coordinate components at p -> left-invariant frame e1, e2, e3.
NilTangent coordinate_to_frame(const NilPoint& p, const Eigen::Vector3d& v_coord);
Eigen::Vector3d frame_to_coordinate(const NilPoint& p, const NilTangent& t);

double g2_metric(const NilPoint& p, const Eigen::Vector3d& u, const Eigen::Vector3d& v);

// Differential of left translation by q acting on a coordinate vector at p.
Eigen::Vector3d left_translate_vector(const NilPoint& q, const NilPoint& p, const Eigen::Vector3d& u);

// Regular grid of points with spacing h, index (j, k) -> pts[k * nx + j].
struct PointGrid {
    int nx = 0, ny = 0;
    double h = 0.0;
    std::vector<Eigen::Vector3d> pts;
    const Eigen::Vector3d& at(int j, int k) const { return pts[static_cast<size_t>(k * nx + j)]; }
};

enum class AmbientModel { Nil, Euclidean };

struct StencilGeometry {
    double H = 0.0;             // mean curvature
    double det_first = 0.0;     // determinant of the discrete first fundamental form
    double conformality = 0.0;  // |<f_z, f_z>| / <f_z, conj f_z>
};

// Second-order stencil at (j, k). Euclidean mode drops the connection and uses the identity metric.
StencilGeometry stencil_geometry(const PointGrid& grid, int j, int k, AmbientModel model = AmbientModel::Nil);
double nil_mean_curvature(const PointGrid& grid, int j, int k, AmbientModel model = AmbientModel::Nil);

}  // namespace nilmax
