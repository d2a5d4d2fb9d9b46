#ifndef LPCVT_SIMPLEX_GRADIENT_HPP
#define LPCVT_SIMPLEX_GRADIENT_HPP

#include "lpcvt/simplex.hpp"

namespace lpcvt {

/// Covector rows are stored as Vec3; they act by dot product.
using Covector = Eigen::Vector3d;

/// Gradient of one simplex's energy with respect to its untransformed
/// vertices. d_apex + sum(d_vertices) = 0 when the frame is held fixed
/// (common translations leave U_j unchanged).
struct SimplexVertexGradient {
    Covector d_apex = Covector::Zero();
    std::array<Covector, 3> d_vertices = {Covector::Zero(), Covector::Zero(), Covector::Zero()};
};

/// d(energy_sum)/dU_j: for each j the sum over exponent tuples with a
/// positive j-exponent of that exponent times the power-reduced star
/// product.
std::array<Covector, 3> energy_sum_gradient(const std::array<StarVector, 3>& u, int p);

/// Gradient of the signed volume (1/6) U1 . (U2 x U3) of the tetrahedron
/// with edges U_j from the origin.
std::array<Covector, 3> volume_gradient(const std::array<StarVector, 3>& u);

/// Gradient of the area of triangle (U1, U2, U3); throws
/// NearDegenerate when the triangle normal vanishes.
std::array<Covector, 3> area_gradient(const std::array<StarVector, 3>& u);

/// Full closed-form gradient of simplex_energy with the frame held
/// constant: assembles dF/dU from the product rule on measure * sum,
/// then pushes through U_j = M_T (C_j - apex). Degenerate simplices get
/// an all-zero gradient.
SimplexVertexGradient simplex_energy_gradient(const IntegrationSimplex& s, int p);

}  // namespace lpcvt

#endif
