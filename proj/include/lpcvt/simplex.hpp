#ifndef LPCVT_SIMPLEX_HPP
#define LPCVT_SIMPLEX_HPP

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "lpcvt/aniso.hpp"
#include "lpcvt/provenance.hpp"

namespace lpcvt {

/// Vector operated on componentwise by the star product.
using StarVector = Eigen::Vector3d;

/// Componentwise product [x1*x2, y1*y2, z1*z2].
inline StarVector star_product(const StarVector& a, const StarVector& b) {
    return a.cwiseProduct(b);
}

/// Componentwise a-th power; a = 0 yields (1,1,1), the empty product.
StarVector star_power(const StarVector& v, int a);

/// x + y + z.
inline double component_sum(const StarVector& v) { return v[0] + v[1] + v[2]; }

/// One term of the multiset sum: non-negative exponents, one per simplex
/// vertex, summing to p.
using ExponentTuple = std::vector<int>;

/// All tuples of n_vertices non-negative integers summing to p, in the
/// fixed enumeration order (first component descending, then recursively).
/// Count is C(n_vertices + p - 1, p). The order is part of the contract:
/// summation order determines the floating-point bits of the results.
std::vector<ExponentTuple> exponent_multisets(int n_vertices, int p);

/// Exact binomial coefficient (small arguments).
double binomial(int n, int k);

/// Largest supported Lp exponent; beyond this the powers and binomials
/// start losing double precision.
inline constexpr int kMaxP = 16;

/// Throws OddP unless p is even and 2 <= p <= kMaxP.
void validate_p(int p);

/// One integration simplex: a tetrahedron (apex w_i coned to three cell
/// vertices) or a surface triangle (three cell vertices; the apex is the
/// owning seed but not a simplex vertex). The frame is the constant
/// per-simplex factor M_T. Provenance records how each vertex depends on
/// the seeds.
struct IntegrationSimplex {
    int dim = 3;  // 3 = tetrahedron, 2 = triangle
    Vec3 apex = Vec3::Zero();
    std::array<Vec3, 3> vertices = {Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
    FrameMatrix frame;
    std::array<VertexProvenance, 3> provenance = {};

    static IntegrationSimplex tetrahedron(const Vec3& apex, const Vec3& c1, const Vec3& c2,
                                          const Vec3& c3, FrameMatrix frame = {});
    static IntegrationSimplex triangle(const Vec3& apex, const Vec3& c1, const Vec3& c2,
                                       const Vec3& c3, FrameMatrix frame = {});

    /// Transformed edge vectors U_j = M_T (C_j - apex).
    std::array<StarVector, 3> transformed_vertices() const;
};

/// Relative threshold below which a simplex measure counts as degenerate
/// (measured against max edge length ^ dim).
inline constexpr double kDegenerateMeasureRel = 1e-14;

/// Sum over all exponent tuples of component_sum(U1^a * U2^b * U3^c).
/// This is the polynomial factor of the closed-form integral.
double energy_sum(const std::array<StarVector, 3>& u, int p);

/// Closed-form integral of ||M_T (x - apex)||_p^p over the simplex:
/// measure / C(dim + p, p) * energy_sum. The measure is the simplex
/// volume (dim 3) or the area of the transformed triangle (dim 2).
/// Degenerate simplices contribute exactly 0. Throws OddP for invalid p.
double simplex_energy(const IntegrationSimplex& s, int p);

/// Symmetric p-linear form H(u1..up) = component_sum(u1 * ... * up):
/// the polar form of ||.||_p^p.
double polar_form(std::span<const StarVector> args);

/// Integral of the p-homogeneous polynomial with polar form `form` over
/// the simplex spanned by `vertices` (n+1 points, n = 2 or 3), via the
/// multiset sum over vertices. Degenerate simplices yield 0 and set
/// *degenerate when provided.
double lasserre_integrate(std::span<const Vec3> vertices, int p,
                          const std::function<double(std::span<const StarVector>)>& form,
                          bool* degenerate = nullptr);

/// Measure helpers shared with the gradient and RVD modules.
double tetra_signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);
double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);

}  // namespace lpcvt

#endif
