#ifndef LPCVT_ORACLES_HPP
#define LPCVT_ORACLES_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "lpcvt/simplex.hpp"

namespace lpcvt {

/// Monte Carlo estimate of the simplex energy. Samples uniformly in
/// barycentric coordinates (sorted-uniform weights), which maps to a
/// uniform sample of the transformed simplex under the affine frame map.
struct McEstimate {
    double estimate = 0.0;
    double stderr_ = 0.0;
};
McEstimate mc_integrate(const IntegrationSimplex& s, int p, std::int64_t n_samples,
                        std::uint64_t rng_seed, int threads = 0);

/// Exact moment of x^a y^b z^c over the standard unit simplex of the
/// given dimension: a! b! c! / (a + b + c + dim)!. Throws Overflow when
/// a + b + c > 20.
double dirichlet_moment(int a, int b, int c, int dim);

/// Exact value of the simplex energy by a route independent of the
/// star-product machinery: affine substitution to the unit simplex plus
/// the Dirichlet moment formula, expanding each coordinate power with the
/// multinomial theorem.
double exact_simplex_integral(const IntegrationSimplex& s, int p);

/// Monomial c * x^e0 y^e1 z^e2 of a polynomial being polarized.
struct Monomial {
    double coef = 0.0;
    std::array<int, 3> exp = {0, 0, 0};
};

/// Derivative-based polar form: (1/p!) d^p/dl1..dlp f(sum l_i u_i),
/// evaluated by symbolic multilinear expansion of each monomial. f must
/// be p-homogeneous (every monomial of total degree p).
double polarization_oracle(const std::vector<Monomial>& f, std::span<const StarVector> args);

/// Central finite differences of a scalar function of packed seed
/// coordinates.
Eigen::MatrixX3d fd_gradient(const std::function<double(const Eigen::MatrixX3d&)>& eval_fn,
                             const Eigen::MatrixX3d& points, double h);

/// splitmix64 mix; used to derive independent per-block RNG streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace lpcvt

#endif
