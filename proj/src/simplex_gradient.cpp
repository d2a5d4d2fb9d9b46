#include "lpcvt/simplex_gradient.hpp"

#include <cmath>

namespace lpcvt {

std::array<Covector, 3> energy_sum_gradient(const std::array<StarVector, 3>& u, int p) {
    if (p < 0 || p > kMaxP) {
        throw OddP("energy_sum_gradient: p out of range [0, " + std::to_string(kMaxP) + "]");
    }
    std::array<std::array<StarVector, kMaxP + 1>, 3> pow;
    for (int j = 0; j < 3; ++j) {
        pow[j][0] = StarVector(1.0, 1.0, 1.0);
        for (int a = 1; a <= p; ++a) pow[j][a] = star_product(pow[j][a - 1], u[j]);
    }
    std::array<Covector, 3> grad = {Covector::Zero(), Covector::Zero(), Covector::Zero()};
    for (int a = p; a >= 0; --a) {
        for (int b = p - a; b >= 0; --b) {
            const int c = p - a - b;
            if (a >= 1) {
                grad[0] += a * star_product(star_product(pow[0][a - 1], pow[1][b]), pow[2][c]);
            }
            if (b >= 1) {
                grad[1] += b * star_product(star_product(pow[0][a], pow[1][b - 1]), pow[2][c]);
            }
            if (c >= 1) {
                grad[2] += c * star_product(star_product(pow[0][a], pow[1][b]), pow[2][c - 1]);
            }
        }
    }
    return grad;
}

std::array<Covector, 3> volume_gradient(const std::array<StarVector, 3>& u) {
    return {u[1].cross(u[2]) / 6.0, u[2].cross(u[0]) / 6.0, u[0].cross(u[1]) / 6.0};
}

std::array<Covector, 3> area_gradient(const std::array<StarVector, 3>& u) {
    const Vec3 n = (u[0] - u[2]).cross(u[1] - u[2]);
    const double area = 0.5 * n.norm();
    double scale = 0.0;
    for (int j = 0; j < 3; ++j) scale = std::max(scale, (u[j] - u[(j + 1) % 3]).norm());
    if (area <= 1e-14 * scale * scale) {
        throw NearDegenerate("area gradient of a degenerate triangle");
    }
    const double f = -1.0 / (4.0 * area);
    return {f * n.cross(u[1] - u[2]), f * n.cross(u[2] - u[0]), f * n.cross(u[0] - u[1])};
}

SimplexVertexGradient simplex_energy_gradient(const IntegrationSimplex& s, int p) {
    validate_p(p);
    const auto u = s.transformed_vertices();

    double scale = 0.0;
    for (int j = 0; j < 3; ++j) {
        scale = std::max(scale, u[j].norm());
        scale = std::max(scale, (u[j] - u[(j + 1) % 3]).norm());
    }

    double measure = 0.0;
    std::array<Covector, 3> d_measure;
    if (s.dim == 3) {
        // No early-out for flat tetrahedra: the volume term is polynomial,
        // and taking the positively-oriented side of the |T| kink keeps the
        // summed gradient equal to the exact one when the apex lies on a
        // cell facet (e.g. a seed at a domain corner).
        const double signed_vol = u[0].cross(u[1]).dot(u[2]) / 6.0;
        measure = std::abs(signed_vol);
        d_measure = volume_gradient(u);
        if (signed_vol < 0) {
            for (auto& g : d_measure) g = -g;
        }
    } else {
        // The area gradient carries a 1/|T| factor, so flat triangles do
        // get zeroed out.
        measure = 0.5 * (u[0] - u[2]).cross(u[1] - u[2]).norm();
        if (measure <= kDegenerateMeasureRel * scale * scale) return {};
        d_measure = area_gradient(u);
    }

    const double e = energy_sum(u, p);
    const auto d_e = energy_sum_gradient(u, p);
    const double inv_binom = 1.0 / binomial(s.dim + p, p);

    SimplexVertexGradient out;
    for (int j = 0; j < 3; ++j) {
        const Covector df_du = inv_binom * (e * d_measure[j] + measure * d_e[j]);
        // dF/dC_j = dF/dU_j . M_T  (row covector times the frame)
        out.d_vertices[j] = s.frame.m.transpose() * df_du;
        out.d_apex -= out.d_vertices[j];
    }
    return out;
}

}  // namespace lpcvt
