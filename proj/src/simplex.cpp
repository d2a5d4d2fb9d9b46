#include "lpcvt/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace lpcvt {

StarVector star_power(const StarVector& v, int a) {
    StarVector r(1.0, 1.0, 1.0);
    for (int i = 0; i < a; ++i) r = star_product(r, v);
    return r;
}

namespace {

void enumerate_tuples(int remaining, int slots, ExponentTuple& prefix,
                      std::vector<ExponentTuple>& out) {
    if (slots == 1) {
        prefix.push_back(remaining);
        out.push_back(prefix);
        prefix.pop_back();
        return;
    }
    for (int a = remaining; a >= 0; --a) {
        prefix.push_back(a);
        enumerate_tuples(remaining - a, slots - 1, prefix, out);
        prefix.pop_back();
    }
}

}  // namespace

std::vector<ExponentTuple> exponent_multisets(int n_vertices, int p) {
    std::vector<ExponentTuple> out;
    if (n_vertices < 1 || p < 0) return out;
    ExponentTuple prefix;
    prefix.reserve(n_vertices);
    enumerate_tuples(p, n_vertices, prefix, out);
    return out;
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    k = std::min(k, n - k);
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return std::round(r);
}

void validate_p(int p) {
    if (p < 2 || p % 2 != 0) {
        throw OddP("Lp exponent must be even and >= 2, got " + std::to_string(p));
    }
    if (p > kMaxP) {
        throw OddP("Lp exponent " + std::to_string(p) + " exceeds the supported maximum " +
                   std::to_string(kMaxP));
    }
}

IntegrationSimplex IntegrationSimplex::tetrahedron(const Vec3& apex, const Vec3& c1,
                                                   const Vec3& c2, const Vec3& c3,
                                                   FrameMatrix frame) {
    IntegrationSimplex s;
    s.dim = 3;
    s.apex = apex;
    s.vertices = {c1, c2, c3};
    s.frame = frame;
    return s;
}

IntegrationSimplex IntegrationSimplex::triangle(const Vec3& apex, const Vec3& c1, const Vec3& c2,
                                                const Vec3& c3, FrameMatrix frame) {
    IntegrationSimplex s;
    s.dim = 2;
    s.apex = apex;
    s.vertices = {c1, c2, c3};
    s.frame = frame;
    return s;
}

std::array<StarVector, 3> IntegrationSimplex::transformed_vertices() const {
    return {frame.m * (vertices[0] - apex), frame.m * (vertices[1] - apex),
            frame.m * (vertices[2] - apex)};
}

double energy_sum(const std::array<StarVector, 3>& u, int p) {
    if (p < 0 || p > kMaxP) {
        throw OddP("energy_sum: p out of range [0, " + std::to_string(kMaxP) + "]");
    }
    // Power tables P[j][a] = u_j^{*a}, built by repeated star products so
    // the bits match star_power exactly.
    std::array<std::array<StarVector, kMaxP + 1>, 3> pow;
    for (int j = 0; j < 3; ++j) {
        pow[j][0] = StarVector(1.0, 1.0, 1.0);
        for (int a = 1; a <= p; ++a) pow[j][a] = star_product(pow[j][a - 1], u[j]);
    }
    // Fixed enumeration order: first exponent descending, then the second.
    double sum = 0.0;
    for (int a = p; a >= 0; --a) {
        for (int b = p - a; b >= 0; --b) {
            const int c = p - a - b;
            sum += component_sum(star_product(star_product(pow[0][a], pow[1][b]), pow[2][c]));
        }
    }
    return sum;
}

double tetra_signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    return (b - a).cross(c - a).dot(d - a) / 6.0;
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
    return 0.5 * (b - a).cross(c - a).norm();
}

namespace {

double max_edge_norm(const std::array<StarVector, 3>& u) {
    double s = 0.0;
    for (int j = 0; j < 3; ++j) {
        s = std::max(s, u[j].norm());
        s = std::max(s, (u[j] - u[(j + 1) % 3]).norm());
    }
    return s;
}

}  // namespace

double simplex_energy(const IntegrationSimplex& s, int p) {
    validate_p(p);
    const auto u = s.transformed_vertices();
    const double scale = max_edge_norm(u);

    double measure = 0.0;
    if (s.dim == 3) {
        measure = std::abs(u[0].cross(u[1]).dot(u[2])) / 6.0;
        if (measure <= kDegenerateMeasureRel * scale * scale * scale) return 0.0;
    } else {
        measure = 0.5 * (u[0] - u[2]).cross(u[1] - u[2]).norm();
        if (measure <= kDegenerateMeasureRel * scale * scale) return 0.0;
    }
    return measure / binomial(s.dim + p, p) * energy_sum(u, p);
}

double polar_form(std::span<const StarVector> args) {
    StarVector prod(1.0, 1.0, 1.0);
    for (const auto& a : args) prod = star_product(prod, a);
    return component_sum(prod);
}

double lasserre_integrate(std::span<const Vec3> vertices, int p,
                          const std::function<double(std::span<const StarVector>)>& form,
                          bool* degenerate) {
    const int n = static_cast<int>(vertices.size()) - 1;
    if (degenerate) *degenerate = false;

    double vol = 0.0;
    double scale = 0.0;
    for (int i = 1; i <= n; ++i) scale = std::max(scale, (vertices[i] - vertices[0]).norm());
    if (n == 3) {
        vol = std::abs(tetra_signed_volume(vertices[0], vertices[1], vertices[2], vertices[3]));
        if (vol <= kDegenerateMeasureRel * scale * scale * scale) {
            if (degenerate) *degenerate = true;
            return 0.0;
        }
    } else if (n == 2) {
        vol = triangle_area(vertices[0], vertices[1], vertices[2]);
        if (vol <= kDegenerateMeasureRel * scale * scale) {
            if (degenerate) *degenerate = true;
            return 0.0;
        }
    } else {
        throw Error("lasserre_integrate supports 2- and 3-simplices, got n = " +
                    std::to_string(n));
    }

    double sum = 0.0;
    std::vector<StarVector> args;
    args.reserve(p);
    for (const auto& tuple : exponent_multisets(n + 1, p)) {
        args.clear();
        for (int i = 0; i <= n; ++i) {
            for (int rep = 0; rep < tuple[i]; ++rep) args.push_back(vertices[i]);
        }
        sum += form(args);
    }
    return vol / binomial(n + p, p) * sum;
}

}  // namespace lpcvt
